//! Certified decompositions of classes into primitive effective isotropic
//! classes.
//!
//! Nothing returned here is trusted: every decomposition, frame and extremal
//! witness is recomposed and its Gram matrix checked before it leaves the
//! module.

use serde::{Deserialize, Serialize};

use crate::enumerate::AnchorFrame;
use crate::error::{Error, Result};
use crate::invariants::{min_pairing_isotropic, phi_in_frame};
use crate::lattice::{EnriquesLattice, LatticeClass};

/// Gram shapes a decomposition `Σ aᵢEᵢ` can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    /// All pairs meet in 1.
    AllOnes,
    /// `E1·E2 = 2`, every other pair 1.
    OneDouble,
    /// `E1·E2 = E1·E3 = 2`, every other pair 1.
    TwoDoubles,
}

impl Pattern {
    pub fn min_len(self) -> usize {
        match self {
            Pattern::AllOnes => 1,
            Pattern::OneDouble => 2,
            Pattern::TwoDoubles => 3,
        }
    }

    /// Target Gram matrix for `n` classes.
    pub fn gram(self, n: usize) -> Vec<Vec<i64>> {
        let mut g = vec![vec![1; n]; n];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 0;
        }
        if self != Pattern::AllOnes && n >= 2 {
            g[0][1] = 2;
            g[1][0] = 2;
        }
        if self == Pattern::TwoDoubles && n >= 3 {
            g[0][2] = 2;
            g[2][0] = 2;
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub coefficients: Vec<i64>,
    pub classes: Vec<LatticeClass>,
    pub pattern: Pattern,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn recompose(&self) -> LatticeClass {
        let mut s = LatticeClass::ZERO;
        for (a, e) in self.coefficients.iter().zip(&self.classes) {
            s += *a * *e;
        }
        s
    }
}

/// Ten isotropic classes pairing to 1 with each other and summing to `3D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropicFrame {
    pub d: LatticeClass,
    pub classes: Vec<LatticeClass>,
}

/// Coefficients and a target Gram matrix (zero diagonal, entries >= 0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramPattern {
    pub coefficients: Vec<i64>,
    pub gram: Vec<Vec<i64>>,
}

impl GramPattern {
    pub fn new(coefficients: Vec<i64>, gram: Vec<Vec<i64>>) -> Self {
        GramPattern { coefficients, gram }
    }

    pub fn from_pattern(pattern: Pattern, coefficients: Vec<i64>) -> Self {
        let n = coefficients.len();
        GramPattern {
            coefficients,
            gram: pattern.gram(n),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.coefficients.len();
        if n == 0 || n > 10 {
            return Err(Error::InvalidPattern(format!("length {n} outside 1..=10")));
        }
        if self.gram.len() != n || self.gram.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidPattern("Gram matrix shape mismatch".into()));
        }
        for i in 0..n {
            if self.coefficients[i] < 1 {
                return Err(Error::InvalidPattern(format!(
                    "coefficient {} is not positive",
                    self.coefficients[i]
                )));
            }
            if self.gram[i][i] != 0 {
                return Err(Error::InvalidPattern("Gram diagonal must be zero".into()));
            }
            for j in 0..n {
                if self.gram[i][j] != self.gram[j][i] {
                    return Err(Error::InvalidPattern("Gram matrix not symmetric".into()));
                }
                if self.gram[i][j] < 0 {
                    return Err(Error::InvalidPattern("Gram entries must be >= 0".into()));
                }
            }
        }
        Ok(())
    }

    /// `Lᵢ = Eᵢ·L` implied by the pattern.
    pub fn forced_pairings(&self) -> Vec<i64> {
        let n = self.coefficients.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.coefficients[j] * self.gram[i][j]).sum())
            .collect()
    }

    pub fn norm(&self) -> i64 {
        self.forced_pairings()
            .iter()
            .zip(&self.coefficients)
            .map(|(t, a)| t * a)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternMatch {
    pub coefficients: Vec<i64>,
    pub classes: Vec<LatticeClass>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalTag {
    /// `L = h(E1+E2)`.
    I,
    /// `L = h(E1+E2)+E3`.
    IiA,
    /// `L = (h+1)E1+hE2+E3`.
    IiB,
    /// `L = 2(E1+E2+E3)`.
    IiC,
}

impl ExtremalTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtremalTag::I => "i",
            ExtremalTag::IiA => "ii_a",
            ExtremalTag::IiB => "ii_b",
            ExtremalTag::IiC => "ii_c",
        }
    }
}

/// Witnesses with `E1·E2 = E1·E3 = 2`, `E2·E3 = 1` (no `E3` in case i).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalCase {
    pub tag: ExtremalTag,
    pub h: i64,
    pub e1: LatticeClass,
    pub e2: LatticeClass,
    pub e3: Option<LatticeClass>,
}

impl ExtremalCase {
    pub fn recompose(&self) -> LatticeClass {
        let e3 = self.e3.unwrap_or(LatticeClass::ZERO);
        let h = self.h;
        match self.tag {
            ExtremalTag::I => h * (self.e1 + self.e2),
            ExtremalTag::IiA => h * (self.e1 + self.e2) + e3,
            ExtremalTag::IiB => (h + 1) * self.e1 + h * self.e2 + e3,
            ExtremalTag::IiC => 2 * (self.e1 + self.e2 + e3),
        }
    }
}

fn check_classes(
    lat: &EnriquesLattice,
    classes: &[LatticeClass],
    gram: &[Vec<i64>],
) -> std::result::Result<(), String> {
    for e in classes {
        if !lat.is_isotropic_effective(e) {
            return Err(format!("{e} is not a primitive effective isotropic class"));
        }
    }
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            let p = lat.pairing(&classes[i], &classes[j]);
            if p != gram[i][j] {
                return Err(format!(
                    "pairing of classes {} and {} is {p}, expected {}",
                    i + 1,
                    j + 1,
                    gram[i][j]
                ));
            }
        }
    }
    Ok(())
}

/// Recomposition, primitivity/effectivity/isotropy and the Gram pattern.
pub fn verify_decomposition(
    lat: &EnriquesLattice,
    l: &LatticeClass,
    d: &Decomposition,
) -> Result<()> {
    let fail = |m: String| Err(Error::TheoremViolation(format!("decomposition of {l}: {m}")));
    let n = d.classes.len();
    if n == 0 || n > 10 || d.coefficients.len() != n {
        return fail(format!("bad length {n}"));
    }
    if n < d.pattern.min_len() {
        return fail(format!("{:?} needs at least {} classes", d.pattern, d.pattern.min_len()));
    }
    if d.coefficients.iter().any(|&a| a < 1) {
        return fail("non-positive coefficient".into());
    }
    if let Err(m) = check_classes(lat, &d.classes, &d.pattern.gram(n)) {
        return fail(m);
    }
    if d.recompose() != *l {
        return fail(format!("recomposes to {}", d.recompose()));
    }
    Ok(())
}

pub fn verify_frame(lat: &EnriquesLattice, f: &IsotropicFrame) -> Result<()> {
    let fail = |m: String| Err(Error::TheoremViolation(format!("frame of {}: {m}", f.d)));
    if f.classes.len() != 10 {
        return fail(format!("{} classes", f.classes.len()));
    }
    if let Err(m) = check_classes(lat, &f.classes, &Pattern::AllOnes.gram(10)) {
        return fail(m);
    }
    let mut s = LatticeClass::ZERO;
    for c in &f.classes {
        s += *c;
    }
    if s != 3 * f.d {
        return fail(format!("sum is {s}, expected 3D"));
    }
    Ok(())
}

pub fn verify_extremal(lat: &EnriquesLattice, l: &LatticeClass, x: &ExtremalCase) -> Result<()> {
    let fail = |m: String| Err(Error::TheoremViolation(format!("extremal witness of {l}: {m}")));
    if x.h < 1 {
        return fail(format!("h = {}", x.h));
    }
    let mut classes = vec![x.e1, x.e2];
    match (x.tag, x.e3) {
        (ExtremalTag::I, None) => {}
        (ExtremalTag::I, Some(_)) => return fail("case i carries no third class".into()),
        (_, Some(e3)) => classes.push(e3),
        (_, None) => return fail("missing third class".into()),
    }
    let gram = vec![vec![0, 2, 2], vec![2, 0, 1], vec![2, 1, 0]];
    if let Err(m) = check_classes(lat, &classes, &gram) {
        return fail(m);
    }
    if x.tag == ExtremalTag::IiC && x.h != 2 {
        return fail("case ii_c has h = 2".into());
    }
    if x.recompose() != *l {
        return fail(format!("recomposes to {}", x.recompose()));
    }
    Ok(())
}

/// Effective isotropic `E1..En` with the pattern's Gram matrix and
/// `Σ cᵢEᵢ = L`, lexicographically minimal slot by slot. `budget` caps the
/// forced pairing `Eᵢ·L` of any slot; `None` means none exists within it.
pub fn search_pattern(
    lat: &EnriquesLattice,
    l: &LatticeClass,
    p: &GramPattern,
    budget: Option<i64>,
) -> Result<Option<PatternMatch>> {
    p.validate()?;
    l.check_range()?;
    let n = p.coefficients.len();
    let l2 = lat.norm(l);
    if p.norm() != l2 {
        return Ok(None);
    }
    if l2 == 0 {
        if n != 1 {
            return Ok(None);
        }
        let found = l
            .div_exact(p.coefficients[0])
            .filter(|e| lat.is_isotropic_effective(e));
        return Ok(found.map(|e| PatternMatch {
            coefficients: p.coefficients.clone(),
            classes: vec![e],
        }));
    }
    if l2 < 0 || !lat.is_num_effective(l) {
        return Ok(None);
    }
    let budget = budget.unwrap_or(l2);
    let t = p.forced_pairings();
    if t.iter().any(|&ti| ti < 1 || ti > budget) {
        return Ok(None);
    }
    let derived = (0..n).rev().max_by_key(|&i| (t[i], i)).unwrap_or(0);
    let frame = AnchorFrame::new(lat, l)?;
    let mut candidates: Vec<Vec<LatticeClass>> = vec![Vec::new(); n];
    for i in 0..n {
        if i != derived {
            candidates[i] = frame.collect(0, t[i], true, true)?;
        }
    }
    let order: Vec<usize> = (0..n).filter(|&i| i != derived).collect();
    let mut chosen = vec![LatticeClass::ZERO; n];
    let found = backtrack(lat, l, p, &candidates, &order, derived, 0, &mut chosen);
    Ok(found.then(|| PatternMatch {
        coefficients: p.coefficients.clone(),
        classes: chosen,
    }))
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    lat: &EnriquesLattice,
    l: &LatticeClass,
    p: &GramPattern,
    candidates: &[Vec<LatticeClass>],
    order: &[usize],
    derived: usize,
    depth: usize,
    chosen: &mut [LatticeClass],
) -> bool {
    if depth == order.len() {
        let mut rest = *l;
        for &i in order {
            rest -= p.coefficients[i] * chosen[i];
        }
        let Some(e) = rest.div_exact(p.coefficients[derived]) else {
            return false;
        };
        if !lat.is_isotropic_effective(&e) {
            return false;
        }
        if order.iter().any(|&i| lat.pairing(&e, &chosen[i]) != p.gram[derived][i]) {
            return false;
        }
        chosen[derived] = e;
        return true;
    }
    let slot = order[depth];
    for cand in &candidates[slot] {
        if order[..depth]
            .iter()
            .any(|&j| lat.pairing(cand, &chosen[j]) != p.gram[slot][j])
        {
            continue;
        }
        chosen[slot] = *cand;
        if backtrack(lat, l, p, candidates, order, derived, depth + 1, chosen) {
            return true;
        }
    }
    false
}

fn decomposition_from_match(m: PatternMatch, pattern: Pattern) -> Decomposition {
    Decomposition {
        coefficients: m.coefficients,
        classes: m.classes,
        pattern,
    }
}

/// Rewrites `D1 = Σ aᵢEᵢ` (a decomposition of `L - F`) into one of `L`.
/// `None` when the expected configuration does not occur.
fn absorb(
    lat: &EnriquesLattice,
    l: &LatticeClass,
    phi: i64,
    d1: &Decomposition,
    f: &LatticeClass,
) -> Result<Option<Decomposition>> {
    let n = d1.classes.len();
    let p: Vec<i64> = d1.classes.iter().map(|e| lat.pairing(f, e)).collect();
    let a = &d1.coefficients;
    let e = &d1.classes;

    if let Some(i) = p.iter().position(|&x| x == 0) {
        if e[i] != *f {
            return Ok(None);
        }
        let mut out = d1.clone();
        out.coefficients[i] += 1;
        return Ok(Some(out));
    }
    if p.iter().all(|&x| x == 1) {
        if n == 10 {
            return Ok(None);
        }
        let mut out = d1.clone();
        out.coefficients.push(1);
        out.classes.push(*f);
        return Ok(Some(out));
    }
    let doubled: Vec<usize> = (0..n).filter(|&i| p[i] >= 2).collect();
    let out = match d1.pattern {
        Pattern::AllOnes => {
            if n != 1 || a[0] != 1 || p[0] != 2 {
                return Ok(None);
            }
            Decomposition {
                coefficients: vec![1, 1],
                classes: vec![e[0], *f],
                pattern: Pattern::OneDouble,
            }
        }
        Pattern::OneDouble if n >= 3 => {
            let l2 = lat.norm(l);
            if l2 != phi * phi || phi % 2 != 0 {
                return Ok(None);
            }
            let h = phi / 2;
            let Some(e2) = l.div_exact(h).map(|x| x - *f) else {
                return Ok(None);
            };
            Decomposition {
                coefficients: vec![h, h],
                classes: vec![*f, e2],
                pattern: Pattern::OneDouble,
            }
        }
        Pattern::OneDouble => {
            if doubled.len() != 1 {
                return Ok(None);
            }
            let j = doubled[0];
            let o = 1 - j;
            if p[j] != 2 || p[o] != 1 || a[o] != 1 {
                return Ok(None);
            }
            Decomposition {
                coefficients: vec![a[j], 1, 1],
                classes: vec![e[j], *f, e[o]],
                pattern: Pattern::TwoDoubles,
            }
        }
        Pattern::TwoDoubles => {
            if n != 3 {
                return Ok(None);
            }
            if p[0] >= 2 {
                if p[0] != 2 || p[1] != 1 || p[2] != 1 || a.iter().any(|&x| x != 1) {
                    return Ok(None);
                }
                let rest = *l - 2 * *f;
                if lat.norm(&rest) != 2 {
                    return Ok(None);
                }
                let g1 = min_pairing_isotropic(lat, &rest)?.class;
                let g2 = rest - g1;
                Decomposition {
                    coefficients: vec![2, 1, 1],
                    classes: vec![*f, g1, g2],
                    pattern: Pattern::TwoDoubles,
                }
            } else {
                let dbl: Vec<usize> = (1..3).filter(|&i| p[i] >= 2).collect();
                if dbl.len() != 1 {
                    return Ok(None);
                }
                let j = dbl[0];
                let o = 3 - j;
                if p[j] != 2 || a[j] != 1 {
                    return Ok(None);
                }
                let b = a[0];
                // E1 + E_o and F + F3 are numerically equal
                let f3 = e[0] + e[o] - *f;
                if a[o] == b {
                    Decomposition {
                        coefficients: vec![b + 1, b, 1],
                        classes: vec![*f, f3, e[j]],
                        pattern: Pattern::TwoDoubles,
                    }
                } else if a[o] == b - 1 {
                    let fp = *l - b * *f - b * f3;
                    Decomposition {
                        coefficients: vec![b, b, 1],
                        classes: vec![f3, *f, fp],
                        pattern: Pattern::TwoDoubles,
                    }
                } else {
                    return Ok(None);
                }
            }
        }
    };
    Ok(Some(out))
}

/// Coefficient vectors of length `n` (entries in `1..=max`) whose pattern
/// norm equals `l2` and whose forced pairings are all at least `phi`.
fn candidate_shapes(pattern: Pattern, n: usize, l2: i64, phi: i64) -> Vec<Vec<i64>> {
    let gram = pattern.gram(n);
    let max = (l2 / phi.max(1)).max(1);
    let mut out = Vec::new();
    let mut a = vec![1i64; n];
    loop {
        let gp = GramPattern::new(a.clone(), gram.clone());
        if gp.norm() == l2 && gp.forced_pairings().iter().all(|&t| t >= phi) {
            out.push(a.clone());
        }
        let mut k = 0;
        while k < n {
            a[k] += 1;
            if a[k] <= max {
                break;
            }
            a[k] = 1;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    out
}

fn pattern_fallback(lat: &EnriquesLattice, l: &LatticeClass, phi: i64) -> Result<Option<Decomposition>> {
    let l2 = lat.norm(l);
    for pattern in [Pattern::AllOnes, Pattern::OneDouble, Pattern::TwoDoubles] {
        for n in pattern.min_len().max(2)..=3 {
            for a in candidate_shapes(pattern, n, l2, phi) {
                let gp = GramPattern::from_pattern(pattern, a);
                if let Some(m) = search_pattern(lat, l, &gp, None)? {
                    return Ok(Some(decomposition_from_match(m, pattern)));
                }
            }
        }
    }
    Ok(None)
}

fn decompose_rec(lat: &EnriquesLattice, l: &LatticeClass) -> Result<Decomposition> {
    let l2 = lat.norm(l);
    if l2 == 0 {
        let g = l.content();
        let e = l.div_exact(g).expect("content divides");
        if !lat.is_isotropic_effective(&e) {
            return Err(Error::InvalidInput(format!("{l} is not effective")));
        }
        return Ok(Decomposition {
            coefficients: vec![g],
            classes: vec![e],
            pattern: Pattern::AllOnes,
        });
    }
    let frame = AnchorFrame::new(lat, l)?;
    let phi = phi_in_frame(&frame)?.value;
    for f in frame.collect(0, phi, true, true)? {
        let rest = *l - f;
        if !lat.is_num_effective(&rest) {
            continue;
        }
        let Ok(d1) = decompose_rec(lat, &rest) else {
            continue;
        };
        if let Some(d) = absorb(lat, l, phi, &d1, &f)? {
            if verify_decomposition(lat, l, &d).is_ok() {
                return Ok(d);
            }
        }
    }
    if let Some(d) = pattern_fallback(lat, l, phi)? {
        verify_decomposition(lat, l, &d)?;
        return Ok(d);
    }
    Err(Error::DecompositionNotFound(format!(
        "{l} (L² = {l2}, φ = {phi}) has no decomposition with at most 3 classes in the fallback search"
    )))
}

/// `L = Σ aᵢEᵢ` with primitive effective isotropic `Eᵢ` in one of the three
/// Gram shapes, built by peeling off a φ-realizer and repairing the shape.
pub fn isotropic_decompose(lat: &EnriquesLattice, l: &LatticeClass) -> Result<Decomposition> {
    l.check_range()?;
    if l.is_zero() || lat.norm(l) < 0 || !lat.is_num_effective(l) {
        return Err(Error::InvalidInput(format!(
            "{l} is not effective with non-negative square"
        )));
    }
    let d = decompose_rec(lat, l)?;
    verify_decomposition(lat, l, &d)?;
    Ok(d)
}

/// The ten isotropic classes of degree 3 on `D` (`D² = 10`, `φ(D) = 3`).
pub fn ten_frame(lat: &EnriquesLattice, d: &LatticeClass) -> Result<IsotropicFrame> {
    d.check_range()?;
    let d2 = lat.norm(d);
    if d2 != 10 || !lat.is_num_effective(d) {
        return Err(Error::InvalidInput(format!("{d} has square {d2}, expected effective with 10")));
    }
    let phi = min_pairing_isotropic(lat, d)?.value;
    if phi != 3 {
        return Err(Error::InvalidInput(format!("φ({d}) = {phi}, expected 3")));
    }
    let classes = AnchorFrame::new(lat, d)?.collect(0, 3, true, true)?;
    if classes.len() != 10 {
        return Err(Error::TheoremViolation(format!(
            "{d} has {} isotropic classes of degree 3, expected 10",
            classes.len()
        )));
    }
    let frame = IsotropicFrame { d: *d, classes };
    verify_frame(lat, &frame)?;
    Ok(frame)
}

fn extremal_gram() -> Vec<Vec<i64>> {
    vec![vec![0, 2, 2], vec![2, 0, 1], vec![2, 1, 0]]
}

/// The witnesses for a class with `L² = φ²` or `L² = φ² + φ - 2`.
pub fn extremal_decompose(lat: &EnriquesLattice, l: &LatticeClass) -> Result<ExtremalCase> {
    let w = min_pairing_isotropic(lat, l)?;
    let phi = w.value;
    let l2 = lat.norm(l);
    let top = phi * phi + phi - 2;
    if l2 > top && l2 != phi * phi {
        return Err(Error::InvalidInput(format!(
            "L² = {l2} exceeds φ² + φ - 2 = {top}"
        )));
    }
    let found = if l2 == phi * phi {
        if phi % 2 != 0 {
            return Err(Error::TheoremViolation(format!("L² = φ² with odd φ = {phi}")));
        }
        let h = phi / 2;
        let base = l.div_exact(h);
        let mut hit = None;
        if let Some(base) = base {
            for e1 in AnchorFrame::new(lat, l)?.collect(0, phi, true, true)? {
                let e2 = base - e1;
                if lat.is_isotropic_effective(&e2) && lat.pairing(&e1, &e2) == 2 {
                    hit = Some(ExtremalCase {
                        tag: ExtremalTag::I,
                        h,
                        e1,
                        e2,
                        e3: None,
                    });
                    break;
                }
            }
        }
        hit
    } else if l2 < top {
        return Err(Error::TheoremViolation(format!(
            "φ² < L² < φ² + φ - 2 with L² = {l2}, φ = {phi}"
        )));
    } else {
        let mut hit = None;
        let mut shapes: Vec<(ExtremalTag, i64, LatticeClass, Vec<i64>)> = Vec::new();
        if phi % 2 == 1 {
            let h = (phi - 1) / 2;
            shapes.push((ExtremalTag::IiA, h, *l, vec![h, h, 1]));
        } else if phi >= 4 {
            let h = (phi - 2) / 2;
            shapes.push((ExtremalTag::IiB, h, *l, vec![h + 1, h, 1]));
        }
        if l2 == 40 && phi == 6 {
            if let Some(d) = l.div_exact(2) {
                shapes.push((ExtremalTag::IiC, 2, d, vec![1, 1, 1]));
            }
        }
        for (tag, h, target, coeffs) in shapes {
            let gp = GramPattern::new(coeffs, extremal_gram());
            if let Some(m) = search_pattern(lat, &target, &gp, None)? {
                hit = Some(ExtremalCase {
                    tag,
                    h,
                    e1: m.classes[0],
                    e2: m.classes[1],
                    e3: Some(m.classes[2]),
                });
                break;
            }
        }
        hit
    };
    let Some(x) = found else {
        return Err(Error::DecompositionNotFound(format!(
            "no extremal witnesses for {l} (L² = {l2}, φ = {phi})"
        )));
    };
    verify_extremal(lat, l, &x)?;
    Ok(x)
}

/// Primitive effective isotropic classes with prescribed mutual pairings,
/// chosen deterministically: the first is `f`, later ones are the
/// lexicographically smallest consistent choices of smallest degree.
pub fn realize_gram(lat: &EnriquesLattice, gram: &[Vec<i64>]) -> Result<Vec<LatticeClass>> {
    let n = gram.len();
    let unsat = |m: String| Error::UnsatisfiablePairingSpec(m);
    if n == 0 || n > 10 {
        return Err(unsat(format!("{n} generators, expected 1..=10")));
    }
    for i in 0..n {
        if gram[i].len() != n || gram[i][i] != 0 {
            return Err(unsat("pairing matrix must be square with zero diagonal".into()));
        }
        for j in 0..n {
            if gram[i][j] != gram[j][i] {
                return Err(unsat("pairing matrix must be symmetric".into()));
            }
            if gram[i][j] < 0 {
                return Err(unsat(format!(
                    "effective isotropic classes pair non-negatively, got {}",
                    gram[i][j]
                )));
            }
        }
    }
    let wide: Vec<Vec<i128>> = gram
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let (pos, _, _) = crate::linalg::inertia(&wide)?;
    if pos > 1 {
        return Err(unsat("pairings span a form with more than one positive direction".into()));
    }
    let h0 = lat.reference_ample();
    let h0_frame = AnchorFrame::new(lat, &h0)?;
    let first = h0_frame
        .collect(0, 1, true, true)?
        .into_iter()
        .next()
        .ok_or_else(|| unsat("no isotropic class of degree 1 on the reference class".into()))?;
    let mut chosen = vec![first];
    if n == 1 {
        return Ok(chosen);
    }
    let max_degree = 8 + gram.iter().flatten().sum::<i64>();
    let mut work = REALIZE_BUDGET;
    for t in 1..=max_degree {
        let Some(cands) = bounded_candidates(&h0_frame, t, &mut work)? else {
            break;
        };
        for e2 in cands {
            if lat.pairing(&e2, &first) != gram[0][1] {
                continue;
            }
            chosen.push(e2);
            if extend_realization(lat, gram, &mut chosen, &mut work)? {
                return Ok(chosen);
            }
            chosen.pop();
        }
    }
    Err(unsat(format!(
        "no realization found (second generator of degree <= {max_degree} on the reference class, \
         at most {REALIZE_BUDGET} candidates examined)"
    )))
}

/// Upper limit on candidate classes examined by one [`realize_gram`] call.
pub const REALIZE_BUDGET: u64 = 2_000_000;

/// Sorted primitive effective isotropic classes of degree `c` on the frame's
/// anchor, or `None` when collecting them would exhaust `work`.
fn bounded_candidates(frame: &AnchorFrame<'_>, c: i64, work: &mut u64) -> Result<Option<Vec<LatticeClass>>> {
    let mut out = Vec::new();
    let mut over = false;
    frame.visit_while(0, c, true, true, |x| {
        if *work == 0 {
            over = true;
            return false;
        }
        *work -= 1;
        out.push(*x);
        true
    })?;
    if over {
        return Ok(None);
    }
    out.sort_unstable();
    Ok(Some(out))
}

fn extend_realization(
    lat: &EnriquesLattice,
    gram: &[Vec<i64>],
    chosen: &mut Vec<LatticeClass>,
    work: &mut u64,
) -> Result<bool> {
    let k = chosen.len();
    if k == gram.len() {
        return Ok(true);
    }
    let mut anchor = LatticeClass::ZERO;
    for e in chosen.iter() {
        anchor += *e;
    }
    if lat.norm(&anchor) <= 0 {
        // all previous generators coincide; any later one pairing 0 with them does too
        if gram[0][k] == 0 {
            chosen.push(chosen[0]);
            if extend_realization(lat, gram, chosen, work)? {
                return Ok(true);
            }
            chosen.pop();
        }
        return Ok(false);
    }
    let c: i64 = (0..k).map(|i| gram[i][k]).sum();
    if c == 0 {
        return Ok(false);
    }
    let Some(cands) = bounded_candidates(&AnchorFrame::new(lat, &anchor)?, c, work)? else {
        return Ok(false);
    };
    for cand in cands {
        if (0..k).any(|i| lat.pairing(&cand, &chosen[i]) != gram[i][k]) {
            continue;
        }
        chosen.push(cand);
        if extend_realization(lat, gram, chosen, work)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}
