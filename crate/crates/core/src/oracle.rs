//! Brute-force reference for the enumerator, independent of the coset and
//! reduction machinery.
//!
//! A class is written `x = a·e + b·f + r` with `r` in the E8(-1) summand. The
//! E8 part is searched in the Euclidean model
//! `E8 = D8 ∪ (D8 + ½·1)` using doubled coordinates `y = 2v`, with only a
//! norm budget and a Cauchy–Schwarz feasibility test as pruning. Every
//! solution lies in a coordinate box whose radius is certified from the
//! dual basis.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{e8_cartan, EnriquesLattice, LatticeClass, RANK};
use crate::linalg::{self, isqrt_i64, qsqrt_ceil, Q};

/// Coordinates `x` with `|x_i| <= radius` for every `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateBox {
    pub radius: i64,
}

/// Doubled simple roots `2α_i` in the Euclidean model, Bourbaki numbering.
pub fn doubled_simple_roots() -> [[i64; 8]; 8] {
    let mut a = [[0i64; 8]; 8];
    a[0] = [1, -1, -1, -1, -1, -1, -1, 1];
    a[1] = [2, 2, 0, 0, 0, 0, 0, 0];
    a[2] = [-2, 2, 0, 0, 0, 0, 0, 0];
    for i in 3..8 {
        a[i][i - 1] = 2;
        a[i][i - 2] = -2;
    }
    a
}

struct E8Model {
    roots2: [[i64; 8]; 8],
    /// `4 r = to_root4 · y` for the root coordinates `r` of `y`.
    to_root4: [[i64; 8]; 8],
}

impl E8Model {
    fn new() -> Self {
        let c = e8_cartan();
        let cq: Vec<Vec<Q>> = c
            .iter()
            .map(|r| r.iter().map(|&v| Q::from_integer(v as i128)).collect())
            .collect();
        let inv = linalg::inverse(&cq).unwrap().expect("E8 Cartan is invertible");
        let roots2 = doubled_simple_roots();
        // (C r)_i = α_i·v = (2α_i)·(2v) / 4, so 4r = C⁻¹ · roots2 · y
        let mut to_root4 = [[0i64; 8]; 8];
        for i in 0..8 {
            for k in 0..8 {
                let mut acc = Q::from_integer(0);
                for j in 0..8 {
                    acc += inv[i][j] * Q::from_integer(roots2[j][k] as i128);
                }
                assert!(acc.is_integer());
                to_root4[i][k] = *acc.numer() as i64;
            }
        }
        E8Model { roots2, to_root4 }
    }

    /// Doubled Euclidean vector of `Σ r_i α_i`.
    fn to_doubled(&self, r: &[i64]) -> [i64; 8] {
        let mut y = [0i64; 8];
        for (ri, root) in r.iter().zip(self.roots2.iter()) {
            for k in 0..8 {
                y[k] += ri * root[k];
            }
        }
        y
    }

    /// Column `k` of `to_root4`.
    fn column(&self, k: usize) -> [i64; 8] {
        std::array::from_fn(|i| self.to_root4[i][k])
    }

    /// Root coordinates of the doubled vector `y`, if it lies in E8.
    #[cfg(test)]
    fn to_roots(&self, y: &[i64; 8]) -> Option<[i64; 8]> {
        let mut r = [0i64; 8];
        for i in 0..8 {
            let v: i64 = (0..8).map(|k| self.to_root4[i][k] * y[k]).sum();
            if v % 4 != 0 {
                return None;
            }
            r[i] = v / 4;
        }
        Some(r)
    }
}

fn require_standard(lat: &EnriquesLattice) -> Result<()> {
    if lat.gram() != EnriquesLattice::standard().gram() {
        return Err(Error::InvalidInput(
            "the reference search only models the standard lattice".into(),
        ));
    }
    Ok(())
}

/// A radius containing every `x` with `x² = s`, `x·L = c`.
///
/// Writing the coordinate functional as `u_i = G⁻¹ e_i` and splitting along
/// `L`: `|x_i| <= |c L_i| / L² + sqrt((c²/L² - s)(L_i²/L² - (G⁻¹)_ii))`.
pub fn certified_coordinate_bound(
    lat: &EnriquesLattice,
    anchor: &LatticeClass,
    s: i64,
    c: i64,
) -> Result<CoordinateBox> {
    let l2 = lat.norm(anchor);
    if l2 <= 0 {
        return Err(Error::InvalidAnchor(l2));
    }
    if (s as i128) * (l2 as i128) > (c as i128) * (c as i128) {
        return Err(Error::InfeasibleQuery(format!(
            "s*L^2 = {} exceeds c^2 = {}",
            s * l2,
            c * c
        )));
    }
    let ginv = lat
        .inverse_gram()?
        .ok_or_else(|| Error::InvalidInput("Gram inverse is not integral".into()))?;
    let l2q = Q::from_integer(l2 as i128);
    let slack = Q::from_integer((c as i128) * (c as i128)) / l2q - Q::from_integer(s as i128);
    let mut radius = 0i128;
    for i in 0..RANK {
        let li = anchor[i] as i128;
        let lin = Q::from_integer((c as i128 * li).abs()) / l2q;
        let spread = Q::from_integer(li * li) / l2q - Q::from_integer(ginv[i][i] as i128);
        let rad = if spread.is_negative() || slack.is_negative() {
            0
        } else {
            qsqrt_ceil(&(slack * spread))?
        };
        radius = radius.max(lin.ceil().to_integer() + rad);
    }
    if radius > 1 << 20 {
        return Err(Error::Overflow(format!("box radius {radius} too large")));
    }
    Ok(CoordinateBox {
        radius: radius as i64,
    })
}

struct Walk<'a, F: FnMut(&[i64; 8])> {
    yl: [i64; 8],
    tail_norm: [i64; 9],
    parity: i64,
    cols: [[i64; 8]; 8],
    /// `acc[j] = 4 · (root coordinates of y_0..y_{j-1})`.
    acc: [[i64; 8]; 9],
    ysum: i64,
    out: &'a mut F,
}

impl<F: FnMut(&[i64; 8])> Walk<'_, F> {
    fn feasible(&self, j: usize, rem: i64, lin: i64) -> bool {
        let u = self.tail_norm[j];
        if u == 0 {
            lin == 0
        } else {
            (lin as i128) * (lin as i128) <= (rem as i128) * (u as i128)
        }
    }

    fn fix(&mut self, j: usize, v: i64) {
        for i in 0..8 {
            self.acc[j + 1][i] = self.acc[j][i] + v * self.cols[j][i];
        }
    }

    fn go(&mut self, j: usize, rem: i64, lin: i64) {
        if j == 7 {
            let t = isqrt_i64(rem);
            if t * t != rem || t.rem_euclid(2) != self.parity {
                return;
            }
            let roots = [-t, t];
            for &v in if t == 0 { &roots[1..] } else { &roots[..] } {
                // the coordinate sum condition cuts E8 out of the parity class
                if v * self.yl[7] == lin && (self.ysum + v).rem_euclid(4) == 0 {
                    self.fix(7, v);
                    let a = &self.acc[8];
                    if a.iter().all(|x| x % 4 == 0) {
                        let r: [i64; 8] = std::array::from_fn(|i| a[i] / 4);
                        (self.out)(&r);
                    }
                }
            }
            return;
        }
        let m = isqrt_i64(rem);
        let mut v = -m;
        if v.rem_euclid(2) != self.parity {
            v += 1;
        }
        while v <= m {
            let r2 = rem - v * v;
            let l2 = lin - v * self.yl[j];
            if self.feasible(j + 1, r2, l2) {
                self.fix(j, v);
                self.ysum += v;
                self.go(j + 1, r2, l2);
                self.ysum -= v;
            }
            v += 2;
        }
    }
}

/// Every class in `bx` with `x² = s` and `x·L = c` passing the filters.
/// Works on the standard lattice only.
#[allow(clippy::too_many_arguments)]
pub fn box_solutions_with(
    lat: &EnriquesLattice,
    anchor: &LatticeClass,
    s: i64,
    c: i64,
    bx: CoordinateBox,
    primitive_only: bool,
    effective_only: bool,
    mut visit: impl FnMut(&LatticeClass),
) -> Result<u64> {
    require_standard(lat)?;
    let model = E8Model::new();
    let (al, bl) = (anchor[0], anchor[1]);
    let yl = model.to_doubled(&anchor.0[2..]);
    let mut tail_norm = [0i64; 9];
    for j in (0..8).rev() {
        tail_norm[j] = tail_norm[j + 1] + yl[j] * yl[j];
    }
    let cols: [[i64; 8]; 8] = std::array::from_fn(|k| model.column(k));
    let r = bx.radius;
    let mut count = 0u64;
    for a in -r..=r {
        for b in -r..=r {
            let n = 2 * a * b - s;
            // x·h0 = a + b on the standard lattice
            if n < 0 || (effective_only && a + b <= 0) {
                continue;
            }
            // E8 part v needs |v|² = n and v·vL = k
            let k = a * bl + b * al - c;
            let (rem, lin) = (4 * n, 4 * k);
            if tail_norm[0] == 0 {
                if lin != 0 {
                    continue;
                }
            } else if (lin as i128) * (lin as i128) > (rem as i128) * (tail_norm[0] as i128) {
                continue;
            }
            for parity in 0..2 {
                let mut emit = |roots: &[i64; 8]| {
                    if roots.iter().any(|v| v.abs() > r) {
                        return;
                    }
                    let mut x = LatticeClass::ZERO;
                    x[0] = a;
                    x[1] = b;
                    x.0[2..].copy_from_slice(roots);
                    if primitive_only && x.content() != 1 {
                        return;
                    }
                    // x² = s >= 0 here and x·h0 = a + b > 0 was required above
                    if effective_only && s < 0 {
                        return;
                    }
                    count += 1;
                    visit(&x);
                };
                let mut walk = Walk {
                    yl,
                    tail_norm,
                    parity,
                    cols,
                    acc: [[0; 8]; 9],
                    ysum: 0,
                    out: &mut emit,
                };
                walk.go(0, rem, lin);
            }
        }
    }
    Ok(count)
}

/// Sorted version of [`box_solutions_with`] using the certified box.
pub fn box_solutions(
    lat: &EnriquesLattice,
    anchor: &LatticeClass,
    s: i64,
    c: i64,
    primitive_only: bool,
    effective_only: bool,
) -> Result<Vec<LatticeClass>> {
    let bx = certified_coordinate_bound(lat, anchor, s, c)?;
    let mut out = Vec::new();
    box_solutions_with(lat, anchor, s, c, bx, primitive_only, effective_only, |x| {
        out.push(*x)
    })?;
    out.sort_unstable();
    Ok(out)
}

/// φ by scanning degrees upward with the reference search.
pub fn naive_phi(lat: &EnriquesLattice, l: &LatticeClass) -> Result<(i64, LatticeClass)> {
    let l2 = lat.norm(l);
    if l2 <= 0 || !lat.is_num_effective(l) {
        return Err(Error::InvalidInput(format!("{l} is not effective of positive square")));
    }
    let mut c = 1;
    while c * c <= l2 {
        if let Some(f) = box_solutions(lat, l, 0, c, true, true)?.into_iter().next() {
            return Ok((c, f));
        }
        c += 1;
    }
    Err(Error::TheoremViolation(format!("no isotropic class of degree <= sqrt({l2}) on {l}")))
}

/// μ by scanning `B·L` upward to `cap`; `None` if nothing qualifies.
pub fn naive_mu(
    lat: &EnriquesLattice,
    l: &LatticeClass,
    cap: i64,
) -> Result<Option<(i64, LatticeClass)>> {
    let l2 = lat.norm(l);
    if l2 <= 0 {
        return Err(Error::InvalidAnchor(l2));
    }
    let mut c = 1i64;
    while c <= cap {
        if 4 * (l2 as i128) <= (c as i128) * (c as i128) {
            for b in box_solutions(lat, l, 4, c, false, true)? {
                if b == *l {
                    continue;
                }
                if box_solutions(lat, &b, 0, 1, true, true)?.is_empty() {
                    return Ok(Some((c - 2, b)));
                }
            }
        }
        c += 1;
    }
    Ok(None)
}

/// Stable 128-bit key of a class with small coordinates (12 bits each).
pub fn pack_key(x: &LatticeClass) -> Option<u128> {
    let mut k = 0u128;
    for &c in x.0.iter() {
        if !(-2048..2048).contains(&c) {
            return None;
        }
        k = (k << 12) | ((c + 2048) as u128);
    }
    Some(k)
}

/// One query on which the enumerator and the box search disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub anchor: LatticeClass,
    pub s: i64,
    pub c: i64,
    pub enumerator_count: u64,
    pub oracle_count: u64,
    /// A few classes found by only one side.
    pub only_enumerator: Vec<LatticeClass>,
    pub only_oracle: Vec<LatticeClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityReport {
    pub radius: i64,
    pub seed: u64,
    pub anchors: Vec<LatticeClass>,
    pub queries: u64,
    /// Queries skipped because `s·L² > c²` makes them infeasible.
    pub infeasible: u64,
    pub solutions_compared: u64,
    pub discrepancies: Vec<Discrepancy>,
    pub elapsed_ms: u64,
}

/// Norms and degrees compared by [`parity_check`].
pub const PARITY_NORMS: [i64; 2] = [0, 4];
pub const PARITY_MAX_DEGREE: i64 = 8;

fn sorted_diff(a: &[LatticeClass], b: &[LatticeClass]) -> Vec<LatticeClass> {
    a.iter()
        .filter(|x| b.binary_search(x).is_err())
        .take(5)
        .copied()
        .collect()
}

fn compare_query(
    lat: &EnriquesLattice,
    anchor: &LatticeClass,
    s: i64,
    c: i64,
) -> Result<(u64, Option<Discrepancy>)> {
    let frame = crate::enumerate::AnchorFrame::new(lat, anchor)?;
    let bx = certified_coordinate_bound(lat, anchor, s, c)?;
    let mut fast = Vec::new();
    let mut packed = true;
    let nf = frame.visit(s, c, false, true, |x| match pack_key(x) {
        Some(k) if packed => fast.push(k),
        _ => packed = false,
    })?;
    let mut slow = Vec::new();
    let ns = box_solutions_with(lat, anchor, s, c, bx, false, true, |x| match pack_key(x) {
        Some(k) if packed => slow.push(k),
        _ => packed = false,
    })?;
    let same = if packed {
        fast.sort_unstable();
        slow.sort_unstable();
        fast == slow
    } else {
        false
    };
    drop((fast, slow));
    if same {
        return Ok((nf, None));
    }
    // slow path: full classes, also used to describe a mismatch
    let a = frame.collect(s, c, false, true)?;
    let b = box_solutions(lat, anchor, s, c, false, true)?;
    if a == b {
        return Ok((nf, None));
    }
    Ok((
        nf,
        Some(Discrepancy {
            anchor: *anchor,
            s,
            c,
            enumerator_count: nf,
            oracle_count: ns,
            only_enumerator: sorted_diff(&a, &b),
            only_oracle: sorted_diff(&b, &a),
        }),
    ))
}

/// Compares the enumerator with the box search on `anchors` random
/// effective classes of positive square with coordinates in
/// `[-radius, radius]`, for every `(s, c)` in `{0, 4} × {1..8}`.
pub fn parity_check(
    lat: &EnriquesLattice,
    radius: i64,
    anchors: usize,
    seed: u64,
    threads: usize,
) -> Result<ParityReport> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rayon::prelude::*;

    require_standard(lat)?;
    if radius < 1 {
        return Err(Error::InvalidInput(format!("radius {radius} < 1")));
    }
    if anchors == 0 {
        return Err(Error::InvalidInput("no anchors requested".into()));
    }
    let start = std::time::Instant::now();
    let pool = crate::verify::effective_classes_in_box(lat, radius, None);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<LatticeClass> = pool.choose_multiple(&mut rng, anchors).copied().collect();
    picked.sort();

    let mut jobs = Vec::new();
    let mut infeasible = 0u64;
    for l in &picked {
        let l2 = lat.norm(l);
        for s in PARITY_NORMS {
            for c in 1..=PARITY_MAX_DEGREE {
                if s * l2 > c * c {
                    infeasible += 1;
                } else {
                    jobs.push((*l, s, c));
                }
            }
        }
    }
    let workers = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let results: Vec<Result<(u64, Option<Discrepancy>)>> = workers.install(|| {
        jobs.par_iter()
            .map(|(l, s, c)| compare_query(lat, l, *s, *c))
            .collect()
    });
    let mut compared = 0;
    let mut discrepancies = Vec::new();
    for r in results {
        let (n, d) = r?;
        compared += n;
        discrepancies.extend(d);
    }
    Ok(ParityReport {
        radius,
        seed,
        anchors: picked,
        queries: jobs.len() as u64 + infeasible,
        infeasible,
        solutions_compared: compared,
        discrepancies,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> &'static EnriquesLattice {
        EnriquesLattice::standard()
    }

    #[test]
    fn model_roots_reproduce_cartan() {
        let a = doubled_simple_roots();
        let c = e8_cartan();
        for i in 0..8 {
            for j in 0..8 {
                let d: i64 = (0..8).map(|k| a[i][k] * a[j][k]).sum();
                assert_eq!(d, 4 * c[i][j], "({i},{j})");
            }
        }
    }

    #[test]
    fn root_coordinates_round_trip() {
        let m = E8Model::new();
        let r = [1, -2, 0, 3, 1, 0, -1, 2];
        let y = m.to_doubled(&r);
        assert_eq!(m.to_roots(&y), Some(r));
        assert_eq!(m.to_roots(&[1, 0, 0, 0, 0, 0, 0, 0]), None);
    }

    #[test]
    fn counts_degree_two_isotropics_on_h0() {
        let h0 = lat().reference_ample();
        let all = box_solutions(lat(), &h0, 0, 2, false, false).unwrap();
        assert_eq!(all.len(), 242);
    }

    #[test]
    fn bound_is_certified_on_known_solutions() {
        let h0 = lat().reference_ample();
        let bx = certified_coordinate_bound(lat(), &h0, 0, 2).unwrap();
        let sols = box_solutions(lat(), &h0, 0, 2, false, false).unwrap();
        let widest = sols.iter().map(LatticeClass::max_abs).max().unwrap();
        assert!(widest <= bx.radius);
    }

    #[test]
    fn naive_phi_of_h0() {
        let (phi, f) = naive_phi(lat(), &lat().reference_ample()).unwrap();
        assert_eq!(phi, 1);
        assert_eq!(f, LatticeClass::basis(1));
    }

    #[test]
    fn rejects_other_lattices() {
        let mut g = *lat().gram();
        g[0][1] = 2;
        g[1][0] = 2;
        let other = EnriquesLattice::from_gram_unchecked(g, lat().reference_ample());
        let bx = CoordinateBox { radius: 1 };
        let h0 = lat().reference_ample();
        assert!(box_solutions_with(&other, &h0, 0, 1, bx, true, true, |_| {}).is_err());
    }

    #[test]
    fn keys_preserve_order() {
        let a = LatticeClass::new([0, 1, -3, 0, 0, 0, 0, 0, 0, 0]);
        let b = LatticeClass::new([0, 1, 2, 0, 0, 0, 0, 0, 0, 0]);
        assert!(pack_key(&a).unwrap() < pack_key(&b).unwrap());
        let mut big = a;
        big[4] = 5000;
        assert!(pack_key(&big).is_none());
    }

    #[test]
    fn zero_slack_is_fine() {
        // c² = s·L²: the only solutions are multiples of L itself.
        let h0 = lat().reference_ample();
        let sols = box_solutions(lat(), &h0, 2, 2, false, false).unwrap();
        assert_eq!(sols, vec![h0]);
    }
}
