//! Exhaustive checks of the gonality statements over coordinate boxes.
//!
//! Every effective class with `L² > 0` in the box is evaluated once; each
//! selected check either passes, fails with a counterexample, or does not
//! apply. Failures are data: the sweep itself only errors on a bad spec.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::sweep_fixtures;
use crate::decompose::{extremal_decompose, ExtremalTag};
use crate::error::{Error, Result};
use crate::invariants::{case_table_value, generic_gonality, GonalityReport, MuKind, TypeTag};
use crate::lattice::{EnriquesLattice, LatticeClass, RANK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    PosconeGap,
    MuIff,
    ValueTable,
    GengonTable,
    PhiBound,
    MuFloor,
    Coherence,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::PosconeGap,
        Check::MuIff,
        Check::ValueTable,
        Check::GengonTable,
        Check::PhiBound,
        Check::MuFloor,
        Check::Coherence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Check::PosconeGap => "poscone_gap",
            Check::MuIff => "mu_iff",
            Check::ValueTable => "value_table",
            Check::GengonTable => "gengon_table",
            Check::PhiBound => "phi_bound",
            Check::MuFloor => "mu_floor",
            Check::Coherence => "coherence",
        }
    }

    /// Parses a comma separated list; `all` selects every check.
    pub fn parse_list(s: &str) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Check::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::InvalidInput("no checks selected".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Check> {
        Check::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Coordinate radius of the box.
    pub radius: i64,
    /// Optional upper bound on `L²`.
    pub max_l2: Option<i64>,
    pub checks: Vec<Check>,
    /// Add the explicit type and table constructions to the tested set.
    pub inject_fixtures: bool,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    /// Shuffles the evaluation order only.
    pub seed: Option<u64>,
}

impl SweepSpec {
    pub fn new(radius: i64, checks: Vec<Check>) -> SweepSpec {
        SweepSpec {
            radius,
            max_l2: None,
            checks,
            inject_fixtures: true,
            threads: 0,
            seed: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::InvalidInput(format!("radius {} < 1", self.radius)));
        }
        if self.checks.is_empty() {
            return Err(Error::InvalidInput("no checks selected".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckCounter {
    pub check: Check,
    pub tested: u64,
    pub passed: u64,
    pub failed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Counterexample {
    pub class: LatticeClass,
    pub check: Check,
    pub details: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub radius: i64,
    pub max_l2: Option<i64>,
    /// Distinct classes evaluated, fixtures included.
    pub classes_tested: u64,
    pub fixtures_injected: u64,
    pub counters: Vec<CheckCounter>,
    pub counterexamples: Vec<Counterexample>,
    pub warnings: Vec<String>,
    /// Tested classes per case tag and per type tag.
    pub case_tags: BTreeMap<String, u64>,
    pub type_tags: BTreeMap<String, u64>,
    pub elapsed_ms: u64,
}

impl SweepReport {
    pub fn total_failures(&self) -> u64 {
        self.counters.iter().map(|c| c.failed).sum()
    }

    pub fn counter(&self, check: Check) -> Option<&CheckCounter> {
        self.counters.iter().find(|c| c.check == check)
    }
}

/// One check's verdict on one class; `None` means it does not apply.
type Verdict = Option<std::result::Result<(), String>>;

struct Outcome {
    class: LatticeClass,
    verdicts: Vec<(Check, Verdict)>,
    warning: Option<String>,
    tags: Option<(String, String)>,
}

fn fail(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_one(lat: &EnriquesLattice, r: &GonalityReport, check: Check) -> Verdict {
    let l2 = r.l_squared;
    let phi = r.phi.value;
    let mu = &r.mu;
    let mu_exact = mu.kind == MuKind::Exact;
    match check {
        Check::PhiBound => Some(fail(phi * phi <= l2, || format!("φ² = {} > L² = {l2}", phi * phi))),
        Check::PosconeGap => Some(fail(
            !(phi * phi < l2 && l2 < phi * phi + phi - 2),
            || format!("φ² < L² = {l2} < φ² + φ - 2 with φ = {phi}"),
        )),
        Check::MuFloor => {
            if mu.value < 2 * phi - 2 {
                return Some(Err(format!("μ = {} < 2φ - 2 = {}", mu.value, 2 * phi - 2)));
            }
            if mu_exact && mu.value < 2 * phi {
                let split = mu.witness.and_then(|w| w.splitting.map(|s| (w.class, s)));
                let Some((b, s)) = split else {
                    return Some(Err(format!("μ = {} < 2φ without a splitting", mu.value)));
                };
                let d2 = lat.pairing(&s.f2, &r.class);
                let ok = s.f1 + s.f2 == b
                    && lat.pairing(&s.f1, &s.f2) == 2
                    && lat.pairing(&s.f1, &r.class) == phi
                    && (d2 == phi || d2 == phi + 1)
                    && lat.is_isotropic_effective(&s.f1)
                    && lat.is_isotropic_effective(&s.f2);
                return Some(fail(ok, || format!("invalid splitting {} + {} of {b}", s.f1, s.f2)));
            }
            Some(Ok(()))
        }
        Check::MuIff => {
            if (l2, phi) == (4, 2) {
                return None;
            }
            let small = mu_exact && mu.value < 2 * phi;
            let typed = matches!(r.type_tag, TypeTag::Mu1(_) | TypeTag::Mu2(_) | TypeTag::Mu3(_));
            Some(fail(small == typed, || {
                format!("μ = {} (2φ = {}) but type {}", mu.value, 2 * phi, r.type_tag)
            }))
        }
        Check::ValueTable => {
            let (want_l2, want_phi, want_mu) = match r.type_tag {
                TypeTag::Mu1(h) => (4 * h * h, 2 * h, (h >= 2).then_some(4 * h - 2)),
                TypeTag::Mu2(h) => {
                    let p = 2 * h + 1;
                    (p * p + p - 2, p, Some(2 * p - 1))
                }
                TypeTag::Mu3(h) => {
                    let p = 2 * h + 2;
                    (p * p + p - 2, p, Some(2 * p - 1))
                }
                TypeTag::TwoD => (40, 6, Some(12)),
                TypeTag::General => return None,
            };
            let mu_ok = want_mu.map_or(true, |m| mu_exact && mu.value == m);
            Some(fail(l2 == want_l2 && phi == want_phi && mu_ok, || {
                format!(
                    "type {}: (L², φ, μ) = ({l2}, {phi}, {}), expected ({want_l2}, {want_phi}, {})",
                    r.type_tag,
                    mu.value,
                    want_mu.map_or("-".to_string(), |m| m.to_string())
                )
            }))
        }
        Check::GengonTable => {
            let want = case_table_value(r.case_tag, l2, phi);
            Some(fail(r.gengon == want, || {
                format!("gengon = {} but case {} gives {want}", r.gengon, r.case_tag.as_str())
            }))
        }
        Check::Coherence => {
            if l2 != phi * phi && l2 != phi * phi + phi - 2 {
                return Some(fail(r.type_tag == TypeTag::General, || {
                    format!("non-extremal class has type {}", r.type_tag)
                }));
            }
            let x = match extremal_decompose(lat, &r.class) {
                Ok(x) => x,
                Err(e) => return Some(Err(format!("no extremal witness: {e}"))),
            };
            let ok = matches!(
                (x.tag, r.type_tag),
                (ExtremalTag::I, TypeTag::Mu1(h)) if h == x.h
            ) || matches!((x.tag, r.type_tag), (ExtremalTag::IiA, TypeTag::Mu2(h)) if h == x.h)
                || matches!((x.tag, r.type_tag), (ExtremalTag::IiB, TypeTag::Mu3(h)) if h == x.h)
                || matches!((x.tag, r.type_tag), (ExtremalTag::IiC, TypeTag::TwoD));
            Some(fail(ok, || {
                format!("witness tag {} (h = {}) but type {}", x.tag.as_str(), x.h, r.type_tag)
            }))
        }
    }
}

fn evaluate(lat: &EnriquesLattice, l: &LatticeClass, checks: &[Check]) -> Outcome {
    match generic_gonality(lat, l) {
        Ok(r) => {
            let warning = ((r.l_squared, r.phi.value) == (4, 2)
                && !(r.mu.is_exact() && r.mu.value == 3))
                .then(|| format!("{l}: (L², φ) = (4, 2) with μ = {}, expected 3", r.mu.value));
            Outcome {
                class: *l,
                verdicts: checks.iter().map(|&c| (c, check_one(lat, &r, c))).collect(),
                warning,
                tags: Some((r.case_tag.as_str().to_string(), r.type_tag.to_string())),
            }
        }
        Err(e) => Outcome {
            class: *l,
            verdicts: checks
                .iter()
                .map(|&c| (c, Some(Err(format!("evaluation failed: {e}")))))
                .collect(),
            warning: None,
            tags: None,
        },
    }
}

fn block_split(lat: &EnriquesLattice) -> bool {
    let g = lat.gram();
    let h = lat.reference_ample();
    (0..2).all(|i| (2..RANK).all(|j| g[i][j] == 0)) && (2..RANK).all(|j| h[j] == 0)
}

/// Effective classes with `L² > 0` (and `L² <= max_l2`) whose coordinates
/// all lie in `[-radius, radius]`, sorted.
pub fn effective_classes_in_box(
    lat: &EnriquesLattice,
    radius: i64,
    max_l2: Option<i64>,
) -> Vec<LatticeClass> {
    let g = lat.gram();
    let keep = |x: &LatticeClass| {
        let n = lat.norm(x);
        n > 0 && max_l2.map_or(true, |m| n <= m) && lat.is_num_effective(x)
    };
    let mut out = Vec::new();
    if block_split(lat) {
        // L² = q(u) + q(r) for u in the first two coordinates, r in the rest.
        let mut heads = Vec::new();
        for a in -radius..=radius {
            for b in -radius..=radius {
                let mut x = LatticeClass::ZERO;
                x.0[0] = a;
                x.0[1] = b;
                if lat.pairing(&x, &lat.reference_ample()) > 0 {
                    heads.push((x, lat.norm(&x)));
                }
            }
        }
        let Some(top) = heads.iter().map(|h| h.1).max() else {
            return out;
        };
        let mut tails = Vec::new();
        let mut r = [-radius; 8];
        'outer: loop {
            let mut q = 0i64;
            for i in 0..8 {
                for j in 0..8 {
                    q += r[i] * g[i + 2][j + 2] * r[j];
                }
            }
            if q + top > 0 {
                tails.push((r, q));
            }
            for i in (0..8).rev() {
                if r[i] < radius {
                    r[i] += 1;
                    continue 'outer;
                }
                r[i] = -radius;
            }
            break;
        }
        for (head, qh) in &heads {
            for (t, qt) in &tails {
                let n = qh + qt;
                if n <= 0 || max_l2.map_or(false, |m| n > m) {
                    continue;
                }
                let mut x = *head;
                x.0[2..].copy_from_slice(t);
                if keep(&x) {
                    out.push(x);
                }
            }
        }
    } else {
        out = full_scan(radius, &keep);
    }
    out.sort();
    out
}

fn full_scan(
    radius: i64,
    keep: &dyn Fn(&LatticeClass) -> bool,
) -> Vec<LatticeClass> {
    let side = (2 * radius + 1) as usize;
    let mut out = Vec::new();
    for mut k in 0..side.pow(RANK as u32) {
        let mut x = LatticeClass::ZERO;
        for i in (0..RANK).rev() {
            x.0[i] = (k % side) as i64 - radius;
            k /= side;
        }
        if keep(&x) {
            out.push(x);
        }
    }
    out
}

/// Evaluates the selected checks on every class in the box, plus the
/// explicit constructions when requested.
pub fn run_sweep(lat: &EnriquesLattice, spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let start = Instant::now();
    let mut checks = spec.checks.clone();
    checks.sort();
    checks.dedup();

    let mut classes = effective_classes_in_box(lat, spec.radius, spec.max_l2);
    let mut warnings = Vec::new();
    let mut fixtures_injected = 0u64;
    if spec.inject_fixtures {
        match sweep_fixtures(lat) {
            Ok(fx) => {
                for (_, l) in fx {
                    if classes.binary_search(&l).is_err() {
                        fixtures_injected += 1;
                        let pos = classes.binary_search(&l).unwrap_err();
                        classes.insert(pos, l);
                    }
                }
            }
            Err(e) => warnings.push(format!("fixtures not constructed: {e}")),
        }
    }
    if let Some(seed) = spec.seed {
        classes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let outcomes: Vec<Outcome> =
        pool.install(|| classes.par_iter().map(|l| evaluate(lat, l, &checks)).collect());

    let mut counters: Vec<CheckCounter> = checks
        .iter()
        .map(|&check| CheckCounter {
            check,
            tested: 0,
            passed: 0,
            failed: 0,
        })
        .collect();
    let mut counterexamples = Vec::new();
    let mut case_tags = BTreeMap::new();
    let mut type_tags = BTreeMap::new();
    for o in outcomes {
        for (k, (check, verdict)) in o.verdicts.into_iter().enumerate() {
            let Some(v) = verdict else { continue };
            let ctr = &mut counters[k];
            ctr.tested += 1;
            match v {
                Ok(()) => ctr.passed += 1,
                Err(details) => {
                    ctr.failed += 1;
                    counterexamples.push(Counterexample {
                        class: o.class,
                        check,
                        details,
                    });
                }
            }
        }
        warnings.extend(o.warning);
        if let Some((c, t)) = o.tags {
            *case_tags.entry(c).or_insert(0) += 1;
            *type_tags.entry(t).or_insert(0) += 1;
        }
    }
    counterexamples.sort();
    warnings.sort();

    Ok(SweepReport {
        radius: spec.radius,
        max_l2: spec.max_l2,
        classes_tested: classes.len() as u64,
        fixtures_injected,
        counters,
        counterexamples,
        warnings,
        case_tags,
        type_tags,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.as_str().parse::<Check>().unwrap(), c);
        }
        assert_eq!(Check::parse_list("all").unwrap().len(), 7);
        assert_eq!(
            Check::parse_list("phi_bound, mu_iff,phi_bound").unwrap(),
            vec![Check::MuIff, Check::PhiBound]
        );
        assert!(Check::parse_list("").is_err());
        assert!(Check::parse_list("nope").is_err());
    }

    #[test]
    fn spec_validation() {
        let lat = EnriquesLattice::standard();
        assert!(run_sweep(lat, &SweepSpec::new(0, vec![Check::PhiBound])).is_err());
        assert!(run_sweep(lat, &SweepSpec::new(1, vec![])).is_err());
    }

    #[test]
    fn box_matches_brute_force() {
        let lat = EnriquesLattice::standard();
        let fast = effective_classes_in_box(lat, 1, Some(6));
        let keep = |x: &LatticeClass| {
            let n = lat.norm(x);
            n > 0 && n <= 6 && lat.is_num_effective(x)
        };
        let mut slow = full_scan(1, &keep);
        slow.sort();
        assert_eq!(fast, slow);
        assert!(fast.iter().all(|x| x.0[0] >= 1 && x.0[1] >= 1));
        assert!(fast.contains(&lat.reference_ample()));
    }

    #[test]
    fn radius_one_gap_sweep() {
        let lat = EnriquesLattice::standard();
        let mut spec = SweepSpec::new(1, vec![Check::PosconeGap]);
        spec.inject_fixtures = false;
        let r = run_sweep(lat, &spec).unwrap();
        assert!(r.counter(Check::PosconeGap).unwrap().tested > 0);
        assert!(r.counterexamples.is_empty());
    }
}
