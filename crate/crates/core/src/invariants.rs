//! The invariants φ(L), μ(L), the generic gonality min-formula, the case
//! table it reduces to, the type tags of extremal classes and the interval
//! for the minimal gonality.

use serde::{Deserialize, Serialize};

use crate::enumerate::AnchorFrame;
use crate::error::{Error, Result};
use crate::lattice::{EnriquesLattice, LatticeClass};
use crate::linalg::isqrt_ceil;

/// A primitive effective isotropic class realizing φ(L).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropicWitness {
    pub class: LatticeClass,
    pub value: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splitting {
    pub f1: LatticeClass,
    pub f2: LatticeClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuWitness {
    pub class: LatticeClass,
    pub value: i64,
    pub splitting: Option<Splitting>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuKind {
    Exact,
    /// `value` is a lower bound: μ(L) > cap_used - 2.
    LowerBoundOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuResult {
    pub kind: MuKind,
    pub value: i64,
    pub witness: Option<MuWitness>,
    pub cap_used: i64,
}

impl MuResult {
    pub fn is_exact(&self) -> bool {
        self.kind == MuKind::Exact
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    A,
    B,
    C,
    Generic,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::A => "a",
            CaseTag::B => "b",
            CaseTag::C => "c",
            CaseTag::Generic => "generic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeTag {
    /// `L = h(E1+E2)` with `E1·E2 = 2`.
    Mu1(i64),
    /// `L = h(E1+E2)+E3`.
    Mu2(i64),
    /// `L = (h+1)E1+hE2+E3`.
    Mu3(i64),
    /// `L = 2D` with `D² = 10`, `φ(D) = 3`.
    TwoD,
    General,
}

impl std::fmt::Display for TypeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TypeTag::Mu1(h) => write!(f, "mu1(h={h})"),
            TypeTag::Mu2(h) => write!(f, "mu2(h={h})"),
            TypeTag::Mu3(h) => write!(f, "mu3(h={h})"),
            TypeTag::TwoD => write!(f, "2D"),
            TypeTag::General => write!(f, "general"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MingonInterval {
    pub lower: i64,
    pub upper: i64,
    /// The necessary condition for `gengon - 2` fails, so the lower end was raised.
    pub lower_excluded: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GonalityReport {
    pub class: LatticeClass,
    pub l_squared: i64,
    pub phi: IsotropicWitness,
    pub mu: MuResult,
    pub quarter_bound: i64,
    pub gengon: i64,
    pub case_tag: CaseTag,
    pub type_tag: TypeTag,
    pub mingon: MingonInterval,
}

/// The (L², φ) pairs where the quarter bound wins without an extremal type.
pub const QUARTER_TABLE: [(i64, i64); 6] = [(30, 5), (22, 4), (20, 4), (14, 3), (12, 3), (6, 2)];

fn require_effective(lat: &EnriquesLattice, l: &LatticeClass) -> Result<i64> {
    l.check_range()?;
    let l2 = lat.norm(l);
    if l2 <= 0 {
        return Err(Error::InvalidInput(format!("{l} has square {l2}, expected > 0")));
    }
    if !lat.is_num_effective(l) {
        return Err(Error::InvalidInput(format!("{l} is not effective")));
    }
    Ok(l2)
}

/// φ(L) from an already built frame for `L`.
pub fn phi_in_frame(frame: &AnchorFrame<'_>) -> Result<IsotropicWitness> {
    let l2 = frame.anchor_norm() as i128;
    let mut c: i64 = 1;
    while (c as i128) * (c as i128) <= l2 {
        let sols = frame.collect(0, c, true, true)?;
        if let Some(f) = sols.first() {
            return Ok(IsotropicWitness { class: *f, value: c });
        }
        c += 1;
    }
    Err(Error::TheoremViolation(format!(
        "no isotropic class of degree <= sqrt({l2}) on {}",
        frame.anchor()
    )))
}

/// φ(L) = min{F·L : F primitive effective isotropic}, with the
/// lexicographically smallest realizer.
pub fn min_pairing_isotropic(lat: &EnriquesLattice, l: &LatticeClass) -> Result<IsotropicWitness> {
    require_effective(lat, l)?;
    let frame = AnchorFrame::new(lat, l)?;
    phi_in_frame(&frame)
}

/// Whether some primitive effective isotropic class pairs to 1 with `b`.
fn has_degree_one_isotropic(lat: &EnriquesLattice, b: &LatticeClass) -> Result<bool> {
    let frame = AnchorFrame::new(lat, b)?;
    let mut found = false;
    frame.visit(0, 1, true, true, |_| found = true)?;
    Ok(found)
}

fn find_splitting(
    lat: &EnriquesLattice,
    frame: &AnchorFrame<'_>,
    phi: i64,
    b: &LatticeClass,
) -> Result<Option<Splitting>> {
    let l = frame.anchor();
    for f1 in frame.collect(0, phi, true, true)? {
        if lat.pairing(&f1, b) != 2 {
            continue;
        }
        let f2 = *b - f1;
        if !lat.is_isotropic_effective(&f2) {
            continue;
        }
        let d = lat.pairing(&f2, l);
        if d == phi || d == phi + 1 {
            return Ok(Some(Splitting { f1, f2 }));
        }
    }
    Ok(None)
}

fn mu_in_frame(
    lat: &EnriquesLattice,
    frame: &AnchorFrame<'_>,
    phi: i64,
    cap: i64,
) -> Result<MuResult> {
    if cap < 2 * phi {
        return Err(Error::CapTooSmall { cap, min: 2 * phi });
    }
    let l = *frame.anchor();
    let l2 = frame.anchor_norm() as i128;
    // Hodge index: B·L >= 2 sqrt(L²) for B² = 4
    let start = isqrt_ceil(4 * l2) as i64;
    for c in start.max(1)..=cap {
        for b in frame.collect(4, c, false, true)? {
            if b == l || has_degree_one_isotropic(lat, &b)? {
                continue;
            }
            let value = c - 2;
            let splitting = if value < 2 * phi {
                let s = find_splitting(lat, frame, phi, &b)?;
                if s.is_none() {
                    return Err(Error::TheoremViolation(format!(
                        "B = {b} with B·L = {c} < 2φ + 2 does not split"
                    )));
                }
                s
            } else {
                None
            };
            return Ok(MuResult {
                kind: MuKind::Exact,
                value,
                witness: Some(MuWitness {
                    class: b,
                    value,
                    splitting,
                }),
                cap_used: cap,
            });
        }
    }
    Ok(MuResult {
        kind: MuKind::LowerBoundOnly,
        value: cap - 1,
        witness: None,
        cap_used: cap,
    })
}

/// μ(L) = min{B·L - 2 : B effective, B² = 4, φ(B) = 2, B ≠ L}, searching
/// `B·L <= cap`. `None` uses the default cap `2φ(L) + 2`.
pub fn mu_capped(lat: &EnriquesLattice, l: &LatticeClass, cap: Option<i64>) -> Result<MuResult> {
    require_effective(lat, l)?;
    let frame = AnchorFrame::new(lat, l)?;
    let phi = phi_in_frame(&frame)?.value;
    mu_in_frame(lat, &frame, phi, cap.unwrap_or(2 * phi + 2))
}

/// `L/2` if it is a class of square 10 with φ = 3.
pub fn two_d_half(lat: &EnriquesLattice, l: &LatticeClass) -> Result<Option<LatticeClass>> {
    let Some(d) = l.div_exact(2) else {
        return Ok(None);
    };
    if lat.norm(&d) != 10 || !lat.is_num_effective(&d) {
        return Ok(None);
    }
    let phi = min_pairing_isotropic(lat, &d)?.value;
    Ok((phi == 3).then_some(d))
}

/// Case tag from the numerical data; `two_d` says whether `L = 2D` with
/// `D² = 10`, `φ(D) = 3`.
pub fn case_tag(l2: i64, phi: i64, two_d: bool) -> CaseTag {
    if l2 == phi * phi && phi >= 2 && phi % 2 == 0 {
        CaseTag::A
    } else if l2 == phi * phi + phi - 2 && phi >= 3 && !two_d {
        CaseTag::B
    } else if QUARTER_TABLE.contains(&(l2, phi)) {
        CaseTag::C
    } else {
        CaseTag::Generic
    }
}

/// Gonality predicted by the case table.
///
/// For `(L², φ) = (4, 2)` the table's `2φ - 2 = 2` is unattainable (every
/// such curve is trigonal: the min-formula gives `min(4, 3, 3)`), so 3 is
/// returned there.
pub fn case_table_value(tag: CaseTag, l2: i64, phi: i64) -> i64 {
    match tag {
        CaseTag::A if (l2, phi) == (4, 2) => 3,
        CaseTag::A => 2 * phi - 2,
        CaseTag::B if phi == 3 || phi == 4 => 2 * phi - 2,
        CaseTag::B => 2 * phi - 1,
        CaseTag::C => 2 * phi - 1,
        CaseTag::Generic => 2 * phi,
    }
}

pub fn type_tag(l2: i64, phi: i64, two_d: bool) -> TypeTag {
    if two_d {
        TypeTag::TwoD
    } else if l2 == phi * phi && phi % 2 == 0 && phi >= 2 {
        TypeTag::Mu1(phi / 2)
    } else if l2 == phi * phi + phi - 2 && phi >= 3 {
        if phi % 2 == 1 {
            TypeTag::Mu2((phi - 1) / 2)
        } else {
            TypeTag::Mu3((phi - 2) / 2)
        }
    } else {
        TypeTag::General
    }
}

/// Case tag and type tag of an effective class.
pub fn case_classify(lat: &EnriquesLattice, l: &LatticeClass) -> Result<(CaseTag, TypeTag)> {
    let l2 = require_effective(lat, l)?;
    let phi = min_pairing_isotropic(lat, l)?.value;
    let two_d = two_d_half(lat, l)?.is_some();
    Ok((case_tag(l2, phi, two_d), type_tag(l2, phi, two_d)))
}

/// Smallest `m >= 0` with `2m² >= L²`, i.e. the ceiling of `sqrt(L²/2)`.
pub fn half_norm_root(l2: i64) -> i64 {
    let mut m = isqrt_ceil((l2 as i128 + 1) / 2) as i64;
    while m > 0 && 2 * (m - 1) * (m - 1) >= l2 {
        m -= 1;
    }
    while 2 * m * m < l2 {
        m += 1;
    }
    m
}

pub fn mingon_interval(gengon: i64, l2: i64, phi: i64) -> MingonInterval {
    let excluded = phi < half_norm_root(l2);
    MingonInterval {
        lower: if excluded { gengon - 1 } else { gengon - 2 },
        upper: gengon,
        lower_excluded: excluded,
    }
}

/// Full report: φ, μ (default cap), the min-formula and the derived tags.
pub fn generic_gonality(lat: &EnriquesLattice, l: &LatticeClass) -> Result<GonalityReport> {
    let l2 = require_effective(lat, l)?;
    let frame = AnchorFrame::new(lat, l)?;
    let phi = phi_in_frame(&frame)?;
    let mu = mu_in_frame(lat, &frame, phi.value, 2 * phi.value + 2)?;
    let quarter_bound = l2 / 4 + 2;
    let gengon = (2 * phi.value).min(mu.value).min(quarter_bound);
    let two_d = two_d_half(lat, l)?.is_some();
    Ok(GonalityReport {
        class: *l,
        l_squared: l2,
        phi,
        mu,
        quarter_bound,
        gengon,
        case_tag: case_tag(l2, phi.value, two_d),
        type_tag: type_tag(l2, phi.value, two_d),
        mingon: mingon_interval(gengon, l2, phi.value),
    })
}

pub fn mingon_bounds(lat: &EnriquesLattice, l: &LatticeClass) -> Result<MingonInterval> {
    Ok(generic_gonality(lat, l)?.mingon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> &'static EnriquesLattice {
        EnriquesLattice::standard()
    }

    #[test]
    fn half_norm_root_values() {
        for l2 in 0..500 {
            let m = half_norm_root(l2);
            assert!(2 * m * m >= l2);
            assert!(m == 0 || 2 * (m - 1) * (m - 1) < l2);
        }
        assert_eq!(half_norm_root(18), 3);
        assert_eq!(half_norm_root(24), 4);
    }

    #[test]
    fn table_values() {
        assert_eq!(case_tag(16, 4, false), CaseTag::A);
        assert_eq!(case_table_value(CaseTag::A, 16, 4), 6);
        assert_eq!(case_tag(10, 3, false), CaseTag::B);
        assert_eq!(case_table_value(CaseTag::B, 10, 3), 4);
        assert_eq!(case_table_value(CaseTag::B, 18, 4), 6);
        assert_eq!(case_table_value(CaseTag::B, 28, 5), 9);
        assert_eq!(case_tag(40, 6, true), CaseTag::Generic);
        assert_eq!(case_tag(40, 6, false), CaseTag::B);
        for (l2, phi) in QUARTER_TABLE {
            assert_eq!(case_tag(l2, phi, false), CaseTag::C);
            assert_eq!(case_table_value(CaseTag::C, l2, phi), l2 / 4 + 2);
        }
        assert_eq!(case_tag(50, 4, false), CaseTag::Generic);
    }

    #[test]
    fn smallest_square_is_trigonal_not_hyperelliptic() {
        // tag (a) literally reads 2φ - 2 = 2, the min-formula gives 3
        assert_eq!(case_tag(4, 2, false), CaseTag::A);
        assert_eq!(case_table_value(CaseTag::A, 4, 2), 3);
        assert_eq!(type_tag(4, 2, false), TypeTag::Mu1(1));
    }

    #[test]
    fn type_tags() {
        assert_eq!(type_tag(36, 6, false), TypeTag::Mu1(3));
        assert_eq!(type_tag(10, 3, false), TypeTag::Mu2(1));
        assert_eq!(type_tag(28, 5, false), TypeTag::Mu2(2));
        assert_eq!(type_tag(18, 4, false), TypeTag::Mu3(1));
        assert_eq!(type_tag(40, 6, false), TypeTag::Mu3(2));
        assert_eq!(type_tag(40, 6, true), TypeTag::TwoD);
        assert_eq!(type_tag(30, 5, false), TypeTag::General);
    }

    #[test]
    fn h0_invariants() {
        // e + f: L² = 2, φ = 1, μ from B·L >= 3
        let h0 = lat().reference_ample();
        let r = generic_gonality(lat(), &h0).unwrap();
        assert_eq!(r.l_squared, 2);
        assert_eq!(r.phi.value, 1);
        assert_eq!(r.phi.class, LatticeClass::basis(1));
        assert_eq!(r.gengon, 2);
        assert!(r.mu.value >= 2 * r.phi.value - 2);
    }

    #[test]
    fn rejects_non_effective() {
        let h0 = lat().reference_ample();
        assert!(matches!(
            generic_gonality(lat(), &-h0),
            Err(Error::InvalidInput(_))
        ));
        let e = LatticeClass::basis(0);
        assert!(matches!(
            min_pairing_isotropic(lat(), &e),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn cap_below_two_phi() {
        let l = 2 * lat().reference_ample();
        // φ(2h0) = 2
        let err = mu_capped(lat(), &l, Some(3)).unwrap_err();
        assert_eq!(err, Error::CapTooSmall { cap: 3, min: 4 });
    }
}
