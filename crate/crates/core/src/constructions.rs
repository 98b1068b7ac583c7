//! Explicit classes built from isotropic generators with prescribed
//! pairings: the extremal types, the quarter-bound table and the two
//! families of worked examples.

use crate::decompose::{realize_gram, Pattern};
use crate::enumerate::AnchorFrame;
use crate::error::{Error, Result};
use crate::invariants::min_pairing_isotropic;
use crate::lattice::{EnriquesLattice, LatticeClass};

/// `E1, E2` with `E1·E2 = t`.
pub fn isotropic_pair(lat: &EnriquesLattice, t: i64) -> Result<(LatticeClass, LatticeClass)> {
    let g = realize_gram(lat, &[vec![0, t], vec![t, 0]])?;
    Ok((g[0], g[1]))
}

/// `E1, E2, E3` with `E1·E2 = E1·E3 = 2` and `E2·E3 = 1`.
pub fn extremal_triple(lat: &EnriquesLattice) -> Result<[LatticeClass; 3]> {
    let g = realize_gram(lat, &[vec![0, 2, 2], vec![2, 0, 1], vec![2, 1, 0]])?;
    Ok([g[0], g[1], g[2]])
}

/// `h(E1+E2)` with `E1·E2 = 2`.
pub fn mu1(lat: &EnriquesLattice, h: i64) -> Result<LatticeClass> {
    let (e1, e2) = isotropic_pair(lat, 2)?;
    Ok(h * (e1 + e2))
}

/// `h(E1+E2)+E3`.
pub fn mu2(lat: &EnriquesLattice, h: i64) -> Result<LatticeClass> {
    let [e1, e2, e3] = extremal_triple(lat)?;
    Ok(h * (e1 + e2) + e3)
}

/// `(h+1)E1+hE2+E3`.
pub fn mu3(lat: &EnriquesLattice, h: i64) -> Result<LatticeClass> {
    let [e1, e2, e3] = extremal_triple(lat)?;
    Ok((h + 1) * e1 + h * e2 + e3)
}

/// `2(E1+E2+E3)`, twice a class of square 10 with φ = 3.
pub fn two_d(lat: &EnriquesLattice) -> Result<LatticeClass> {
    let [e1, e2, e3] = extremal_triple(lat)?;
    Ok(2 * (e1 + e2 + e3))
}

fn combine(lat: &EnriquesLattice, coeffs: &[i64], gram: &[Vec<i64>]) -> Result<LatticeClass> {
    let g = realize_gram(lat, gram)?;
    let mut l = LatticeClass::ZERO;
    for (a, e) in coeffs.iter().zip(g) {
        l += *a * e;
    }
    Ok(l)
}

/// A class with the given `(L², φ)` from the quarter-bound table.
pub fn quarter_table_class(lat: &EnriquesLattice, l2: i64, phi: i64) -> Result<LatticeClass> {
    match (l2, phi) {
        // 2E + E1 + E2 + E3: E1·E2 = 1, E1·E3 = E2·E3 = 2, E·(E1,E2,E3) = (1,1,3)
        (30, 5) => combine(
            lat,
            &[2, 1, 1, 1],
            &[
                vec![0, 1, 1, 3],
                vec![1, 0, 1, 2],
                vec![1, 1, 0, 2],
                vec![3, 2, 2, 0],
            ],
        ),
        // 2E + E1 + E2 + E3: E·E1 = 2, every other pair 1
        (22, 4) => combine(
            lat,
            &[2, 1, 1, 1],
            &[
                vec![0, 2, 1, 1],
                vec![2, 0, 1, 1],
                vec![1, 1, 0, 1],
                vec![1, 1, 1, 0],
            ],
        ),
        (20, 4) => combine(lat, &[1; 5], &Pattern::AllOnes.gram(5)),
        (14, 3) => combine(lat, &[1; 4], &Pattern::OneDouble.gram(4)),
        (12, 3) => combine(lat, &[1; 4], &Pattern::AllOnes.gram(4)),
        (6, 2) => combine(lat, &[1; 3], &Pattern::AllOnes.gram(3)),
        _ => Err(Error::InvalidInput(format!("({l2}, {phi}) is not in the table"))),
    }
}

/// `aE1 + bE2` with `E1·E2 = 1`.
pub fn hyperbolic_combination(lat: &EnriquesLattice, a: i64, b: i64) -> Result<LatticeClass> {
    let (e1, e2) = isotropic_pair(lat, 1)?;
    Ok(a * e1 + b * e2)
}

/// At least `count` distinct classes `D` with `D² = 10`, `φ(D) = 3`, taken
/// in order of increasing degree on the reference class.
pub fn ten_frame_bases(lat: &EnriquesLattice, count: usize) -> Result<Vec<LatticeClass>> {
    let h0 = lat.reference_ample();
    let frame = AnchorFrame::new(lat, &h0)?;
    let h2 = lat.norm(&h0) as i128;
    let mut out = Vec::new();
    let mut c = 1i64;
    while out.len() < count {
        if c > 64 {
            return Err(Error::TheoremViolation(
                "no classes of square 10 with φ = 3 of small degree".into(),
            ));
        }
        if (c as i128) * (c as i128) >= 10 * h2 {
            for d in frame.collect(10, c, true, true)? {
                if min_pairing_isotropic(lat, &d)?.value == 3 {
                    out.push(d);
                    if out.len() == count {
                        break;
                    }
                }
            }
        }
        c += 1;
    }
    Ok(out)
}

/// The mandatory sweep fixtures: every extremal type, the quarter-bound
/// table and the smallest squares.
pub fn sweep_fixtures(lat: &EnriquesLattice) -> Result<Vec<(String, LatticeClass)>> {
    let mut out = Vec::new();
    for h in 1..=3 {
        out.push((format!("mu1 h={h}"), mu1(lat, h)?));
    }
    for h in 1..=2 {
        out.push((format!("mu2 h={h}"), mu2(lat, h)?));
        out.push((format!("mu3 h={h}"), mu3(lat, h)?));
    }
    out.push(("2D".into(), two_d(lat)?));
    for (l2, phi) in crate::invariants::QUARTER_TABLE {
        out.push((format!("table ({l2},{phi})"), quarter_table_class(lat, l2, phi)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::generic_gonality;

    fn lat() -> &'static EnriquesLattice {
        EnriquesLattice::standard()
    }

    #[test]
    fn table_classes_have_stated_invariants() {
        for (l2, phi) in crate::invariants::QUARTER_TABLE {
            let l = quarter_table_class(lat(), l2, phi).unwrap();
            assert_eq!(lat().norm(&l), l2);
            assert_eq!(min_pairing_isotropic(lat(), &l).unwrap().value, phi, "({l2},{phi})");
        }
    }

    #[test]
    fn type_constructions() {
        let r = generic_gonality(lat(), &mu1(lat(), 2).unwrap()).unwrap();
        assert_eq!((r.l_squared, r.phi.value, r.mu.value), (16, 4, 6));
        let r = generic_gonality(lat(), &mu2(lat(), 1).unwrap()).unwrap();
        assert_eq!((r.l_squared, r.phi.value, r.mu.value), (10, 3, 5));
        let r = generic_gonality(lat(), &mu3(lat(), 1).unwrap()).unwrap();
        assert_eq!((r.l_squared, r.phi.value, r.mu.value), (18, 4, 7));
    }

    #[test]
    fn frame_bases_are_distinct() {
        let ds = ten_frame_bases(lat(), 5).unwrap();
        assert_eq!(ds.len(), 5);
        let mut sorted = ds.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 5);
        for d in ds {
            assert_eq!(lat().norm(&d), 10);
        }
    }
}
