use proptest::prelude::*;

use enriques_core::invariants::{min_pairing_isotropic, mu_capped, MuKind};
use enriques_core::oracle::{box_solutions, naive_mu, naive_phi};
use enriques_core::verify::effective_classes_in_box;
use enriques_core::{enumerate, EnriquesLattice, EnumQuery, LatticeClass};

fn lat() -> &'static EnriquesLattice {
    EnriquesLattice::standard()
}

fn anchors() -> Vec<LatticeClass> {
    effective_classes_in_box(lat(), 1, None)
        .into_iter()
        .chain(effective_classes_in_box(lat(), 2, Some(8)).into_iter().step_by(37))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumerator_matches_box_search(
        k in 0usize..1000,
        s in prop::sample::select(vec![0i64, 2, 4, -2]),
        c in 1i64..=5,
        primitive in any::<bool>(),
        effective in any::<bool>(),
    ) {
        let pool = anchors();
        let l = pool[k % pool.len()];
        prop_assume!(s * lat().norm(&l) <= c * c);
        let q = EnumQuery { anchor: l, target_norm: s, target_pairing: c, primitive_only: primitive, effective_only: effective };
        let fast = enumerate(lat(), &q).unwrap();
        prop_assert!(fast.complete);
        let slow = box_solutions(lat(), &l, s, c, primitive, effective).unwrap();
        prop_assert_eq!(fast.solutions, slow);
    }
}

#[test]
fn phi_and_mu_match_naive_scans() {
    for l in anchors().into_iter().step_by(3) {
        let phi = min_pairing_isotropic(lat(), &l).unwrap();
        let (naive, _) = naive_phi(lat(), &l).unwrap();
        assert_eq!(phi.value, naive, "φ of {l}");
        let mu = mu_capped(lat(), &l, None).unwrap();
        match naive_mu(lat(), &l, mu.cap_used).unwrap() {
            Some((v, _)) => {
                assert_eq!(mu.kind, MuKind::Exact, "μ of {l}");
                assert_eq!(mu.value, v, "μ of {l}");
            }
            None => assert_eq!(mu.kind, MuKind::LowerBoundOnly, "μ of {l}"),
        }
    }
}

#[test]
fn phi_is_minimal() {
    for l in anchors().into_iter().step_by(5) {
        let phi = min_pairing_isotropic(lat(), &l).unwrap().value;
        for c in 1..phi {
            let q = EnumQuery::isotropic(l, c);
            assert!(enumerate(lat(), &q).unwrap().solutions.is_empty());
        }
    }
}
