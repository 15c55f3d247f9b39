//! Properties of CZ indices, cover bookkeeping and boundary strata.

mod common;

use std::sync::Arc;

use common::specs::{random_sample, Orbit};
use localsft::covers::{boundary_strata, BaseCurve, CoverSpec};
use localsft::{EndSign, OrbitCollection, OrbitIterate, ReebOrbit, Theta};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn elliptic_cz_matches_rotation(num in 1i64..200, den in 2i64..200, k in 1u32..20) {
        prop_assume!(num::integer::gcd(num, den) == 1 && i64::from(k) < den);
        let orbit = ReebOrbit::elliptic("g", Theta::new(num, den), k).unwrap();
        let expected = 2 * (i64::from(k) * num).div_euclid(den) + 1;
        prop_assert_eq!(orbit.cz_iterate(k).unwrap(), expected);
    }

    #[test]
    fn hyperbolic_cz_is_linear(cz1 in -6i64..6, k in 1u32..12) {
        let orbit = ReebOrbit::hyperbolic("h", cz1, 12).unwrap();
        prop_assert_eq!(orbit.cz_iterate(k).unwrap(), i64::from(k) * cz1);
    }

    #[test]
    fn elliptic_defects_are_bounded(num in 1i64..500, den in 51i64..500, k in 1u32..25, m in 1u32..25) {
        prop_assume!(num::integer::gcd(num, den) == 1);
        let orbit = ReebOrbit::elliptic("g", Theta::new(num, den), 50).unwrap();
        let defect = orbit.cz_defect(k, m).unwrap();
        let cz = |j: u32| 2 * (i64::from(j) * num).div_euclid(den) + 1;
        prop_assert_eq!(defect, cz(k + m) - cz(k) - cz(m));
        prop_assert!(defect == -1 || defect == 1, "defect {}", defect);
    }
}

#[test]
fn cylinder_covers_over_hyperbolic_orbits() {
    // unbranched-free count: ind = s − 2 when all ends are simple iterates
    for cz1 in -3..=3 {
        let h = Arc::new(ReebOrbit::hyperbolic("h", cz1, 8).unwrap());
        let base = Arc::new(BaseCurve::orbit_cylinder(&h));
        for d in 1..=4u32 {
            let ends = |sign| {
                let one = OrbitIterate::new(h.clone(), 1).unwrap();
                OrbitCollection::new(sign, vec![one; d as usize])
            };
            let spec = CoverSpec::new(base.clone(), d, ends(EndSign::Positive), ends(EndSign::Negative));
            if d == 1 {
                assert_eq!(spec.unwrap().fredholm_index(), 0);
                continue;
            }
            let spec = spec.unwrap();
            let s = 2 * i64::from(d);
            assert_eq!(spec.fredholm_index(), s - 2);
            assert_eq!(spec.branch_count() as i64, s - 2);
        }
    }
}

#[test]
fn ramification_is_never_negative() {
    let h = Arc::new(ReebOrbit::hyperbolic("h", 1, 8).unwrap());
    let base = Arc::new(BaseCurve::orbit_cylinder(&h));
    let it = |k| OrbitIterate::new(h.clone(), k).unwrap();
    // a cylinder cover with two components over four ends is unbranched
    let ok = CoverSpec::with_points(
        base.clone(),
        2,
        OrbitCollection::new(EndSign::Positive, vec![it(1), it(1)]),
        OrbitCollection::new(EndSign::Negative, vec![it(1), it(1)]),
        0,
        0,
        2,
    )
    .unwrap();
    assert_eq!(ok.branch_count(), 0);
    let bad = CoverSpec::new(
        base,
        2,
        OrbitCollection::new(EndSign::Positive, vec![it(2)]),
        OrbitCollection::new(EndSign::Negative, vec![it(1), it(1)]),
    );
    assert!(bad.is_ok(), "the pair-of-pants double cover has one branch point");
}

#[test]
fn boundary_buildings_add_up() {
    let mut rng = StdRng::seed_from_u64(77);
    let mut checked = 0;
    while checked < 60 {
        let s = random_sample(&mut rng);
        if s.spec.degree() > 3 {
            continue;
        }
        let graph = boundary_strata(&s.spec).unwrap();
        graph.check_invariants().unwrap_or_else(|e| panic!("{}: {e}", s.spec.label()));
        for n in &graph.nodes {
            // every level is itself a valid spec with an oracle-checkable index
            let again = CoverSpec::with_points(
                n.spec.base().clone(),
                n.spec.degree(),
                n.spec.positive_ends().clone(),
                n.spec.negative_ends().clone(),
                n.spec.marked_points(),
                n.spec.constrained_branch_points(),
                n.spec.components(),
            )
            .unwrap();
            assert_eq!(again.fredholm_index(), n.index);
        }
        checked += 1;
    }
}

#[test]
fn oracle_cz_agrees_on_samples() {
    let mut rng = StdRng::seed_from_u64(78);
    for _ in 0..300 {
        let s = random_sample(&mut rng);
        for o in &s.orbits {
            let Orbit { orbit, .. } = o;
            for k in 1..=orbit.max_iterate().min(8) {
                assert_eq!(orbit.cz_iterate(k).unwrap(), o.cz(k));
            }
        }
    }
}
