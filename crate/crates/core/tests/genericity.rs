mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use randtopo::complex::{build_complex, combinatorially_equivalent, Flavor};
use randtopo::genericity::{
    genericity_margin, genericity_margin_with, make_generic, perturb, stability_radius,
    verify_generic, MarginScope,
};
use randtopo::geometry::{bottleneck_set_distance, PointSet};

fn flavor() -> impl Strategy<Value = Flavor> {
    prop_oneof![Just(Flavor::Rips), Just(Flavor::Cech)]
}

/// Moves every point by less than `r` in a random direction.
fn nudge(x: &PointSet, r: f64, rng: &mut impl Rng) -> PointSet {
    let rows: Vec<Vec<f64>> = x
        .iter()
        .map(|p| {
            let v: Vec<f64> = p.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300);
            let len = r * rng.random_range(0.0..1.0);
            p.iter().zip(&v).map(|(a, b)| a + b / norm * len).collect()
        })
        .collect();
    PointSet::with_duplicates(x.dim(), &rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn perturbations_inside_the_radius_keep_the_complex(
        x in any_points(1..=7),
        rho in 0.3f64..3.0,
        flavor in flavor(),
        seed in any::<u64>(),
    ) {
        let r = stability_radius(&x, rho, flavor);
        prop_assume!(r.is_finite() && r > 1e-9);
        let cap = x.len().saturating_sub(1).max(1);
        let before = oracle_complex(&x, rho, cap, flavor);
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for _ in 0..5 {
            let y = nudge(&x, r, &mut rng);
            // Index i of y is the image of index i of x: the matching is the identity.
            prop_assert_eq!(&oracle_complex(&y, rho, cap, flavor), &before);
        }
    }

    #[test]
    fn support_bounded_margin_equals_full_enumeration(x in any_points(1..=7), rho in 0.3f64..3.0) {
        let a = genericity_margin(&x, rho, Flavor::Cech);
        let b = genericity_margin_with(&x, rho, Flavor::Cech, MarginScope::AllSubsets);
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0) || (a.is_infinite() && b.is_infinite()));
    }

    #[test]
    fn make_generic_is_idempotent(x in any_points(2..=6), rho in 0.3f64..3.0, flavor in flavor()) {
        let once = make_generic(&x, rho, flavor, true).unwrap();
        let twice = make_generic(&once.points, rho, flavor, false).unwrap();
        prop_assert_eq!(twice.scale, 1.0);
        prop_assert_eq!(twice.points, once.points);
    }

    #[test]
    fn perturb_stays_inside_the_ball(x in any_points(1..=6), delta in 0.01f64..1.0, seed in any::<u64>()) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let y = perturb(&x, delta, &mut rng);
        for (p, q) in x.iter().zip(y.iter()) {
            prop_assert!(dist(p, q) < delta);
        }
        prop_assert!(bottleneck_set_distance(&x, &y).unwrap() < delta);
    }
}

#[test]
fn threshold_fixtures_are_made_generic() {
    let fixtures = threshold_fixtures();
    assert!(fixtures.len() >= 20);
    for (i, (x, flavor)) in fixtures.into_iter().enumerate() {
        assert!(
            genericity_margin(&x, 1.0, flavor) < 1e-9,
            "fixture {i} is not on the threshold"
        );
        let cap = x.len() - 1;
        let r = make_generic(&x, 1.0, flavor, false).unwrap();
        assert!(
            genericity_margin(&r.points, 1.0, flavor) > 0.0,
            "fixture {i}"
        );
        let before = oracle_complex(&x, 1.0, cap, flavor);
        let after = oracle_complex(&r.points, 1.0, cap, flavor);
        assert_eq!(before, after, "fixture {i}");
        let built = build_complex(&r.points, 1.0, cap, flavor).unwrap().complex;
        assert!(combinatorially_equivalent(&built, &before)
            .unwrap()
            .is_some());
    }
}

#[test]
fn pair_on_the_threshold_breaks() {
    let x = PointSet::new(2, &[[0.0, 0.0], [1.0, 0.0]]).unwrap();
    let check = verify_generic(&x, 1.0, 0.01, Flavor::Rips, 200, 3).unwrap();
    assert!(!check.is_stable());
}
