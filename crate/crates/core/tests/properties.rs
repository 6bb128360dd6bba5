mod common;

use common::{random_exact_set, v};
use projkit::fixed_point::{fixed_point, fixed_point_from};
use projkit::functional::{j_gradient_fd, j_value};
use projkit::geometry::{
    check_fixed_points_are_members, check_idempotence, check_neg_fixed_point, check_nonexpansive,
    check_ray_invariance, check_variational_inequality,
};
use projkit::{sampling, ConvexSetSpec, Projector, Vector};
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = Vector<f64>> {
    prop::collection::vec(-10.0..10.0f64, n).prop_map(Vector::new)
}

fn set_and_points(k: usize) -> impl Strategy<Value = (Projector<f64>, Vec<Vector<f64>>)> {
    (1usize..=8, any::<u64>()).prop_flat_map(move |(n, seed)| {
        (Just(random_exact_set(seed, n)), prop::collection::vec(point(n), k))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn projection_is_nonexpansive((p, xs) in set_and_points(2)) {
        let d = p.project(&xs[0]).unwrap().dist(&p.project(&xs[1]).unwrap());
        prop_assert!(d <= xs[0].dist(&xs[1]) + 1e-9);
    }

    #[test]
    fn projection_is_idempotent_and_lands_in_set((p, xs) in set_and_points(1)) {
        let px = p.project(&xs[0]).unwrap();
        prop_assert!(p.project(&px).unwrap().dist(&px) <= 1e-10);
        prop_assert!(p.contains(&px, 1e-9).unwrap());
    }

    #[test]
    fn projection_satisfies_obtuse_angle((p, xs) in set_and_points(2)) {
        let pu = p.project(&xs[0]).unwrap();
        let member = p.project(&xs[1]).unwrap();
        prop_assert!(pu.sub(&xs[0]).dot(&pu.sub(&member)) <= 1e-9);
    }

    #[test]
    fn projection_is_constant_along_normal_ray(
        (p, xs) in set_and_points(1),
        lambda in -3.0..0.999f64,
    ) {
        prop_assert!(check_ray_invariance(&p, &xs[0], &[lambda]).unwrap() <= 1e-8);
    }

    #[test]
    fn j_is_convex_along_segments(
        (p, xs) in set_and_points(2),
        t in 0.0..1.0f64,
    ) {
        let mid = xs[0].scale(1.0 - t).add(&xs[1].scale(t));
        let chord = (1.0 - t) * j_value(&p, &xs[0]).unwrap() + t * j_value(&p, &xs[1]).unwrap();
        prop_assert!(j_value(&p, &mid).unwrap() <= chord + 1e-9);
    }

    #[test]
    fn j_lies_above_its_tangent_planes((p, xs) in set_and_points(2)) {
        let (x, y) = (&xs[0], &xs[1]);
        let tangent = j_value(&p, x).unwrap() + p.project(x).unwrap().dot(&y.sub(x));
        prop_assert!(j_value(&p, y).unwrap() >= tangent - 1e-9);
    }

    #[test]
    fn fixed_point_is_unique_across_starts(
        (p, xs) in set_and_points(3),
        lambda in -0.95..0.95f64,
    ) {
        let reference = fixed_point(&p, lambda, 1e-12, 100_000).unwrap();
        prop_assert!(reference.converged);
        for start in &xs {
            let other = fixed_point_from(&p, lambda, start, 1e-12, 100_000).unwrap();
            prop_assert!(other.point.dist(&reference.point) <= 1e-10);
        }
    }

    #[test]
    fn contraction_certificate_holds(
        (p, xs) in set_and_points(2),
        lambda in -0.95..0.95f64,
    ) {
        let (fx, fy) = (p.project(&xs[0]).unwrap().scale(lambda), p.project(&xs[1]).unwrap().scale(lambda));
        prop_assert!(fx.dist(&fy) <= lambda.abs() * xs[0].dist(&xs[1]) + 1e-12);
    }

    #[test]
    fn negated_origin_projection_is_a_fixed_point_of_minus_p(n in 1usize..=8, seed in any::<u64>()) {
        let p = random_exact_set(seed, n);
        prop_assert!(check_neg_fixed_point(&p).unwrap() <= 1e-10);
    }
}

#[test]
fn sampled_certificates_on_random_exact_sets() {
    for seed in 0..24 {
        for n in [1, 2, 3, 5, 8] {
            let p = random_exact_set(seed, n);
            assert!(check_nonexpansive(&p, 500, seed, 10.0).unwrap() <= 1e-9);
            assert!(check_idempotence(&p, 500, seed, 10.0).unwrap() <= 1e-10);
            let mut rng = sampling::rng(seed, 7);
            let u = sampling::uniform_ball(&mut rng, n, 10.0);
            assert!(check_variational_inequality(&p, &u, 500, seed).unwrap() <= 1e-9);
            assert_eq!(check_fixed_points_are_members(&p, 500, seed, 10.0, 1e-8).unwrap(), 0);
        }
    }
}

#[test]
fn gradient_matches_projection() {
    // P is 1-Lipschitz, so the central difference of J is within h of P(x)
    // even across the boundary.
    for seed in 0..16 {
        let n = 1 + (seed as usize % 6);
        let p = random_exact_set(seed, n);
        let mut rng = sampling::rng(seed, 8);
        for _ in 0..20 {
            let x: Vector<f64> = sampling::uniform_ball(&mut rng, n, 10.0);
            let g = j_gradient_fd(&p, &x, 1e-6).unwrap();
            assert!(g.dist(&p.project(&x).unwrap()) <= 1e-4, "seed {seed} at {x:?}");
        }
    }
}

#[test]
fn intersection_projection_is_nonexpansive_and_idempotent() {
    let set = ConvexSetSpec::intersection(vec![
        ConvexSetSpec::cube(3, -1.0, 1.0),
        ConvexSetSpec::Halfspace {
            normal: v(&[1.0, 1.0, 1.0]),
            offset: 0.5,
        },
    ]);
    let p = Projector::new(set, 3).unwrap();
    assert!(check_nonexpansive(&p, 300, 5, 5.0).unwrap() <= 1e-9);
    assert!(check_idempotence(&p, 300, 5, 5.0).unwrap() <= 1e-6);
}
