mod common;

use common::{ball2, clamp1, random_bounded_set};
use projkit::integral::{
    constraint_value, extremize_over_u, integral_residual, verify_extrema_equalities, ConstraintClass,
    ConstraintKind, DiscreteMeasureSpace, ExtremaBudget, ExtremumMode, StepFunction,
};
use projkit::levelset::{LevelSetOptions, LevelSets};
use projkit::{sampling, Projector, Vector};

fn spaces() -> Vec<DiscreteMeasureSpace<f64>> {
    vec![
        DiscreteMeasureSpace::uniform(2).unwrap(),
        DiscreteMeasureSpace::new(vec![0.5, 1.0, 2.0, 0.25], vec![1.0, 3.0, 0.5, 2.0], 2.0).unwrap(),
    ]
}

#[test]
fn equalities_hold_on_both_oracles() {
    let budget = ExtremaBudget::default();
    for p in [clamp1(), ball2()] {
        let ls = LevelSets::new(&p, LevelSetOptions::default());
        let c = p.p0_norm_sq();
        for space in spaces() {
            for frac in [0.1, 0.5, 0.9] {
                let rep = verify_extrema_equalities(&space, &p, frac * c, &ls, &budget).unwrap();
                assert!(rep.gap_min <= 1e-4 && rep.gap_max <= 1e-4, "{rep:?}");
                assert!(rep.attained_by_constant);
            }
        }
    }
}

#[test]
fn zero_density_atom_changes_nothing() {
    let budget = ExtremaBudget::default();
    for p in [clamp1(), ball2()] {
        let ls = LevelSets::new(&p, LevelSetOptions::default());
        let r = 0.25 * p.p0_norm_sq();
        for space in spaces() {
            let base = verify_extrema_equalities(&space, &p, r, &ls, &budget).unwrap();
            let padded = space.with_atom(2.0, 0.0).unwrap();
            let more = verify_extrema_equalities(&padded, &p, r, &ls, &budget).unwrap();
            for (a, b) in [
                (base.lhs_min, more.lhs_min),
                (base.rhs_min, more.rhs_min),
                (base.lhs_max, more.lhs_max),
                (base.rhs_max, more.rhs_max),
            ] {
                assert!((a - b).abs() <= 1e-12, "{base:?} vs {more:?}");
            }
        }
    }
}

#[test]
fn both_sides_scale_with_the_measure() {
    let budget = ExtremaBudget::default();
    let p = ball2();
    let ls = LevelSets::new(&p, LevelSetOptions::default());
    for space in spaces() {
        let base = verify_extrema_equalities(&space, &p, 1.0, &ls, &budget).unwrap();
        for c in [0.5, 3.0] {
            let scaled = verify_extrema_equalities(&space.scaled(c).unwrap(), &p, 1.0, &ls, &budget).unwrap();
            for (a, b) in [
                (base.lhs_min, scaled.lhs_min),
                (base.rhs_min, scaled.rhs_min),
                (base.lhs_max, scaled.lhs_max),
                (base.rhs_max, scaled.rhs_max),
            ] {
                assert!((c * a - b).abs() <= 1e-6 * b.abs().max(1.0), "c={c}: {a} {b}");
            }
        }
    }
}

#[test]
fn optimizer_never_undercuts_the_sphere_bound() {
    for seed in 0..4 {
        let p = random_bounded_set(seed, 2 + seed as usize % 2);
        let ls = LevelSets::new(&p, LevelSetOptions::default());
        let c = p.p0_norm_sq();
        for space in spaces() {
            let r = 0.4 * c;
            let bound = ls.gamma_direct(r, 32, seed).unwrap() * space.total_weight();
            let (u, value) = extremize_over_u(&space, &p, r, ExtremumMode::Min, 8, 200, seed).unwrap();
            assert!(value >= bound - 1e-6);
            let class = ConstraintClass { kind: ConstraintKind::Equality, r };
            assert!(class.contains(&space, &u, 1e-9).unwrap());
        }
    }
}

#[test]
fn random_feasible_functions_never_undercut_the_bound() {
    let p = clamp1();
    let ls = LevelSets::new(&p, LevelSetOptions::default());
    let space = &spaces()[1];
    let w = space.total_weight();
    let r = 0.36;
    let bound = ls.gamma_direct(r, 32, 0).unwrap() * w;
    let mut rng = sampling::rng(17, 0);
    for _ in 0..2000 {
        let raw: Vec<Vector<f64>> = (0..space.len()).map(|_| sampling::gaussian(&mut rng, 1)).collect();
        let u = StepFunction::new(raw).unwrap();
        let scale = (r * w / constraint_value(space, &u).unwrap()).sqrt();
        let u = StepFunction::new(u.values.iter().map(|x| x.scale(scale)).collect()).unwrap();
        assert!(integral_residual(space, &p, &u).unwrap() >= bound - 1e-6);
    }
}

#[test]
fn sublevel_class_contains_equality_class() {
    let p: Projector<f64> = clamp1();
    let space = &spaces()[0];
    let (u, _) = extremize_over_u(space, &p, 0.25, ExtremumMode::Max, 8, 200, 0).unwrap();
    let eq = ConstraintClass { kind: ConstraintKind::Equality, r: 0.25 };
    let sub = ConstraintClass { kind: ConstraintKind::Sublevel, r: 0.25 };
    assert!(eq.contains(space, &u, 1e-9).unwrap());
    assert!(sub.contains(space, &u, 1e-9).unwrap());
}
