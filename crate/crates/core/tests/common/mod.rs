#![allow(dead_code)]

use projkit::sampling;
use projkit::{ConvexSetSpec, Projector, Vector};
use rand::Rng;

pub fn v(c: &[f64]) -> Vector<f64> {
    Vector::from_f64(c)
}

pub fn clamp1() -> Projector<f64> {
    Projector::from_set(ConvexSetSpec::interval(1.0, 2.0)).unwrap()
}

pub fn ball2() -> Projector<f64> {
    Projector::from_set(ConvexSetSpec::ball(&[3.0, 0.0], 1.0)).unwrap()
}

/// Random bounded set of dimension `n` that avoids the origin.
pub fn random_bounded_set(seed: u64, n: usize) -> Projector<f64> {
    let mut rng = sampling::rng(seed, 900);
    let kind = rng.random_range(0..4);
    let dir: Vector<f64> = sampling::unit_direction(&mut rng, n);
    let set = match kind {
        0 => {
            let radius = rng.random_range(0.3..1.5);
            let dist = radius + rng.random_range(0.5..2.0);
            ConvexSetSpec::Ball {
                center: dir.scale(dist),
                radius,
            }
        }
        1 => {
            let lo: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.random_range(0.1..1.5)).collect();
            ConvexSetSpec::Box { lo: v(&lo), hi: v(&hi) }
        }
        2 => ConvexSetSpec::Translate {
            base: Box::new(ConvexSetSpec::Simplex {
                scale: rng.random_range(0.5..2.0),
            }),
            shift: dir.scale(rng.random_range(1.0..2.0)),
        },
        _ => ConvexSetSpec::Translate {
            base: Box::new(ConvexSetSpec::ball(&vec![0.0; n], rng.random_range(0.2..1.0))),
            shift: v(&vec![1.5; n]),
        },
    };
    let p = Projector::new(set, n).unwrap();
    assert!(p.p0_norm_sq() > 1e-3, "fixture must avoid the origin");
    p
}

/// Random set of any exact variant (may contain the origin).
pub fn random_exact_set(seed: u64, n: usize) -> Projector<f64> {
    let mut rng = sampling::rng(seed, 901);
    let dir: Vector<f64> = sampling::unit_direction(&mut rng, n);
    let set = match rng.random_range(0..6) {
        0 => ConvexSetSpec::Halfspace {
            normal: dir,
            offset: rng.random_range(-2.0..2.0),
        },
        1 => ConvexSetSpec::Hyperplane {
            normal: dir,
            offset: rng.random_range(-2.0..2.0),
        },
        2 => {
            let lo: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..1.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.random_range(0.0..2.0)).collect();
            ConvexSetSpec::Box { lo: v(&lo), hi: v(&hi) }
        }
        3 => ConvexSetSpec::Ball {
            center: dir.scale(rng.random_range(0.0..3.0)),
            radius: rng.random_range(0.1..2.0),
        },
        4 => ConvexSetSpec::Simplex {
            scale: rng.random_range(0.1..3.0),
        },
        _ => ConvexSetSpec::Translate {
            base: Box::new(ConvexSetSpec::ball(&vec![0.0; n], rng.random_range(0.2..1.0))),
            shift: dir.scale(rng.random_range(0.0..3.0)),
        },
    };
    Projector::new(set, n).unwrap()
}
