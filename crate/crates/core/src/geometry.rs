//! Sampled certificates for the geometric properties of `P`.
//!
//! Each check returns the worst violation it saw; zero or negative values
//! certify the property on the sample.

use crate::error::{Error, Result};
use crate::sampling::{self, SampleRng};
use crate::scalar::Real;
use crate::sets::Projector;
use crate::vector::Vector;

/// Max over sampled pairs of `‖P(x) − P(y)‖ − ‖x − y‖`.
///
/// Points are uniform in the ball of the given radius. The first pair is the
/// degenerate pair `x = y`.
pub fn check_nonexpansive<T: Real>(
    proj: &Projector<T>,
    n_pairs: usize,
    seed: u64,
    radius: T,
) -> Result<T> {
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("n_pairs must be at least 1".into()));
    }
    let n = proj.dim();
    let mut rng = sampling::rng(seed, 0);
    let mut worst = T::neg_infinity();
    for k in 0..n_pairs {
        let x = sampling::uniform_ball(&mut rng, n, radius);
        let y = if k == 0 {
            x.clone()
        } else {
            sampling::uniform_ball(&mut rng, n, radius)
        };
        let px = proj.project(&x)?;
        let py = proj.project(&y)?;
        worst = worst.max(px.dist(&py) - x.dist(&y));
    }
    Ok(worst)
}

/// Points of the set obtained by projecting Gaussian samples centred at
/// `centre`; this covers the boundary, where the inequality is tight.
fn set_samples<'a, T: Real>(
    proj: &'a Projector<T>,
    centre: &'a Vector<T>,
    spread: T,
    rng: &'a mut SampleRng,
) -> impl Iterator<Item = Result<Vector<T>>> + 'a {
    std::iter::repeat_with(move || {
        let z = centre.axpy(spread, &sampling::gaussian(rng, proj.dim()));
        proj.project(&z)
    })
}

/// Max over sampled `x ∈ X` of `⟨P(u) − u, P(u) − x⟩`.
pub fn check_variational_inequality<T: Real>(
    proj: &Projector<T>,
    u: &Vector<T>,
    n_samples: usize,
    seed: u64,
) -> Result<T> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let pu = proj.project(u)?;
    let normal = pu.sub(u);
    let spread = T::one() + normal.norm() + pu.norm_inf();
    let mut rng = sampling::rng(seed, 1);
    // x = P(u) itself contributes exactly zero.
    let mut worst = T::zero();
    for x in set_samples(proj, &pu, spread, &mut rng).take(n_samples) {
        worst = worst.max(normal.dot(&pu.sub(&x?)));
    }
    Ok(worst)
}

/// Max over `λ` of `‖P(u + λ(P(u) − u)) − P(u)‖`; every `λ` must be `< 1`.
pub fn check_ray_invariance<T: Real>(proj: &Projector<T>, u: &Vector<T>, lambdas: &[T]) -> Result<T> {
    if let Some(bad) = lambdas.iter().find(|&&l| !(l < T::one())) {
        return Err(Error::InvalidArgument(format!(
            "ray invariance is only asserted for λ < 1, got {bad}"
        )));
    }
    let pu = proj.project(u)?;
    let dir = pu.sub(u);
    let mut worst = T::zero();
    for &l in lambdas {
        let moved = proj.project(&u.axpy(l, &dir))?;
        worst = worst.max(moved.dist(&pu));
    }
    Ok(worst)
}

/// `‖P(−P(0)) − P(0)‖`; zero certifies that `−P(0)` is a fixed point of `−P`.
pub fn check_neg_fixed_point<T: Real>(proj: &Projector<T>) -> Result<T> {
    let p0 = proj.project_origin();
    Ok(proj.project(&p0.scale(-T::one()))?.dist(p0))
}

/// Max over sampled `x` of `‖P(P(x)) − P(x)‖`.
pub fn check_idempotence<T: Real>(
    proj: &Projector<T>,
    n_samples: usize,
    seed: u64,
    radius: T,
) -> Result<T> {
    let mut rng = sampling::rng(seed, 2);
    let mut worst = T::zero();
    for _ in 0..n_samples {
        let x = sampling::uniform_ball(&mut rng, proj.dim(), radius);
        let px = proj.project(&x)?;
        worst = worst.max(proj.project(&px)?.dist(&px));
    }
    Ok(worst)
}

/// Counts sampled points where "x is a fixed point of P" and "x ∈ X"
/// disagree. Points within `band` of the boundary are skipped.
pub fn check_fixed_points_are_members<T: Real>(
    proj: &Projector<T>,
    n_samples: usize,
    seed: u64,
    radius: T,
    band: T,
) -> Result<usize> {
    let mut rng = sampling::rng(seed, 3);
    let mut mismatches = 0;
    for k in 0..n_samples {
        // Alternate ambient points with points already in X.
        let ambient = sampling::uniform_ball(&mut rng, proj.dim(), radius);
        let x = if k % 2 == 0 { ambient } else { proj.project(&ambient)? };
        let moved = proj.project(&x)?.dist(&x);
        let inside = proj.contains(&x, T::zero())?;
        let near = proj.contains(&x, band)?;
        if (inside && moved > proj.accuracy()) || (!near && moved == T::zero()) {
            mismatches += 1;
        }
    }
    Ok(mismatches)
}
