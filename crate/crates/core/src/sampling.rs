//! Seeded random sampling helpers. Every randomized routine takes an explicit
//! seed and draws from a ChaCha stream so results are bit-reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Real;
use crate::vector::Vector;

pub type SampleRng = ChaCha8Rng;

/// RNG for `(seed, stream)`; distinct streams never overlap.
pub fn rng(seed: u64, stream: u64) -> SampleRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian<T: Real>(rng: &mut SampleRng, n: usize) -> Vector<T> {
    Vector::new(
        (0..n)
            .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
            .collect(),
    )
}

/// Uniform direction on the unit sphere of `R^n`.
pub fn unit_direction<T: Real>(rng: &mut SampleRng, n: usize) -> Vector<T> {
    loop {
        let g = gaussian::<T>(rng, n);
        let norm = g.norm();
        if norm > T::lit(1e-12) {
            return g.scale(norm.recip());
        }
    }
}

/// Uniform point of the closed ball `{‖x‖ ≤ radius}`.
pub fn uniform_ball<T: Real>(rng: &mut SampleRng, n: usize, radius: T) -> Vector<T> {
    let d = unit_direction::<T>(rng, n);
    let u: f64 = rng.random();
    let t = T::lit(u.powf(1.0 / n as f64)) * radius;
    d.scale(t)
}

/// Uniform point of the sphere of squared norm `r`.
pub fn sphere_point<T: Real>(rng: &mut SampleRng, n: usize, r: T) -> Vector<T> {
    unit_direction::<T>(rng, n).scale(r.sqrt())
}

pub fn uniform<T: Real>(rng: &mut SampleRng, lo: T, hi: T) -> T {
    let u: f64 = rng.random();
    lo + (hi - lo) * T::lit(u)
}
