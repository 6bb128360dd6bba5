//! Projected gradient on spheres `{‖x‖² = r}` with radial retraction.

use crate::error::{Error, Result};
use crate::sampling;
use crate::scalar::Real;
use crate::vector::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereOptions<T> {
    pub n_starts: usize,
    pub max_iter: usize,
    /// Initial step length as a fraction of the radius `√r`.
    pub step_rel: T,
    /// Stop once the tangential gradient norm falls below this.
    pub grad_tol: T,
    /// Angular pitch of the exhaustive scan used in dimension 2.
    pub angular_pitch: T,
}

impl<T: Real> Default for SphereOptions<T> {
    fn default() -> Self {
        Self {
            n_starts: 32,
            max_iter: 500,
            step_rel: T::lit(0.1),
            grad_tol: T::lit(1e-11),
            angular_pitch: T::lit(1e-4),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereOutcome<T> {
    pub point: Vector<T>,
    /// Objective value at `point` (not sign-flipped).
    pub value: T,
    pub iterations: usize,
}

/// Rescales `x` onto the sphere of squared norm `r`.
pub fn retract<T: Real>(x: &Vector<T>, r: T) -> Vector<T> {
    let n = x.norm();
    if n > T::zero() {
        x.scale(r.sqrt() / n)
    } else {
        let mut e = Vector::zeros(x.dim());
        e[0] = r.sqrt();
        e
    }
}

/// Local optimization on the sphere from `start`.
///
/// `eval` returns the objective and its Euclidean gradient. Steps follow the
/// tangential gradient, are retracted radially and accepted under an Armijo
/// test; the step length doubles after each success and halves on failure.
pub fn optimize_on_sphere<T: Real>(
    r: T,
    start: &Vector<T>,
    sense: Sense,
    opts: &SphereOptions<T>,
    mut eval: impl FnMut(&Vector<T>) -> Result<(T, Vector<T>)>,
) -> Result<SphereOutcome<T>> {
    if !(r > T::zero()) {
        return Err(Error::InvalidArgument("sphere level must be positive".into()));
    }
    let sign = match sense {
        Sense::Minimize => T::one(),
        Sense::Maximize => -T::one(),
    };
    let mut signed = |x: &Vector<T>| -> Result<(T, Vector<T>)> {
        let (f, g) = eval(x)?;
        Ok((sign * f, g.scale(sign)))
    };
    let mut x = retract(start, r);
    let (mut f, mut g) = signed(&x)?;
    let mut alpha = T::zero();
    let mut iterations = 0;
    let min_alpha = T::lit(1e-30);
    while iterations < opts.max_iter {
        let tangent = g.axpy(-g.dot(&x) / r, &x);
        let gnorm = tangent.norm();
        if gnorm <= opts.grad_tol {
            break;
        }
        if alpha == T::zero() {
            alpha = opts.step_rel * r.sqrt() / gnorm;
        }
        let mut accepted = false;
        while alpha > min_alpha {
            let y = retract(&x.axpy(-alpha, &tangent), r);
            let (fy, gy) = signed(&y)?;
            if fy <= f - T::lit(1e-4) * alpha * gnorm * gnorm {
                x = y;
                f = fy;
                g = gy;
                accepted = true;
                alpha *= T::lit(2.0);
                break;
            }
            alpha *= T::lit(0.5);
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    Ok(SphereOutcome {
        point: x,
        value: sign * f,
        iterations,
    })
}

fn better<T: Real>(sense: Sense, a: T, b: T) -> bool {
    match sense {
        Sense::Minimize => a < b,
        Sense::Maximize => a > b,
    }
}

/// Best point of an exhaustive scan of the sphere in dimensions 1 and 2.
pub fn exhaustive_scan<T: Real>(
    r: T,
    dim: usize,
    sense: Sense,
    pitch: T,
    mut value: impl FnMut(&Vector<T>) -> Result<T>,
) -> Result<Option<(Vector<T>, T)>> {
    let radius = r.sqrt();
    let candidates: Box<dyn Iterator<Item = Vector<T>>> = match dim {
        1 => Box::new([radius, -radius].into_iter().map(|c| Vector::new(vec![c]))),
        2 => {
            let two_pi = T::lit(std::f64::consts::TAU);
            let steps = (two_pi / pitch).ceil().to_usize().unwrap_or(0).max(4);
            let d = two_pi / T::from_usize_lossy(steps);
            Box::new((0..steps).map(move |k| {
                let th = d * T::from_usize_lossy(k);
                Vector::new(vec![radius * th.cos(), radius * th.sin()])
            }))
        }
        _ => return Ok(None),
    };
    let mut best: Option<(Vector<T>, T)> = None;
    for x in candidates {
        let v = value(&x)?;
        if best.as_ref().is_none_or(|(_, b)| better(sense, v, *b)) {
            best = Some((x, v));
        }
    }
    Ok(best)
}

/// Multi-start optimization: random starts from `seed`, any extra
/// `seeds_points`, and in dimensions ≤ 2 the exhaustive scan, each polished
/// by [`optimize_on_sphere`]. Returns the best result.
pub fn multistart<T: Real>(
    r: T,
    dim: usize,
    sense: Sense,
    opts: &SphereOptions<T>,
    seed: u64,
    seed_points: &[Vector<T>],
    mut eval: impl FnMut(&Vector<T>) -> Result<(T, Vector<T>)>,
) -> Result<SphereOutcome<T>> {
    let mut starts: Vec<Vector<T>> = seed_points.to_vec();
    if let Some((x, _)) = exhaustive_scan(r, dim, sense, opts.angular_pitch, |x| Ok(eval(x)?.0))? {
        starts.push(x);
    }
    let mut rng = sampling::rng(seed, 17);
    for _ in 0..opts.n_starts {
        starts.push(sampling::sphere_point(&mut rng, dim, r));
    }
    let mut best: Option<SphereOutcome<T>> = None;
    for s in &starts {
        let out = if dim == 1 {
            // S_r is the two-point set {±√r}; no descent needed.
            let x = retract(s, r);
            let (value, _) = eval(&x)?;
            SphereOutcome {
                point: x,
                value,
                iterations: 0,
            }
        } else {
            optimize_on_sphere(r, s, sense, opts, &mut eval)?
        };
        if best.as_ref().is_none_or(|b| better(sense, out.value, b.value)) {
            best = Some(out);
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no starting points".into()))
}
