//! Banach iteration for the contractions `λP`, the profiles
//! `g(λ) = J(ŷ_λ)` and `h(λ) = ‖ŷ_{1/λ}‖²`, and their monotone inverses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::j_value;
use crate::scalar::Real;
use crate::sets::Projector;
use crate::vector::Vector;

/// Exclusion zone around `|λ| = 1`, where the contraction constant degenerates.
pub const LAMBDA_MARGIN: f64 = 1e-6;

/// The fixed point `ŷ_λ` of `λP` with convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult<T> {
    pub point: Vector<T>,
    pub lambda: T,
    pub iterations: usize,
    /// `‖λP(point) − point‖`
    pub residual: T,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions<T> {
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for FixedPointOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-13),
            max_iter: 1_000_000,
        }
    }
}

/// Iterates `x ← λP(x)` from the origin.
///
/// Stops once `‖x_{k+1} − x_k‖ ≤ tol·(1 − |λ|)/|λ|`, which bounds the distance
/// to `ŷ_λ` by `tol`, or after the a-priori iteration count that gives the
/// same bound.
pub fn fixed_point<T: Real>(
    proj: &Projector<T>,
    lambda: T,
    tol: T,
    max_iter: usize,
) -> Result<FixedPointResult<T>> {
    fixed_point_from(proj, lambda, &Vector::zeros(proj.dim()), tol, max_iter)
}

pub fn fixed_point_from<T: Real>(
    proj: &Projector<T>,
    lambda: T,
    start: &Vector<T>,
    tol: T,
    max_iter: usize,
) -> Result<FixedPointResult<T>> {
    let margin = T::lit(LAMBDA_MARGIN);
    let k = lambda.abs();
    if !(k <= T::one() - margin) {
        return Err(Error::OutOfRange {
            what: "contraction factor λ",
            value: lambda.as_f64(),
            lo: -1.0 + LAMBDA_MARGIN,
            hi: 1.0 - LAMBDA_MARGIN,
        });
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    start.ensure_dim(proj.dim())?;
    let stop = tol * (T::one() - k) / k.max(margin);
    let mut x = start.clone();
    let mut cap = max_iter;
    let mut iterations = 0;
    while iterations < cap {
        let next = proj.project(&x)?.scale(lambda);
        let step = next.dist(&x);
        x = next;
        iterations += 1;
        if step <= stop {
            break;
        }
        if iterations == 1 && k > T::zero() {
            // a-priori bound: k^m ‖x₁ − x₀‖ / (1 − k) ≤ tol
            let m = ((tol * (T::one() - k) / step).ln() / k.ln()).ceil();
            if let Some(m) = m.to_usize() {
                cap = cap.min(m.saturating_add(1));
            }
        }
    }
    let residual = proj.project(&x)?.scale(lambda).dist(&x);
    Ok(FixedPointResult {
        point: x,
        lambda,
        iterations,
        residual,
        converged: residual <= tol,
    })
}

fn converged_point<T: Real>(
    proj: &Projector<T>,
    lambda: T,
    opts: &FixedPointOptions<T>,
) -> Result<Vector<T>> {
    let res = fixed_point(proj, lambda, opts.tol, opts.max_iter)?;
    if res.converged {
        Ok(res.point)
    } else {
        Err(Error::NotConverged {
            what: "fixed-point iteration",
            iterations: res.iterations,
            residual: res.residual.as_f64(),
        })
    }
}

/// `g(λ) = J(ŷ_λ)` for `λ ∈ (−1, 1)`.
pub fn g_value<T: Real>(proj: &Projector<T>, lambda: T, opts: &FixedPointOptions<T>) -> Result<T> {
    j_value(proj, &converged_point(proj, lambda, opts)?)
}

/// The point `ŷ_{1/λ}` for `λ > 1`.
pub fn y_hat_reciprocal<T: Real>(
    proj: &Projector<T>,
    lambda: T,
    opts: &FixedPointOptions<T>,
) -> Result<Vector<T>> {
    if !(lambda > T::one() + T::lit(LAMBDA_MARGIN)) {
        return Err(Error::OutOfRange {
            what: "h parameter λ",
            value: lambda.as_f64(),
            lo: 1.0 + LAMBDA_MARGIN,
            hi: f64::INFINITY,
        });
    }
    converged_point(proj, lambda.recip(), opts)
}

/// `h(λ) = ‖ŷ_{1/λ}‖²` for `λ > 1`.
pub fn h_value<T: Real>(proj: &Projector<T>, lambda: T, opts: &FixedPointOptions<T>) -> Result<T> {
    Ok(y_hat_reciprocal(proj, lambda, opts)?.norm_sq())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// Bisection for `f(p) = target` on `[lo, hi]` with `f` monotone.
///
/// Returns once `|f(p) − target| ≤ tol`, the bracket is narrower than `tol`,
/// or the bracket cannot be split further in floating point.
pub fn invert_monotone<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    target: T,
    lo: T,
    hi: T,
    tol: T,
    direction: Monotonicity,
) -> Result<T> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument("bisection needs lo < hi".into()));
    }
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a)?, f(b)?);
    let (fmin, fmax) = (fa.min(fb), fa.max(fb));
    if !(target >= fmin && target <= fmax) {
        return Err(Error::OutOfRange {
            what: "inversion target",
            value: target.as_f64(),
            lo: fmin.as_f64(),
            hi: fmax.as_f64(),
        });
    }
    if (fa - target).abs() <= tol {
        return Ok(a);
    }
    if (fb - target).abs() <= tol {
        return Ok(b);
    }
    let half = T::lit(0.5);
    loop {
        let mid = a + (b - a) * half;
        if b - a <= tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if (fm - target).abs() <= tol {
            return Ok(mid);
        }
        let below = match direction {
            Monotonicity::Increasing => fm < target,
            Monotonicity::Decreasing => fm > target,
        };
        if below {
            a = mid;
        } else {
            b = mid;
        }
    }
}

/// Brackets and tolerances for `g⁻¹` and `h⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions<T> {
    pub g_bracket: (T, T),
    pub h_bracket: (T, T),
    /// Fallback brackets tried when the target lies outside the default ones.
    pub g_bracket_wide: (T, T),
    pub h_bracket_wide: (T, T),
    pub tol: T,
    pub fixed_point: FixedPointOptions<T>,
}

impl<T: Real> Default for InversionOptions<T> {
    fn default() -> Self {
        Self {
            g_bracket: (T::lit(-1.0 + 1e-2), T::lit(1.0 - 1e-2)),
            h_bracket: (T::lit(1.0 + 1e-2), T::lit(1e3)),
            g_bracket_wide: (T::lit(-1.0 + 1e-4), T::lit(1.0 - 1e-4)),
            h_bracket_wide: (T::lit(1.0 + 1e-4), T::lit(1e6)),
            tol: T::lit(1e-14),
            fixed_point: FixedPointOptions::default(),
        }
    }
}

fn invert_with_fallback<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    target: T,
    brackets: [(T, T); 2],
    tol: T,
    direction: Monotonicity,
) -> Result<T> {
    match invert_monotone(&mut f, target, brackets[0].0, brackets[0].1, tol, direction) {
        Err(Error::OutOfRange { .. }) => {
            invert_monotone(f, target, brackets[1].0, brackets[1].1, tol, direction)
        }
        other => other,
    }
}

/// `g⁻¹(r)` by bisection.
pub fn g_inverse<T: Real>(proj: &Projector<T>, r: T, opts: &InversionOptions<T>) -> Result<T> {
    invert_with_fallback(
        |l| g_value(proj, l, &opts.fixed_point),
        r,
        [opts.g_bracket, opts.g_bracket_wide],
        opts.tol,
        Monotonicity::Increasing,
    )
}

/// `h⁻¹(r)` by bisection.
pub fn h_inverse<T: Real>(proj: &Projector<T>, r: T, opts: &InversionOptions<T>) -> Result<T> {
    invert_with_fallback(
        |l| h_value(proj, l, &opts.fixed_point),
        r,
        [opts.h_bracket, opts.h_bracket_wide],
        opts.tol,
        Monotonicity::Decreasing,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    G,
    H,
    Gamma,
    Phi,
}

/// A scalar map sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T> {
    pub grid: Vec<T>,
    pub values: Vec<T>,
    pub meaning: ProfileKind,
}

impl<T: Real> Profile<T> {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Largest `values[i+1] − values[i]`; negative means strictly decreasing.
    pub fn max_increment(&self) -> T {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::neg_infinity(), T::max)
    }

    /// Smallest `values[i+1] − values[i]`; positive means strictly increasing.
    pub fn min_increment(&self) -> T {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::infinity(), T::min)
    }
}

pub(crate) fn validate_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.iter().any(|g| !g.is_finite()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(
            "grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Pointwise evaluation of one of the profiles on `grid`.
///
/// `Gamma` and `Phi` are evaluated with default level-set options.
pub fn profile<T: Real>(
    proj: &Projector<T>,
    meaning: ProfileKind,
    grid: &[T],
    opts: &FixedPointOptions<T>,
) -> Result<Profile<T>> {
    validate_grid(grid)?;
    let values = match meaning {
        ProfileKind::G => grid
            .iter()
            .map(|&l| g_value(proj, l, opts))
            .collect::<Result<Vec<_>>>()?,
        ProfileKind::H => grid
            .iter()
            .map(|&l| h_value(proj, l, opts))
            .collect::<Result<Vec<_>>>()?,
        ProfileKind::Gamma | ProfileKind::Phi => {
            let inv = InversionOptions {
                fixed_point: *opts,
                ..Default::default()
            };
            let ls = crate::levelset::LevelSets::new(
                proj,
                crate::levelset::LevelSetOptions {
                    inversion: inv,
                    ..Default::default()
                },
            );
            grid.iter()
                .map(|&r| match meaning {
                    ProfileKind::Gamma => ls.gamma_value(r),
                    _ => ls.phi_value(r),
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(Profile {
        grid: grid.to_vec(),
        values,
        meaning,
    })
}
