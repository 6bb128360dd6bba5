//! Solvability of `P(x) + λQ(x) = 0` for monotone potential operators `Q`.
//!
//! Solutions are exactly the global minimizers of `J + λI`, where
//! `I(x) = ∫₀¹ ⟨Q(sx), x⟩ ds` is the potential of `Q`. The threshold `λ*`
//! above which solutions exist is estimated on a grid of sublevels of `I`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed_point::{invert_monotone, Monotonicity};
use crate::functional::{j_value, simpson};
use crate::sampling;
use crate::scalar::Real;
use crate::sets::Projector;
use crate::vector::Vector;

/// Coercive monotone potential operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[serde(bound = "T: Real")]
pub enum PotentialOperator<T> {
    Identity,
    /// `Q(x) = Ax` with `A` symmetric positive semidefinite (rows).
    LinearSymmetricPsd { matrix: Vec<Vec<T>> },
    /// `Q(x)_i = scale · x_i^p` with odd `p`.
    CoordinatewiseOddPower { exponent: u32, scale: T },
}

/// A potential operator with a Lipschitz bound valid on the working region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PotentialOperatorSpec<T> {
    #[serde(flatten)]
    pub operator: PotentialOperator<T>,
    /// Derived for the linear variants when omitted.
    #[serde(default)]
    pub lipschitz_bound: Option<T>,
}

impl<T: Real> PotentialOperatorSpec<T> {
    pub fn identity() -> Self {
        Self {
            operator: PotentialOperator::Identity,
            lipschitz_bound: None,
        }
    }

    pub fn linear(matrix: Vec<Vec<T>>) -> Self {
        Self {
            operator: PotentialOperator::LinearSymmetricPsd { matrix },
            lipschitz_bound: None,
        }
    }

    pub fn odd_power(exponent: u32, scale: T, lipschitz_bound: T) -> Self {
        Self {
            operator: PotentialOperator::CoordinatewiseOddPower { exponent, scale },
            lipschitz_bound: Some(lipschitz_bound),
        }
    }

    /// Structural checks for dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match &self.operator {
            PotentialOperator::Identity => {}
            PotentialOperator::LinearSymmetricPsd { matrix } => {
                if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidArgument(format!("matrix must be {n}×{n}")));
                }
                let tol = T::lit(1e-12);
                for i in 0..n {
                    for j in 0..i {
                        if (matrix[i][j] - matrix[j][i]).abs() > tol * (T::one() + matrix[i][j].abs()) {
                            return Err(Error::InvalidArgument("matrix must be symmetric".into()));
                        }
                    }
                }
                if cholesky_min_pivot(matrix, true) < -tol {
                    return Err(Error::InvalidArgument(
                        "matrix must be positive semidefinite".into(),
                    ));
                }
            }
            PotentialOperator::CoordinatewiseOddPower { exponent, scale } => {
                if exponent % 2 == 0 {
                    return Err(Error::InvalidArgument("exponent must be odd".into()));
                }
                if !(*scale > T::zero()) {
                    return Err(Error::InvalidArgument("scale must be positive".into()));
                }
                if *exponent > 1 && self.lipschitz_bound.is_none() {
                    return Err(Error::InvalidArgument(
                        "odd powers above 1 need an explicit lipschitz_bound".into(),
                    ));
                }
            }
        }
        if let Some(l) = self.lipschitz_bound {
            if !(l > T::zero()) {
                return Err(Error::InvalidArgument("lipschitz_bound must be positive".into()));
            }
        }
        Ok(())
    }

    /// Whether `I(x) → ∞` as `‖x‖ → ∞`.
    pub fn is_coercive(&self) -> bool {
        match &self.operator {
            PotentialOperator::LinearSymmetricPsd { matrix } => cholesky_min_pivot(matrix, false) > T::zero(),
            _ => true,
        }
    }

    pub fn lipschitz(&self) -> T {
        if let Some(l) = self.lipschitz_bound {
            return l;
        }
        match &self.operator {
            PotentialOperator::Identity => T::one(),
            // Frobenius norm bounds the spectral norm.
            PotentialOperator::LinearSymmetricPsd { matrix } => matrix
                .iter()
                .flatten()
                .map(|&a| a * a)
                .sum::<T>()
                .sqrt()
                .max(T::lit(1e-12)),
            PotentialOperator::CoordinatewiseOddPower { scale, .. } => *scale,
        }
    }

    /// `Q(x)`
    pub fn apply(&self, x: &Vector<T>) -> Vector<T> {
        match &self.operator {
            PotentialOperator::Identity => x.clone(),
            PotentialOperator::LinearSymmetricPsd { matrix } => Vector::new(
                matrix
                    .iter()
                    .map(|row| row.iter().zip(x.iter()).map(|(&a, &b)| a * b).sum())
                    .collect(),
            ),
            PotentialOperator::CoordinatewiseOddPower { exponent, scale } => {
                x.map(|c| *scale * c.powi(*exponent as i32))
            }
        }
    }

    /// Closed-form potential `I(x)`.
    pub fn potential(&self, x: &Vector<T>) -> T {
        match &self.operator {
            PotentialOperator::Identity => T::lit(0.5) * x.norm_sq(),
            PotentialOperator::LinearSymmetricPsd { .. } => T::lit(0.5) * self.apply(x).dot(x),
            PotentialOperator::CoordinatewiseOddPower { exponent, scale } => {
                let q = T::from_u32(exponent + 1).expect("small exponent");
                *scale * x.iter().map(|c| c.abs().powi(*exponent as i32 + 1)).sum::<T>() / q
            }
        }
    }
}

/// Smallest Cholesky pivot (negative when the matrix is indefinite).
fn cholesky_min_pivot<T: Real>(a: &[Vec<T>], semidefinite: bool) -> T {
    let n = a.len();
    let mut l = vec![vec![T::zero(); n]; n];
    let mut min_pivot = T::infinity();
    let shift = if semidefinite { T::lit(1e-10) } else { T::zero() };
    for j in 0..n {
        let mut d = a[j][j] + shift;
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        min_pivot = min_pivot.min(d - shift);
        if d <= T::zero() {
            return d - shift;
        }
        let dj = d.sqrt();
        l[j][j] = dj;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / dj;
        }
    }
    if n == 0 {
        T::zero()
    } else {
        min_pivot
    }
}

/// `I(x) = ∫₀¹ ⟨Q(sx), x⟩ ds`. With `n_quad = None` the closed form is used,
/// otherwise composite Simpson with `n_quad` intervals.
pub fn potential_value<T: Real>(q: &PotentialOperatorSpec<T>, x: &Vector<T>, n_quad: Option<usize>) -> Result<T> {
    match n_quad {
        None => Ok(q.potential(x)),
        Some(n) if n >= 2 => simpson(n, |s| Ok(q.apply(&x.scale(s)).dot(x))),
        Some(_) => Err(Error::InvalidArgument("n_quad must be at least 2".into())),
    }
}

/// Min over sampled pairs of `⟨Q(x) − Q(y), x − y⟩`.
pub fn check_monotone<T: Real>(
    q: &PotentialOperatorSpec<T>,
    dim: usize,
    n_pairs: usize,
    seed: u64,
    radius: T,
) -> Result<T> {
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("n_pairs must be at least 1".into()));
    }
    q.validate(dim)?;
    let mut rng = sampling::rng(seed, 41);
    let mut worst = T::infinity();
    for _ in 0..n_pairs {
        let x = sampling::uniform_ball(&mut rng, dim, radius);
        let y = sampling::uniform_ball(&mut rng, dim, radius);
        worst = worst.min(q.apply(&x).sub(&q.apply(&y)).dot(&x.sub(&y)));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LambdaStarEstimate<T> {
    pub value: T,
    pub r_grid: Vec<T>,
    pub samples_per_r: usize,
    pub argmin_r: T,
    pub argmin_x: Vector<T>,
    /// Grid levels skipped because no admissible sample was found.
    pub skipped: Vec<T>,
}

/// Point on the ray through `x` where `I` reaches `r` (or `x` itself when
/// `I(x) ≤ r`).
fn clamp_to_sublevel<T: Real>(q: &PotentialOperatorSpec<T>, x: &Vector<T>, r: T) -> Result<Vector<T>> {
    if q.potential(x) <= r {
        return Ok(x.clone());
    }
    let t = invert_monotone(
        |t| Ok(q.potential(&x.scale(t))),
        r,
        T::zero(),
        T::one(),
        T::lit(1e-15),
        Monotonicity::Increasing,
    )?;
    // Stay on the admissible side of the boundary.
    let mut y = x.scale(t);
    while q.potential(&y) > r {
        y = y.scale(T::one() - T::lit(1e-15));
    }
    Ok(y)
}

/// Estimate of `inf_{I ≤ r} J` by projected gradient with radial clamping.
fn sublevel_min<T: Real>(
    proj: &Projector<T>,
    q: &PotentialOperatorSpec<T>,
    r: T,
    starts: &[Vector<T>],
) -> Result<(T, Vector<T>)> {
    let mut best = (T::infinity(), Vector::zeros(proj.dim()));
    for s in starts {
        let mut x = clamp_to_sublevel(q, s, r)?;
        let mut fx = j_value(proj, &x)?;
        let mut step = T::one();
        for _ in 0..2000 {
            let g = proj.project(&x)?;
            let y = clamp_to_sublevel(q, &x.axpy(-step, &g), r)?;
            let fy = j_value(proj, &y)?;
            if fy < fx {
                let moved = y.dist(&x);
                x = y;
                fx = fy;
                if moved <= T::lit(1e-15) * (T::one() + x.norm()) {
                    break;
                }
            } else {
                step *= T::lit(0.5);
                if step < T::lit(1e-12) {
                    break;
                }
            }
        }
        if fx < best.0 {
            best = (fx, x);
        }
    }
    Ok(best)
}

fn quotient<T: Real>(proj: &Projector<T>, q: &PotentialOperatorSpec<T>, x: &Vector<T>, r: T, m: T) -> Result<Option<T>> {
    let gap = r - q.potential(x);
    if !(gap > T::zero()) {
        return Ok(None);
    }
    Ok(Some(((j_value(proj, x)? - m) / gap).max(T::zero())))
}

/// Estimate of `λ* = inf_r inf_{I(x) < r} (J(x) − inf_{I ≤ r} J) / (r − I(x))`
/// over a finite grid of levels `r`. Optimizer error on the inner infimum makes
/// this an upper bound on the true threshold.
pub fn lambda_star_estimate<T: Real>(
    proj: &Projector<T>,
    q: &PotentialOperatorSpec<T>,
    r_grid: &[T],
    samples_per_r: usize,
    seed: u64,
) -> Result<LambdaStarEstimate<T>> {
    let n = proj.dim();
    q.validate(n)?;
    if !q.is_coercive() {
        return Err(Error::Precondition("potential is not coercive".into()));
    }
    if samples_per_r < 10 {
        return Err(Error::InvalidArgument("samples_per_r must be at least 10".into()));
    }
    if r_grid.iter().any(|&r| !(r > T::zero())) {
        return Err(Error::InvalidArgument("every level must exceed inf I = 0".into()));
    }
    let mut best: Option<(T, T, Vector<T>)> = None;
    let mut skipped = Vec::new();
    for (k, &r) in r_grid.iter().enumerate() {
        let mut rng = sampling::rng(seed, 1000 + k as u64);
        // Directions scaled to the sublevel boundary.
        let mut boundary = Vec::with_capacity(samples_per_r);
        for _ in 0..samples_per_r {
            let d = sampling::unit_direction::<T>(&mut rng, n);
            let mut t = T::one();
            while q.potential(&d.scale(t)) < r {
                t *= T::lit(2.0);
            }
            boundary.push(clamp_to_sublevel(q, &d.scale(t), r)?);
        }
        let p0 = proj.project_origin();
        let mut starts: Vec<Vector<T>> = boundary.iter().take(8).cloned().collect();
        starts.push(Vector::zeros(n));
        if p0.norm_sq() > T::zero() {
            starts.push(p0.scale(-T::lit(1e6)));
        }
        let (mut m, x_min) = sublevel_min(proj, q, r, &starts)?;

        // Admissible samples strictly inside the sublevel set.
        let mut candidates = Vec::with_capacity(2 * samples_per_r + 1);
        for b in &boundary {
            let u: f64 = rand::Rng::random(&mut rng);
            candidates.push(b.scale(T::lit(u.powf(1.0 / n as f64))));
        }
        for shrink in [1e-3, 1e-6] {
            candidates.push(x_min.scale(T::one() - T::lit(shrink)));
        }
        for c in &candidates {
            m = m.min(j_value(proj, c)?);
        }
        let mut level_best: Option<(T, Vector<T>)> = None;
        for c in candidates {
            if let Some(v) = quotient(proj, q, &c, r, m)? {
                if level_best.as_ref().is_none_or(|(b, _)| v < *b) {
                    level_best = Some((v, c));
                }
            }
        }
        let Some((mut value, mut x)) = level_best else {
            skipped.push(r);
            continue;
        };
        // Local refinement: shrink toward the best point from random offsets.
        let mut radius = x.norm().max(T::one()) * T::lit(0.1);
        for _ in 0..200 {
            let trial = x.axpy(radius, &sampling::unit_direction(&mut rng, n));
            match quotient(proj, q, &trial, r, m)? {
                Some(v) if v < value => {
                    value = v;
                    x = trial;
                }
                _ => radius *= T::lit(0.7),
            }
            if radius < T::lit(1e-12) {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
            best = Some((value, r, x));
        }
    }
    let (value, argmin_r, argmin_x) = best.ok_or_else(|| {
        Error::Precondition("no admissible sample on any grid level".into())
    })?;
    Ok(LambdaStarEstimate {
        value,
        r_grid: r_grid.to_vec(),
        samples_per_r,
        argmin_r,
        argmin_x,
        skipped,
    })
}

/// Returned solution of `P(x) + λQ(x) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct EquationSolution<T> {
    pub lambda: T,
    pub x: Vector<T>,
    /// `‖P(x) + λQ(x)‖`, re-evaluated at the returned point.
    pub residual: T,
    pub iterations: usize,
}

/// Gradient descent on `J + λI` from the origin with the constant step
/// `1/(1 + λL)`; the gradient is `P + λQ`.
pub fn solve_projection_equation<T: Real>(
    proj: &Projector<T>,
    q: &PotentialOperatorSpec<T>,
    lambda: T,
    tol: T,
    max_iter: usize,
) -> Result<EquationSolution<T>> {
    solve_with_trace(proj, q, lambda, tol, max_iter, |_, _| {})
}

/// As [`solve_projection_equation`], calling `observe(k, F(x_k))` after each step.
pub fn solve_with_trace<T: Real>(
    proj: &Projector<T>,
    q: &PotentialOperatorSpec<T>,
    lambda: T,
    tol: T,
    max_iter: usize,
    mut observe: impl FnMut(usize, T),
) -> Result<EquationSolution<T>> {
    q.validate(proj.dim())?;
    if !(lambda > T::zero()) || !(tol > T::zero()) {
        return Err(Error::InvalidArgument("λ and tol must be positive".into()));
    }
    let step = (T::one() + lambda * q.lipschitz()).recip();
    let objective = |x: &Vector<T>| -> Result<T> { Ok(j_value(proj, x)? + lambda * q.potential(x)) };
    let mut x = Vector::zeros(proj.dim());
    observe(0, objective(&x)?);
    let mut residual = T::infinity();
    for k in 0..=max_iter {
        let grad = proj.project(&x)?.axpy(lambda, &q.apply(&x));
        residual = grad.norm();
        if residual <= tol {
            return Ok(EquationSolution {
                lambda,
                x,
                residual,
                iterations: k,
            });
        }
        if k == max_iter {
            break;
        }
        x = x.axpy(-step, &grad);
        observe(k + 1, objective(&x)?);
    }
    Err(Error::NotConverged {
        what: "projection equation solver",
        iterations: max_iter,
        residual: residual.as_f64(),
    })
}
