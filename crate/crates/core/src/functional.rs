//! The projection potential `J(x) = ½(‖x‖² − ‖x − P(x)‖² + ‖P(0)‖²)`.
//!
//! `J` is convex, vanishes at the origin and has gradient `P`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sets::Projector;
use crate::vector::Vector;

/// A value of `J` together with the point it was evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct JValue<T> {
    pub value: T,
    pub at: Vector<T>,
}

pub fn j_value<T: Real>(proj: &Projector<T>, x: &Vector<T>) -> Result<T> {
    let px = proj.project(x)?;
    Ok(j_from_projection(proj, x, &px))
}

pub fn j_eval<T: Real>(proj: &Projector<T>, x: &Vector<T>) -> Result<JValue<T>> {
    Ok(JValue {
        value: j_value(proj, x)?,
        at: x.clone(),
    })
}

/// `J(x)` when `P(x)` is already known.
pub fn j_from_projection<T: Real>(proj: &Projector<T>, x: &Vector<T>, px: &Vector<T>) -> T {
    T::lit(0.5) * (x.norm_sq() - x.dist_sq(px) + proj.p0_norm_sq())
}

/// `‖x − P(x)‖²`
pub fn residual_sq<T: Real>(proj: &Projector<T>, x: &Vector<T>) -> Result<T> {
    Ok(x.dist_sq(&proj.project(x)?))
}

/// Composite Simpson rule on `[0, 1]` with `n` intervals (rounded up to even).
pub fn simpson<T: Real>(n: usize, mut f: impl FnMut(T) -> Result<T>) -> Result<T> {
    let n = (n.max(2) + 1) & !1;
    let h = T::one() / T::from_usize_lossy(n);
    let mut acc = f(T::zero())? + f(T::one())?;
    for i in 1..n {
        let w = if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        acc += w * f(T::from_usize_lossy(i) * h)?;
    }
    Ok(acc * h / T::lit(3.0))
}

/// `J(x)` rebuilt as `∫₀¹ ⟨P(sx), x⟩ ds` by composite Simpson quadrature.
pub fn j_via_line_integral<T: Real>(proj: &Projector<T>, x: &Vector<T>, n_quad: usize) -> Result<T> {
    if n_quad < 2 {
        return Err(Error::InvalidArgument("n_quad must be at least 2".into()));
    }
    x.ensure_dim(proj.dim())?;
    simpson(n_quad, |s| Ok(proj.project(&x.scale(s))?.dot(x)))
}

/// Central finite-difference gradient of `J` with step `h`.
pub fn j_gradient_fd<T: Real>(proj: &Projector<T>, x: &Vector<T>, h: T) -> Result<Vector<T>> {
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    x.ensure_dim(proj.dim())?;
    let mut grad = Vector::zeros(x.dim());
    for i in 0..x.dim() {
        let mut fwd = x.clone();
        let mut bwd = x.clone();
        fwd[i] += h;
        bwd[i] -= h;
        grad[i] = (j_value(proj, &fwd)? - j_value(proj, &bwd)?) / (T::lit(2.0) * h);
    }
    Ok(grad)
}
