//! Weighted residual functionals over finite-atom measure spaces.
//!
//! For step functions `u` on atoms with masses `μ_i` and density `η_i`, the
//! extrema of `Σ η_i μ_i ‖u_i − P(u_i)‖²` over the class
//! `U = {Σ η_i μ_i ‖u_i‖² = r Σ η_i μ_i}` equal the sphere extrema of the
//! residual scaled by `Σ η_i μ_i`. The class is a sphere in the coordinates
//! `z_i = √(η_i μ_i) u_i`, which is how it is optimized here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::residual_sq;
use crate::levelset::LevelSets;
use crate::scalar::Real;
use crate::sets::Projector;
use crate::sphere::{self, Sense, SphereOptions};
use crate::vector::Vector;

/// Finite measure space with density `η ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DiscreteMeasureSpace<T> {
    atom_weights: Vec<T>,
    density: Vec<T>,
    /// Integrability exponent. Every step function over finitely many atoms
    /// lies in every `L^p`, so this has no computational effect.
    exponent: T,
}

impl<T: Real> DiscreteMeasureSpace<T> {
    pub fn new(atom_weights: Vec<T>, density: Vec<T>, exponent: T) -> Result<Self> {
        if atom_weights.is_empty() || atom_weights.len() != density.len() {
            return Err(Error::InvalidArgument(
                "need one density value per atom and at least one atom".into(),
            ));
        }
        if atom_weights.iter().any(|&m| !(m > T::zero() && m.is_finite())) {
            return Err(Error::InvalidArgument("atom masses must be positive".into()));
        }
        if density.iter().any(|&e| !(e >= T::zero() && e.is_finite())) {
            return Err(Error::InvalidArgument("density must be finite and non-negative".into()));
        }
        if !(exponent >= T::lit(2.0)) {
            return Err(Error::InvalidArgument("exponent p must be at least 2".into()));
        }
        let space = Self {
            atom_weights,
            density,
            exponent,
        };
        if !(space.total_weight() > T::zero()) {
            return Err(Error::InvalidArgument(
                "at least one atom needs positive density".into(),
            ));
        }
        Ok(space)
    }

    /// `n` atoms of unit mass and unit density.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![T::one(); n], vec![T::one(); n], T::lit(2.0))
    }

    pub fn len(&self) -> usize {
        self.atom_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atom_weights.is_empty()
    }

    pub fn atom_weights(&self) -> &[T] {
        &self.atom_weights
    }

    pub fn density(&self) -> &[T] {
        &self.density
    }

    pub fn exponent(&self) -> T {
        self.exponent
    }

    /// `η_i μ_i`
    pub fn weights(&self) -> impl Iterator<Item = T> + '_ {
        self.atom_weights.iter().zip(&self.density).map(|(&m, &e)| m * e)
    }

    /// `∫ η dμ = Σ η_i μ_i`
    pub fn total_weight(&self) -> T {
        self.weights().sum()
    }

    /// Same space with every mass multiplied by `c`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(
            self.atom_weights.iter().map(|&m| m * c).collect(),
            self.density.clone(),
            self.exponent,
        )
    }

    /// Same space with an extra atom appended.
    pub fn with_atom(&self, mu: T, eta: T) -> Result<Self> {
        let mut m = self.atom_weights.clone();
        let mut e = self.density.clone();
        m.push(mu);
        e.push(eta);
        Self::new(m, e, self.exponent)
    }
}

/// A function constant on each atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct StepFunction<T> {
    pub values: Vec<Vector<T>>,
}

impl<T: Real> StepFunction<T> {
    pub fn new(values: Vec<Vector<T>>) -> Result<Self> {
        if let Some(first) = values.first() {
            let n = first.dim();
            for v in &values {
                v.ensure_dim(n)?;
            }
        }
        Ok(Self { values })
    }

    pub fn constant(x: &Vector<T>, atoms: usize) -> Self {
        Self {
            values: vec![x.clone(); atoms],
        }
    }

    fn check(&self, space: &DiscreteMeasureSpace<T>, dim: usize) -> Result<()> {
        if self.values.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: self.values.len(),
            });
        }
        self.values.iter().try_for_each(|v| v.ensure_dim(dim))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// `Σ η_i μ_i ‖u_i‖² = r Σ η_i μ_i`
    Equality,
    /// `Σ η_i μ_i ‖u_i‖² ≤ r Σ η_i μ_i`
    Sublevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ConstraintClass<T> {
    pub kind: ConstraintKind,
    pub r: T,
}

impl<T: Real> ConstraintClass<T> {
    pub fn contains(&self, space: &DiscreteMeasureSpace<T>, u: &StepFunction<T>, tol: T) -> Result<bool> {
        let lhs = constraint_value(space, u)?;
        let rhs = self.r * space.total_weight();
        Ok(match self.kind {
            ConstraintKind::Equality => (lhs - rhs).abs() <= tol * (T::one() + rhs),
            ConstraintKind::Sublevel => lhs <= rhs + tol * (T::one() + rhs),
        })
    }
}

/// `Σ η_i μ_i ‖u_i − P(u_i)‖²`
pub fn integral_residual<T: Real>(
    space: &DiscreteMeasureSpace<T>,
    proj: &Projector<T>,
    u: &StepFunction<T>,
) -> Result<T> {
    u.check(space, proj.dim())?;
    let mut acc = T::zero();
    for (w, x) in space.weights().zip(&u.values) {
        if w > T::zero() {
            acc += w * residual_sq(proj, x)?;
        }
    }
    Ok(acc)
}

/// `Σ η_i μ_i ‖u_i‖²`
pub fn constraint_value<T: Real>(space: &DiscreteMeasureSpace<T>, u: &StepFunction<T>) -> Result<T> {
    if u.values.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            found: u.values.len(),
        });
    }
    Ok(space
        .weights()
        .zip(&u.values)
        .map(|(w, x)| w * x.norm_sq())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumMode {
    Min,
    Max,
}

impl From<ExtremumMode> for Sense {
    fn from(m: ExtremumMode) -> Self {
        match m {
            ExtremumMode::Min => Sense::Minimize,
            ExtremumMode::Max => Sense::Maximize,
        }
    }
}

fn check_level<T: Real>(proj: &Projector<T>, r: T, origin_threshold: T) -> Result<()> {
    proj.require_origin_outside(origin_threshold)?;
    let eps = T::lit(1e-3) * proj.p0_norm_sq();
    if r > eps && r < proj.p0_norm_sq() - eps {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "level r",
            value: r.as_f64(),
            lo: eps.as_f64(),
            hi: (proj.p0_norm_sq() - eps).as_f64(),
        })
    }
}

/// Best-effort extremum of the weighted residual over `U_{η,r}`.
///
/// Multi-start projected gradient in the coordinates `z_i = √(η_i μ_i) u_i`,
/// where the constraint is the sphere `‖z‖² = r Σ η_i μ_i`. Atoms with zero
/// weight do not enter the objective or the constraint and are set to `P(0)`.
pub fn extremize_over_u<T: Real>(
    space: &DiscreteMeasureSpace<T>,
    proj: &Projector<T>,
    r: T,
    mode: ExtremumMode,
    n_starts: usize,
    iters: usize,
    seed: u64,
) -> Result<(StepFunction<T>, T)> {
    check_level(proj, r, T::lit(1e-9))?;
    let n = proj.dim();
    let active: Vec<(usize, T)> = space
        .weights()
        .enumerate()
        .filter(|(_, w)| *w > T::zero())
        .map(|(i, w)| (i, w.sqrt()))
        .collect();
    if active.is_empty() {
        return Err(Error::Precondition("no atom with positive weight".into()));
    }
    let level = r * space.total_weight();
    let unpack = |z: &Vector<T>| -> Vec<Vector<T>> {
        active
            .iter()
            .enumerate()
            .map(|(k, &(_, s))| Vector::new(z.as_slice()[k * n..(k + 1) * n].to_vec()).scale(s.recip()))
            .collect()
    };
    let eval = |z: &Vector<T>| -> Result<(T, Vector<T>)> {
        let mut value = T::zero();
        let mut grad = Vec::with_capacity(z.dim());
        for (u, &(_, s)) in unpack(z).iter().zip(&active) {
            let d = u.sub(&proj.project(u)?);
            value += s * s * d.norm_sq();
            grad.extend(d.iter().map(|&c| T::lit(2.0) * s * c));
        }
        Ok((value, Vector::new(grad)))
    };
    let opts = SphereOptions {
        n_starts,
        max_iter: iters,
        ..SphereOptions::default()
    };
    // Constant functions along ±P(0) are natural candidates for both modes.
    let p0 = proj.project_origin();
    let constant_start = |sign: T| -> Vector<T> {
        let x = sphere::retract(&p0.scale(sign), r);
        Vector::new(active.iter().flat_map(|&(_, s)| x.scale(s).into_inner()).collect())
    };
    let seeds = [constant_start(T::one()), constant_start(-T::one())];
    let out = sphere::multistart(level, n * active.len(), mode.into(), &opts, seed, &seeds, eval)?;
    let mut values = vec![p0.clone(); space.len()];
    for (u, &(i, _)) in unpack(&out.point).into_iter().zip(&active) {
        values[i] = u;
    }
    let u = StepFunction { values };
    let value = integral_residual(space, proj, &u)?;
    Ok((u, value))
}

/// Budgets for [`verify_extrema_equalities`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremaBudget {
    pub n_starts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for ExtremaBudget {
    fn default() -> Self {
        Self {
            n_starts: 32,
            iters: 500,
            seed: 0,
        }
    }
}

/// Both sides of the inf/sup equalities at one level `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ExtremaReport<T> {
    pub r: T,
    pub lhs_min: T,
    pub rhs_min: T,
    pub gap_min: T,
    pub lhs_max: T,
    pub rhs_max: T,
    pub gap_max: T,
    pub attained_by_constant: bool,
}

/// Computes `inf_U`/`sup_U` of the weighted residual and compares them with
/// `inf_{S_r}`/`sup_{S_r}` of the residual times `Σ η_i μ_i`.
pub fn verify_extrema_equalities<T: Real>(
    space: &DiscreteMeasureSpace<T>,
    proj: &Projector<T>,
    r: T,
    levels: &LevelSets<'_, T>,
    budget: &ExtremaBudget,
) -> Result<ExtremaReport<T>> {
    check_level(proj, r, levels.options().origin_threshold)?;
    let w = space.total_weight();
    let (_, lhs_min) = extremize_over_u(space, proj, r, ExtremumMode::Min, budget.n_starts, budget.iters, budget.seed)?;
    let (_, lhs_max) = extremize_over_u(space, proj, r, ExtremumMode::Max, budget.n_starts, budget.iters, budget.seed)?;

    let sphere_min = levels.residual_extremum(r, Sense::Minimize, budget.n_starts, budget.seed)?;
    let w_hat = levels.sphere_min_point(r, budget.n_starts, budget.seed)?;
    let sup_residual = residual_sq(proj, &w_hat)?;
    let rhs_min = sphere_min.value * w;
    let rhs_max = sup_residual * w;

    let gap = |lhs: T, rhs: T| (lhs - rhs).abs() / T::one().max(rhs);
    let tol = T::lit(1e-6);
    let class = ConstraintClass {
        kind: ConstraintKind::Equality,
        r,
    };
    let mut attained = true;
    for (x, rhs) in [(&sphere_min.point, rhs_min), (&w_hat, rhs_max)] {
        let u = StepFunction::constant(x, space.len());
        attained &= class.contains(space, &u, tol)?;
        attained &= gap(integral_residual(space, proj, &u)?, rhs) <= tol;
    }
    Ok(ExtremaReport {
        r,
        lhs_min,
        rhs_min,
        gap_min: gap(lhs_min, rhs_min),
        lhs_max,
        rhs_max,
        gap_max: gap(lhs_max, rhs_max),
        attained_by_constant: attained,
    })
}
