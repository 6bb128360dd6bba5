//! Distinguished points on the level sets of `J` and on the spheres `S_r`,
//! and the residual profile `γ(r) = inf_{S_r} ‖x − P(x)‖²`.
//!
//! * `x̂_r = ŷ_{g⁻¹(r)}`: the point of minimal norm on `J⁻¹(r)`.
//! * `v̂_r = ŷ_{1/h⁻¹(r)}`: the maximizer of `J` on `S_r`.
//! * `ŵ_r`: a minimizer of `J` on `S_r` (multi-start search).
//!
//! On `S_r` the residual equals `r + ‖P(0)‖² − 2J`, so `γ` is computed from
//! `φ(r) = J(v̂_r)` and, independently, by direct minimization of the residual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed_point::{self, validate_grid, InversionOptions, Monotonicity};
use crate::functional::{j_from_projection, j_value, residual_sq};
use crate::sampling;
use crate::scalar::Real;
use crate::sets::Projector;
use crate::sphere::{self, Sense, SphereOptions, SphereOutcome};
use crate::vector::Vector;

/// One row of the `γ` diagnostics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GammaRow<T> {
    pub r: T,
    pub gamma: T,
    /// central difference of `γ`
    pub gamma_fd: T,
    pub h_inv: T,
    /// `φ(r) = sup_{S_r} J`
    pub phi: T,
    pub phi_fd: T,
    /// `‖P(v̂_r) − h⁻¹(r)·v̂_r‖`
    pub eigen_residual: T,
    /// `|γ′ + h⁻¹(r)|`
    pub paper_c9_residual: T,
    /// `|γ′ − (1 − h⁻¹(r))|`
    pub envelope_residual: T,
    /// `(γ(r+h) − 2γ(r) + γ(r−h)) / h²`
    pub second_diff: T,
}

impl<T: Real> GammaRow<T> {
    pub const CSV_HEADER: &'static str = "r,gamma,gamma_fd,h_inv,phi,phi_fd,eigen_residual,paper_c9_residual,envelope_residual,second_diff";

    pub fn fields(&self) -> [T; 10] {
        [
            self.r,
            self.gamma,
            self.gamma_fd,
            self.h_inv,
            self.phi,
            self.phi_fd,
            self.eigen_residual,
            self.paper_c9_residual,
            self.envelope_residual,
            self.second_diff,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFamily {
    XHat,
    VHat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetOptions<T> {
    pub inversion: InversionOptions<T>,
    pub sphere: SphereOptions<T>,
    pub seed: u64,
    /// Endpoint margin as a fraction of `‖P(0)‖²`.
    pub epsilon_rel: T,
    /// `‖P(0)‖²` must exceed this for `0 ∉ X`.
    pub origin_threshold: T,
    /// Upper end of the ray search for level-set samples.
    pub ray_t_max: T,
}

impl<T: Real> Default for LevelSetOptions<T> {
    fn default() -> Self {
        Self {
            inversion: InversionOptions::default(),
            sphere: SphereOptions::default(),
            seed: 0,
            epsilon_rel: T::lit(1e-3),
            origin_threshold: T::lit(1e-9),
            ray_t_max: T::lit(1e3),
        }
    }
}

/// `v̂_r` together with `h⁻¹(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMax<T> {
    pub point: Vector<T>,
    pub h_inv: T,
    pub j: T,
}

/// Level-set and sphere computations for one projector.
#[derive(Debug, Clone)]
pub struct LevelSets<'a, T> {
    proj: &'a Projector<T>,
    opts: LevelSetOptions<T>,
}

/// Central-difference step used for `γ′`, `φ′` and the second difference.
pub fn fd_step<T: Real>(r: T) -> T {
    T::lit(1e-5).max(T::lit(1e-4) * r)
}

impl<'a, T: Real> LevelSets<'a, T> {
    pub fn new(proj: &'a Projector<T>, opts: LevelSetOptions<T>) -> Self {
        Self { proj, opts }
    }

    pub fn projector(&self) -> &Projector<T> {
        self.proj
    }

    pub fn options(&self) -> &LevelSetOptions<T> {
        &self.opts
    }

    fn epsilon(&self) -> T {
        self.opts.epsilon_rel * self.proj.p0_norm_sq()
    }

    fn check_level(&self, r: T, lo: T, what: &'static str) -> Result<()> {
        self.proj.require_origin_outside(self.opts.origin_threshold)?;
        let eps = self.epsilon();
        let hi = self.proj.p0_norm_sq() - eps;
        let lo = lo + eps;
        if r > lo && r < hi {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                what,
                value: r.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            })
        }
    }

    /// `x̂_r`, the point of minimal norm on `J⁻¹(r)`.
    pub fn minimal_norm_point(&self, r: T) -> Result<Vector<T>> {
        self.check_level(r, -self.proj.p0_norm_sq(), "level r for x̂_r")?;
        let lambda = fixed_point::g_inverse(self.proj, r, &self.opts.inversion)?;
        let fp = &self.opts.inversion.fixed_point;
        let res = fixed_point::fixed_point(self.proj, lambda, fp.tol, fp.max_iter)?;
        Ok(res.point)
    }

    /// `v̂_r` with `h⁻¹(r)` and `J(v̂_r)`.
    pub fn sphere_max(&self, r: T) -> Result<SphereMax<T>> {
        self.check_level(r, T::zero(), "level r for v̂_r")?;
        let h_inv = fixed_point::h_inverse(self.proj, r, &self.opts.inversion)?;
        let point = fixed_point::y_hat_reciprocal(self.proj, h_inv, &self.opts.inversion.fixed_point)?;
        let j = j_value(self.proj, &point)?;
        Ok(SphereMax { point, h_inv, j })
    }

    /// `v̂_r`, the maximizer of `J` on `S_r`.
    pub fn sphere_max_point(&self, r: T) -> Result<Vector<T>> {
        Ok(self.sphere_max(r)?.point)
    }

    /// `ŵ_r`, a minimizer of `J` on `S_r`.
    pub fn sphere_min_point(&self, r: T, n_starts: usize, seed: u64) -> Result<Vector<T>> {
        Ok(self.sphere_min(r, n_starts, seed)?.point)
    }

    pub fn sphere_min(&self, r: T, n_starts: usize, seed: u64) -> Result<SphereOutcome<T>> {
        let opts = SphereOptions {
            n_starts,
            ..self.opts.sphere
        };
        // −P(0) is the most residual-heavy direction in the simple cases.
        let hint = sphere::retract(&self.proj.project_origin().scale(-T::one()), r);
        let seeds = if self.proj.p0_norm_sq() > T::zero() {
            vec![hint]
        } else {
            Vec::new()
        };
        sphere::multistart(r, self.proj.dim(), Sense::Minimize, &opts, seed, &seeds, |x| {
            let px = self.proj.project(x)?;
            Ok((j_from_projection(self.proj, x, &px), px))
        })
    }

    /// `φ(r) = sup_{S_r} J = J(v̂_r)`.
    pub fn phi_value(&self, r: T) -> Result<T> {
        Ok(self.sphere_max(r)?.j)
    }

    /// `γ(r) = r + ‖P(0)‖² − 2φ(r)`.
    pub fn gamma_value(&self, r: T) -> Result<T> {
        let phi = self.phi_value(r)?;
        Ok(r + self.proj.p0_norm_sq() - T::lit(2.0) * phi)
    }

    /// `γ(r)` by direct multi-start minimization of the residual on `S_r`.
    pub fn gamma_direct(&self, r: T, n_starts: usize, seed: u64) -> Result<T> {
        Ok(self.residual_extremum(r, Sense::Minimize, n_starts, seed)?.value)
    }

    /// Extremum of `‖x − P(x)‖²` on `S_r`.
    pub fn residual_extremum(
        &self,
        r: T,
        sense: Sense,
        n_starts: usize,
        seed: u64,
    ) -> Result<SphereOutcome<T>> {
        let opts = SphereOptions {
            n_starts,
            ..self.opts.sphere
        };
        let p0 = self.proj.project_origin();
        let seeds = if self.proj.p0_norm_sq() > T::zero() {
            let s = match sense {
                Sense::Minimize => T::one(),
                Sense::Maximize => -T::one(),
            };
            vec![sphere::retract(&p0.scale(s), r)]
        } else {
            Vec::new()
        };
        sphere::multistart(r, self.proj.dim(), sense, &opts, seed, &seeds, |x| {
            let px = self.proj.project(x)?;
            let d = x.sub(&px);
            Ok((d.norm_sq(), d.scale(T::lit(2.0))))
        })
    }

    /// Full diagnostics for each `r` of the grid. Requires a bounded set.
    pub fn gamma_profile_report(&self, r_grid: &[T]) -> Result<Vec<GammaRow<T>>> {
        if !self.proj.is_bounded() {
            return Err(Error::Precondition(
                "γ diagnostics need a compact set; this set is unbounded".into(),
            ));
        }
        validate_grid(r_grid)?;
        r_grid.iter().map(|&r| self.gamma_row(r)).collect()
    }

    pub fn gamma_row(&self, r: T) -> Result<GammaRow<T>> {
        let h = fd_step(r);
        let two = T::lit(2.0);
        let c = self.proj.p0_norm_sq();
        let centre = self.sphere_max(r)?;
        let phi_minus = self.phi_value(r - h)?;
        let phi_plus = self.phi_value(r + h)?;
        let gamma_at = |rr: T, phi: T| rr + c - two * phi;
        let gamma = gamma_at(r, centre.j);
        let g_minus = gamma_at(r - h, phi_minus);
        let g_plus = gamma_at(r + h, phi_plus);
        let gamma_fd = (g_plus - g_minus) / (two * h);
        let phi_fd = (phi_plus - phi_minus) / (two * h);
        let pv = self.proj.project(&centre.point)?;
        Ok(GammaRow {
            r,
            gamma,
            gamma_fd,
            h_inv: centre.h_inv,
            phi: centre.j,
            phi_fd,
            eigen_residual: pv.dist(&centre.point.scale(centre.h_inv)),
            paper_c9_residual: (gamma_fd + centre.h_inv).abs(),
            envelope_residual: (gamma_fd - (T::one() - centre.h_inv)).abs(),
            second_diff: (g_plus - two * gamma + g_minus) / (h * h),
        })
    }

    /// Largest distance between the points of a family at adjacent grid levels.
    pub fn continuity_scan(&self, which: PointFamily, r_grid: &[T]) -> Result<T> {
        validate_grid(r_grid)?;
        let pitch_cap = T::lit(1e-3) * self.proj.p0_norm_sq() * T::lit(1.0 + 1e-9);
        if r_grid.windows(2).any(|w| w[1] - w[0] > pitch_cap) {
            return Err(Error::InvalidArgument(
                "continuity scan needs grid pitch ≤ 1e-3·‖P(0)‖²".into(),
            ));
        }
        let mut prev: Option<Vector<T>> = None;
        let mut worst = T::zero();
        for &r in r_grid {
            let x = match which {
                PointFamily::XHat => self.minimal_norm_point(r)?,
                PointFamily::VHat => self.sphere_max_point(r)?,
            };
            if let Some(p) = &prev {
                worst = worst.max(p.dist(&x));
            }
            prev = Some(x);
        }
        Ok(worst)
    }

    /// Points of `J⁻¹(r)` found by root-finding `J(t·d) = r` along random
    /// unit directions `d`. Returns the samples and the number of directions
    /// discarded for lack of a bracket.
    pub fn level_set_samples(&self, r: T, n_dirs: usize, seed: u64) -> Result<(Vec<Vector<T>>, usize)> {
        let n = self.proj.dim();
        let mut rng = sampling::rng(seed, 29);
        let t_max = self.opts.ray_t_max;
        let tol = T::lit(1e-13);
        let mut samples = Vec::with_capacity(n_dirs);
        let mut discarded = 0;
        for _ in 0..n_dirs {
            let d = sampling::unit_direction::<T>(&mut rng, n);
            let along = |t: T| j_value(self.proj, &d.scale(t));
            // J(0) = 0 and t ↦ J(td) is convex.
            let upper = if r >= T::zero() {
                if along(t_max)? < r {
                    discarded += 1;
                    continue;
                }
                t_max
            } else {
                let t_min = golden_min(&along, T::zero(), t_max, T::lit(1e-12))?;
                if along(t_min)? > r {
                    discarded += 1;
                    continue;
                }
                t_min
            };
            let direction = if r >= T::zero() {
                Monotonicity::Increasing
            } else {
                Monotonicity::Decreasing
            };
            let t = fixed_point::invert_monotone(&along, r, T::zero(), upper, tol, direction)?;
            samples.push(d.scale(t));
        }
        Ok((samples, discarded))
    }

    /// Max of `J` over uniform samples of `S_r`.
    pub fn sphere_sample_j_max(&self, r: T, n_samples: usize, seed: u64) -> Result<T> {
        let mut rng = sampling::rng(seed, 31);
        let mut best = T::neg_infinity();
        for _ in 0..n_samples {
            let y = sampling::sphere_point(&mut rng, self.proj.dim(), r);
            best = best.max(j_value(self.proj, &y)?);
        }
        Ok(best)
    }

    /// Min of `‖x − P(x)‖²` over uniform samples of `S_r`.
    pub fn sphere_sample_residual_min(&self, r: T, n_samples: usize, seed: u64) -> Result<T> {
        let mut rng = sampling::rng(seed, 37);
        let mut best = T::infinity();
        for _ in 0..n_samples {
            let y = sampling::sphere_point(&mut rng, self.proj.dim(), r);
            best = best.min(residual_sq(self.proj, &y)?);
        }
        Ok(best)
    }
}

fn golden_min<T: Real>(f: &impl Fn(T) -> Result<T>, lo: T, hi: T, tol: T) -> Result<T> {
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok((a + b) * T::lit(0.5))
}
