//! Closed convex set descriptors and their metric projections.
//!
//! Every variant except [`ConvexSetSpec::Intersection`] has a closed-form
//! projector. Intersections are projected with Dykstra's algorithm, which
//! converges to the true nearest point (plain alternating projections only
//! reach *some* point of the intersection).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vector::Vector;

/// Declarative description of a non-empty closed convex subset of `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[serde(bound = "T: Real")]
pub enum ConvexSetSpec<T> {
    /// `{x : ⟨normal, x⟩ ≤ offset}`
    Halfspace { normal: Vector<T>, offset: T },
    /// `{x : ⟨normal, x⟩ = offset}`
    Hyperplane { normal: Vector<T>, offset: T },
    Box { lo: Vector<T>, hi: Vector<T> },
    Ball { center: Vector<T>, radius: T },
    /// `{x ≥ 0 : Σ x_i = scale}`; takes its dimension from the context.
    Simplex { scale: T },
    /// `base + shift`
    Translate {
        base: std::boxed::Box<ConvexSetSpec<T>>,
        shift: Vector<T>,
    },
    /// Intersection of the members, projected by Dykstra's algorithm.
    Intersection {
        members: Vec<ConvexSetSpec<T>>,
        max_iter: usize,
        tol: T,
    },
}

impl<T: Real> ConvexSetSpec<T> {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self::Box {
            lo: Vector::from_f64(&[lo]),
            hi: Vector::from_f64(&[hi]),
        }
    }

    pub fn ball(center: &[f64], radius: f64) -> Self {
        Self::Ball {
            center: Vector::from_f64(center),
            radius: T::lit(radius),
        }
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        Self::Box {
            lo: Vector::from_f64(&vec![lo; n]),
            hi: Vector::from_f64(&vec![hi; n]),
        }
    }

    pub fn halfspace(normal: &[f64], offset: f64) -> Self {
        Self::Halfspace {
            normal: Vector::from_f64(normal),
            offset: T::lit(offset),
        }
    }

    pub fn translate(base: Self, shift: &[f64]) -> Self {
        Self::Translate {
            base: std::boxed::Box::new(base),
            shift: Vector::from_f64(shift),
        }
    }

    pub fn intersection(members: Vec<Self>) -> Self {
        Self::Intersection {
            members,
            max_iter: 100_000,
            tol: T::lit(1e-13),
        }
    }

    /// Dimension implied by the variant's own data, if any.
    pub fn dim_hint(&self) -> Option<usize> {
        match self {
            Self::Halfspace { normal, .. } | Self::Hyperplane { normal, .. } => Some(normal.dim()),
            Self::Box { lo, .. } => Some(lo.dim()),
            Self::Ball { center, .. } => Some(center.dim()),
            Self::Simplex { .. } => None,
            Self::Translate { shift, .. } => Some(shift.dim()),
            Self::Intersection { members, .. } => members.iter().find_map(Self::dim_hint),
        }
    }

    /// Checks the structural invariants for ambient dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidSet("dimension must be at least 1".into()));
        }
        let finite = |v: &Vector<T>, what: &str| -> Result<()> {
            v.ensure_dim(n)?;
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSet(format!("{what} has non-finite entries")))
            }
        };
        match self {
            Self::Halfspace { normal, offset } | Self::Hyperplane { normal, offset } => {
                finite(normal, "normal")?;
                if normal.norm_sq() == T::zero() {
                    return Err(Error::InvalidSet("normal must be non-zero".into()));
                }
                if !offset.is_finite() {
                    return Err(Error::InvalidSet("offset must be finite".into()));
                }
            }
            Self::Box { lo, hi } => {
                finite(lo, "lo")?;
                finite(hi, "hi")?;
                if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
                    return Err(Error::InvalidSet("box requires lo <= hi".into()));
                }
            }
            Self::Ball { center, radius } => {
                finite(center, "center")?;
                if !(*radius > T::zero() && radius.is_finite()) {
                    return Err(Error::InvalidSet("ball radius must be positive".into()));
                }
            }
            Self::Simplex { scale } => {
                if !(*scale > T::zero() && scale.is_finite()) {
                    return Err(Error::InvalidSet("simplex scale must be positive".into()));
                }
            }
            Self::Translate { base, shift } => {
                finite(shift, "shift")?;
                base.validate(n)?;
            }
            Self::Intersection {
                members,
                max_iter,
                tol,
            } => {
                if members.is_empty() {
                    return Err(Error::InvalidSet("intersection needs members".into()));
                }
                if *max_iter == 0 || !(*tol > T::zero()) {
                    return Err(Error::InvalidSet(
                        "intersection needs max_iter >= 1 and tol > 0".into(),
                    ));
                }
                for m in members {
                    m.validate(n)?;
                }
            }
        }
        Ok(())
    }

    /// True when every projector in the tree is closed-form.
    pub fn is_exact(&self) -> bool {
        match self {
            Self::Intersection { .. } => false,
            Self::Translate { base, .. } => base.is_exact(),
            _ => true,
        }
    }

    /// Sufficient test for boundedness (hence compactness in `R^n`).
    pub fn is_bounded(&self, n: usize) -> bool {
        match self {
            Self::Box { .. } | Self::Ball { .. } | Self::Simplex { .. } => true,
            Self::Hyperplane { .. } => n == 1,
            Self::Halfspace { .. } => false,
            Self::Translate { base, .. } => base.is_bounded(n),
            Self::Intersection { members, .. } => members.iter().any(|m| m.is_bounded(n)),
        }
    }

    /// Whether `x` satisfies the defining constraints within `tol`.
    pub fn contains(&self, x: &Vector<T>, tol: T) -> Result<bool> {
        if let Some(n) = self.dim_hint() {
            x.ensure_dim(n)?;
        }
        Ok(match self {
            Self::Halfspace { normal, offset } => {
                (normal.dot(x) - *offset) / normal.norm() <= tol
            }
            Self::Hyperplane { normal, offset } => {
                ((normal.dot(x) - *offset) / normal.norm()).abs() <= tol
            }
            Self::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi.iter()))
                .all(|(&c, (&l, &h))| c >= l - tol && c <= h + tol),
            Self::Ball { center, radius } => x.dist(center) <= *radius + tol,
            Self::Simplex { scale } => {
                x.iter().all(|&c| c >= -tol) && (x.iter().copied().sum::<T>() - *scale).abs() <= tol
            }
            Self::Translate { base, shift } => base.contains(&x.sub(shift), tol)?,
            Self::Intersection { members, .. } => {
                for m in members {
                    if !m.contains(x, tol)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    /// Euclidean projection of `x` (dimension already checked by the caller).
    pub(crate) fn project_raw(&self, x: &Vector<T>, policy: &ProjectionPolicy) -> Result<Vector<T>> {
        Ok(match self {
            Self::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - *offset;
                if excess <= T::zero() {
                    x.clone()
                } else {
                    x.axpy(-excess / normal.norm_sq(), normal)
                }
            }
            Self::Hyperplane { normal, offset } => {
                let excess = normal.dot(x) - *offset;
                x.axpy(-excess / normal.norm_sq(), normal)
            }
            Self::Box { lo, hi } => Vector::new(
                x.iter()
                    .zip(lo.iter().zip(hi.iter()))
                    .map(|(&c, (&l, &h))| c.max(l).min(h))
                    .collect(),
            ),
            Self::Ball { center, radius } => {
                let d = x.sub(center);
                let dist = d.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    center.axpy(*radius / dist, &d)
                }
            }
            Self::Simplex { scale } => project_simplex(x, *scale),
            Self::Translate { base, shift } => {
                base.project_raw(&x.sub(shift), policy)?.add(shift)
            }
            Self::Intersection {
                members,
                max_iter,
                tol,
            } => dykstra(members, x, *max_iter, *tol, policy)?,
        })
    }
}

/// Sort-and-threshold projection onto `{y ≥ 0, Σ y = scale}`.
fn project_simplex<T: Real>(x: &Vector<T>, scale: T) -> Vector<T> {
    let mut sorted: Vec<T> = x.as_slice().to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite coordinates"));
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let t = (cumsum - scale) / T::from_usize_lossy(k + 1);
        if v - t > T::zero() {
            theta = t;
        }
    }
    x.map(|c| (c - theta).max(T::zero()))
}

fn dykstra<T: Real>(
    members: &[ConvexSetSpec<T>],
    x0: &Vector<T>,
    max_iter: usize,
    tol: T,
    policy: &ProjectionPolicy,
) -> Result<Vector<T>> {
    let mut x = x0.clone();
    let mut corrections = vec![Vector::zeros(x0.dim()); members.len()];
    // Intermediate iterates of the previous cycle. The iterates can stall for
    // several cycles while the corrections are still moving, so both count.
    let mut previous: Vec<Option<Vector<T>>> = vec![None; members.len()];
    // On an empty intersection the iterates settle on a cycle while every
    // correction keeps growing by the same nonzero gap vector. A nonempty
    // intersection can look identical for hundreds of cycles while a large
    // correction is used up, so the signature is only judged once the cycle
    // budget is spent.
    let mut settled_cycles = 0;
    let mut last_corr_step = T::zero();
    let mut increment = T::infinity();
    for _ in 0..max_iter {
        let mut iter_step = T::zero();
        let mut corr_step = T::zero();
        let mut first = false;
        for ((member, corr), prev) in members.iter().zip(corrections.iter_mut()).zip(previous.iter_mut()) {
            let y = x.add(corr);
            let next = member.project_raw(&y, policy)?;
            let new_corr = y.sub(&next);
            match prev {
                Some(p) => iter_step = iter_step.max(next.dist(p)),
                None => first = true,
            }
            corr_step = corr_step.max(new_corr.dist(corr));
            *corr = new_corr;
            *prev = Some(next.clone());
            x = next;
        }
        if first {
            continue;
        }
        increment = iter_step.max(corr_step);
        if increment <= tol {
            return Ok(x);
        }
        let steady = (corr_step - last_corr_step).abs() <= tol.sqrt() * T::one().max(corr_step);
        if iter_step <= tol && corr_step > tol.sqrt() && steady {
            settled_cycles += 1;
        } else {
            settled_cycles = 0;
        }
        last_corr_step = corr_step;
    }
    if settled_cycles >= policy.stall_window {
        return Err(Error::SuspectedEmpty {
            cycles: max_iter,
            increment: last_corr_step.as_f64(),
        });
    }
    Err(Error::NotConverged {
        what: "dykstra projection",
        iterations: max_iter,
        residual: increment.as_f64(),
    })
}

/// Iteration policy shared by the iterative projectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionPolicy {
    /// Trailing Dykstra cycles with settled iterates and a constant nonzero
    /// correction step that mark an exhausted run as a suspected empty
    /// intersection rather than a plain non-convergence.
    pub stall_window: usize,
}

impl Default for ProjectionPolicy {
    fn default() -> Self {
        Self { stall_window: 100 }
    }
}

/// Evaluation handle for the metric projection `P` onto a set, with `P(0)`
/// cached. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector<T> {
    set: ConvexSetSpec<T>,
    dim: usize,
    p0: Vector<T>,
    p0_norm_sq: T,
    policy: ProjectionPolicy,
}

impl<T: Real> Projector<T> {
    /// Projector for `set` in `R^dim`; use [`Projector::from_set`] when the
    /// set carries its own dimension.
    pub fn new(set: ConvexSetSpec<T>, dim: usize) -> Result<Self> {
        Self::with_policy(set, dim, ProjectionPolicy::default())
    }

    pub fn from_set(set: ConvexSetSpec<T>) -> Result<Self> {
        let dim = set.dim_hint().ok_or_else(|| {
            Error::InvalidSet("dimension cannot be inferred from the set; use Projector::new".into())
        })?;
        Self::new(set, dim)
    }

    pub fn with_policy(set: ConvexSetSpec<T>, dim: usize, policy: ProjectionPolicy) -> Result<Self> {
        set.validate(dim)?;
        let p0 = set.project_raw(&Vector::zeros(dim), &policy)?;
        let p0_norm_sq = p0.norm_sq();
        Ok(Self {
            set,
            dim,
            p0,
            p0_norm_sq,
            policy,
        })
    }

    pub fn set(&self) -> &ConvexSetSpec<T> {
        &self.set
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn policy(&self) -> &ProjectionPolicy {
        &self.policy
    }

    /// `P(x)`, the nearest point of the set to `x`.
    pub fn project(&self, x: &Vector<T>) -> Result<Vector<T>> {
        x.ensure_dim(self.dim)?;
        self.set.project_raw(x, &self.policy)
    }

    /// Cached `P(0)`.
    pub fn project_origin(&self) -> &Vector<T> {
        &self.p0
    }

    /// `‖P(0)‖²`
    pub fn p0_norm_sq(&self) -> T {
        self.p0_norm_sq
    }

    pub fn contains(&self, x: &Vector<T>, tol: T) -> Result<bool> {
        x.ensure_dim(self.dim)?;
        self.set.contains(x, tol)
    }

    pub fn is_exact(&self) -> bool {
        self.set.is_exact()
    }

    pub fn is_bounded(&self) -> bool {
        self.set.is_bounded(self.dim)
    }

    /// Guard used by every routine that assumes the origin lies outside the set.
    pub fn require_origin_outside(&self, threshold: T) -> Result<()> {
        if self.p0_norm_sq > threshold {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "0 ∈ X (‖P(0)‖² = {:e} is not above {:e})",
                self.p0_norm_sq, threshold
            )))
        }
    }

    /// Idempotence tolerance matching the projector's accuracy.
    pub fn accuracy(&self) -> T {
        fn tol<T: Real>(s: &ConvexSetSpec<T>) -> T {
            match s {
                ConvexSetSpec::Intersection { tol, .. } => T::lit(10.0) * *tol,
                ConvexSetSpec::Translate { base, .. } => tol(base),
                _ => T::lit(1e-10),
            }
        }
        tol(&self.set)
    }
}

/// Squared-norm level: `S_r = {‖x‖² = r}` or `B_r = {‖x‖² < r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct NormLevel<T> {
    pub r: T,
    pub kind: LevelKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelKind {
    Sphere,
    OpenBall,
}

impl<T: Real> NormLevel<T> {
    pub fn sphere(r: T) -> Result<Self> {
        Self::new(r, LevelKind::Sphere)
    }

    pub fn open_ball(r: T) -> Result<Self> {
        Self::new(r, LevelKind::OpenBall)
    }

    pub fn new(r: T, kind: LevelKind) -> Result<Self> {
        if r > T::zero() && r.is_finite() {
            Ok(Self { r, kind })
        } else {
            Err(Error::InvalidArgument(format!("norm level must be positive, got {r}")))
        }
    }

    /// Radius `√r` of the level.
    pub fn radius(&self) -> T {
        self.r.sqrt()
    }

    pub fn contains(&self, x: &Vector<T>, tol: T) -> bool {
        let n = x.norm_sq();
        match self.kind {
            LevelKind::Sphere => (n - self.r).abs() <= tol,
            LevelKind::OpenBall => n < self.r + tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clamp1() -> Projector<f64> {
        Projector::from_set(ConvexSetSpec::interval(1.0, 2.0)).unwrap()
    }

    fn ball2() -> Projector<f64> {
        Projector::from_set(ConvexSetSpec::ball(&[3.0, 0.0], 1.0)).unwrap()
    }

    fn v(c: &[f64]) -> Vector<f64> {
        Vector::from_f64(c)
    }

    #[test]
    fn clamp_examples() {
        let p = clamp1();
        assert_eq!(p.project(&v(&[0.3])).unwrap(), v(&[1.0]));
        assert_eq!(p.project(&v(&[1.5])).unwrap(), v(&[1.5]));
        assert_eq!(p.project_origin(), &v(&[1.0]));
        assert!(p.contains(&v(&[1.5]), 0.0).unwrap());
        assert!(!p.contains(&v(&[0.3]), 0.0).unwrap());
    }

    #[test]
    fn ball_examples() {
        let p = ball2();
        assert_eq!(p.project(&v(&[0.0, 0.0])).unwrap(), v(&[2.0, 0.0]));
        assert_eq!(p.project_origin(), &v(&[2.0, 0.0]));
        assert_eq!(p.p0_norm_sq(), 4.0);
        assert!(p.contains(&v(&[3.0, 1.0]), 0.0).unwrap());
    }

    #[test]
    fn origin_inside_box() {
        let p = Projector::from_set(ConvexSetSpec::<f64>::cube(2, -1.0, 1.0)).unwrap();
        assert_eq!(p.project_origin(), &v(&[0.0, 0.0]));
        assert_eq!(p.p0_norm_sq(), 0.0);
        assert!(p.require_origin_outside(1e-9).is_err());
    }

    #[test]
    fn simplex_projection() {
        let p = Projector::new(ConvexSetSpec::Simplex { scale: 1.0 }, 2).unwrap();
        assert_eq!(p.project(&v(&[2.0, 0.0])).unwrap(), v(&[1.0, 0.0]));
        let q = p.project(&v(&[0.3, 0.1])).unwrap();
        assert!((q[0] - 0.6).abs() < 1e-15 && (q[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn halfspace_and_hyperplane() {
        let h = Projector::from_set(ConvexSetSpec::halfspace(&[1.0, 1.0], 1.0)).unwrap();
        assert_eq!(h.project(&v(&[2.0, 2.0])).unwrap(), v(&[0.5, 0.5]));
        assert_eq!(h.project(&v(&[0.0, 0.0])).unwrap(), v(&[0.0, 0.0]));
        let plane = Projector::from_set(ConvexSetSpec::Hyperplane {
            normal: v(&[0.0, 2.0]),
            offset: 2.0,
        })
        .unwrap();
        assert_eq!(plane.project(&v(&[5.0, -3.0])).unwrap(), v(&[5.0, 1.0]));
    }

    #[test]
    fn translate_shifts_base() {
        let t = Projector::from_set(ConvexSetSpec::translate(
            ConvexSetSpec::ball(&[0.0, 0.0], 1.0),
            &[3.0, 0.0],
        ))
        .unwrap();
        assert_eq!(t.project(&v(&[0.0, 0.0])).unwrap(), v(&[2.0, 0.0]));
    }

    #[test]
    fn dykstra_box_halfspace() {
        let set = ConvexSetSpec::intersection(vec![
            ConvexSetSpec::cube(2, 0.0, 2.0),
            ConvexSetSpec::halfspace(&[1.0, 1.0], 1.0),
        ]);
        let p = Projector::from_set(set).unwrap();
        let x = p.project(&v(&[2.0, 2.0])).unwrap();
        assert!(x.dist(&v(&[0.5, 0.5])) < 1e-12);
        assert!(!p.is_exact());
    }

    #[test]
    fn disjoint_intersection_is_flagged() {
        let set = ConvexSetSpec::intersection(vec![
            ConvexSetSpec::interval(0.0, 1.0),
            ConvexSetSpec::interval(2.0, 3.0),
        ]);
        let err = Projector::<f64>::from_set(set).unwrap_err();
        assert!(matches!(err, Error::SuspectedEmpty { .. }), "{err:?}");
    }

    #[test]
    fn invalid_sets_rejected() {
        assert!(Projector::from_set(ConvexSetSpec::<f64>::interval(2.0, 1.0)).is_err());
        assert!(Projector::from_set(ConvexSetSpec::<f64>::ball(&[0.0], 0.0)).is_err());
        assert!(Projector::from_set(ConvexSetSpec::<f64>::halfspace(&[0.0, 0.0], 1.0)).is_err());
        assert!(Projector::from_set(ConvexSetSpec::<f64>::Simplex { scale: 1.0 }).is_err());
        assert!(matches!(
            clamp1().project(&v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn json_schema() {
        let set: ConvexSetSpec<f64> = serde_json::from_str(
            r#"{"type":"intersection","max_iter":500,"tol":1e-12,"members":[
                {"type":"box","lo":[0,0],"hi":[2,2]},
                {"type":"translate","shift":[1,0],"base":{"type":"ball","center":[0,0],"radius":1}},
                {"type":"simplex","scale":3},
                {"type":"halfspace","normal":[1,1],"offset":1},
                {"type":"hyperplane","normal":[1,0],"offset":0.5}]}"#,
        )
        .unwrap();
        assert_eq!(set.dim_hint(), Some(2));
        let back: ConvexSetSpec<f64> =
            serde_json::from_str(&serde_json::to_string(&set).unwrap()).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn norm_levels() {
        let s = NormLevel::sphere(4.0).unwrap();
        assert_eq!(s.radius(), 2.0);
        assert!(s.contains(&v(&[0.0, 2.0]), 1e-12));
        let b = NormLevel::open_ball(4.0).unwrap();
        assert!(!b.contains(&v(&[0.0, 2.0]), 0.0));
        assert!(NormLevel::sphere(0.0).is_err());
    }

    #[test]
    fn single_precision_projection() {
        let p = Projector::<f32>::from_set(ConvexSetSpec::ball(&[3.0, 0.0], 1.0)).unwrap();
        assert_eq!(p.project_origin().as_slice(), &[2.0f32, 0.0]);
    }
}
