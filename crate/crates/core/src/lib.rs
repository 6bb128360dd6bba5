//! Metric projections onto closed convex subsets of `R^n` and the objects
//! built from them: the potential `J` whose gradient is the projection, fixed
//! points of the contractions `λP`, minimal-norm and sphere-extremal points,
//! the residual profile `γ`, the solvability threshold of `P(x) + λQ(x) = 0`
//! and weighted residual extrema over finite measure spaces.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` and `*32` aliases fix the precision.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equation;
pub mod error;
pub mod fixed_point;
pub mod functional;
pub mod geometry;
pub mod integral;
pub mod levelset;
pub mod sampling;
pub mod scalar;
pub mod sets;
pub mod sphere;
pub mod vector;

pub use error::{Error, Result};
pub use scalar::Real;
pub use sets::{ConvexSetSpec, LevelKind, NormLevel, ProjectionPolicy, Projector};
pub use vector::Vector;

pub type Vector64 = Vector<f64>;
pub type Vector32 = Vector<f32>;
pub type SetSpec64 = ConvexSetSpec<f64>;
pub type SetSpec32 = ConvexSetSpec<f32>;
pub type Projector64 = Projector<f64>;
pub type Projector32 = Projector<f32>;
pub type FixedPoint64 = fixed_point::FixedPointResult<f64>;
pub type Profile64 = fixed_point::Profile<f64>;
pub type GammaRow64 = levelset::GammaRow<f64>;
pub type Potential64 = equation::PotentialOperatorSpec<f64>;
pub type MeasureSpace64 = integral::DiscreteMeasureSpace<f64>;
