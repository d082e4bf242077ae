//! Branched transport on atomic measures: traffic paths with the alpha-mass cost,
//! good decompositions, explicit transport constructions, an exact Gilbert-Steiner
//! oracle for small instances, flat norms, and stability experiments.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`); the aliases at the crate root fix `f64`.

pub mod constructors;
pub mod currents;
pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod optimizer;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point = geometry::Point<f64>;
pub type Ball = geometry::Ball<f64>;
pub type BallRegion = geometry::BallRegion<f64>;
pub type AtomicMeasure = currents::AtomicMeasure<f64>;
pub type TrafficPath = currents::TrafficPath<f64>;
pub type Config = currents::Config<f64>;
pub type Curve = decomposition::Curve<f64>;
pub type PathMeasure = decomposition::PathMeasure<f64>;
pub type ExperimentConfig = stability::ExperimentConfig<f64>;
pub type CompetitorConfig = stability::CompetitorConfig<f64>;

pub type Point32 = geometry::Point<f32>;
pub type AtomicMeasure32 = currents::AtomicMeasure<f32>;
pub type TrafficPath32 = currents::TrafficPath<f32>;
