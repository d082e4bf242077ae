//! Flat norms and weak-* diagnostics.

mod flat0;
mod grid;
pub mod mcf;

pub use flat0::{flat_norm_0, weak_star_gap};
pub use grid::{flat_distance_1, FlatEstimate, GridComplex};
