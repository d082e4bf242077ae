//! Discrete 1-currents: traffic paths, their boundaries and the mass functionals.

mod measure;
mod ops;
mod path;

use serde::{Deserialize, Serialize};

pub use measure::{AtomicMeasure, ATOM_MERGE_TOL, ZERO_MASS};
pub use ops::{push_forward, push_forward_subdivided, restrict, LipschitzMap};
pub use path::{point_segment_dist, Edge, Segment, TrafficPath, GEOM_TOL};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config<S> {
    pub alpha: S,
    pub dimension: usize,
    pub ambient_radius: S,
}

impl<S: Real> Config<S> {
    pub fn new(alpha: S, dimension: usize, ambient_radius: S) -> Result<Self> {
        let c = Config { alpha, dimension, ambient_radius };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > S::zero() && self.alpha <= S::one()) {
            return Err(Error::Invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.dimension != 2 && self.dimension != 3 {
            return Err(Error::Invalid(format!("dimension must be 2 or 3, got {}", self.dimension)));
        }
        if !(self.ambient_radius > S::zero()) {
            return Err(Error::Invalid("ambient_radius must be positive".into()));
        }
        Ok(())
    }

    /// `1 - 1/(d-1)`, the exponent above which stability holds.
    pub fn stability_threshold(&self) -> S {
        S::one() - S::one() / S::from_usize_lossy(self.dimension - 1)
    }

    /// `1 - 1/d`, the classical irrigability exponent.
    pub fn irrigability_threshold(&self) -> S {
        S::one() - S::one() / S::from_usize_lossy(self.dimension)
    }

    pub fn above_stability_threshold(&self) -> bool {
        self.alpha > self.stability_threshold()
    }
}

/// `T1 + T2`.
pub fn add<S: Real>(t1: &TrafficPath<S>, t2: &TrafficPath<S>) -> TrafficPath<S> {
    t1.add(t2)
}

pub fn boundary<S: Real>(t: &TrafficPath<S>) -> AtomicMeasure<S> {
    t.boundary()
}

pub fn mass<S: Real>(t: &TrafficPath<S>) -> S {
    t.mass()
}

pub fn alpha_mass<S: Real>(t: &TrafficPath<S>, alpha: S) -> S {
    t.alpha_mass(alpha)
}
