//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the toolkit can run on (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Smallest tolerance that is meaningful at this precision.
    const TOL_FLOOR: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a requested tolerance, clamped to what the precision can resolve.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::c(x.max(Self::TOL_FLOOR))
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::c(n as f64)
    }
}

impl Real for f64 {
    const TOL_FLOOR: f64 = 0.0;
}

impl Real for f32 {
    const TOL_FLOOR: f64 = 1e-5;
}

/// `x^a` with the convention `0^a = 0` for every exponent, including `a = 0`.
///
/// Zero-flow edges carry no cost; the bare `powf` would give `0^0 = 1`.
#[inline]
pub fn flow_pow<S: Real>(x: S, a: S) -> S {
    if x <= S::zero() {
        S::zero()
    } else {
        x.powf(a)
    }
}
