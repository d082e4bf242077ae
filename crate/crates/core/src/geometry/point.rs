use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A point of R^2 or R^3. Planar points keep `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point<S> {
    pub coords: [S; 3],
}

impl<S: Real> Point<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Point { coords: [x, y, z] }
    }

    pub fn xy(x: S, y: S) -> Self {
        Point::new(x, y, S::zero())
    }

    pub fn from_f64(c: &[f64]) -> Self {
        let g = |i: usize| c.get(i).map(|&v| S::c(v)).unwrap_or_else(S::zero);
        Point::new(g(0), g(1), g(2))
    }

    pub fn origin() -> Self {
        Point::new(S::zero(), S::zero(), S::zero())
    }

    pub fn x(&self) -> S {
        self.coords[0]
    }

    pub fn y(&self) -> S {
        self.coords[1]
    }

    pub fn z(&self) -> S {
        self.coords[2]
    }

    pub fn dot(&self, o: &Self) -> S {
        self.coords[0] * o.coords[0] + self.coords[1] * o.coords[1] + self.coords[2] * o.coords[2]
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a, b, c] = self.coords;
        let [d, e, f] = o.coords;
        Point::new(b * f - c * e, c * d - a * f, a * e - b * d)
    }

    pub fn norm(&self) -> S {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, o: &Self) -> S {
        (*self - *o).norm()
    }

    pub fn lerp(&self, o: &Self, t: S) -> Self {
        *self + (*o - *self) * t
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    /// Unit vector, or `None` for a (near) zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > S::zero() && n.is_finite() {
            Some(*self * (S::one() / n))
        } else {
            None
        }
    }

    /// Lexicographic order on coordinates; used for deterministic tie-breaks.
    pub fn lex_cmp(&self, o: &Self) -> Ordering {
        for i in 0..3 {
            match self.coords[i].partial_cmp(&o.coords[i]).unwrap_or(Ordering::Equal) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    pub fn cast<T: Real>(&self) -> Point<T> {
        Point::new(
            T::c(self.coords[0].f64()),
            T::c(self.coords[1].f64()),
            T::c(self.coords[2].f64()),
        )
    }

    pub fn to_vec(&self, dim: usize) -> Vec<f64> {
        self.coords[..dim].iter().map(|c| c.f64()).collect()
    }
}

impl<S: Real> Add for Point<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point::new(self.coords[0] + o.coords[0], self.coords[1] + o.coords[1], self.coords[2] + o.coords[2])
    }
}

impl<S: Real> Sub for Point<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point::new(self.coords[0] - o.coords[0], self.coords[1] - o.coords[1], self.coords[2] - o.coords[2])
    }
}

impl<S: Real> Mul<S> for Point<S> {
    type Output = Self;
    fn mul(self, k: S) -> Self {
        Point::new(self.coords[0] * k, self.coords[1] * k, self.coords[2] * k)
    }
}

impl<S: Real> Neg for Point<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Point::new(-self.coords[0], -self.coords[1], -self.coords[2])
    }
}

/// Closest-point projection onto the closed ball of radius `radius` about the origin.
pub fn project_to_ball<S: Real>(p: &Point<S>, radius: S) -> Point<S> {
    let n = p.norm();
    if n <= radius {
        *p
    } else {
        *p * (radius / n)
    }
}
