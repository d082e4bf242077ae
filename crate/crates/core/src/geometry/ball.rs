use serde::{Deserialize, Serialize};

use super::Point;
use crate::scalar::Real;

/// Tolerance for on-sphere tests.
pub const SPHERE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball<S> {
    pub center: Point<S>,
    pub radius: S,
    pub closed: bool,
}

impl<S: Real> Ball<S> {
    pub fn open(center: Point<S>, radius: S) -> Self {
        Ball { center, radius, closed: false }
    }

    pub fn closed(center: Point<S>, radius: S) -> Self {
        Ball { center, radius, closed: true }
    }

    pub fn contains(&self, p: &Point<S>) -> bool {
        let d = p.dist(&self.center);
        if self.closed {
            d <= self.radius
        } else {
            d < self.radius
        }
    }

    pub fn on_sphere(&self, p: &Point<S>) -> bool {
        (p.dist(&self.center) - self.radius).abs() <= S::tol(SPHERE_TOL) * (S::one() + self.radius)
    }

    pub fn with_closure(&self, closed: bool) -> Self {
        Ball { closed, ..*self }
    }

    /// Parameters `t` in the open interval (0, 1) where the segment `a + t (b - a)`
    /// crosses the sphere, sorted.
    pub fn segment_crossings(&self, a: &Point<S>, b: &Point<S>) -> Vec<S> {
        let d = *b - *a;
        let f = *a - self.center;
        let qa = d.dot(&d);
        if qa <= S::zero() {
            return Vec::new();
        }
        let qb = S::c(2.0) * f.dot(&d);
        let qc = f.dot(&f) - self.radius * self.radius;
        let disc = qb * qb - S::c(4.0) * qa * qc;
        if disc < S::zero() {
            return Vec::new();
        }
        let sq = disc.sqrt();
        // numerically stable root pair
        let q = if qb < S::zero() { -(qb - sq) / S::c(2.0) } else { -(qb + sq) / S::c(2.0) };
        let mut roots = Vec::with_capacity(2);
        if q != S::zero() {
            roots.push(q / qa);
            roots.push(qc / q);
        } else {
            roots.push(S::zero());
        }
        let mut out: Vec<S> = roots.into_iter().filter(|t| *t > S::zero() && *t < S::one()).collect();
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.dedup_by(|x, y| (*x - *y).abs() <= S::epsilon());
        out
    }
}

/// How the balls of a [`BallRegion`] are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Combinator {
    /// Union of all terms.
    Union,
    /// Cell `k` of the difference chain: `B_k` minus the open balls `B_j`, `j < k`.
    Cell(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRegion<S> {
    pub terms: Vec<Ball<S>>,
    pub combinator: Combinator,
    pub complement: bool,
}

impl<S: Real> BallRegion<S> {
    pub fn ball(b: Ball<S>) -> Self {
        BallRegion { terms: vec![b], combinator: Combinator::Union, complement: false }
    }

    pub fn union(terms: Vec<Ball<S>>) -> Self {
        BallRegion { terms, combinator: Combinator::Union, complement: false }
    }

    pub fn cell(terms: Vec<Ball<S>>, k: usize) -> Self {
        assert!(k < terms.len(), "cell index out of range");
        BallRegion { terms, combinator: Combinator::Cell(k), complement: false }
    }

    /// Whole space.
    pub fn everything() -> Self {
        BallRegion { terms: Vec::new(), combinator: Combinator::Union, complement: true }
    }

    pub fn complement(&self) -> Self {
        BallRegion { complement: !self.complement, ..self.clone() }
    }

    pub fn contains(&self, p: &Point<S>) -> bool {
        let inside = match self.combinator {
            Combinator::Union => self.terms.iter().any(|b| b.contains(p)),
            Combinator::Cell(k) => {
                self.terms[k].contains(p)
                    && !self.terms[..k].iter().any(|b| b.with_closure(false).contains(p))
            }
        };
        inside != self.complement
    }

    /// Balls whose spheres bound the region.
    pub fn boundary_spheres(&self) -> &[Ball<S>] {
        match self.combinator {
            Combinator::Union => &self.terms,
            Combinator::Cell(k) => &self.terms[..=k],
        }
    }

    /// Sorted crossing parameters of the segment with every boundary sphere.
    pub fn segment_crossings(&self, a: &Point<S>, b: &Point<S>) -> Vec<S> {
        let mut ts: Vec<S> = self.boundary_spheres().iter().flat_map(|s| s.segment_crossings(a, b)).collect();
        ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ts.dedup_by(|x, y| (*x - *y).abs() <= S::epsilon());
        ts
    }
}
