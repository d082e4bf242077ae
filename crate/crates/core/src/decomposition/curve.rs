use serde::{Deserialize, Serialize};

use crate::currents::{AtomicMeasure, TrafficPath};
use crate::error::{Error, Result};
use crate::geometry::{BallRegion, Point};
use crate::scalar::Real;

/// Polyline curve, parametrized by arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve<S> {
    pub waypoints: Vec<Point<S>>,
}

impl<S: Real> Curve<S> {
    pub fn new(waypoints: Vec<Point<S>>) -> Self {
        Curve { waypoints }
    }

    pub fn start(&self) -> Point<S> {
        self.waypoints[0]
    }

    pub fn end(&self) -> Point<S> {
        *self.waypoints.last().expect("curve has waypoints")
    }

    pub fn length(&self) -> S {
        self.waypoints.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }

    /// Point at arclength `t`, clamped to the curve.
    pub fn at(&self, t: S) -> Point<S> {
        let mut acc = S::zero();
        for w in self.waypoints.windows(2) {
            let l = w[0].dist(&w[1]);
            if t <= acc + l {
                if l <= S::zero() {
                    return w[0];
                }
                return w[0].lerp(&w[1], ((t - acc) / l).max(S::zero()).min(S::one()));
            }
            acc += l;
        }
        self.end()
    }

    /// No waypoint repeats.
    pub fn is_simple(&self) -> bool {
        let tol = S::tol(crate::currents::GEOM_TOL);
        for i in 0..self.waypoints.len() {
            for j in 0..i {
                if self.waypoints[i].dist(&self.waypoints[j]) <= tol {
                    return false;
                }
            }
        }
        self.waypoints.len() >= 2
    }

    pub fn reversed(&self) -> Self {
        let mut w = self.waypoints.clone();
        w.reverse();
        Curve { waypoints: w }
    }

    /// Current carried by the curve with multiplicity `w`.
    pub fn current(&self, w: S) -> TrafficPath<S> {
        TrafficPath::polyline(&self.waypoints, w)
    }
}

/// Arclength where the curve first leaves `region`; infinity if it never does.
pub fn first_exit<S: Real>(c: &Curve<S>, region: &BallRegion<S>) -> S {
    let mut acc = S::zero();
    for w in c.waypoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let l = a.dist(&b);
        if !region.contains(&a) {
            return acc;
        }
        let mut ts = vec![S::zero()];
        ts.extend(region.segment_crossings(&a, &b));
        ts.push(S::one());
        for iv in ts.windows(2) {
            let mid = a.lerp(&b, (iv[0] + iv[1]) / S::c(2.0));
            if !region.contains(&mid) || (iv[0] > S::zero() && !region.contains(&a.lerp(&b, iv[0]))) {
                return acc + iv[0] * l;
            }
        }
        acc += l;
    }
    if c.waypoints.len() == 1 || region.contains(&c.end()) {
        S::infinity()
    } else {
        acc
    }
}

/// Arclength of the last time the curve lies outside `region`; 0 if it never does.
pub fn last_entry<S: Real>(c: &Curve<S>, region: &BallRegion<S>) -> S {
    let total = c.length();
    if !region.contains(&c.end()) {
        return total;
    }
    let mut acc = total;
    for w in c.waypoints.windows(2).rev() {
        let (a, b) = (w[0], w[1]);
        let l = a.dist(&b);
        let mut ts = vec![S::zero()];
        ts.extend(region.segment_crossings(&a, &b));
        ts.push(S::one());
        for iv in ts.windows(2).rev() {
            let mid = a.lerp(&b, (iv[0] + iv[1]) / S::c(2.0));
            if !region.contains(&mid) || (iv[1] < S::one() && !region.contains(&a.lerp(&b, iv[1]))) {
                return acc - l + iv[1] * l;
            }
        }
        acc -= l;
        if !region.contains(&a) {
            return acc;
        }
    }
    S::zero()
}

/// The curve on the arclength interval `[a, b]`; `None` when `a == b`.
pub fn restrict_curve<S: Real>(c: &Curve<S>, a: S, b: S) -> Result<Option<Curve<S>>> {
    if a > b || a < S::zero() {
        return Err(Error::InvalidInterval { a: a.f64(), b: b.f64() });
    }
    let total = c.length();
    let b = b.min(total);
    if a >= b {
        return Ok(None);
    }
    let mut pts = vec![c.at(a)];
    let mut acc = S::zero();
    for w in c.waypoints.windows(2) {
        acc += w[0].dist(&w[1]);
        if acc > a && acc < b {
            pts.push(w[1]);
        }
    }
    pts.push(c.at(b));
    let tol = S::tol(crate::currents::GEOM_TOL);
    pts.dedup_by(|x, y| x.dist(y) <= tol);
    if pts.len() < 2 {
        return Ok(None);
    }
    Ok(Some(Curve::new(pts)))
}

/// Finite weighted family of curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMeasure<S> {
    pub entries: Vec<(Curve<S>, S)>,
}

impl<S: Real> Default for PathMeasure<S> {
    fn default() -> Self {
        PathMeasure { entries: Vec::new() }
    }
}

impl<S: Real> PathMeasure<S> {
    pub fn new(entries: Vec<(Curve<S>, S)>) -> Self {
        PathMeasure { entries: entries.into_iter().filter(|e| e.1 > S::zero()).collect() }
    }

    pub fn total_weight(&self) -> S {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum w * delta_start`.
    pub fn start_measure(&self) -> AtomicMeasure<S> {
        AtomicMeasure::new(self.entries.iter().map(|(c, w)| (c.start(), *w)).collect())
    }

    /// `sum w * delta_end`.
    pub fn end_measure(&self) -> AtomicMeasure<S> {
        AtomicMeasure::new(self.entries.iter().map(|(c, w)| (c.end(), *w)).collect())
    }

    /// `sum w * length`.
    pub fn weighted_length(&self) -> S {
        self.entries.iter().map(|(c, w)| *w * c.length()).sum()
    }

    pub fn scale(&self, k: S) -> Self {
        Self::new(self.entries.iter().map(|(c, w)| (c.clone(), *w * k)).collect())
    }

    pub fn reversed(&self) -> Self {
        PathMeasure { entries: self.entries.iter().map(|(c, w)| (c.reversed(), *w)).collect() }
    }

    /// Sum of the weights of curves that run along the segment `a -> b`.
    pub fn weight_through(&self, a: &Point<S>, b: &Point<S>) -> S {
        let tol = S::tol(crate::currents::GEOM_TOL);
        self.entries
            .iter()
            .filter(|(c, _)| c.waypoints.windows(2).any(|w| w[0].dist(a) <= tol && w[1].dist(b) <= tol))
            .map(|e| e.1)
            .sum()
    }
}

/// Overlay of the weighted curve currents.
pub fn reconstruct<S: Real>(pi: &PathMeasure<S>) -> TrafficPath<S> {
    TrafficPath::from_segments(
        pi.entries
            .iter()
            .flat_map(|(c, w)| c.waypoints.windows(2).map(move |s| (s[0], s[1], *w)))
            .collect(),
    )
}
