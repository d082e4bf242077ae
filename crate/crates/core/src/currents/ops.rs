use serde::{Deserialize, Serialize};

use super::path::{Segment, TrafficPath};
use crate::constructors::SphereWrapMap;
use crate::error::{Error, Result};
use crate::geometry::{project_to_ball, BallRegion, Point};
use crate::scalar::Real;

/// Restriction to a ball region: edges are split where they cross the region's
/// spheres and pieces whose midpoint lies in the region are kept.
pub fn restrict<S: Real>(t: &TrafficPath<S>, region: &BallRegion<S>) -> TrafficPath<S> {
    let half = S::c(0.5);
    let mut segs: Vec<Segment<S>> = Vec::new();
    for (a, b, theta) in t.segments() {
        let mut ts = vec![S::zero()];
        ts.extend(region.segment_crossings(&a, &b));
        ts.push(S::one());
        for w in ts.windows(2) {
            let mid = a.lerp(&b, (w[0] + w[1]) * half);
            if region.contains(&mid) {
                segs.push((a.lerp(&b, w[0]), a.lerp(&b, w[1]), theta));
            }
        }
    }
    TrafficPath::from_segments(segs)
}

/// Lipschitz maps that traffic paths can be pushed through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LipschitzMap<S> {
    Identity,
    /// Closest-point projection onto the ball of this radius about the origin.
    BallProjection { radius: S },
    /// `p -> linear * p + offset`.
    Affine { linear: [[S; 3]; 3], offset: Point<S> },
    SphereWrap(SphereWrapMap<S>),
}

impl<S: Real> LipschitzMap<S> {
    /// Map from a kind name and flat parameter list, as read from user input.
    ///
    /// `ball_projection`: `[radius]`; `affine`: 9 matrix entries row-major then
    /// 3 offset entries; `identity`: none.
    pub fn by_name(kind: &str, params: &[f64]) -> Result<Self> {
        match kind {
            "identity" => Ok(LipschitzMap::Identity),
            "ball_projection" if params.len() == 1 => Ok(LipschitzMap::BallProjection { radius: S::c(params[0]) }),
            "affine" if params.len() == 12 => {
                let mut linear = [[S::zero(); 3]; 3];
                for (i, row) in linear.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = S::c(params[3 * i + j]);
                    }
                }
                Ok(LipschitzMap::Affine { linear, offset: Point::from_f64(&params[9..12]) })
            }
            _ => Err(Error::UnknownMap(kind.to_string())),
        }
    }

    pub fn uniform_scaling(k: S) -> Self {
        let z = S::zero();
        LipschitzMap::Affine { linear: [[k, z, z], [z, k, z], [z, z, k]], offset: Point::origin() }
    }

    pub fn apply(&self, p: &Point<S>) -> Point<S> {
        match self {
            LipschitzMap::Identity => *p,
            LipschitzMap::BallProjection { radius } => project_to_ball(p, *radius),
            LipschitzMap::Affine { linear, offset } => {
                let row = |r: &[S; 3]| r[0] * p.coords[0] + r[1] * p.coords[1] + r[2] * p.coords[2];
                Point::new(row(&linear[0]), row(&linear[1]), row(&linear[2])) + *offset
            }
            LipschitzMap::SphereWrap(w) => w.apply(p),
        }
    }

    /// Lipschitz constant (operator norm for affine maps).
    pub fn lipschitz(&self) -> S {
        match self {
            LipschitzMap::Identity | LipschitzMap::BallProjection { .. } | LipschitzMap::SphereWrap(_) => S::one(),
            LipschitzMap::Affine { linear, .. } => operator_norm(linear),
        }
    }
}

fn operator_norm<S: Real>(m: &[[S; 3]; 3]) -> S {
    // power iteration on m^T m; the Frobenius norm caps the result
    let mut ata = [[S::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ata[i][j] = (0..3).map(|k| m[k][i] * m[k][j]).sum();
        }
    }
    let mut v = [S::one(), S::c(0.7), S::c(0.3)];
    let mut lambda = S::zero();
    for _ in 0..200 {
        let w: Vec<S> = (0..3).map(|i| (0..3).map(|j| ata[i][j] * v[j]).sum()).collect();
        let n = w.iter().map(|x| *x * *x).sum::<S>().sqrt();
        if n <= S::zero() {
            return S::zero();
        }
        lambda = n;
        for i in 0..3 {
            v[i] = w[i] / n;
        }
    }
    let frob = m.iter().flatten().map(|x| *x * *x).sum::<S>().sqrt();
    // guard against slight underestimation by the iteration
    (lambda.sqrt() * (S::one() + S::c(1e-12))).min(frob)
}

/// Push-forward: vertices are mapped and every edge re-embedded as a segment.
pub fn push_forward<S: Real>(t: &TrafficPath<S>, map: &LipschitzMap<S>) -> TrafficPath<S> {
    t.map_points(|p| map.apply(p))
}

/// Push-forward after cutting every edge into pieces of length at most `max_len`,
/// so that curved images are followed closely.
pub fn push_forward_subdivided<S: Real>(t: &TrafficPath<S>, map: &LipschitzMap<S>, max_len: S) -> TrafficPath<S> {
    let mut segs = Vec::new();
    for (a, b, theta) in t.segments() {
        let k = (a.dist(&b) / max_len).ceil().to_usize().unwrap_or(1).max(1);
        let mut prev = map.apply(&a);
        for i in 1..=k {
            let next = map.apply(&a.lerp(&b, S::from_usize_lossy(i) / S::from_usize_lossy(k)));
            segs.push((prev, next, theta));
            prev = next;
        }
    }
    TrafficPath::from_segments(segs)
}
