use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Ball, BallRegion, Point, SPHERE_TOL};
use crate::currents::{restrict, AtomicMeasure, TrafficPath};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Center choice used by both covering routines.
pub const COVER_METHOD: &str = "greedy point-centered";

const PERTURB_ATTEMPTS: usize = 64;
const PERTURB_SPAN: f64 = 1e-6;

/// Packing bound: how many disjoint balls of radius `r/20` fit in the
/// `r`-neighbourhood of the ambient ball, by volume.
pub fn packing_bound(ambient_radius: f64, r: f64, dim: usize) -> f64 {
    ((ambient_radius + r) / (r / 20.0)).powi(dim as i32)
}

/// Covers `k` by open balls of radius `r/4` centered at points of `k`.
///
/// Centers are picked greedily, so distinct centers are at least `r/4` apart
/// and the balls of radius `r/20` around them are disjoint.
pub fn cover_compact<S: Real>(k: &[Point<S>], r: S, ambient_radius: S) -> Result<Vec<Ball<S>>> {
    if k.is_empty() {
        return Err(Error::EmptyCompactSet);
    }
    if !(r > S::zero()) || !(ambient_radius > S::zero()) {
        return Err(Error::Invalid("cover radius and ambient radius must be positive".into()));
    }
    let rad = r / S::c(4.0);
    let mut balls: Vec<Ball<S>> = Vec::new();
    for p in k {
        if !balls.iter().any(|b| b.contains(p)) {
            balls.push(Ball::open(*p, rad));
        }
    }
    Ok(balls)
}

/// Covers the finite set `a` by disjoint open balls with total radius below `eps`,
/// such that `t` and `t_opt` have restricted alpha-mass below `eps` on the closed
/// union and no atom of `boundary_atoms` sits on a sphere.
pub fn cover_null_set<S: Real>(
    a: &[Point<S>],
    t: &TrafficPath<S>,
    t_opt: &TrafficPath<S>,
    boundary_atoms: &[AtomicMeasure<S>],
    alpha: S,
    eps: S,
) -> Result<Vec<Ball<S>>> {
    if !(eps > S::zero()) {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    let mut centers: Vec<Point<S>> = Vec::new();
    let merge = S::tol(SPHERE_TOL);
    for p in a {
        if !centers.iter().any(|c| c.dist(p) <= merge) {
            centers.push(*p);
        }
    }
    if centers.is_empty() {
        return Ok(Vec::new());
    }
    let n = S::from_usize_lossy(centers.len());
    let mut sep = S::infinity();
    for i in 0..centers.len() {
        for j in 0..i {
            sep = sep.min(centers[i].dist(&centers[j]));
        }
    }
    let mut rad = (eps / (S::c(2.0) * n)).min(sep / S::c(3.0));
    let restricted = |radius: S| {
        let region = BallRegion::union(centers.iter().map(|c| Ball::closed(*c, radius)).collect());
        restrict(t, &region).alpha_mass(alpha).max(restrict(t_opt, &region).alpha_mass(alpha))
    };
    let mut shrinks = 0;
    // leave room for the perturbation factor
    while restricted(rad * S::c(1.0 + PERTURB_SPAN)) >= eps {
        rad = rad / S::c(2.0);
        shrinks += 1;
        if shrinks > 200 || rad <= S::zero() {
            return Err(Error::CoveringInfeasible);
        }
    }
    let atoms: Vec<Point<S>> = boundary_atoms.iter().flat_map(|m| m.support()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut balls = Vec::with_capacity(centers.len());
    for c in &centers {
        let mut chosen = None;
        for _ in 0..PERTURB_ATTEMPTS {
            let f: f64 = 1.0 + PERTURB_SPAN * (1.0 - rng.gen::<f64>());
            let ball = Ball::open(*c, rad * S::c(f));
            if !atoms.iter().any(|q| ball.on_sphere(q)) {
                chosen = Some(ball);
                break;
            }
        }
        balls.push(chosen.ok_or(Error::CoveringInfeasible)?);
    }
    Ok(balls)
}
