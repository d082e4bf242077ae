use super::{dyadic_irrigation, Construction, SphereWrapMap};
use crate::currents::{push_forward_subdivided, AtomicMeasure, LipschitzMap, Segment, TrafficPath};
use crate::error::{Error, Result};
use crate::geometry::{Ball, Point, SPHERE_TOL};
use crate::scalar::{flow_pow, Real};

/// Chords used for a full great circle.
pub const SEGMENTS_PER_CIRCLE: usize = 32;

/// Sphere connection together with its discretization diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereConstruction<S> {
    pub construction: Construction<S>,
    /// Largest distance from a vertex to the sphere.
    pub vertex_deviation: S,
    /// Largest distance from a chord midpoint to the sphere.
    pub chord_deviation: S,
}

/// Transport supported on a polygonal approximation of `sphere`.
///
/// In the plane mass travels along circular arcs with a constant flow offset chosen
/// to minimize the cost. In space the sphere is unwrapped onto a flat disk, the
/// transport is built there by dyadic irrigation and pushed back.
pub fn sphere_transport<S: Real>(
    mu_minus: &AtomicMeasure<S>,
    mu_plus: &AtomicMeasure<S>,
    sphere: &Ball<S>,
    alpha: S,
    dim: usize,
) -> Result<SphereConstruction<S>> {
    sphere_transport_with(mu_minus, mu_plus, sphere, alpha, dim, SEGMENTS_PER_CIRCLE)
}

pub fn sphere_transport_with<S: Real>(
    mu_minus: &AtomicMeasure<S>,
    mu_plus: &AtomicMeasure<S>,
    sphere: &Ball<S>,
    alpha: S,
    dim: usize,
    segments_per_circle: usize,
) -> Result<SphereConstruction<S>> {
    let threshold = S::one() - S::one() / S::from_usize_lossy(dim - 1);
    if alpha <= threshold {
        return Err(Error::SphereThreshold { alpha: alpha.f64(), threshold: threshold.f64() });
    }
    let r = sphere.radius;
    let tol = S::tol(SPHERE_TOL) * (S::one() + r);
    for (p, _) in mu_minus.atoms.iter().chain(mu_plus.atoms.iter()) {
        let off = (p.dist(&sphere.center) - r).abs();
        if off > tol {
            return Err(Error::AtomOffSphere(off.f64()));
        }
    }
    let (a, b) = (mu_minus.total(), mu_plus.total());
    if (a - b).abs() > S::tol(1e-9) * (S::one() + a.abs()) {
        return Err(Error::Unbalanced { positive: b.f64(), negative: a.f64() });
    }
    let net = mu_plus.sub(mu_minus);
    let m = net.positive_part().total();
    let path = if net.is_empty() {
        TrafficPath::empty()
    } else if dim == 2 {
        circle_arcs(&net, sphere, alpha, segments_per_circle)
    } else {
        wrapped(&net, sphere, alpha, segments_per_circle)?
    };
    let cost = path.alpha_mass(alpha);
    let denom = flow_pow(m, alpha) * r;
    let constant = if denom > S::zero() { cost / denom } else { S::zero() };
    let mut vertex_deviation = S::zero();
    for v in &path.vertices {
        vertex_deviation = vertex_deviation.max((v.dist(&sphere.center) - r).abs());
    }
    let mut chord_deviation = S::zero();
    for (p, q, _) in path.segments() {
        let mid = p.lerp(&q, S::c(0.5));
        chord_deviation = chord_deviation.max((mid.dist(&sphere.center) - r).abs());
    }
    Ok(SphereConstruction {
        construction: Construction { path, cost, constant, scale: r },
        vertex_deviation,
        chord_deviation,
    })
}

fn circle_arcs<S: Real>(net: &AtomicMeasure<S>, sphere: &Ball<S>, alpha: S, per_circle: usize) -> TrafficPath<S> {
    let c = sphere.center;
    let r = sphere.radius;
    let two_pi = S::c(2.0) * S::PI();
    let angle = |p: &Point<S>| {
        let a = (p.y() - c.y()).atan2(p.x() - c.x());
        if a < S::zero() {
            a + two_pi
        } else {
            a
        }
    };
    let mut atoms: Vec<(S, S)> = net.atoms.iter().map(|(p, m)| (angle(p), *m)).collect();
    atoms.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let n = atoms.len();
    // arc k runs counterclockwise from atom k to atom k+1 and carries offset - cum[k]
    let mut cum = Vec::with_capacity(n);
    let mut acc = S::zero();
    for a in &atoms {
        acc += a.1;
        cum.push(acc);
    }
    let span = |k: usize| {
        let d = atoms[(k + 1) % n].0 - atoms[k].0;
        if d <= S::zero() {
            d + two_pi
        } else {
            d
        }
    };
    let cost_for = |off: S| -> S { (0..n).map(|k| flow_pow((cum[k] - off).abs(), alpha) * span(k)).sum() };
    let mut best = cum[0];
    let mut best_cost = cost_for(best);
    for &cand in cum.iter().skip(1) {
        let v = cost_for(cand);
        if v < best_cost {
            best = cand;
            best_cost = v;
        }
    }
    let mut segs: Vec<Segment<S>> = Vec::new();
    let at = |phi: S| Point::new(c.x() + r * phi.cos(), c.y() + r * phi.sin(), c.z());
    for k in 0..n {
        let flow = best - cum[k];
        if flow.abs() <= S::tol(crate::currents::ZERO_MASS) {
            continue;
        }
        let d = span(k);
        let pieces = (S::from_usize_lossy(per_circle) * d / two_pi).ceil().to_usize().unwrap_or(1).max(1);
        let start = atoms[k].0;
        let mut prev = at(start);
        for i in 1..=pieces {
            let next = if i == pieces {
                at(atoms[(k + 1) % n].0)
            } else {
                at(start + d * S::from_usize_lossy(i) / S::from_usize_lossy(pieces))
            };
            segs.push((prev, next, flow));
            prev = next;
        }
    }
    TrafficPath::from_segments(segs)
}

fn wrapped<S: Real>(net: &AtomicMeasure<S>, sphere: &Ball<S>, alpha: S, per_circle: usize) -> Result<TrafficPath<S>> {
    let puncture = choose_puncture(net, sphere);
    let wrap = SphereWrapMap::new(*sphere, puncture, 3);
    let pre = |m: &AtomicMeasure<S>| AtomicMeasure::new(m.atoms.iter().map(|(p, w)| (wrap.inverse(p), *w)).collect());
    let plus = pre(&net.positive_part());
    let minus = pre(&net.negative_part());
    let m = plus.total();
    let hub = AtomicMeasure::dirac(Point::origin(), m);
    let out = dyadic_irrigation(&hub, &plus, alpha, 2)?.path;
    let back = dyadic_irrigation(&hub, &minus, alpha, 2)?.path;
    let disk = out.sub(&back);
    let max_len = S::c(2.0) * S::PI() * sphere.radius / S::from_usize_lossy(per_circle);
    Ok(push_forward_subdivided(&disk, &LipschitzMap::SphereWrap(wrap), max_len))
}

/// Sphere point farthest (in angle) from every atom, among a fixed candidate set.
fn choose_puncture<S: Real>(net: &AtomicMeasure<S>, sphere: &Ball<S>) -> Point<S> {
    let n = 128;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut best = None;
    let mut best_d = S::neg_infinity();
    for i in 0..n {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let rad = (1.0 - z * z).sqrt();
        let th = golden * i as f64;
        let dir = Point::new(S::c(rad * th.cos()), S::c(rad * th.sin()), S::c(z));
        let p = sphere.center + dir * sphere.radius;
        let d = net.atoms.iter().map(|(q, _)| q.dist(&p)).fold(S::infinity(), S::min);
        if d > best_d {
            best_d = d;
            best = Some(p);
        }
    }
    best.expect("candidates exist")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_circle(ball: &Ball<f64>, phi: f64) -> Point<f64> {
        ball.center + Point::new(phi.cos(), phi.sin(), 0.0) * ball.radius
    }

    fn on_sphere(ball: &Ball<f64>, phi: f64, z: f64) -> Point<f64> {
        let rho = (1.0 - z * z).sqrt();
        ball.center + Point::new(rho * phi.cos(), rho * phi.sin(), z) * ball.radius
    }

    #[test]
    fn planar_boundary_is_target_minus_source() {
        let ball = Ball::closed(Point::new(1.0, -2.0, 0.0), 0.5);
        let minus = AtomicMeasure::new(vec![(on_circle(&ball, 0.3), 0.4), (on_circle(&ball, 2.0), 0.6)]);
        let plus = AtomicMeasure::new(vec![(on_circle(&ball, 1.1), 0.7), (on_circle(&ball, 4.5), 0.3)]);
        let sc = sphere_transport(&minus, &plus, &ball, 0.6, 2).unwrap();
        let err = sc.construction.path.boundary().sub(&plus.sub(&minus)).total_variation();
        assert!(err < 1e-12, "{err}");
        assert!(sc.vertex_deviation < 1e-12);
        assert!(sc.construction.cost <= 2.0 * std::f64::consts::PI * 0.5);
    }

    #[test]
    fn spatial_boundary_is_target_minus_source() {
        let ball = Ball::closed(Point::new(0.0, 0.0, 1.0), 0.25);
        let minus = AtomicMeasure::new(vec![(on_sphere(&ball, 0.3, 0.5), 0.5), (on_sphere(&ball, 2.0, -0.2), 0.5)]);
        let plus = AtomicMeasure::dirac(on_sphere(&ball, 4.0, 0.1), 1.0);
        let sc = sphere_transport(&minus, &plus, &ball, 0.8, 3).unwrap();
        let err = sc.construction.path.boundary().sub(&plus.sub(&minus)).total_variation();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn below_threshold_is_rejected() {
        let ball = Ball::closed(Point::origin(), 1.0);
        let a = AtomicMeasure::dirac(on_sphere(&ball, 0.0, 0.0), 1.0);
        let b = AtomicMeasure::dirac(on_sphere(&ball, 1.0, 0.0), 1.0);
        assert!(matches!(sphere_transport(&a, &b, &ball, 0.4, 3), Err(Error::SphereThreshold { .. })));
    }
}
