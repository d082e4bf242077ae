use super::Construction;
use crate::currents::{AtomicMeasure, TrafficPath};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::{flow_pow, Real};

/// Star through `apex`: each negative atom is sent to the apex and the apex feeds
/// each positive atom.
pub fn cone_transport<S: Real>(
    mu_minus: &AtomicMeasure<S>,
    mu_plus: &AtomicMeasure<S>,
    apex: &Point<S>,
    alpha: S,
) -> Result<Construction<S>> {
    let (a, b) = (mu_minus.total(), mu_plus.total());
    if (a - b).abs() > S::tol(1e-9) * (S::one() + a.abs()) {
        return Err(Error::Unbalanced { positive: b.f64(), negative: a.f64() });
    }
    let mut segs = Vec::new();
    for &(p, m) in &mu_minus.atoms {
        segs.push((p, *apex, m));
    }
    for &(p, m) in &mu_plus.atoms {
        segs.push((*apex, p, m));
    }
    let path = TrafficPath::from_segments(segs);
    let cost = path.alpha_mass(alpha);
    let bound = cone_bound(mu_minus, mu_plus, apex, alpha);
    let constant = if bound > S::zero() { cost / bound } else { S::zero() };
    Ok(Construction { path, cost, constant, scale: bound })
}

/// `sum over atoms of mass^alpha * dist(atom, apex)`.
pub fn cone_bound<S: Real>(mu_minus: &AtomicMeasure<S>, mu_plus: &AtomicMeasure<S>, apex: &Point<S>, alpha: S) -> S {
    mu_minus
        .atoms
        .iter()
        .chain(mu_plus.atoms.iter())
        .map(|(p, m)| flow_pow(m.abs(), alpha) * p.dist(apex))
        .sum()
}
