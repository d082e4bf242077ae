use crate::currents::{AtomicMeasure, Segment, TrafficPath};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Real;

/// A constructed path with its cost and the measured constant of its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction<S> {
    pub path: TrafficPath<S>,
    pub cost: S,
    /// `cost / (M^alpha * scale)` where `scale` is the construction's length scale.
    pub constant: S,
    pub scale: S,
}

/// Hierarchical irrigation from a single atom: the cube of side `L` centered at the
/// source is split into `2^d` subcubes recursively and mass is routed between cell
/// centers until each cell holds one target atom.
pub fn dyadic_irrigation<S: Real>(
    source: &AtomicMeasure<S>,
    target: &AtomicMeasure<S>,
    alpha: S,
    dim: usize,
) -> Result<Construction<S>> {
    let threshold = S::one() - S::one() / S::from_usize_lossy(dim);
    if alpha <= threshold {
        return Err(Error::BelowIrrigabilityThreshold);
    }
    if source.atoms.len() != 1 || source.atoms[0].1 <= S::zero() {
        return Err(Error::Precondition("source must be a single positive atom".into()));
    }
    let (src, m) = source.atoms[0];
    if target.atoms.iter().any(|a| a.1 < S::zero()) {
        return Err(Error::Precondition("target must be nonnegative".into()));
    }
    let tm = target.total();
    if (tm - m).abs() > S::tol(1e-9) * (S::one() + m) {
        return Err(Error::Unbalanced { positive: tm.f64(), negative: m.f64() });
    }
    let half = target
        .atoms
        .iter()
        .flat_map(|(p, _)| (0..dim).map(move |k| (p.coords[k] - src.coords[k]).abs()))
        .fold(S::zero(), S::max);
    let side = S::c(2.0) * half;
    let mut segs = Vec::new();
    if half > S::zero() {
        let atoms: Vec<(Point<S>, S)> = target.atoms.clone();
        split(src, half, &atoms, dim, &mut segs, 0);
    }
    let path = TrafficPath::from_segments(segs);
    let cost = path.alpha_mass(alpha);
    let denom = m.powf(alpha) * side;
    let constant = if denom > S::zero() { cost / denom } else { S::zero() };
    Ok(Construction { path, cost, constant, scale: side })
}

fn split<S: Real>(center: Point<S>, half: S, atoms: &[(Point<S>, S)], dim: usize, segs: &mut Vec<Segment<S>>, depth: usize) {
    if atoms.len() == 1 || depth > 200 {
        for &(p, w) in atoms {
            segs.push((center, p, w));
        }
        return;
    }
    let q = half / S::c(2.0);
    for code in 0..(1usize << dim) {
        let upper = |k: usize| code >> k & 1 == 1;
        let child: Vec<(Point<S>, S)> = atoms
            .iter()
            .filter(|(p, _)| (0..dim).all(|k| (p.coords[k] >= center.coords[k]) == upper(k)))
            .cloned()
            .collect();
        if child.is_empty() {
            continue;
        }
        let mut c = center;
        for k in 0..dim {
            c.coords[k] += if upper(k) { q } else { -q };
        }
        let w: S = child.iter().map(|a| a.1).sum();
        segs.push((center, c, w));
        split(c, q, &child, dim, segs, depth + 1);
    }
}
