use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::currents::AtomicMeasure;
use crate::geometry::Point;
use crate::scalar::Real;

/// One atom of a target measure. `shift` is the direction the atom is moved
/// along by the perturbation; when absent a seeded random unit direction is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Real"))]
pub struct AtomSpec<S> {
    pub at: Vec<S>,
    pub mass: S,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<S>>,
}

/// Target measure of a stability experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound(deserialize = "S: Real"))]
pub enum TargetSpec<S> {
    /// Finitely many atoms, each shifted by `perturbation / n` at level `n`.
    Atoms { atoms: Vec<AtomSpec<S>> },
    /// Middle-thirds Cantor measure on the segment from `origin` along `direction`
    /// with the given `length` and total `mass`. Level `n` has `2^n` atoms, one at
    /// the left end of each surviving interval.
    Cantor { origin: Vec<S>, direction: Vec<S>, length: S, mass: S },
}

fn point_of<S: Real>(v: &[S]) -> Point<S> {
    let g = |i: usize| v.get(i).copied().unwrap_or_else(S::zero);
    Point::new(g(0), g(1), g(2))
}

impl<S: Real> TargetSpec<S> {
    pub fn total_mass(&self) -> S {
        match self {
            TargetSpec::Atoms { atoms } => atoms.iter().map(|a| a.mass).sum(),
            TargetSpec::Cantor { mass, .. } => *mass,
        }
    }

    /// Shift directions, unit length, in atom order.
    pub fn directions(&self, dim: usize, seed: u64) -> Vec<Point<S>> {
        let TargetSpec::Atoms { atoms } = self else { return Vec::new() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        atoms
            .iter()
            .map(|a| {
                let given = a.shift.as_ref().and_then(|s| point_of(s).normalized());
                let random = {
                    let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                    let z: f64 = if dim == 3 { rng.gen::<f64>() * 2.0 - 1.0 } else { 0.0 };
                    let rho = (1.0 - z * z).sqrt();
                    Point::new(S::c(rho * phi.cos()), S::c(rho * phi.sin()), S::c(z))
                };
                given.unwrap_or(random)
            })
            .collect()
    }

    /// The measure the quantizations converge to. Cantor targets are represented
    /// by their level-`level` quantization.
    pub fn limit(&self, level: usize) -> AtomicMeasure<S> {
        match self {
            TargetSpec::Atoms { atoms } => AtomicMeasure::new(atoms.iter().map(|a| (point_of(&a.at), a.mass)).collect()),
            TargetSpec::Cantor { .. } => cantor_level(self, level),
        }
    }
}

fn cantor_level<S: Real>(spec: &TargetSpec<S>, n: usize) -> AtomicMeasure<S> {
    let TargetSpec::Cantor { origin, direction, length, mass } = spec else { unreachable!() };
    let o = point_of(origin);
    let dir = point_of(direction).normalized().unwrap_or(Point::new(S::one(), S::zero(), S::zero()));
    let mut lefts = vec![S::zero()];
    let mut width = *length;
    for _ in 0..n {
        width = width / S::c(3.0);
        lefts = lefts.iter().flat_map(|&a| [a, a + S::c(2.0) * width]).collect();
    }
    let m = *mass / S::c(2f64.powi(n as i32));
    AtomicMeasure::new(lefts.into_iter().map(|a| (o + dir * a, m)).collect())
}

/// Atomic approximation of `spec` at refinement level `n`.
///
/// Atom targets are shifted by `perturbation / max(n, 1)` along their directions,
/// so a zero perturbation returns the target itself. Cantor targets ignore the
/// perturbation and return the level-`n` quantization. Total mass is kept exactly.
pub fn quantize<S: Real>(spec: &TargetSpec<S>, n: usize, perturbation: S, dim: usize, seed: u64) -> AtomicMeasure<S> {
    match spec {
        TargetSpec::Atoms { atoms } => {
            let step = perturbation / S::from_usize_lossy(n.max(1));
            let dirs = spec.directions(dim, seed);
            AtomicMeasure::new(atoms.iter().zip(dirs).map(|(a, d)| (point_of(&a.at) + d * step, a.mass)).collect())
        }
        TargetSpec::Cantor { .. } => cantor_level(spec, n),
    }
}

/// Transport bound between the level-`n` quantization and the target:
/// `perturbation / max(n, 1)` times the mass for atoms, `length * 3^-n` for Cantor.
pub fn quantization_scale<S: Real>(spec: &TargetSpec<S>, n: usize, perturbation: S) -> S {
    match spec {
        TargetSpec::Atoms { .. } => perturbation.abs() / S::from_usize_lossy(n.max(1)) * spec.total_mass(),
        TargetSpec::Cantor { length, mass, .. } => *length * *mass * S::c(3f64.powi(-(n as i32))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::weak_star_gap;

    fn one_atom(shift: Option<Vec<f64>>) -> TargetSpec<f64> {
        TargetSpec::Atoms { atoms: vec![AtomSpec { at: vec![0.0, 0.0], mass: 1.0, shift }] }
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let spec = one_atom(None);
        for n in [0, 1, 5, 64] {
            assert_eq!(quantize(&spec, n, 0.0, 2, 7), spec.limit(0));
        }
    }

    #[test]
    fn unit_shift_gap_is_one_over_n() {
        let spec = one_atom(Some(vec![1.0, 0.0]));
        for n in [1usize, 2, 4, 8, 16] {
            let q = quantize(&spec, n, 1.0, 2, 0);
            let gap = weak_star_gap(&q, &spec.limit(0));
            assert!((gap - 1.0 / n as f64).abs() < 1e-12, "n = {n}: {gap}");
        }
    }

    #[test]
    fn random_directions_are_seeded_units() {
        let spec = TargetSpec::Atoms {
            atoms: (0..4).map(|k| AtomSpec { at: vec![k as f64, 0.0], mass: 0.25, shift: None }).collect(),
        };
        let a = spec.directions(2, 3);
        assert_eq!(a, spec.directions(2, 3));
        assert_ne!(a, spec.directions(2, 4));
        for d in a {
            assert!((d.norm() - 1.0).abs() < 1e-12);
            assert_eq!(d.z(), 0.0);
        }
    }

    #[test]
    fn cantor_levels_match_reference() {
        let spec = TargetSpec::Cantor { origin: vec![0.0, 0.0], direction: vec![1.0, 0.0], length: 1.0, mass: 1.0 };
        let mut prev = f64::INFINITY;
        for n in 0..5usize {
            let q: AtomicMeasure<f64> = quantize(&spec, n, 0.0, 2, 0);
            assert_eq!(q.len(), 1 << n);
            assert!((q.total() - 1.0).abs() < 1e-15);
            let reference = quantize(&spec, n + 3, 0.0, 2, 0);
            let gap = weak_star_gap(&q, &reference);
            assert!(gap <= 3f64.powi(-(n as i32)) + 1e-12, "level {n}: {gap}");
            assert!(gap <= prev + 1e-12);
            prev = gap;
        }
    }

    #[test]
    fn mass_is_preserved() {
        let spec = TargetSpec::Atoms {
            atoms: vec![
                AtomSpec { at: vec![0.0, 0.0], mass: 0.3, shift: None },
                AtomSpec { at: vec![1.0, 0.0], mass: 0.7, shift: None },
            ],
        };
        for n in 1..20 {
            assert!((quantize::<f64>(&spec, n, 0.5, 2, 11).total() - 1.0).abs() < 1e-15);
        }
    }
}
