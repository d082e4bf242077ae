use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::scalar::Real;

/// Atoms closer than this are identified.
pub const ATOM_MERGE_TOL: f64 = 1e-9;
/// Masses at or below this are dropped.
pub const ZERO_MASS: f64 = 1e-12;

/// Finite signed atomic measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure<S> {
    pub atoms: Vec<(Point<S>, S)>,
}

impl<S: Real> Default for AtomicMeasure<S> {
    fn default() -> Self {
        AtomicMeasure { atoms: Vec::new() }
    }
}

impl<S: Real> AtomicMeasure<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac(p: Point<S>, m: S) -> Self {
        Self::new(vec![(p, m)])
    }

    /// Builds a normalized measure: coincident atoms merged, zero atoms dropped.
    pub fn new(atoms: Vec<(Point<S>, S)>) -> Self {
        let mut m = AtomicMeasure { atoms };
        m.normalize();
        m
    }

    pub fn normalize(&mut self) {
        let tol = S::tol(ATOM_MERGE_TOL);
        let cell = S::c(1e-6).max(tol * S::c(4.0));
        let key = |p: &Point<S>| -> [i64; 3] {
            let k = |c: S| (c / cell).floor().to_i64().unwrap_or(i64::MAX);
            [k(p.coords[0]), k(p.coords[1]), k(p.coords[2])]
        };
        let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        let mut out: Vec<(Point<S>, S)> = Vec::new();
        for &(p, m) in &self.atoms {
            let k = key(&p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(v) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                            for &i in v {
                                if out[i].0.dist(&p) <= tol {
                                    found = Some(i);
                                    break 'search;
                                }
                            }
                        }
                    }
                }
            }
            match found {
                Some(i) => out[i].1 += m,
                None => {
                    grid.entry(k).or_default().push(out.len());
                    out.push((p, m));
                }
            }
        }
        let z = S::tol(ZERO_MASS);
        out.retain(|(_, m)| m.abs() > z);
        self.atoms = out;
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn positive_part(&self) -> Self {
        AtomicMeasure { atoms: self.atoms.iter().filter(|a| a.1 > S::zero()).cloned().collect() }
    }

    /// Negative part as a nonnegative measure.
    pub fn negative_part(&self) -> Self {
        AtomicMeasure { atoms: self.atoms.iter().filter(|a| a.1 < S::zero()).map(|&(p, m)| (p, -m)).collect() }
    }

    pub fn total(&self) -> S {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn total_variation(&self) -> S {
        self.atoms.iter().map(|a| a.1.abs()).sum()
    }

    pub fn scale(&self, k: S) -> Self {
        Self::new(self.atoms.iter().map(|&(p, m)| (p, m * k)).collect())
    }

    pub fn neg(&self) -> Self {
        AtomicMeasure { atoms: self.atoms.iter().map(|&(p, m)| (p, -m)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend(o.atoms.iter().cloned());
        Self::new(atoms)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Mass at `p` (atoms within the merge tolerance).
    pub fn mass_at(&self, p: &Point<S>) -> S {
        let tol = S::tol(ATOM_MERGE_TOL);
        self.atoms.iter().filter(|a| a.0.dist(p) <= tol).map(|a| a.1).sum()
    }

    /// Mass of the atoms satisfying `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(&Point<S>) -> bool) -> S {
        self.atoms.iter().filter(|a| pred(&a.0)).map(|a| a.1).sum()
    }

    pub fn restrict(&self, mut pred: impl FnMut(&Point<S>) -> bool) -> Self {
        AtomicMeasure { atoms: self.atoms.iter().filter(|a| pred(&a.0)).cloned().collect() }
    }

    pub fn support(&self) -> Vec<Point<S>> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    /// Largest atomwise discrepancy against `o`.
    pub fn max_atom_gap(&self, o: &Self) -> S {
        self.sub(o).atoms.iter().map(|a| a.1.abs()).fold(S::zero(), S::max)
    }

    /// Atomwise equality within `tol`.
    pub fn approx_eq(&self, o: &Self, tol: S) -> bool {
        self.max_atom_gap(o) <= tol
    }

    /// `self <= o` atomwise up to `tol`, both taken as nonnegative measures.
    pub fn dominated_by(&self, o: &Self, tol: S) -> bool {
        self.atoms.iter().all(|&(p, m)| m <= o.mass_at(&p) + tol)
    }

    /// Atoms sorted lexicographically; canonical form for comparisons and output.
    pub fn sorted(&self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|a, b| a.0.lex_cmp(&b.0));
        AtomicMeasure { atoms }
    }

    pub fn cast<T: Real>(&self) -> AtomicMeasure<T> {
        AtomicMeasure { atoms: self.atoms.iter().map(|(p, m)| (p.cast(), T::c(m.f64()))).collect() }
    }
}
