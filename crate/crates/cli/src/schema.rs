//! On-disk instance format.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "alpha": 0.5,
//!   "ambient_radius": 4,
//!   "mu_minus": [{"at": [-1, 1], "mass": 1}],
//!   "mu_plus": [{"at": [0, 0], "mass": 1}],
//!   "path": {"vertices": [[-1, 1], [0, 0]], "edges": [{"tail": 0, "head": 1, "theta": 1}]}
//! }
//! ```
//!
//! `path` is optional. Unknown keys are ignored, so solution files can be read
//! back as instances.

use ramify_core::{AtomicMeasure, Point, TrafficPath};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Balance tolerance between the two marginals.
pub const BALANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomEntry {
    pub at: Vec<f64>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub tail: usize,
    pub head: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathFile {
    pub vertices: Vec<Vec<f64>>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub dimension: usize,
    pub alpha: f64,
    pub ambient_radius: f64,
    pub mu_minus: Vec<AtomEntry>,
    pub mu_plus: Vec<AtomEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathFile>,
}

/// Deserializes JSON, reporting the path of the first offending field.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        CliError::Schema(format!("{at}: {}", e.into_inner()))
    })
}

fn bad(field: String, msg: impl std::fmt::Display) -> CliError {
    CliError::Schema(format!("{field}: {msg}"))
}

fn check_coords(field: String, c: &[f64], dim: usize) -> Result<()> {
    if c.len() != dim {
        return Err(bad(field, format!("expected {dim} coordinates, got {}", c.len())));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(bad(field, "coordinates must be finite"));
    }
    Ok(())
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: InstanceFile = parse_json(text)?;
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 2 && self.dimension != 3 {
            return Err(bad("dimension".into(), format!("must be 2 or 3, got {}", self.dimension)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(bad("alpha".into(), format!("must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.ambient_radius > 0.0 && self.ambient_radius.is_finite()) {
            return Err(bad("ambient_radius".into(), "must be positive"));
        }
        for (name, atoms) in [("mu_minus", &self.mu_minus), ("mu_plus", &self.mu_plus)] {
            for (i, a) in atoms.iter().enumerate() {
                check_coords(format!("{name}[{i}].at"), &a.at, self.dimension)?;
                if !(a.mass > 0.0 && a.mass.is_finite()) {
                    return Err(bad(format!("{name}[{i}].mass"), "must be positive"));
                }
            }
        }
        let (m, p) = (total(&self.mu_minus), total(&self.mu_plus));
        if (m - p).abs() > BALANCE_TOL * (1.0 + m) {
            return Err(bad("mu_plus".into(), format!("total mass {p} differs from mu_minus total {m}")));
        }
        if let Some(path) = &self.path {
            for (i, v) in path.vertices.iter().enumerate() {
                check_coords(format!("path.vertices[{i}]"), v, self.dimension)?;
            }
            let n = path.vertices.len();
            for (i, e) in path.edges.iter().enumerate() {
                if e.tail >= n {
                    return Err(bad(format!("path.edges[{i}].tail"), format!("index {} out of range", e.tail)));
                }
                if e.head >= n {
                    return Err(bad(format!("path.edges[{i}].head"), format!("index {} out of range", e.head)));
                }
                if !(e.theta > 0.0 && e.theta.is_finite()) {
                    return Err(bad(format!("path.edges[{i}].theta"), "must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Applies command-line overrides and re-validates.
    pub fn with_overrides(mut self, alpha: Option<f64>, dim: Option<usize>) -> Result<Self> {
        if let Some(a) = alpha {
            self.alpha = a;
        }
        if let Some(d) = dim {
            self.dimension = d;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn measures(&self) -> (AtomicMeasure, AtomicMeasure) {
        (to_measure(&self.mu_minus), to_measure(&self.mu_plus))
    }

    pub fn traffic_path(&self) -> Option<TrafficPath> {
        self.path.as_ref().map(to_path)
    }

    /// The path's boundary agrees with the marginals.
    pub fn check_path_boundary(&self) -> Result<()> {
        let Some(t) = self.traffic_path() else { return Ok(()) };
        let (m, p) = self.measures();
        let err = t.boundary().sub(&p.sub(&m)).total_variation();
        if err > BALANCE_TOL * (1.0 + m.total()) {
            return Err(bad("path".into(), format!("boundary differs from mu_plus - mu_minus by {err}")));
        }
        Ok(())
    }
}

fn total(atoms: &[AtomEntry]) -> f64 {
    atoms.iter().map(|a| a.mass).sum()
}

pub fn to_measure(atoms: &[AtomEntry]) -> AtomicMeasure {
    AtomicMeasure::new(atoms.iter().map(|a| (Point::from_f64(&a.at), a.mass)).collect())
}

pub fn from_measure(m: &AtomicMeasure, dim: usize) -> Vec<AtomEntry> {
    m.atoms.iter().map(|(p, w)| AtomEntry { at: p.coords[..dim].to_vec(), mass: *w }).collect()
}

pub fn to_path(f: &PathFile) -> TrafficPath {
    let pts: Vec<Point> = f.vertices.iter().map(|v| Point::from_f64(v)).collect();
    TrafficPath::from_segments(f.edges.iter().map(|e| (pts[e.tail], pts[e.head], e.theta)).collect())
}

pub fn from_path(t: &TrafficPath, dim: usize) -> PathFile {
    PathFile {
        vertices: t.vertices.iter().map(|p| p.coords[..dim].to_vec()).collect(),
        edges: t.edges.iter().map(|e| EdgeEntry { tail: e.tail, head: e.head, theta: e.theta }).collect(),
    }
}
