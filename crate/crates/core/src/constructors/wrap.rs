use serde::{Deserialize, Serialize};

use crate::geometry::{Ball, Point};
use crate::scalar::Real;

/// Wraps the flat disk of radius `pi * r` onto the sphere `sphere` minus a puncture.
///
/// Azimuthal-equidistant chart centered at the antipode of the puncture: the disk
/// point at distance `rho` from the origin goes to the sphere point at geodesic
/// distance `rho` from the antipode. Radial speed is 1 and tangential speed is
/// `sin(rho/r) r / rho <= 1`, so the map is 1-Lipschitz. Points beyond the disk
/// are first projected radially onto it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereWrapMap<S> {
    pub sphere: Ball<S>,
    pub puncture: Point<S>,
    /// Unit vector from the center to the antipode of the puncture.
    axis: Point<S>,
    e1: Point<S>,
    /// Zero in the planar case.
    e2: Point<S>,
}

impl<S: Real> SphereWrapMap<S> {
    /// `dim` is the ambient dimension; in the plane the disk degenerates to a segment.
    pub fn new(sphere: Ball<S>, puncture: Point<S>, dim: usize) -> Self {
        let axis = (sphere.center - puncture).normalized().expect("puncture differs from center");
        let (e1, e2) = if dim == 2 {
            (Point::xy(-axis.y(), axis.x()), Point::origin())
        } else {
            let helper = if axis.x().abs() < S::c(0.9) { Point::new(S::one(), S::zero(), S::zero()) } else { Point::new(S::zero(), S::one(), S::zero()) };
            let e1 = (helper - axis * helper.dot(&axis)).normalized().expect("independent helper");
            let e2 = axis.cross(&e1);
            (e1, e2)
        };
        SphereWrapMap { sphere, puncture, axis, e1, e2 }
    }

    /// Radius of the source disk.
    pub fn disk_radius(&self) -> S {
        S::PI() * self.sphere.radius
    }

    pub fn apply(&self, u: &Point<S>) -> Point<S> {
        let r = self.sphere.radius;
        let rho = (u.x() * u.x() + u.y() * u.y()).sqrt();
        if rho <= S::zero() {
            return self.sphere.center + self.axis * r;
        }
        let rho_c = rho.min(self.disk_radius());
        let phi = rho_c / r;
        let dir = self.e1 * (u.x() / rho) + self.e2 * (u.y() / rho);
        self.sphere.center + (self.axis * phi.cos() + dir * phi.sin()) * r
    }

    /// Disk preimage of a sphere point other than the puncture.
    pub fn inverse(&self, p: &Point<S>) -> Point<S> {
        let r = self.sphere.radius;
        let v = (*p - self.sphere.center) * (S::one() / r);
        let c = v.dot(&self.axis).max(-S::one()).min(S::one());
        let phi = c.acos();
        let w = v - self.axis * c;
        let (a, b) = (w.dot(&self.e1), w.dot(&self.e2));
        let n = (a * a + b * b).sqrt();
        if n <= S::zero() {
            return Point::origin();
        }
        Point::xy(a / n * phi * r, b / n * phi * r)
    }
}
