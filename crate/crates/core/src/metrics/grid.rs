use serde::{Deserialize, Serialize};

use super::mcf::MinCostFlow;
use crate::currents::TrafficPath;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Regular square grid on a planar box: vertices `(i, j)` at
/// `origin + h (i, j)` for `0 <= i <= nx`, `0 <= j <= ny`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridComplex {
    pub origin: [f64; 2],
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

/// Value of the grid flat norm LP plus the rasterization error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatEstimate {
    pub value: f64,
    pub error_bound: f64,
}

impl GridComplex {
    pub fn new(origin: [f64; 2], h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h > 0.0) || nx == 0 || ny == 0 {
            return Err(Error::Invalid("grid needs h > 0 and at least one cell".into()));
        }
        Ok(GridComplex { origin, h, nx, ny })
    }

    /// Smallest grid of spacing `h`, aligned to multiples of `h`, containing every
    /// path with `margin` cells to spare on each side.
    pub fn covering<S: Real>(paths: &[&TrafficPath<S>], h: f64, margin: usize) -> Result<Self> {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in paths {
            for v in &p.vertices {
                for k in 0..2 {
                    lo[k] = lo[k].min(v.coords[k].f64());
                    hi[k] = hi[k].max(v.coords[k].f64());
                }
            }
        }
        if !lo[0].is_finite() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let m = margin as f64;
        let i0 = (lo[0] / h).floor() - m;
        let j0 = (lo[1] / h).floor() - m;
        let i1 = (hi[0] / h).ceil() + m;
        let j1 = (hi[1] / h).ceil() + m;
        Self::new([i0 * h, j0 * h], h, ((i1 - i0) as usize).max(1), ((j1 - j0) as usize).max(1))
    }

    fn h_edge(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    fn v_edge(&self, i: usize, j: usize) -> usize {
        self.nx * (self.ny + 1) + j * (self.nx + 1) + i
    }

    pub fn edge_count(&self) -> usize {
        self.nx * (self.ny + 1) + (self.nx + 1) * self.ny
    }

    pub fn face_count(&self) -> usize {
        self.nx * self.ny
    }

    fn vertex_of(&self, x: f64, y: f64) -> Option<(i64, i64)> {
        let i = ((x - self.origin[0]) / self.h).round() as i64;
        let j = ((y - self.origin[1]) / self.h).round() as i64;
        if i < 0 || j < 0 || i > self.nx as i64 || j > self.ny as i64 {
            None
        } else {
            Some((i, j))
        }
    }

    fn inside(&self, x: f64, y: f64) -> bool {
        let tol = 1e-9 * (1.0 + self.h);
        x >= self.origin[0] - tol
            && y >= self.origin[1] - tol
            && x <= self.origin[0] + self.h * self.nx as f64 + tol
            && y <= self.origin[1] + self.h * self.ny as f64 + tol
    }

    /// Grid 1-chain of a path (staircase per segment) and the rasterization error.
    pub fn rasterize<S: Real>(&self, t: &TrafficPath<S>) -> Result<(Vec<f64>, f64)> {
        let mut chain = vec![0.0; self.edge_count()];
        let mut err = 0.0;
        let h = self.h;
        for (a, b, theta) in t.segments() {
            let (ax, ay, bx, by) = (a.x().f64(), a.y().f64(), b.x().f64(), b.y().f64());
            let th = theta.f64();
            if !self.inside(ax, ay) || !self.inside(bx, by) {
                return Err(Error::OutsideGrid);
            }
            let (i0, j0) = self.vertex_of(ax, ay).ok_or(Error::OutsideGrid)?;
            let (i1, j1) = self.vertex_of(bx, by).ok_or(Error::OutsideGrid)?;
            let (dx, dy) = (bx - ax, by - ay);
            let len = (dx * dx + dy * dy).sqrt();
            // swept area between staircase and segment, plus the two snapping links
            err += th * (h * (dx.abs() + dy.abs()) + 2.0 * h);
            let (sx, sy) = ((i1 - i0).signum(), (j1 - j0).signum());
            let (mut i, mut j) = (i0, j0);
            let line_dist = |x: f64, y: f64| {
                if len <= 0.0 {
                    0.0
                } else {
                    ((x - ax) * dy - (y - ay) * dx).abs() / len
                }
            };
            let pos = |i: i64, j: i64| (self.origin[0] + h * i as f64, self.origin[1] + h * j as f64);
            while i != i1 || j != j1 {
                let step_x = if i == i1 {
                    false
                } else if j == j1 {
                    true
                } else {
                    let (px, py) = pos(i + sx, j);
                    let (qx, qy) = pos(i, j + sy);
                    line_dist(px, py) <= line_dist(qx, qy)
                };
                if step_x {
                    let lo = i.min(i + sx) as usize;
                    chain[self.h_edge(lo, j as usize)] += th * sx as f64;
                    i += sx;
                } else {
                    let lo = j.min(j + sy) as usize;
                    chain[self.v_edge(i as usize, lo)] += th * sy as f64;
                    j += sy;
                }
            }
        }
        Ok((chain, err))
    }

    /// `min over 2-chains s of  M(t - boundary s) + M(s)` on this grid, where edge
    /// masses are weighted by `h` and face masses by `h^2`.
    ///
    /// Solved through its dual, a maximum-profit circulation on the dual graph
    /// (faces plus the outer face), with profit `t_e` per unit crossing edge `e`.
    pub fn chain_flat_norm(&self, chain: &[f64]) -> f64 {
        let (nx, ny, h) = (self.nx, self.ny, self.h);
        let faces = nx * ny;
        let outer = faces;
        let face = |i: i64, j: i64| -> usize {
            if i < 0 || j < 0 || i >= nx as i64 || j >= ny as i64 {
                outer
            } else {
                j as usize * nx + i as usize
            }
        };
        let mut g = MinCostFlow::new(faces + 1);
        let add = |g: &mut MinCostFlow, a: usize, b: usize, t: f64| {
            if a == b {
                return;
            }
            g.add_arc(a, b, h, -t);
            g.add_arc(b, a, h, t);
        };
        for j in 0..=ny {
            for i in 0..nx {
                let t = chain[self.h_edge(i, j)];
                // boundary of s on this edge is s(i, j) - s(i, j - 1)
                add(&mut g, face(i as i64, j as i64), face(i as i64, j as i64 - 1), t);
            }
        }
        for j in 0..ny {
            for i in 0..=nx {
                let t = chain[self.v_edge(i, j)];
                // boundary of s on this edge is s(i - 1, j) - s(i, j)
                add(&mut g, face(i as i64 - 1, j as i64), face(i as i64, j as i64), t);
            }
        }
        for f in 0..faces {
            g.add_arc(outer, f, h * h, 0.0);
            g.add_arc(f, outer, h * h, 0.0);
        }
        (-g.min_cost_circulation()).max(0.0)
    }
}

/// Flat distance between two planar paths on `grid`.
pub fn flat_distance_1<S: Real>(t1: &TrafficPath<S>, t2: &TrafficPath<S>, grid: &GridComplex) -> Result<FlatEstimate> {
    let (c1, e1) = grid.rasterize(t1)?;
    let (c2, e2) = grid.rasterize(t2)?;
    let diff: Vec<f64> = c1.iter().zip(c2.iter()).map(|(a, b)| a - b).collect();
    Ok(FlatEstimate { value: grid.chain_flat_norm(&diff), error_bound: e1 + e2 })
}
