use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::measure::{AtomicMeasure, ZERO_MASS};
use crate::geometry::Point;
use crate::scalar::{flow_pow, Real};

/// Distance under which vertices are identified and lines count as collinear.
pub const GEOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge<S> {
    pub tail: usize,
    pub head: usize,
    pub theta: S,
}

/// Oriented weighted segment `(from, to, multiplicity)`.
pub type Segment<S> = (Point<S>, Point<S>, S);

/// Embedded weighted digraph with straight edges and positive multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficPath<S> {
    pub vertices: Vec<Point<S>>,
    pub edges: Vec<Edge<S>>,
}

impl<S: Real> Default for TrafficPath<S> {
    fn default() -> Self {
        TrafficPath { vertices: Vec::new(), edges: Vec::new() }
    }
}

impl<S: Real> TrafficPath<S> {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Normalized path from raw segments: overlapping collinear pieces merged or
    /// cancelled, negative multiplicities reversed, coincident vertices fused.
    pub fn from_segments(segs: Vec<Segment<S>>) -> Self {
        build(normalize_segments(segs))
    }

    pub fn segment(a: Point<S>, b: Point<S>, theta: S) -> Self {
        Self::from_segments(vec![(a, b, theta)])
    }

    /// Chain through `pts` carrying `theta` on every piece.
    pub fn polyline(pts: &[Point<S>], theta: S) -> Self {
        Self::from_segments(pts.windows(2).map(|w| (w[0], w[1], theta)).collect())
    }

    pub fn segments(&self) -> Vec<Segment<S>> {
        self.edges
            .iter()
            .map(|e| (self.vertices[e.tail], self.vertices[e.head], e.theta))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_len(&self, e: &Edge<S>) -> S {
        self.vertices[e.tail].dist(&self.vertices[e.head])
    }

    pub fn boundary(&self) -> AtomicMeasure<S> {
        let mut atoms = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            atoms.push((self.vertices[e.head], e.theta));
            atoms.push((self.vertices[e.tail], -e.theta));
        }
        AtomicMeasure::new(atoms)
    }

    pub fn mass(&self) -> S {
        self.edges.iter().map(|e| e.theta * self.edge_len(e)).sum()
    }

    pub fn alpha_mass(&self, alpha: S) -> S {
        self.edges.iter().map(|e| flow_pow(e.theta, alpha) * self.edge_len(e)).sum()
    }

    /// Total length of the support.
    pub fn length(&self) -> S {
        self.edges.iter().map(|e| self.edge_len(e)).sum()
    }

    pub fn max_theta(&self) -> S {
        self.edges.iter().map(|e| e.theta).fold(S::zero(), S::max)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut segs = self.segments();
        segs.extend(o.segments());
        Self::from_segments(segs)
    }

    /// Same support, reversed orientation.
    pub fn neg(&self) -> Self {
        TrafficPath {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|e| Edge { tail: e.head, head: e.tail, theta: e.theta }).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Multiplies every multiplicity by `k`.
    pub fn scale(&self, k: S) -> Self {
        if k > S::zero() {
            let mut out = self.clone();
            out.edges.iter_mut().for_each(|e| e.theta *= k);
            out.edges.retain(|e| e.theta > S::tol(ZERO_MASS));
            out.compact();
            out
        } else {
            Self::from_segments(self.segments().into_iter().map(|(a, b, t)| (a, b, t * k)).collect())
        }
    }

    /// Sum of many paths with a single normalization pass.
    pub fn sum<'a>(parts: impl IntoIterator<Item = &'a Self>) -> Self
    where
        S: 'a,
    {
        Self::from_segments(parts.into_iter().flat_map(|p| p.segments()).collect())
    }

    /// `mass(self - o) <= tol`.
    pub fn approx_eq(&self, o: &Self, tol: S) -> bool {
        self.sub(o).mass() <= tol
    }

    pub fn map_points(&self, f: impl Fn(&Point<S>) -> Point<S>) -> Self {
        Self::from_segments(self.segments().into_iter().map(|(a, b, t)| (f(&a), f(&b), t)).collect())
    }

    /// Outgoing edge indices per vertex.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.tail].push(i);
        }
        out
    }

    pub fn in_edges(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.head].push(i);
        }
        inc
    }

    /// Index of a vertex within `GEOM_TOL` of `p`.
    pub fn find_vertex(&self, p: &Point<S>) -> Option<usize> {
        let tol = S::tol(GEOM_TOL);
        self.vertices.iter().position(|v| v.dist(p) <= tol)
    }

    /// Multiplicity carried at a point of the support (0 off the support).
    /// Points on several edges report the sum over the edges through them.
    pub fn theta_at(&self, p: &Point<S>) -> S {
        let tol = S::tol(GEOM_TOL);
        self.edges
            .iter()
            .filter(|e| point_segment_dist(p, &self.vertices[e.tail], &self.vertices[e.head]) <= tol)
            .map(|e| e.theta)
            .sum()
    }

    /// Drops vertices no edge uses.
    pub fn compact(&mut self) {
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut verts = Vec::new();
        for e in &mut self.edges {
            for idx in [&mut e.tail, &mut e.head] {
                if remap[*idx] == usize::MAX {
                    remap[*idx] = verts.len();
                    verts.push(self.vertices[*idx]);
                }
                *idx = remap[*idx];
            }
        }
        self.vertices = verts;
    }

    pub fn cast<T: Real>(&self) -> TrafficPath<T> {
        TrafficPath {
            vertices: self.vertices.iter().map(|p| p.cast()).collect(),
            edges: self.edges.iter().map(|e| Edge { tail: e.tail, head: e.head, theta: T::c(e.theta.f64()) }).collect(),
        }
    }
}

pub fn point_segment_dist<S: Real>(p: &Point<S>, a: &Point<S>, b: &Point<S>) -> S {
    let d = *b - *a;
    let l2 = d.dot(&d);
    if l2 <= S::zero() {
        return p.dist(a);
    }
    let t = ((*p - *a).dot(&d) / l2).max(S::zero()).min(S::one());
    p.dist(&a.lerp(b, t))
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

fn bbox<S: Real>(s: &Segment<S>) -> ([S; 3], [S; 3]) {
    let mut lo = [S::zero(); 3];
    let mut hi = [S::zero(); 3];
    for k in 0..3 {
        lo[k] = s.0.coords[k].min(s.1.coords[k]);
        hi[k] = s.0.coords[k].max(s.1.coords[k]);
    }
    (lo, hi)
}

/// Whether `t` lies on the line of `s` and overlaps it in positive length.
fn collinear_overlap<S: Real>(s: &Segment<S>, t: &Segment<S>, tol: S) -> bool {
    let Some(d) = (s.1 - s.0).normalized() else { return false };
    let len = s.0.dist(&s.1);
    let perp = |x: &Point<S>| {
        let v = *x - s.0;
        (v - d * v.dot(&d)).norm()
    };
    if perp(&t.0) > tol || perp(&t.1) > tol {
        return false;
    }
    let a = (t.0 - s.0).dot(&d);
    let b = (t.1 - s.0).dot(&d);
    let lo = a.min(b).max(S::zero());
    let hi = a.max(b).min(len);
    hi - lo > tol
}

fn normalize_segments<S: Real>(segs: Vec<Segment<S>>) -> Vec<Segment<S>> {
    let tol = S::tol(GEOM_TOL);
    let zero = S::tol(ZERO_MASS);
    let segs: Vec<Segment<S>> = segs
        .into_iter()
        .filter(|(a, b, t)| t.abs() > zero && a.dist(b) > zero && a.is_finite() && b.is_finite())
        .map(|(a, b, t)| if t < S::zero() { (b, a, -t) } else { (a, b, t) })
        .collect();
    let n = segs.len();
    let boxes: Vec<_> = segs.iter().map(bbox).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| boxes[i].0[0].partial_cmp(&boxes[j].0[0]).unwrap());
    let mut dsu = Dsu((0..n).collect());
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let (lo, hi) = boxes[i];
        active.retain(|&j| boxes[j].1[0] >= lo[0] - tol);
        for &j in &active {
            let (lj, hj) = boxes[j];
            let overlap = (0..3).all(|k| lj[k] <= hi[k] + tol && lo[k] <= hj[k] + tol);
            if overlap && (collinear_overlap(&segs[i], &segs[j], tol) || collinear_overlap(&segs[j], &segs[i], tol)) {
                dsu.union(i, j);
            }
        }
        active.push(i);
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut gid: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let r = dsu.find(i);
        let g = *gid.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    let mut out = Vec::with_capacity(n);
    for g in groups {
        if g.len() == 1 {
            out.push(segs[g[0]]);
            continue;
        }
        let reference = segs[g[0]];
        let origin = reference.0;
        let dir = (reference.1 - reference.0).normalized().expect("nonzero segment");
        let param = |p: &Point<S>| (*p - origin).dot(&dir);
        let mut breaks: Vec<(S, Point<S>)> = Vec::with_capacity(2 * g.len());
        for &i in &g {
            breaks.push((param(&segs[i].0), segs[i].0));
            breaks.push((param(&segs[i].1), segs[i].1));
        }
        breaks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(S, Point<S>)> = Vec::with_capacity(breaks.len());
        for b in breaks {
            match merged.last() {
                Some(last) if b.0 - last.0 <= tol => {}
                _ => merged.push(b),
            }
        }
        let spans: Vec<(S, S, S)> = g
            .iter()
            .map(|&i| {
                let (a, b, t) = segs[i];
                let (pa, pb) = (param(&a), param(&b));
                if pb >= pa {
                    (pa, pb, t)
                } else {
                    (pb, pa, -t)
                }
            })
            .collect();
        for w in merged.windows(2) {
            let mid = (w[0].0 + w[1].0) / S::c(2.0);
            let theta: S = spans.iter().filter(|s| s.0 < mid && mid < s.1).map(|s| s.2).sum();
            if theta > zero {
                out.push((w[0].1, w[1].1, theta));
            } else if theta < -zero {
                out.push((w[1].1, w[0].1, -theta));
            }
        }
    }
    out
}

fn build<S: Real>(segs: Vec<Segment<S>>) -> TrafficPath<S> {
    let tol = S::tol(GEOM_TOL);
    let zero = S::tol(ZERO_MASS);
    let cell = S::c(1e-6).max(tol * S::c(4.0));
    let key = |p: &Point<S>| -> [i64; 3] {
        let k = |c: S| (c / cell).floor().to_i64().unwrap_or(i64::MAX);
        [k(p.coords[0]), k(p.coords[1]), k(p.coords[2])]
    };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut vertices: Vec<Point<S>> = Vec::new();
    let mut vid = |p: &Point<S>, vertices: &mut Vec<Point<S>>| -> usize {
        let k = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(v) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &i in v {
                            if vertices[i].dist(p) <= tol {
                                return i;
                            }
                        }
                    }
                }
            }
        }
        grid.entry(k).or_default().push(vertices.len());
        vertices.push(*p);
        vertices.len() - 1
    };
    let mut pairs: Vec<(usize, usize, S)> = Vec::new();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    for (a, b, t) in segs {
        let u = vid(&a, &mut vertices);
        let v = vid(&b, &mut vertices);
        if u == v {
            continue;
        }
        let (k, s) = if u < v { ((u, v), t) } else { ((v, u), -t) };
        match index.get(&k) {
            Some(&i) => pairs[i].2 += s,
            None => {
                index.insert(k, pairs.len());
                pairs.push((k.0, k.1, s));
            }
        }
    }
    let edges = pairs
        .into_iter()
        .filter(|p| p.2.abs() > zero)
        .map(|(u, v, t)| if t > S::zero() { Edge { tail: u, head: v, theta: t } } else { Edge { tail: v, head: u, theta: -t } })
        .collect();
    let mut path = TrafficPath { vertices, edges };
    path.compact();
    path
}
