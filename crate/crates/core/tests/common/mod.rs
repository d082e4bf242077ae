#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use ramify_core::{AtomicMeasure, Point, TrafficPath};

pub fn random_point(rng: &mut impl Rng, r: f64) -> Point {
    Point::xy(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// Random DAG on `k` scattered vertices: edges only go from lower to higher index.
/// With `dyadic` the multiplicities are multiples of 1/8.
pub fn random_acyclic(rng: &mut impl Rng, k: usize, max_edges: usize, dyadic: bool) -> TrafficPath {
    let pts: Vec<Point> = (0..k).map(|_| random_point(rng, 2.0)).collect();
    let mut pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    pairs.shuffle(rng);
    let m = rng.gen_range(1..=max_edges.min(pairs.len()));
    let segs = pairs[..m]
        .iter()
        .map(|&(i, j)| {
            let theta = if dyadic { rng.gen_range(1..=16) as f64 / 8.0 } else { rng.gen_range(0.05..2.0) };
            (pts[i], pts[j], theta)
        })
        .collect();
    TrafficPath::from_segments(segs)
}

/// Random path of straight edges in general position (not necessarily acyclic).
pub fn random_path(rng: &mut impl Rng, edges: usize) -> TrafficPath {
    let segs = (0..edges).map(|_| (random_point(rng, 1.5), random_point(rng, 1.5), rng.gen_range(0.1..2.0))).collect();
    TrafficPath::from_segments(segs)
}

pub fn random_measure(rng: &mut impl Rng, n: usize, total: f64, r: f64) -> AtomicMeasure {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let s: f64 = w.iter().sum();
    AtomicMeasure::new(w.iter().map(|x| (random_point(rng, r), x * total / s)).collect())
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
