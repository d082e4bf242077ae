mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramify_core::metrics::{flat_distance_1, flat_norm_0, weak_star_gap, GridComplex};
use ramify_core::{AtomicMeasure, Error, Point, TrafficPath};

fn p(x: f64, y: f64) -> Point {
    Point::xy(x, y)
}

/// Exhaustive minimum over integral transport plans in units of 1/16: moving costs
/// mass times distance, leftover mass on either side costs its mass.
fn brute_flat(pos: &[(Point, u32)], neg: &[(Point, u32)]) -> f64 {
    let pairs: Vec<(usize, usize)> = (0..pos.len()).flat_map(|i| (0..neg.len()).map(move |j| (i, j))).collect();
    fn rec(
        k: usize,
        pairs: &[(usize, usize)],
        pos_left: &mut Vec<u32>,
        neg_left: &mut Vec<u32>,
        moved: f64,
        pos: &[(Point, u32)],
        neg: &[(Point, u32)],
        best: &mut f64,
    ) {
        if k == pairs.len() {
            let left: u32 = pos_left.iter().sum::<u32>() + neg_left.iter().sum::<u32>();
            *best = best.min(moved + left as f64 / 16.0);
            return;
        }
        let (i, j) = pairs[k];
        let cap = pos_left[i].min(neg_left[j]);
        let d = pos[i].0.dist(&neg[j].0);
        for x in 0..=cap {
            pos_left[i] -= x;
            neg_left[j] -= x;
            rec(k + 1, pairs, pos_left, neg_left, moved + x as f64 / 16.0 * d, pos, neg, best);
            pos_left[i] += x;
            neg_left[j] += x;
        }
    }
    let mut best = f64::INFINITY;
    let mut pl: Vec<u32> = pos.iter().map(|a| a.1).collect();
    let mut nl: Vec<u32> = neg.iter().map(|a| a.1).collect();
    rec(0, &pairs, &mut pl, &mut nl, 0.0, pos, neg, &mut best);
    best
}

#[test]
fn two_atom_closed_form() {
    assert_eq!(flat_norm_0(&AtomicMeasure::new(vec![])), 0.0);
    let pair = |d: f64| AtomicMeasure::new(vec![(p(0.0, 0.0), 1.0), (p(d, 0.0), -1.0)]);
    assert!((flat_norm_0(&pair(0.5)) - 0.5).abs() < 1e-12);
    assert!((flat_norm_0(&pair(10.0)) - 2.0).abs() < 1e-12);
    for d in [0.0, 0.1, 1.0, 1.9, 2.0, 2.1, 7.0] {
        assert!((flat_norm_0(&pair(d)) - d.min(2.0)).abs() < 1e-12);
    }
}

#[test]
fn matches_exhaustive_assignment() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..40 {
        let side = |rng: &mut ChaCha8Rng| -> Vec<(Point, u32)> {
            (0..3).map(|_| (common::random_point(rng, 1.2), rng.gen_range(1..=4))).collect()
        };
        let (pos, neg) = (side(&mut rng), side(&mut rng));
        let mut atoms: Vec<(Point, f64)> = pos.iter().map(|(q, m)| (*q, *m as f64 / 16.0)).collect();
        atoms.extend(neg.iter().map(|(q, m)| (*q, -(*m as f64) / 16.0)));
        let exact = brute_flat(&pos, &neg);
        let got = flat_norm_0(&AtomicMeasure::new(atoms));
        assert!((got - exact).abs() < 1e-9, "{got} vs {exact}");
    }
}

#[test]
fn flat_norm_is_a_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..100 {
        let signed = |rng: &mut ChaCha8Rng| {
            let a = common::random_measure(rng, 3, 1.0, 1.5);
            let b = common::random_measure(rng, 3, 1.0, 1.5);
            a.sub(&b)
        };
        let (a, b) = (signed(&mut rng), signed(&mut rng));
        let (fa, fb) = (flat_norm_0(&a), flat_norm_0(&b));
        assert!(flat_norm_0(&a.add(&b)) <= fa + fb + 1e-9);
        let lambda = rng.gen_range(-3.0..3.0);
        assert!((flat_norm_0(&a.scale(lambda)) - lambda.abs() * fa).abs() < 1e-9);
        assert!(fa <= a.total_variation() + 1e-12);
        assert!(fa >= 0.0);
    }
}

#[test]
fn weak_star_examples() {
    let mu = AtomicMeasure::new(vec![(p(0.2, 0.3), 0.4), (p(-1.0, 0.5), 0.6)]);
    assert_eq!(weak_star_gap(&mu, &mu), 0.0);
    let x = p(0.3, -0.7);
    for n in [1usize, 2, 5, 10, 100] {
        let shifted = AtomicMeasure::dirac(x + p(1.0 / n as f64, 0.0), 1.0);
        assert!((weak_star_gap(&shifted, &AtomicMeasure::dirac(x, 1.0)) - 1.0 / n as f64).abs() < 1e-12);
    }
}

#[test]
fn dyadic_quantization_gap_halves() {
    let mu = AtomicMeasure::new(vec![(p(0.0, 0.0), 0.25), (p(1.0, 0.0), 0.25), (p(0.0, 1.0), 0.25), (p(1.0, 1.0), 0.25)]);
    let snap = |k: i32| {
        let h = 2f64.powi(-k);
        AtomicMeasure::new(
            mu.atoms.iter().map(|(q, m)| (p(((q.x() / h).floor() + 0.5) * h, ((q.y() / h).floor() + 0.5) * h), *m)).collect(),
        )
    };
    let gaps: Vec<f64> = (1..8).map(|k| weak_star_gap(&snap(k), &mu)).collect();
    for w in gaps.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 1e-9, "{gaps:?}");
    }
}

#[test]
fn identical_paths_have_zero_distance() {
    let t = TrafficPath::polyline(&[p(0.0, 0.0), p(0.37, 0.81), p(1.0, 0.2)], 1.5);
    let g = GridComplex::covering(&[&t], 0.05, 2).unwrap();
    let est = flat_distance_1(&t, &t, &g).unwrap();
    assert_eq!(est.value, 0.0);
    assert!(est.error_bound >= 0.0);
}

#[test]
fn parallel_segments_fill_the_rectangle() {
    // the strip between them costs its area delta, the two short ends cost 2 delta
    for delta in [0.05, 0.1, 0.2] {
        let a = TrafficPath::segment(p(0.0, 0.0), p(1.0, 0.0), 1.0);
        let b = TrafficPath::segment(p(0.0, delta), p(1.0, delta), 1.0);
        let h = delta / 10.0;
        let g = GridComplex::covering(&[&a, &b], h, 2).unwrap();
        let est = flat_distance_1(&a, &b, &g).unwrap();
        assert!((est.value - 3.0 * delta).abs() <= 1e-9 + est.error_bound, "delta {delta}: {}", est.value);
    }
}

#[test]
fn unit_square_loop_prefers_the_area() {
    let sq = TrafficPath::polyline(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0), p(0.0, 0.0)], 1.0);
    let g = GridComplex::covering(&[&sq], 0.05, 2).unwrap();
    let est = flat_distance_1(&sq, &TrafficPath::empty(), &g).unwrap();
    assert!((est.value - 1.0).abs() <= 1e-9 + est.error_bound);
    let wide = TrafficPath::polyline(&[p(0.0, 0.0), p(3.0, 0.0), p(3.0, 3.0), p(0.0, 3.0), p(0.0, 0.0)], 1.0);
    let g = GridComplex::covering(&[&wide], 0.25, 2).unwrap();
    let est = flat_distance_1(&wide, &TrafficPath::empty(), &g).unwrap();
    assert!((est.value - 9.0).abs() <= 1e-9 + est.error_bound);
}

#[test]
fn path_outside_the_grid_is_an_error() {
    let g = GridComplex::new([0.0, 0.0], 0.1, 10, 10).unwrap();
    let t = TrafficPath::segment(p(0.5, 0.5), p(2.0, 0.5), 1.0);
    assert!(matches!(flat_distance_1(&t, &TrafficPath::empty(), &g), Err(Error::OutsideGrid)));
    assert!(GridComplex::new([0.0, 0.0], 0.0, 10, 10).is_err());
}

#[test]
fn grid_distance_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for _ in 0..10 {
        let paths: Vec<TrafficPath> = (0..3).map(|_| common::random_path(&mut rng, 3)).collect();
        let g = GridComplex::covering(&paths.iter().collect::<Vec<_>>(), 0.1, 2).unwrap();
        let d = |a: &TrafficPath, b: &TrafficPath| flat_distance_1(a, b, &g).unwrap();
        let (ab, bc, ac) = (d(&paths[0], &paths[1]), d(&paths[1], &paths[2]), d(&paths[0], &paths[2]));
        let slack = 2.0 * (ab.error_bound + bc.error_bound + ac.error_bound);
        assert!(ac.value <= ab.value + bc.value + slack + 1e-9);
        assert!(ab.value <= paths[0].sub(&paths[1]).mass() + ab.error_bound + 1e-9);
    }
}

#[test]
fn refinement_does_not_increase_the_estimate() {
    let a = TrafficPath::polyline(&[p(0.0, 0.0), p(0.8, 0.3), p(1.2, 1.0)], 1.0);
    let b = TrafficPath::polyline(&[p(0.0, 0.1), p(0.7, 0.45), p(1.2, 1.0)], 1.0);
    let mut prev: Option<(f64, f64)> = None;
    for h in [0.2, 0.1, 0.05, 0.025] {
        let g = GridComplex::covering(&[&a, &b], h, 2).unwrap();
        let est = flat_distance_1(&a, &b, &g).unwrap();
        if let Some((v, e)) = prev {
            assert!(est.value <= v + e + est.error_bound + 1e-9, "h {h}: {} after {v}", est.value);
        }
        prev = Some((est.value, est.error_bound));
    }
}

#[test]
fn parallel_segments_trend_under_refinement() {
    let delta = 0.1;
    let a = TrafficPath::segment(p(0.0, 0.0), p(1.0, 0.0), 1.0);
    let b = TrafficPath::segment(p(0.0, delta), p(1.0, delta), 1.0);
    let values: Vec<f64> = [delta / 2.0, delta / 5.0, delta / 10.0]
        .iter()
        .map(|&h| flat_distance_1(&a, &b, &GridComplex::covering(&[&a, &b], h, 2).unwrap()).unwrap().value)
        .collect();
    for v in &values {
        assert!((v - 3.0 * delta).abs() < 0.05 * 3.0 * delta, "{values:?}");
    }
}
