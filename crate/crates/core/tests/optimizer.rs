mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramify_core::constructors::dyadic_irrigation;
use ramify_core::decomposition::{good_decomposition, remove_cycles};
use ramify_core::optimizer::{
    brute_force_optimal, is_optimal, local_search, optimize_positions, solve_positions, Topology,
};
use ramify_core::{AtomicMeasure, Error, Point, TrafficPath};

fn p(x: f64, y: f64) -> Point {
    Point::xy(x, y)
}

fn sources() -> AtomicMeasure {
    AtomicMeasure::new(vec![(p(-1.0, 1.0), 1.0), (p(1.0, 1.0), 1.0)])
}

fn y_cost(branch: Point, sink: Point, alpha: f64) -> f64 {
    branch.dist(&p(-1.0, 1.0)) + branch.dist(&p(1.0, 1.0)) + 2f64.powf(alpha) * branch.dist(&sink)
}

/// Dense grid search for the branch point over a window around `center`.
fn grid_y(sink: Point, alpha: f64, center: Point, half: f64, step: f64) -> (f64, Point) {
    let n = (2.0 * half / step).round() as i64;
    let mut best = (f64::INFINITY, center);
    for i in 0..=n {
        for j in 0..=n {
            let b = center + p(-half + i as f64 * step, -half + j as f64 * step);
            let c = y_cost(b, sink, alpha);
            if c < best.0 {
                best = (c, b);
            }
        }
    }
    best
}

#[test]
fn linear_cost_sends_each_unit_straight() {
    let sink = AtomicMeasure::dirac(Point::origin(), 2.0);
    let sol = brute_force_optimal(&sources(), &sink, 1.0, 1e-10).unwrap();
    assert!((sol.cost - 2.0 * 2f64.sqrt()).abs() < 1e-7);
}

#[test]
fn two_atoms_give_a_segment() {
    for alpha in [0.1, 0.5, 0.9, 1.0] {
        let a = AtomicMeasure::dirac(p(0.0, 0.0), 3.0);
        let b = AtomicMeasure::dirac(p(3.0, 4.0), 3.0);
        let sol = brute_force_optimal(&a, &b, alpha, 1e-10).unwrap();
        assert!((sol.cost - 3f64.powf(alpha) * 5.0).abs() < 1e-9);
        assert_eq!(sol.path.edges.len(), 1);
    }
}

#[test]
fn branching_beats_straight_lines_below_linear_cost() {
    let alpha = 0.5;
    let sink_pt = p(0.0, -1.0);
    let sink = AtomicMeasure::dirac(sink_pt, 2.0);
    let sol = brute_force_optimal(&sources(), &sink, alpha, 1e-10).unwrap();
    let v_cost = y_cost(sink_pt, sink_pt, alpha);
    assert!(sol.cost < v_cost - 1e-3);
    assert!((sol.cost - 3.0 * 2f64.sqrt()).abs() < 1e-7);
    let (coarse, at) = grid_y(sink_pt, alpha, p(0.0, 0.0), 0.5, 1e-3);
    let (fine, _) = grid_y(sink_pt, alpha, at, 2e-3, 1e-5);
    assert!(sol.cost <= coarse + 1e-9);
    assert!((sol.cost - fine).abs() < 1e-7, "{} vs {fine}", sol.cost);
    // branch point strictly between sources and sink
    let branch = sol.path.vertices.iter().find(|v| sol.path.boundary().mass_at(v) == 0.0).copied().unwrap();
    assert!(branch.x().abs() < 1e-6 && branch.y() > -1.0 + 1e-3 && branch.y() < 1.0 - 1e-3);
}

#[test]
fn sink_between_the_sources_gives_a_v() {
    // with the sink on the branch locus the optimal Y degenerates
    let alpha = 0.5;
    let sink = AtomicMeasure::dirac(Point::origin(), 2.0);
    let sol = brute_force_optimal(&sources(), &sink, alpha, 1e-10).unwrap();
    let (grid, _) = grid_y(Point::origin(), alpha, p(0.0, 0.25), 0.5, 1e-3);
    assert!((sol.cost - 2.0 * 2f64.sqrt()).abs() < 1e-7);
    assert!(sol.cost <= grid + 1e-9);
}

#[test]
fn oracle_rejects_large_instances() {
    let a = AtomicMeasure::new((0..4).map(|i| (p(i as f64, 0.0), 1.0)).collect());
    let b = AtomicMeasure::new((0..3).map(|i| (p(i as f64, 2.0), 4.0 / 3.0)).collect());
    assert!(matches!(brute_force_optimal(&a, &b, 0.5, 1e-10), Err(Error::OracleRange)));
}

#[test]
fn oracle_output_is_acyclic_and_below_dyadic() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..15 {
        let k = rng.gen_range(1..=4);
        let src = AtomicMeasure::dirac(common::random_point(&mut rng, 1.0), 1.0);
        let target = common::random_measure(&mut rng, k, 1.0, 1.0);
        let alpha = rng.gen_range(0.55..0.95);
        let sol = brute_force_optimal(&src, &target, alpha, 1e-10).unwrap();
        assert!(sol.path.boundary().approx_eq(&target.sub(&src), 1e-9));
        assert!(remove_cycles(&sol.path).approx_eq(&sol.path, 1e-12));
        good_decomposition(&sol.path).unwrap();
        let dy = dyadic_irrigation(&src, &target, alpha, 2).unwrap();
        assert!(sol.cost <= dy.cost + 1e-9);
    }
}

#[test]
fn oracle_cost_scales_with_mass_and_dilation() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..8 {
        let minus = common::random_measure(&mut rng, 2, 1.0, 1.0);
        let plus = common::random_measure(&mut rng, 2, 1.0, 1.0);
        let alpha = rng.gen_range(0.3..0.9);
        let base = brute_force_optimal(&minus, &plus, alpha, 1e-10).unwrap().cost;
        let lambda = rng.gen_range(0.3..3.0);
        let heavy = brute_force_optimal(&minus.scale(lambda), &plus.scale(lambda), alpha, 1e-10).unwrap().cost;
        assert!(common::close(heavy, lambda.powf(alpha) * base, 1e-7));
        let dil = |mu: &AtomicMeasure| AtomicMeasure::new(mu.atoms.iter().map(|(q, w)| (*q * lambda, *w)).collect());
        let wide = brute_force_optimal(&dil(&minus), &dil(&plus), alpha, 1e-10).unwrap().cost;
        assert!(common::close(wide, lambda * base, 1e-7));
    }
}

#[test]
fn local_search_examples() {
    let sink = AtomicMeasure::dirac(p(0.0, -1.0), 2.0);
    let sol = brute_force_optimal(&sources(), &sink, 0.5, 1e-10).unwrap();
    let rep = local_search(&sources(), &sink, 0.5, Some(&sol.path), 50, 1).unwrap();
    assert!((rep.cost - sol.cost).abs() < 1e-7);
    assert!(rep.history.windows(2).all(|w| w[1] <= w[0]));

    let a = AtomicMeasure::dirac(p(0.0, 0.0), 1.0);
    let b = AtomicMeasure::dirac(p(2.0, 1.0), 1.0);
    let detour = TrafficPath::polyline(&[p(0.0, 0.0), p(0.0, 3.0), p(2.0, 1.0)], 1.0);
    let rep = local_search(&a, &b, 0.7, Some(&detour), 50, 2).unwrap();
    assert!((rep.cost - 5f64.sqrt()).abs() < 1e-7);
    assert!(rep.path.boundary().approx_eq(&b.sub(&a), 1e-12));
}

#[test]
fn local_search_tracks_the_oracle_on_four_sources() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut within_5 = 0;
    let mut exact = 0;
    for seed in 0..20u64 {
        let minus = common::random_measure(&mut rng, 4, 1.0, 1.0);
        let sink = AtomicMeasure::dirac(common::random_point(&mut rng, 1.5), 1.0);
        let oracle = brute_force_optimal(&minus, &sink, 0.7, 1e-10).unwrap().cost;
        let rep = local_search(&minus, &sink, 0.7, None, 200, seed).unwrap();
        assert!(rep.path.boundary().approx_eq(&sink.sub(&minus), 1e-9));
        assert!(rep.cost >= oracle - 1e-7, "local search {} beat the oracle {oracle}", rep.cost);
        if rep.cost <= 1.05 * oracle {
            within_5 += 1;
        }
        if rep.cost - oracle <= 1e-4 {
            exact += 1;
        }
    }
    println!("local search: {within_5}/20 within 5%, {exact}/20 within 1e-4");
    assert_eq!(within_5, 20);
}

#[test]
fn pendant_steiner_point_collapses() {
    let terms = [(p(0.0, 0.0), -1.0), (p(2.0, 0.0), 1.0)];
    let t = Topology::new(&terms, vec![p(1.0, 1.0), p(5.0, 5.0)], vec![(0, 2), (2, 1), (2, 3)]).unwrap();
    let out = optimize_positions(&t, 0.5, 1e-10).unwrap();
    assert!(out.nodes[3].dist(&out.nodes[2]) < 1e-12);
    assert!(out.nodes[2].y().abs() < 1e-6);
}

#[test]
fn symmetric_y_branches_on_the_axis() {
    let terms = [(p(-1.0, 1.0), -1.0), (p(1.0, 1.0), -1.0), (p(0.0, -1.0), 2.0)];
    let t = Topology::new(&terms, vec![p(0.3, 0.2)], vec![(0, 3), (1, 3), (3, 2)]).unwrap();
    let rep = solve_positions(&t, 0.5, 1e-10);
    assert!(rep.converged);
    assert!(rep.history.windows(2).all(|w| w[1] <= w[0]));
    assert!(rep.topology.nodes[3].x().abs() < 1e-6);
}

#[test]
fn zero_exponent_recovers_the_fermat_point() {
    let s3 = 3f64.sqrt();
    let terms = [(p(0.0, 1.0), -1.0), (p(-s3 / 2.0, -0.5), 0.5), (p(s3 / 2.0, -0.5), 0.5)];
    let t = Topology::new(&terms, vec![p(0.2, 0.1)], vec![(0, 3), (1, 3), (2, 3)]).unwrap();
    let out = optimize_positions(&t, 0.0, 1e-12).unwrap();
    let f = out.nodes[3];
    assert!(f.norm() < 1e-6);
    for i in 0..3 {
        let (u, v) = (terms[i].0 - f, terms[(i + 1) % 3].0 - f);
        let angle = (u.dot(&v) / (u.norm() * v.norm())).acos().to_degrees();
        assert!((angle - 120.0).abs() < 0.1, "angle {angle}");
    }
}

#[test]
fn optimality_reports() {
    let sink_pt = p(0.0, -1.0);
    let sink = AtomicMeasure::dirac(sink_pt, 2.0);
    let sol = brute_force_optimal(&sources(), &sink, 0.5, 1e-10).unwrap();
    let rep = is_optimal(&sol.path, 0.5, 1e-8).unwrap();
    assert!(rep.optimal && rep.gap <= 1e-8);

    let o = Point::origin();
    let detour = TrafficPath::from_segments(vec![
        (p(-1.0, 1.0), o, 1.0),
        (p(1.0, 1.0), o, 1.0),
        (o, p(0.3, -0.5), 2.0),
        (p(0.3, -0.5), sink_pt, 2.0),
    ]);
    let rep = is_optimal(&detour, 0.5, 1e-8).unwrap();
    assert!(!rep.optimal && rep.gap > 0.0);

    let v = TrafficPath::from_segments(vec![(p(-1.0, 1.0), sink_pt, 1.0), (p(1.0, 1.0), sink_pt, 1.0)]);
    let rep = is_optimal(&v, 0.5, 1e-8).unwrap();
    let (grid, _) = grid_y(sink_pt, 0.5, p(0.0, 0.0), 0.5, 1e-3);
    assert!(!rep.optimal);
    assert!((rep.gap - (v.alpha_mass(0.5) - grid)).abs() < 1e-6);
}
