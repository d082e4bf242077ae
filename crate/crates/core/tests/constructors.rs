mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramify_core::constructors::{
    cheap_subtransport, cone_bound, cone_transport, dyadic_irrigation, sphere_transport, SphereWrapMap,
};
use ramify_core::decomposition::good_decomposition;
use ramify_core::optimizer::brute_force_optimal;
use ramify_core::{AtomicMeasure, Ball, Error, Point, TrafficPath};
use std::f64::consts::{PI, TAU};

fn p(x: f64, y: f64) -> Point {
    Point::xy(x, y)
}

fn on_circle(c: Point, r: f64, phi: f64) -> Point {
    c + p(r * phi.cos(), r * phi.sin())
}

#[test]
fn dyadic_examples() {
    let src = AtomicMeasure::dirac(p(0.0, 0.0), 2.0);
    let one = AtomicMeasure::dirac(p(0.6, 0.8), 2.0);
    let c = dyadic_irrigation(&src, &one, 0.6, 2).unwrap();
    assert!((c.cost - 2f64.powf(0.6)).abs() < 1e-12);
    assert_eq!(c.path.edges.len(), 1);
    let same = dyadic_irrigation(&src, &src, 0.6, 2).unwrap();
    assert!(same.path.is_empty());
    assert!(matches!(dyadic_irrigation(&src, &one, 0.5, 2), Err(Error::BelowIrrigabilityThreshold)));
    assert!(matches!(dyadic_irrigation(&src, &one, 2.0 / 3.0, 3), Err(Error::BelowIrrigabilityThreshold)));
}

#[test]
fn dyadic_cost_is_above_the_optimum_on_a_small_grid() {
    let src = AtomicMeasure::dirac(Point::origin(), 1.0);
    let target = AtomicMeasure::new(vec![(p(1.0, 1.0), 0.25), (p(1.0, -1.0), 0.25), (p(-1.0, 1.0), 0.25), (p(-1.0, -1.0), 0.25)]);
    let c = dyadic_irrigation(&src, &target, 0.6, 2).unwrap();
    assert!(c.path.boundary().approx_eq(&target.sub(&src), 1e-12));
    let opt = brute_force_optimal(&src, &target, 0.6, 1e-10).unwrap();
    assert!(c.cost.is_finite());
    assert!(c.cost >= opt.cost - 1e-9);
    let ratio = c.cost / opt.cost;
    assert!(ratio >= 1.0 - 1e-9 && ratio < 3.0, "ratio {ratio}");
}

#[test]
fn dyadic_scales_with_dilation_and_mass() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for dim in [2usize, 3] {
        for _ in 0..20 {
            let k = rng.gen_range(1..10);
            let pts: Vec<Point> = (0..k)
                .map(|_| Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), if dim == 3 { rng.gen_range(-1.0..1.0) } else { 0.0 }))
                .collect();
            let ws: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
            let m: f64 = ws.iter().sum();
            let target = AtomicMeasure::new(pts.iter().copied().zip(ws.iter().copied()).collect());
            let src = AtomicMeasure::dirac(Point::origin(), m);
            let alpha = if dim == 2 { 0.7 } else { 0.8 };
            let base = dyadic_irrigation(&src, &target, alpha, dim).unwrap();
            assert!(base.path.boundary().approx_eq(&target.sub(&src), 1e-9));
            let lambda = rng.gen_range(0.2..5.0);
            let dil = |mu: &AtomicMeasure| AtomicMeasure::new(mu.atoms.iter().map(|(q, w)| (*q * lambda, *w)).collect());
            let scaled = dyadic_irrigation(&dil(&src), &dil(&target), alpha, dim).unwrap();
            assert!(common::close(scaled.cost, lambda * base.cost, 1e-9));
            assert!(common::close(scaled.constant, base.constant, 1e-9));
            let heavy = dyadic_irrigation(&src.scale(lambda), &target.scale(lambda), alpha, dim).unwrap();
            assert!(common::close(heavy.cost, lambda.powf(alpha) * base.cost, 1e-9));
        }
    }
}

#[test]
fn sphere_examples() {
    let unit = Ball::closed(Point::origin(), 1.0);
    let a = AtomicMeasure::dirac(p(1.0, 0.0), 1.0);
    assert!(sphere_transport(&a, &a, &unit, 0.5, 2).unwrap().construction.path.is_empty());
    let b = AtomicMeasure::dirac(p(-1.0, 0.0), 1.0);
    let s = sphere_transport(&a, &b, &unit, 0.5, 2).unwrap();
    let arc = 32.0 * (PI / 32.0).sin();
    assert!((s.construction.cost - arc).abs() < 1e-4, "{}", s.construction.cost);
    assert!((s.construction.cost - PI).abs() / PI < 2e-3);
    assert!(s.construction.path.boundary().approx_eq(&b.sub(&a), 1e-12));
    let off = AtomicMeasure::dirac(p(0.5, 0.0), 1.0);
    assert!(matches!(sphere_transport(&off, &b, &unit, 0.5, 2), Err(Error::AtomOffSphere(_))));
    assert!(matches!(sphere_transport(&a, &b, &unit, 0.4, 3), Err(Error::SphereThreshold { .. })));
}

#[test]
fn planar_sphere_cost_stays_below_the_circumference() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..50 {
        let r = rng.gen_range(0.1..3.0);
        let c = common::random_point(&mut rng, 2.0);
        let ball = Ball::closed(c, r);
        let side = |rng: &mut ChaCha8Rng| {
            let ws: Vec<f64> = (0..8).map(|_| rng.gen_range(0.1..1.0)).collect();
            let s: f64 = ws.iter().sum();
            AtomicMeasure::new(ws.iter().map(|w| (on_circle(c, r, rng.gen_range(0.0..TAU)), w / s)).collect())
        };
        let (minus, plus) = (side(&mut rng), side(&mut rng));
        let alpha = rng.gen_range(0.05..1.0);
        let s = sphere_transport(&minus, &plus, &ball, alpha, 2).unwrap();
        assert!(s.construction.path.boundary().approx_eq(&plus.sub(&minus), 1e-9));
        assert!(s.construction.cost <= TAU * r + 1e-9);
        assert!(s.vertex_deviation <= 1e-6 * r);
    }
}

#[test]
fn spatial_sphere_transport_stays_on_the_sphere() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..10 {
        let r = rng.gen_range(0.5..2.0);
        let ball = Ball::closed(Point::new(0.3, -0.2, 0.1), r);
        let unit = |rng: &mut ChaCha8Rng| {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..TAU);
            let rho = (1.0 - z * z).sqrt();
            ball.center + Point::new(rho * phi.cos(), rho * phi.sin(), z) * r
        };
        let minus = AtomicMeasure::new((0..3).map(|_| (unit(&mut rng), 1.0 / 3.0)).collect());
        let plus = AtomicMeasure::new((0..2).map(|_| (unit(&mut rng), 0.5)).collect());
        let s = sphere_transport(&minus, &plus, &ball, 0.8, 3).unwrap();
        assert!(s.construction.path.boundary().approx_eq(&plus.sub(&minus), 1e-9));
        assert!(s.vertex_deviation <= 1e-6 * r);
        assert!(s.construction.constant.is_finite());
    }
}

#[test]
fn wrap_map_is_one_lipschitz_and_invertible() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let sphere = Ball::closed(Point::new(1.0, 0.0, 0.5), 1.5);
    let puncture = sphere.center + Point::new(0.0, 0.6, 0.8) * 1.5;
    let wrap = SphereWrapMap::new(sphere, puncture, 3);
    let disk = |rng: &mut ChaCha8Rng| {
        let rho = wrap.disk_radius() * rng.gen::<f64>().sqrt();
        let phi: f64 = rng.gen_range(0.0..TAU);
        p(rho * phi.cos(), rho * phi.sin())
    };
    for _ in 0..2000 {
        let (u, v) = (disk(&mut rng), disk(&mut rng));
        let (a, b) = (wrap.apply(&u), wrap.apply(&v));
        assert!(a.dist(&b) <= u.dist(&v) * (1.0 + 1e-9) + 1e-12);
        assert!((a.dist(&sphere.center) - 1.5).abs() < 1e-9);
        if u.norm() < 0.95 * wrap.disk_radius() {
            assert!(wrap.inverse(&a).dist(&u) < 1e-7);
        }
    }
}

#[test]
fn cone_examples() {
    let (x, y) = (p(0.0, 0.0), p(2.0, 0.0));
    let minus = AtomicMeasure::dirac(x, 0.5);
    let plus = AtomicMeasure::dirac(y, 0.5);
    let c = cone_transport(&minus, &plus, &p(0.7, 0.0), 0.6).unwrap();
    assert!((c.cost - 0.5f64.powf(0.6) * 2.0).abs() < 1e-12);
    let back = cone_transport(&minus, &minus, &p(1.0, 1.0), 0.6).unwrap();
    assert!(back.path.is_empty());
    assert!(matches!(cone_transport(&minus, &AtomicMeasure::dirac(y, 1.0), &x, 0.6), Err(Error::Unbalanced { .. })));
}

#[test]
fn cone_bound_holds_on_random_atoms() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..100 {
        let minus = common::random_measure(&mut rng, 3, 1.0, 2.0);
        let plus = common::random_measure(&mut rng, 3, 1.0, 2.0);
        let centroid = minus.atoms.iter().chain(&plus.atoms).fold(Point::origin(), |acc, (q, _)| acc + *q) * (1.0 / 6.0);
        let alpha = rng.gen_range(0.1..1.0);
        let c = cone_transport(&minus, &plus, &centroid, alpha).unwrap();
        assert!(c.path.boundary().approx_eq(&plus.sub(&minus), 1e-9));
        assert!(c.cost <= cone_bound(&minus, &plus, &centroid, alpha) + 1e-9);
    }
}

fn two_cluster_instance() -> TrafficPath {
    let j = p(0.0, 0.0);
    TrafficPath::from_segments(vec![
        (p(-2.0, 1.0), j, 0.4),
        (p(-2.0, -1.0), j, 0.6),
        (j, p(2.0, 1.2), 0.5),
        (j, p(2.0, -0.8), 0.5),
    ])
}

#[test]
fn subtransport_examples() {
    let t = two_cluster_instance();
    let pi = good_decomposition(&t).unwrap();
    let bd = t.boundary();
    let (mu_minus, mu_plus) = (bd.negative_part(), bd.positive_part());
    let zero = AtomicMeasure::new(vec![]);
    let none = cheap_subtransport(&t, &pi, &zero, &zero, 1e-3, 0.6, 2, 4.0).unwrap();
    assert!(none.path.is_empty());
    let full = cheap_subtransport(&t, &pi, &mu_minus, &mu_plus, 1e-3, 0.6, 2, 4.0).unwrap();
    assert!(full.path.boundary().approx_eq(&mu_plus.sub(&mu_minus), 1e-9));
    assert!(full.cost.is_finite());
    let too_much = mu_minus.scale(1.5);
    assert!(matches!(
        cheap_subtransport(&t, &pi, &too_much, &mu_plus.scale(1.5), 1e-3, 0.6, 2, 4.0),
        Err(Error::NotSubMeasure)
    ));
}

#[test]
fn subtransport_cost_shrinks_with_the_transported_mass() {
    let t = two_cluster_instance();
    let pi = good_decomposition(&t).unwrap();
    let bd = t.boundary();
    let (mu_minus, mu_plus) = (bd.negative_part(), bd.positive_part());
    let alpha = 0.6;
    let mut prev = f64::INFINITY;
    let mut w = 1.0;
    for _ in 0..40 {
        let (nm, np) = (mu_minus.scale(w), mu_plus.scale(w));
        let s = cheap_subtransport(&t, &pi, &nm, &np, 1e-3, alpha, 2, 4.0).unwrap();
        assert!(s.path.boundary().approx_eq(&np.sub(&nm), 1e-9));
        assert!(s.cost <= prev + 1e-12, "cost rose to {} at w = {w}", s.cost);
        assert!(s.cost <= s.bound + 1e-9);
        prev = s.cost;
        w /= 2.0;
    }
    assert!(prev < 1e-3);
    // a single atom pair taken from the boundary
    let nm = AtomicMeasure::dirac(p(-2.0, 1.0), 0.1);
    let np = AtomicMeasure::dirac(p(2.0, 1.2), 0.1);
    let s = cheap_subtransport(&t, &pi, &nm, &np, 10.0, alpha, 2, 4.0).unwrap();
    assert!(s.path.boundary().approx_eq(&np.sub(&nm), 1e-9));
    assert!(s.below_eps);
}
