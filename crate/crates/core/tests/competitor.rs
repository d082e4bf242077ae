use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramify_core::stability::{competitor_for_instance, synthetic_suboptimal};
use ramify_core::{AtomicMeasure, CompetitorConfig, Point};

fn config(alpha: f64, bound: f64) -> CompetitorConfig {
    CompetitorConfig {
        alpha,
        dimension: 2,
        ambient_radius: 6.0,
        energy_gap: 1.0,
        eps1: 1e-24,
        eps2: 1e-7,
        delta: 1e-2,
        mass_bound: bound,
        sphere_constant: 2.0 * std::f64::consts::PI,
        n_minus: None,
        n_plus: None,
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> (AtomicMeasure, AtomicMeasure) {
    let mut pt = |y0: f64| Point::xy(rng.gen_range(-2.0..2.0), y0 + rng.gen_range(-0.5..0.5));
    let (a, b, c) = (pt(1.5), pt(1.5), pt(-1.5));
    let w = rng.gen_range(0.2..0.8);
    (AtomicMeasure::new(vec![(a, w), (b, 1.0 - w)]), AtomicMeasure::dirac(c, 1.0))
}

#[test]
fn boundary_identities_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    let mut attempts = 0;
    while done < 20 {
        attempts += 1;
        assert!(attempts < 200, "too few admissible instances");
        let (m, p) = random_instance(&mut rng);
        if m.atoms[0].0.dist(&m.atoms[1].0) < 0.3 {
            continue;
        }
        let alpha = rng.gen_range(0.55..0.8);
        let inst = synthetic_suboptimal(&m, &p, alpha, 1.0, 1e-8, 2, rng.gen()).unwrap();
        let cc = config(alpha, 2.0 * inst.t_n.alpha_mass(alpha));
        let rep = match competitor_for_instance(&inst, &cc) {
            Ok(r) => r,
            Err(ramify_core::Error::Precondition(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        assert!(rep.boundary_error_selected <= 1e-9, "selected: {}", rep.boundary_error_selected);
        assert!(rep.boundary_error <= 1e-9, "full: {}", rep.boundary_error);
        assert!(rep.ledger.improved, "{:?}", rep.ledger);
        for a in rep.alphas_minus.iter().chain(rep.alphas_plus.iter()) {
            assert!((0.0..=1.0).contains(a));
        }
        done += 1;
    }
}
