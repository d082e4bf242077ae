use super::mcf::MinCostFlow;
use crate::currents::AtomicMeasure;
use crate::scalar::Real;

/// Flat norm of an atomic 0-current: cheapest mix of moving mass (cost per unit
/// mass and length) and deleting it (cost 1 per unit mass).
///
/// Moving between same-sign atoms never helps, so the problem is a bipartite
/// transport with gain `2 - dist` per matched unit, solved exactly as a
/// minimum-cost circulation.
pub fn flat_norm_0<S: Real>(a: &AtomicMeasure<S>) -> S {
    let pos: Vec<(crate::geometry::Point<S>, f64)> = a.positive_part().atoms.iter().map(|(p, m)| (*p, m.f64())).collect();
    let neg: Vec<(crate::geometry::Point<S>, f64)> = a.negative_part().atoms.iter().map(|(p, m)| (*p, m.f64())).collect();
    let tv: f64 = pos.iter().chain(neg.iter()).map(|x| x.1).sum();
    if pos.is_empty() || neg.is_empty() {
        return S::c(tv);
    }
    let (np, nn) = (pos.len(), neg.len());
    let src = np + nn;
    let snk = src + 1;
    let mut g = MinCostFlow::new(np + nn + 2);
    let mut any = false;
    for (i, (p, m)) in pos.iter().enumerate() {
        g.add_arc(src, i, *m, 0.0);
        for (j, (q, n)) in neg.iter().enumerate() {
            let d = p.dist(q).f64();
            if d < 2.0 {
                g.add_arc(i, np + j, m.min(*n), d - 2.0);
                any = true;
            }
        }
    }
    if !any {
        return S::c(tv);
    }
    for (j, (_, n)) in neg.iter().enumerate() {
        g.add_arc(np + j, snk, *n, 0.0);
    }
    g.add_arc(snk, src, tv, 0.0);
    let gain = g.min_cost_circulation();
    S::c((tv + gain).max(0.0))
}

/// `flat_norm_0(mu_n - mu)`.
pub fn weak_star_gap<S: Real>(mu_n: &AtomicMeasure<S>, mu: &AtomicMeasure<S>) -> S {
    flat_norm_0(&mu_n.sub(mu))
}
