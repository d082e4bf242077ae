use serde::{Deserialize, Serialize};

use crate::currents::{restrict, TrafficPath, GEOM_TOL};
use crate::error::{Error, Result};
use crate::geometry::BallRegion;
use crate::scalar::{flow_pow, Real};

/// Both sides of the quasi-additivity inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiAdditivity<S> {
    /// `(1 + 4 eps^alpha) * alpha_mass(T1 + T2)`.
    pub lhs: S,
    /// `alpha_mass(T1) + alpha_mass(T2)`.
    pub rhs: S,
    pub holds: bool,
}

/// Largest ratio `theta1 / theta2` over the parts of the support the two paths
/// share, or 0 if they share nothing.
pub fn shared_multiplicity_ratio<S: Real>(t1: &TrafficPath<S>, t2: &TrafficPath<S>) -> S {
    let tol = S::tol(GEOM_TOL);
    let mut worst = S::zero();
    for e in &t1.edges {
        let (a, b) = (t1.vertices[e.tail], t1.vertices[e.head]);
        let len = a.dist(&b);
        if len <= tol {
            continue;
        }
        let dir = (b - a) * (S::one() / len);
        for f in &t2.edges {
            let (p, q) = (t2.vertices[f.tail], t2.vertices[f.head]);
            let on_line = |x: crate::geometry::Point<S>| {
                let s = (x - a).dot(&dir);
                ((x - a) - dir * s).norm() <= tol
            };
            if !on_line(p) || !on_line(q) {
                continue;
            }
            let (s0, s1) = ((p - a).dot(&dir), (q - a).dot(&dir));
            let lo = s0.min(s1).max(S::zero());
            let hi = s0.max(s1).min(len);
            if hi - lo > tol {
                worst = worst.max(e.theta.abs() / f.theta.abs());
            }
        }
    }
    worst
}

/// Evaluates `(1 + 4 eps^alpha) M(T1 + T2) >= M(T1) + M(T2)` for the alpha-mass.
///
/// Requires `eps` in `(0, 1/4)` and `theta1 < eps * theta2` wherever the supports
/// overlap.
pub fn quasi_additivity<S: Real>(t1: &TrafficPath<S>, t2: &TrafficPath<S>, eps: S, alpha: S) -> Result<QuasiAdditivity<S>> {
    if !(eps > S::zero() && eps < S::c(0.25)) {
        return Err(Error::Precondition(format!("eps = {eps} outside (0, 1/4)")));
    }
    let ratio = shared_multiplicity_ratio(t1, t2);
    if ratio >= eps {
        return Err(Error::MultiplicityHypothesis(format!("theta1 / theta2 reaches {ratio} >= eps = {eps}")));
    }
    let lhs = (S::one() + S::c(4.0) * flow_pow(eps, alpha)) * t1.add(t2).alpha_mass(alpha);
    let rhs = t1.alpha_mass(alpha) + t2.alpha_mass(alpha);
    let slack = S::tol(1e-12) * (S::one() + rhs);
    Ok(QuasiAdditivity { lhs, rhs, holds: lhs + slack >= rhs })
}

pub fn check_quasi_additivity<S: Real>(t1: &TrafficPath<S>, t2: &TrafficPath<S>, eps: S, alpha: S) -> Result<bool> {
    Ok(quasi_additivity(t1, t2, eps, alpha)?.holds)
}

/// Outcome of the high-multiplicity semicontinuity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighMultiplicityReport<S> {
    /// Largest threshold `delta` for which every member with flat gap at most
    /// `delta` keeps `M(T_n on A, theta_n >= delta) >= M(T on A) - eps`.
    pub delta: S,
    /// Smallest slack of that inequality over the qualifying members.
    pub margin: S,
    /// Plain semicontinuity scale: largest gap below which `M(T_n on A)` stays
    /// above `M(T on A) - eps / 2`.
    pub delta0: S,
    /// Uniform alpha-mass bound of the sequence and the limit.
    pub mass_bound: S,
    /// Largest `delta` with `delta + C delta^(1 - alpha) <= delta0`.
    pub lemma_delta: S,
    pub holds_at_lemma_delta: bool,
    /// `M(T_n - T)`, an upper bound for the flat distance.
    pub gaps: Vec<S>,
}

fn thick_part<S: Real>(t: &TrafficPath<S>, delta: S) -> TrafficPath<S> {
    let mut out = t.clone();
    out.edges.retain(|e| e.theta.abs() >= delta);
    out.compact();
    out
}

/// Measures how much alpha-mass on `region` survives when the members of `seq`
/// are stripped of their low multiplicity part, against the limit `t`.
pub fn check_high_multiplicity_lsc<S: Real>(
    t: &TrafficPath<S>,
    seq: &[TrafficPath<S>],
    region: &BallRegion<S>,
    eps: S,
    alpha: S,
) -> HighMultiplicityReport<S> {
    let target = restrict(t, region).alpha_mass(alpha);
    let local: Vec<TrafficPath<S>> = seq.iter().map(|tn| restrict(tn, region)).collect();
    let gaps: Vec<S> = seq.iter().map(|tn| tn.sub(t).mass()).collect();
    let mass_bound = seq.iter().map(|tn| tn.alpha_mass(alpha)).fold(t.alpha_mass(alpha), S::max);

    let slack_at = |delta: S| -> Option<S> {
        let mut worst: Option<S> = None;
        for (tn, g) in local.iter().zip(gaps.iter()) {
            if *g <= delta {
                let s = thick_part(tn, delta).alpha_mass(alpha) - (target - eps);
                worst = Some(worst.map_or(s, |w: S| w.min(s)));
            }
        }
        worst
    };

    let mut candidates: Vec<S> = local
        .iter()
        .chain(std::iter::once(&restrict(t, region)))
        .flat_map(|p| p.edges.iter().map(|e| e.theta.abs()).collect::<Vec<_>>())
        .chain(gaps.iter().copied())
        .chain(std::iter::once(S::zero()))
        .collect();
    candidates.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    candidates.dedup();

    let mut delta = S::zero();
    let mut margin = slack_at(S::zero()).unwrap_or(eps);
    for &c in &candidates {
        match slack_at(c) {
            Some(s) if s >= S::zero() => {
                delta = c;
                margin = s;
                break;
            }
            None => {}
            _ => {}
        }
    }

    let plain_ok = |g: S| {
        local.iter().zip(gaps.iter()).all(|(tn, gn)| *gn > g || tn.alpha_mass(alpha) >= target - eps / S::c(2.0))
    };
    let mut gap_values: Vec<S> = gaps.clone();
    gap_values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let delta0 = gap_values.iter().copied().find(|&g| plain_ok(g)).unwrap_or(S::zero());

    // largest root of delta + C delta^(1-alpha) = delta0
    let lemma_delta = if delta0 <= S::zero() {
        S::zero()
    } else {
        let f = |d: S| d + mass_bound * flow_pow(d, S::one() - alpha) - delta0;
        let (mut lo, mut hi) = (S::zero(), delta0);
        for _ in 0..200 {
            let mid = (lo + hi) / S::c(2.0);
            if f(mid) <= S::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let holds_at_lemma_delta = slack_at(lemma_delta).map_or(true, |s| s >= -S::tol(1e-12));
    HighMultiplicityReport { delta, margin, delta0, mass_bound, lemma_delta, holds_at_lemma_delta, gaps }
}
