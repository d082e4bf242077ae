use super::{cone_transport, sphere_transport, Construction};
use crate::currents::{AtomicMeasure, TrafficPath};
use crate::decomposition::{first_exit, last_entry, reconstruct, restrict_curve, PathMeasure};
use crate::error::{Error, Result};
use crate::geometry::{cover_compact, Ball, BallRegion, Point};
use crate::scalar::{flow_pow, Real};

/// Pieces of the cheap transport between two small sub-measures.
#[derive(Debug, Clone, PartialEq)]
pub struct SubTransport<S> {
    pub path: TrafficPath<S>,
    pub cost: S,
    pub cut_minus: TrafficPath<S>,
    pub cut_plus: TrafficPath<S>,
    pub conn_minus: TrafficPath<S>,
    pub conn_plus: TrafficPath<S>,
    pub bridge: TrafficPath<S>,
    pub covers_minus: Vec<Ball<S>>,
    pub covers_plus: Vec<Ball<S>>,
    /// Transported mass `w`.
    pub mass: S,
    /// `C1 w^alpha + C2 w^alpha * sum of cover radii`, with `C1` the alpha-mass of
    /// the decomposition at unit weight and `C2` the largest sphere constant seen.
    pub bound: S,
    pub below_eps: bool,
}

/// Options for [`cheap_subtransport_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubTransportOptions<S> {
    pub alpha: S,
    pub dim: usize,
    pub ambient_radius: S,
    /// Fixed point the two sides are joined through.
    pub apex: Point<S>,
}

/// Cheap transport from `nu_minus` to `nu_plus`, sub-measures of the boundary parts
/// of `t`, built from the good decomposition `pi` of `t`.
pub fn cheap_subtransport<S: Real>(
    t: &TrafficPath<S>,
    pi: &PathMeasure<S>,
    nu_minus: &AtomicMeasure<S>,
    nu_plus: &AtomicMeasure<S>,
    eps: S,
    alpha: S,
    dim: usize,
    ambient_radius: S,
) -> Result<SubTransport<S>> {
    cheap_subtransport_with(t, pi, nu_minus, nu_plus, eps, SubTransportOptions { alpha, dim, ambient_radius, apex: Point::origin() })
}

pub fn cheap_subtransport_with<S: Real>(
    t: &TrafficPath<S>,
    pi: &PathMeasure<S>,
    nu_minus: &AtomicMeasure<S>,
    nu_plus: &AtomicMeasure<S>,
    eps: S,
    opts: SubTransportOptions<S>,
) -> Result<SubTransport<S>> {
    let alpha = opts.alpha;
    let bd = t.boundary();
    let mu_minus = bd.negative_part();
    let mu_plus = bd.positive_part();
    let tol = S::tol(1e-9);
    if nu_minus.atoms.iter().chain(nu_plus.atoms.iter()).any(|a| a.1 < S::zero())
        || !nu_minus.dominated_by(&mu_minus, tol)
        || !nu_plus.dominated_by(&mu_plus, tol)
    {
        return Err(Error::NotSubMeasure);
    }
    let w = nu_minus.total();
    if (w - nu_plus.total()).abs() > tol * (S::one() + w) {
        return Err(Error::Unbalanced { positive: nu_plus.total().f64(), negative: w.f64() });
    }
    let empty = |covers_minus, covers_plus| SubTransport {
        path: TrafficPath::empty(),
        cost: S::zero(),
        cut_minus: TrafficPath::empty(),
        cut_plus: TrafficPath::empty(),
        conn_minus: TrafficPath::empty(),
        conn_plus: TrafficPath::empty(),
        bridge: TrafficPath::empty(),
        covers_minus,
        covers_plus,
        mass: S::zero(),
        bound: S::zero(),
        below_eps: true,
    };
    if w <= S::tol(crate::currents::ZERO_MASS) {
        return Ok(empty(Vec::new(), Vec::new()));
    }
    let mut gap = S::infinity();
    for (p, _) in &mu_minus.atoms {
        for (q, _) in &mu_plus.atoms {
            gap = gap.min(p.dist(q));
        }
    }
    if !(gap > S::zero()) {
        return Err(Error::NotMutuallySingular);
    }
    // reweighted families
    let ratio = |nu: &AtomicMeasure<S>, mu: &AtomicMeasure<S>, p: &Point<S>| {
        let d = mu.mass_at(p);
        if d > S::zero() {
            (nu.mass_at(p) / d).min(S::one())
        } else {
            S::zero()
        }
    };
    let pi_minus = PathMeasure::new(pi.entries.iter().map(|(c, wt)| (c.clone(), *wt * ratio(nu_minus, &mu_minus, &c.start()))).collect());
    let pi_plus = PathMeasure::new(pi.entries.iter().map(|(c, wt)| (c.clone(), *wt * ratio(nu_plus, &mu_plus, &c.end()))).collect());

    let r = gap / S::c(3.0);
    let covers_minus = cover_compact(&mu_minus.support(), r, opts.ambient_radius)?;
    let covers_plus = cover_compact(&mu_plus.support(), r, opts.ambient_radius)?;
    let c_minus = BallRegion::union(covers_minus.clone());
    let c_plus = BallRegion::union(covers_plus.clone());

    let mut cut_minus_pi = Vec::new();
    for (c, wt) in &pi_minus.entries {
        let te = first_exit(c, &c_minus);
        let piece = if te.is_infinite() { Some(c.clone()) } else { restrict_curve(c, S::zero(), te)? };
        if let Some(p) = piece {
            cut_minus_pi.push((p, *wt));
        }
    }
    let mut cut_plus_pi = Vec::new();
    for (c, wt) in &pi_plus.entries {
        let te = last_entry(c, &c_plus);
        if let Some(p) = restrict_curve(c, te, c.length())? {
            cut_plus_pi.push((p, *wt));
        }
    }
    let cut_minus_pi = PathMeasure::new(cut_minus_pi);
    let cut_plus_pi = PathMeasure::new(cut_plus_pi);
    let cut_minus = reconstruct(&cut_minus_pi);
    let cut_plus = reconstruct(&cut_plus_pi);

    // exit points (end of cut curves) grouped by the first sphere carrying them
    let exits = cut_minus_pi.end_measure();
    let entries = cut_plus_pi.start_measure();
    let (conn_minus, sigma_minus, cm) = connect(&exits, &covers_minus, alpha, opts.dim, false)?;
    let (conn_plus, sigma_plus, cp) = connect(&entries, &covers_plus, alpha, opts.dim, true)?;
    let bridge = cone_transport(&sigma_minus, &sigma_plus, &opts.apex, alpha)?.path;
    let path = TrafficPath::sum([&cut_minus, &conn_minus, &bridge, &conn_plus, &cut_plus]);
    let cost = path.alpha_mass(alpha);

    let unit_cost = pi.entries.iter().map(|(c, _)| c.length()).sum::<S>();
    let r_sum: S = covers_minus.iter().chain(covers_plus.iter()).map(|b| b.radius).sum();
    let c2 = cm.max(cp).max(S::c(2.0) * S::PI());
    let span = opts.apex.norm() + opts.ambient_radius;
    let bound = flow_pow(w, alpha) * (S::c(2.0) * unit_cost + c2 * r_sum + S::from_usize_lossy(covers_minus.len() + covers_plus.len()) * S::c(2.0) * span);
    Ok(SubTransport {
        path,
        cost,
        cut_minus,
        cut_plus,
        conn_minus,
        conn_plus,
        bridge,
        covers_minus,
        covers_plus,
        mass: w,
        bound,
        below_eps: cost <= eps,
    })
}

/// Connects atoms lying on cover spheres to one collection point per sphere.
/// Returns the connection, the collected measure and the largest sphere constant.
/// With `reverse` the connection runs from the collection points to the atoms.
fn connect<S: Real>(
    atoms: &AtomicMeasure<S>,
    covers: &[Ball<S>],
    alpha: S,
    dim: usize,
    reverse: bool,
) -> Result<(TrafficPath<S>, AtomicMeasure<S>, S)> {
    let mut assigned = vec![false; atoms.atoms.len()];
    let mut parts = Vec::new();
    let mut sigma = Vec::new();
    let mut constant = S::zero();
    for ball in covers {
        let on: Vec<usize> = (0..atoms.atoms.len()).filter(|&k| !assigned[k] && ball.on_sphere(&atoms.atoms[k].0)).collect();
        if on.is_empty() {
            continue;
        }
        let local = AtomicMeasure::new(on.iter().map(|&k| atoms.atoms[k]).collect());
        for &k in &on {
            assigned[k] = true;
        }
        let wi = local.total();
        let y = collection_point(ball);
        let target = AtomicMeasure::dirac(y, wi);
        let sc = if reverse {
            sphere_transport(&target, &local, ball, alpha, dim)?
        } else {
            sphere_transport(&local, &target, ball, alpha, dim)?
        };
        constant = constant.max(sc.construction.constant);
        parts.push(sc.construction.path);
        sigma.push((y, wi));
    }
    if assigned.iter().any(|a| !a) {
        return Err(Error::Precondition("cut endpoint off every cover sphere".into()));
    }
    Ok((TrafficPath::sum(parts.iter()), AtomicMeasure::new(sigma), constant))
}

/// Fixed point of a cover sphere where its mass is collected.
pub fn collection_point<S: Real>(ball: &Ball<S>) -> Point<S> {
    ball.center + Point::new(ball.radius, S::zero(), S::zero())
}

/// Construction type re-exported for callers that only want the path and cost.
pub fn as_construction<S: Real>(s: &SubTransport<S>) -> Construction<S> {
    Construction { path: s.path.clone(), cost: s.cost, constant: if s.bound > S::zero() { s.cost / s.bound } else { S::zero() }, scale: s.bound }
}
