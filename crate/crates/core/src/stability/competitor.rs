use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructors::{cheap_subtransport_with, sphere_transport, SubTransportOptions};
use crate::currents::{restrict, AtomicMeasure, TrafficPath, ZERO_MASS};
use crate::decomposition::{
    cut_decomposition, first_exit, good_decomposition, last_entry, reconstruct, restrict_curve, sub_decomposition,
    CellWithParent, CutMode, PathMeasure,
};
use crate::error::{Error, Result};
use crate::geometry::{cover_null_set, Ball, BallRegion, Point};
use crate::optimizer::brute_force_optimal;
use crate::scalar::{flow_pow, Real};

/// Parameters of the competitor construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompetitorConfig<S> {
    pub alpha: S,
    pub dimension: usize,
    pub ambient_radius: S,
    /// Energy gap `Delta` between the suboptimal path and the optimum.
    pub energy_gap: S,
    pub eps1: S,
    pub eps2: S,
    pub delta: S,
    /// Uniform bound `C` on the alpha-mass of the sequence.
    pub mass_bound: S,
    /// Constant of the sphere connections: cost at most `constant * m^alpha * r`.
    pub sphere_constant: S,
    /// Number of source / target balls kept; all when absent.
    #[serde(default)]
    pub n_minus: Option<usize>,
    #[serde(default)]
    pub n_plus: Option<usize>,
}

impl<S: Real> CompetitorConfig<S> {
    /// Violated smallness constraints, empty when all hold.
    pub fn smallness_violations(&self) -> Vec<String> {
        let (a, c) = (self.alpha, self.mass_bound);
        let (e1, e2, d, gap) = (self.eps1, self.eps2, self.delta, self.energy_gap);
        let two = S::c(2.0);
        let mut out = Vec::new();
        if !(e2 <= d / two) {
            out.push(format!("eps2 = {e2} > delta/2 = {}", d / two));
        }
        let lhs = c * flow_pow(e1, S::one() - a);
        if !(lhs <= d / two) {
            out.push(format!("C eps1^(1-alpha) = {lhs} > delta/2 = {}", d / two));
        }
        if !(e1 <= d / S::c(4.0)) {
            out.push(format!("eps1 = {e1} > delta/4 = {}", d / S::c(4.0)));
        }
        let (l, r) = (S::c(16.0) * flow_pow(e1, a) * c, flow_pow(d, a) * gap);
        if !(l <= r) {
            out.push(format!("16 eps1^alpha C = {l} > delta^alpha Delta = {r}"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.energy_gap > S::zero() && self.eps1 > S::zero() && self.eps2 > S::zero() && self.delta > S::zero()) {
            return Err(Error::Invalid("energy gap, eps1, eps2 and delta must be positive".into()));
        }
        let v = self.smallness_violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Smallness(v.join("; ")))
        }
    }
}

/// Source side and target side ball lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedCovers<S> {
    pub minus: Vec<Ball<S>>,
    pub plus: Vec<Ball<S>>,
}

/// Covers of the two supports with the size and energy limits the construction
/// needs: total radius below `Delta / (128 C_sphere)`, restricted alpha-masses
/// of `t` and `t_opt` below `Delta / 128`, separation at most a quarter of the
/// distance between the supports, and no atom of `atoms` on a sphere.
pub fn build_covers<S: Real>(
    t: &TrafficPath<S>,
    t_opt: &TrafficPath<S>,
    atoms: &[AtomicMeasure<S>],
    cc: &CompetitorConfig<S>,
) -> Result<SignedCovers<S>> {
    let bd = t_opt.boundary();
    let (mu_minus, mu_plus) = (bd.negative_part(), bd.positive_part());
    let mut d0 = S::infinity();
    for (p, _) in &mu_minus.atoms {
        for (q, _) in &mu_plus.atoms {
            d0 = d0.min(p.dist(q));
        }
    }
    let k = S::c(128.0);
    let eps = (cc.energy_gap / (k * cc.sphere_constant)).min(cc.energy_gap / k).min(d0 / S::c(4.0));
    Ok(SignedCovers {
        minus: cover_null_set(&mu_minus.support(), t, t_opt, atoms, cc.alpha, eps)?,
        plus: cover_null_set(&mu_plus.support(), t, t_opt, atoms, cc.alpha, eps)?,
    })
}

/// Cost of one sphere connection against its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereLink<S> {
    pub ball: usize,
    pub mass: S,
    pub radius: S,
    pub cost: S,
    /// `sphere_constant * mass^alpha * radius`.
    pub bound: S,
}

/// Energy accounting of the competitor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger<S> {
    pub cost_t_n: S,
    pub cost_competitor: S,
    pub cost_t_opt: S,
    pub cost_t: S,
    pub energy_gap: S,
    pub sel_minus: S,
    pub sel_plus: S,
    pub conn_minus: S,
    pub conn_plus: S,
    /// Alpha-mass of the scaled restricted optimum.
    pub restr_scaled: S,
    pub back: S,
    pub links: Vec<SphereLink<S>>,
    /// `sum sphere_constant * r` over both covers.
    pub conn_radius_bound: S,
    pub conn_within_bound: bool,
    /// Mass sent back, at most `eps1 + eps2`.
    pub back_mass: S,
    pub back_mass_ok: bool,
    /// `Delta / 128`.
    pub back_bound: S,
    pub back_ok: bool,
    /// Alpha-mass of the selected competitor outside both covers.
    pub outside: S,
    /// `alpha_mass(T_opt) + Delta / 4`.
    pub outside_bound: S,
    pub outside_ok: bool,
    /// Alpha-mass of the selected competitor minus the source cut, inside the source covers.
    pub inside_minus: S,
    pub inside_plus: S,
    /// `Delta / 32`.
    pub inside_bound: S,
    pub inside_ok: bool,
    /// `cost_competitor < cost_t_n`.
    pub improved: bool,
}

/// Preconditions measured on the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputChecks<S> {
    pub covers_disjoint: bool,
    pub radius_sum_minus: S,
    pub radius_sum_plus: S,
    pub radius_limit: S,
    pub restricted_t: S,
    pub restricted_t_opt: S,
    pub restricted_limit: S,
    pub atoms_off_spheres: bool,
    /// Upper bound on the flat distance between the sequence member and the limit.
    pub flat_gap: S,
    /// Largest `mu_n(C_i) / mu(C_i)` over all cells.
    pub cell_ratio: S,
    /// Mass of `mu_n` outside the cells, both sides.
    pub mass_outside_cells: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitorReport<S> {
    pub competitor: TrafficPath<S>,
    pub selected_competitor: TrafficPath<S>,
    pub selected: TrafficPath<S>,
    pub restricted_opt: TrafficPath<S>,
    pub back: TrafficPath<S>,
    pub alphas_minus: Vec<S>,
    pub alphas_plus: Vec<S>,
    /// Total variation of the boundary mismatch of the selected competitor.
    pub boundary_error_selected: S,
    /// Total variation of the boundary mismatch of the full competitor.
    pub boundary_error: S,
    pub checks: InputChecks<S>,
    pub ledger: EnergyLedger<S>,
}

/// Swept-area bound on the flat distance between two paths with the same
/// vertex and edge lists, or `None` when the lists differ.
pub fn vertex_homotopy_bound<S: Real>(a: &TrafficPath<S>, b: &TrafficPath<S>) -> Option<S> {
    if a.vertices.len() != b.vertices.len() || a.edges.len() != b.edges.len() {
        return None;
    }
    let mut total = S::zero();
    for (e, f) in a.edges.iter().zip(b.edges.iter()) {
        if e.tail != f.tail || e.head != f.head || (e.theta - f.theta).abs() > S::tol(1e-12) * (S::one() + e.theta.abs()) {
            return None;
        }
        let len = a.edge_len(e).max(b.edge_len(f));
        let du = a.vertices[e.tail].dist(&b.vertices[e.tail]);
        let dv = a.vertices[e.head].dist(&b.vertices[e.head]);
        total += e.theta.abs() * len * (du + dv) / S::c(2.0);
    }
    let bd = a.boundary();
    for (i, v) in a.vertices.iter().enumerate() {
        total += bd.mass_at(v).abs() * v.dist(&b.vertices[i]);
    }
    Some(total)
}

fn cells<S: Real>(balls: &[Ball<S>]) -> Vec<CellWithParent<S>> {
    (0..balls.len()).map(|i| CellWithParent { cell: BallRegion::cell(balls.to_vec(), i), parent: balls[i] }).collect()
}

fn closed_union<S: Real>(balls: &[Ball<S>]) -> BallRegion<S> {
    BallRegion::union(balls.iter().map(|b| b.with_closure(true)).collect())
}

fn cell_index<S: Real>(cs: &[CellWithParent<S>], p: &Point<S>) -> Option<usize> {
    cs.iter().position(|c| c.cell.contains(p))
}

/// Assembles the cheaper competitor for `t_n` out of its cut ends, sphere
/// connections, the scaled restricted optimum and an excess-return transport.
///
/// `t` is the limit `t_n` approximates and `t_opt` an optimum with the same
/// boundary as `t`; `pi_n` and `pi_opt` are good decompositions of `t_n` and `t_opt`.
pub fn build_competitor<S: Real>(
    t_n: &TrafficPath<S>,
    pi_n: &PathMeasure<S>,
    t: &TrafficPath<S>,
    t_opt: &TrafficPath<S>,
    pi_opt: &PathMeasure<S>,
    covers: &SignedCovers<S>,
    cc: &CompetitorConfig<S>,
) -> Result<CompetitorReport<S>> {
    cc.validate()?;
    let alpha = cc.alpha;
    let one = S::one();
    let k128 = S::c(128.0);
    let tol = S::tol(1e-9);
    let scale = one + cc.eps2;

    let bd = t_opt.boundary();
    let (mu_minus, mu_plus) = (bd.negative_part(), bd.positive_part());
    let bd_n = t_n.boundary();
    let (mu_n_minus, mu_n_plus) = (bd_n.negative_part(), bd_n.positive_part());
    let cost_t_n = t_n.alpha_mass(alpha);
    if cost_t_n > cc.mass_bound * (one + tol) {
        return Err(Error::Precondition(format!("alpha-mass {cost_t_n} exceeds the bound C = {}", cc.mass_bound)));
    }

    let take = |v: &[Ball<S>], n: Option<usize>| v[..n.unwrap_or(v.len()).min(v.len())].to_vec();
    let balls_minus = take(&covers.minus, cc.n_minus);
    let balls_plus = take(&covers.plus, cc.n_plus);
    let all: Vec<Ball<S>> = covers.minus.iter().chain(covers.plus.iter()).copied().collect();

    // covers
    let mut covers_disjoint = true;
    for i in 0..all.len() {
        for j in 0..i {
            if all[i].center.dist(&all[j].center) <= all[i].radius + all[j].radius {
                covers_disjoint = false;
            }
        }
    }
    let radius_sum_minus: S = covers.minus.iter().map(|b| b.radius).sum();
    let radius_sum_plus: S = covers.plus.iter().map(|b| b.radius).sum();
    let radius_limit = cc.energy_gap / (k128 * cc.sphere_constant);
    let u_minus = closed_union(&covers.minus);
    let u_plus = closed_union(&covers.plus);
    let restricted_t = restrict(t, &u_minus).alpha_mass(alpha).max(restrict(t, &u_plus).alpha_mass(alpha));
    let restricted_t_opt = restrict(t_opt, &u_minus).alpha_mass(alpha).max(restrict(t_opt, &u_plus).alpha_mass(alpha));
    let restricted_limit = cc.energy_gap / k128;
    let atoms_off_spheres = !mu_minus
        .atoms
        .iter()
        .chain(mu_plus.atoms.iter())
        .chain(mu_n_minus.atoms.iter())
        .chain(mu_n_plus.atoms.iter())
        .any(|(p, _)| all.iter().any(|b| b.on_sphere(p)));
    let mut failures = Vec::new();
    if !covers_disjoint {
        failures.push("cover closures intersect".to_string());
    }
    if !(radius_sum_minus < radius_limit && radius_sum_plus < radius_limit) {
        failures.push(format!("radius sums {radius_sum_minus}, {radius_sum_plus} not below {radius_limit}"));
    }
    if !(restricted_t <= restricted_limit && restricted_t_opt <= restricted_limit) {
        failures.push(format!("restricted alpha-masses {restricted_t}, {restricted_t_opt} above {restricted_limit}"));
    }
    if !atoms_off_spheres {
        failures.push("an atom lies on a cover sphere".to_string());
    }

    // truncation and the choice of n
    let cells_minus = cells(&balls_minus);
    let cells_plus = cells(&balls_plus);
    for (mu, bs, side) in [(&mu_minus, &balls_minus, "source"), (&mu_plus, &balls_plus, "target")] {
        let uncovered = mu.mass_where(|p| !bs.iter().any(|b| b.contains(p)));
        if !(uncovered < cc.eps1 / S::c(4.0)) {
            failures.push(format!("{side} balls leave {uncovered} of {} uncovered", mu.total()));
        }
    }
    let flat_gap = vertex_homotopy_bound(t_n, t).unwrap_or_else(|| t_n.sub(t).mass());
    if !(flat_gap <= cc.eps2) {
        failures.push(format!("flat gap bound {flat_gap} above eps2 = {}", cc.eps2));
    }
    let mut cell_ratio = S::zero();
    let mut mass_outside_cells = S::zero();
    for (mu, mu_n, cs) in [(&mu_minus, &mu_n_minus, &cells_minus), (&mu_plus, &mu_n_plus, &cells_plus)] {
        for c in cs.iter() {
            let m = mu.mass_where(|p| c.cell.contains(p));
            if !(m > S::zero()) {
                failures.push("a cell carries no limit mass".to_string());
                continue;
            }
            cell_ratio = cell_ratio.max(mu_n.mass_where(|p| c.cell.contains(p)) / m);
        }
        let outside = mu_n.mass_where(|p| cell_index(cs, p).is_none());
        mass_outside_cells = mass_outside_cells.max(outside);
    }
    if !(cell_ratio <= scale * (one + S::tol(1e-12))) {
        failures.push(format!("mu_n(C_i) / mu(C_i) reaches {cell_ratio} > 1 + eps2"));
    }
    if !(mass_outside_cells <= cc.eps1 / S::c(2.0)) {
        failures.push(format!("mu_n outside the cells is {mass_outside_cells} > eps1/2"));
    }
    if !failures.is_empty() {
        return Err(Error::Precondition(failures.join("; ")));
    }
    let checks = InputChecks {
        covers_disjoint,
        radius_sum_minus,
        radius_sum_plus,
        radius_limit,
        restricted_t,
        restricted_t_opt,
        restricted_limit,
        atoms_off_spheres,
        flat_gap,
        cell_ratio,
        mass_outside_cells,
    };

    // selection
    let (pi_sel, t_sel) = sub_decomposition(pi_n, |c| {
        cell_index(&cells_minus, &c.start()).is_some() && cell_index(&cells_plus, &c.end()).is_some()
    });

    // cut ends, one family per ball
    let mut sel_minus_parts = Vec::new();
    let mut exits = Vec::new();
    for c in &cells_minus {
        let fam = cut_decomposition(&pi_sel, std::slice::from_ref(c), CutMode::FromStart)?;
        exits.push(fam.end_measure());
        sel_minus_parts.push(reconstruct(&fam));
    }
    let mut sel_plus_parts = Vec::new();
    let mut entries = Vec::new();
    for c in &cells_plus {
        let fam = cut_decomposition(&pi_sel, std::slice::from_ref(c), CutMode::FromLastEntry)?;
        entries.push(fam.start_measure());
        sel_plus_parts.push(reconstruct(&fam));
    }
    let sel_minus = TrafficPath::sum(sel_minus_parts.iter());
    let sel_plus = TrafficPath::sum(sel_plus_parts.iter());

    // restricted optimum
    let mut restr = Vec::new();
    let mut restr_start = vec![Vec::new(); balls_minus.len()];
    let mut restr_end = vec![Vec::new(); balls_plus.len()];
    for (c, w) in &pi_opt.entries {
        let (Some(i), Some(j)) = (cell_index(&cells_minus, &c.start()), cell_index(&cells_plus, &c.end())) else { continue };
        let a = first_exit(c, &BallRegion::ball(balls_minus[i]));
        let b = last_entry(c, &BallRegion::ball(balls_plus[j]));
        if !(a.is_finite() && a < b) {
            return Err(Error::Precondition("an optimal curve does not leave its source ball before its target ball".into()));
        }
        if let Some(piece) = restrict_curve(c, a, b)? {
            restr_start[i].push((piece.start(), *w));
            restr_end[j].push((piece.end(), *w));
            restr.push((piece, *w));
        }
    }
    let pi_restr = PathMeasure::new(restr);
    let t_restr = reconstruct(&pi_restr);
    let restr_start: Vec<AtomicMeasure<S>> = restr_start.into_iter().map(AtomicMeasure::new).collect();
    let restr_end: Vec<AtomicMeasure<S>> = restr_end.into_iter().map(AtomicMeasure::new).collect();

    // sphere connections
    let weights = |cut: &[AtomicMeasure<S>], restr: &[AtomicMeasure<S>], side: &str| -> Result<Vec<S>> {
        cut.iter()
            .zip(restr.iter())
            .enumerate()
            .map(|(i, (c, r))| {
                let m = c.total();
                if m <= S::tol(ZERO_MASS) {
                    return Ok(S::zero());
                }
                let denom = scale * r.total();
                let a = if denom > S::zero() { m / denom } else { S::infinity() };
                if !(a >= S::zero() && a <= one + S::tol(1e-12)) {
                    return Err(Error::Precondition(format!("{side} weight {i} = {a} outside [0, 1]")));
                }
                Ok(a.min(one))
            })
            .collect()
    };
    let alphas_minus = weights(&exits, &restr_start, "source")?;
    let alphas_plus = weights(&entries, &restr_end, "target")?;
    let mut links = Vec::new();
    let mut conn_minus_parts = Vec::new();
    let mut conn_plus_parts = Vec::new();
    let mut sigma_plus = Vec::new();
    let mut sigma_minus = Vec::new();
    let mut nu_n_minus = Vec::new();
    let mut nu_n_plus = Vec::new();
    for (i, ball) in balls_minus.iter().enumerate() {
        let fed = restr_start[i].scale(alphas_minus[i] * scale);
        nu_n_minus.extend(restr_start[i].scale((one - alphas_minus[i]) * scale).atoms);
        if exits[i].total() > S::tol(ZERO_MASS) {
            let sc = sphere_transport(&exits[i], &fed, ball, alpha, cc.dimension)?;
            let m = exits[i].total();
            links.push(SphereLink { ball: i, mass: m, radius: ball.radius, cost: sc.construction.cost, bound: cc.sphere_constant * flow_pow(m, alpha) * ball.radius });
            conn_minus_parts.push(sc.construction.path);
        }
        sigma_plus.extend(fed.atoms);
    }
    for (j, ball) in balls_plus.iter().enumerate() {
        let fed = restr_end[j].scale(alphas_plus[j] * scale);
        nu_n_plus.extend(restr_end[j].scale((one - alphas_plus[j]) * scale).atoms);
        if entries[j].total() > S::tol(ZERO_MASS) {
            let sc = sphere_transport(&fed, &entries[j], ball, alpha, cc.dimension)?;
            let m = entries[j].total();
            links.push(SphereLink { ball: balls_minus.len() + j, mass: m, radius: ball.radius, cost: sc.construction.cost, bound: cc.sphere_constant * flow_pow(m, alpha) * ball.radius });
            conn_plus_parts.push(sc.construction.path);
        }
        sigma_minus.extend(fed.atoms);
    }
    let conn_minus = TrafficPath::sum(conn_minus_parts.iter());
    let conn_plus = TrafficPath::sum(conn_plus_parts.iter());
    let nu_n_minus = AtomicMeasure::new(nu_n_minus);
    let nu_n_plus = AtomicMeasure::new(nu_n_plus);

    // excess return
    let t_scaled = t_restr.scale(scale);
    let back_mass = nu_n_minus.total();
    let back = if back_mass <= S::tol(ZERO_MASS) && nu_n_plus.total() <= S::tol(ZERO_MASS) {
        TrafficPath::empty()
    } else {
        let mut apex = Point::origin();
        let mut wsum = S::zero();
        for (p, m) in restr_start.iter().chain(restr_end.iter()).flat_map(|m| m.atoms.iter()) {
            apex = apex + *p * *m;
            wsum += *m;
        }
        if wsum > S::zero() {
            apex = apex * (one / wsum);
        }
        let opts = SubTransportOptions { alpha, dim: cc.dimension, ambient_radius: cc.ambient_radius, apex };
        cheap_subtransport_with(&t_scaled, &pi_restr.scale(scale), &nu_n_minus, &nu_n_plus, cc.energy_gap / k128, opts)?.path.neg()
    };

    let selected_competitor = TrafficPath::sum([&sel_minus, &conn_minus, &t_scaled, &back, &conn_plus, &sel_plus]);
    let competitor = selected_competitor.add(t_n).sub(&t_sel);
    let boundary_error_selected = selected_competitor.boundary().sub(&t_sel.boundary()).total_variation();
    let boundary_error = competitor.boundary().sub(&bd_n).total_variation();

    // ledger
    let u_all = BallRegion::union(all.iter().map(|b| b.with_closure(true)).collect());
    let outside = restrict(&selected_competitor, &u_all.complement()).alpha_mass(alpha);
    let cost_t_opt = t_opt.alpha_mass(alpha);
    let outside_bound = cost_t_opt + cc.energy_gap / S::c(4.0);
    let inside_minus = restrict(&selected_competitor.sub(&sel_minus), &u_minus).alpha_mass(alpha);
    let inside_plus = restrict(&selected_competitor.sub(&sel_plus), &u_plus).alpha_mass(alpha);
    let inside_bound = cc.energy_gap / S::c(32.0);
    let conn_radius_bound = cc.sphere_constant * (radius_sum_minus + radius_sum_plus);
    let conn_within_bound = links.iter().all(|l| l.cost <= l.bound * (one + tol));
    let back_cost = back.alpha_mass(alpha);
    let back_bound = cc.energy_gap / k128;
    let cost_competitor = competitor.alpha_mass(alpha);
    let ledger = EnergyLedger {
        cost_t_n,
        cost_competitor,
        cost_t_opt,
        cost_t: t.alpha_mass(alpha),
        energy_gap: cc.energy_gap,
        sel_minus: sel_minus.alpha_mass(alpha),
        sel_plus: sel_plus.alpha_mass(alpha),
        conn_minus: conn_minus.alpha_mass(alpha),
        conn_plus: conn_plus.alpha_mass(alpha),
        restr_scaled: t_scaled.alpha_mass(alpha),
        back: back_cost,
        links,
        conn_radius_bound,
        conn_within_bound,
        back_mass,
        back_mass_ok: back_mass <= cc.eps1 + cc.eps2 * (one + tol) * mu_minus.total(),
        back_bound,
        back_ok: back_cost <= back_bound,
        outside,
        outside_bound,
        outside_ok: outside <= outside_bound,
        inside_minus,
        inside_plus,
        inside_bound,
        inside_ok: inside_minus <= inside_bound && inside_plus <= inside_bound,
        improved: cost_competitor < cost_t_n,
    };
    Ok(CompetitorReport {
        competitor,
        selected_competitor,
        selected: t_sel,
        restricted_opt: t_restr,
        back,
        alphas_minus,
        alphas_plus,
        boundary_error_selected,
        boundary_error,
        checks,
        ledger,
    })
}

/// A deliberately suboptimal member of a converging sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticInstance<S> {
    /// Perturbed member: `t` with its boundary atoms moved by `shift`.
    pub t_n: TrafficPath<S>,
    /// Optimum plus a detour costing exactly `energy_gap` more.
    pub t: TrafficPath<S>,
    pub t_opt: TrafficPath<S>,
    pub energy_gap: S,
    pub shift: S,
}

/// Builds the optimum between `mu_minus` and `mu_plus`, bends its longest edge
/// into a tent whose extra alpha-mass is `energy_gap`, and moves every boundary
/// atom by `shift` in a seeded random direction.
pub fn synthetic_suboptimal<S: Real>(
    mu_minus: &AtomicMeasure<S>,
    mu_plus: &AtomicMeasure<S>,
    alpha: S,
    energy_gap: S,
    shift: S,
    dim: usize,
    seed: u64,
) -> Result<SyntheticInstance<S>> {
    let t_opt = brute_force_optimal(mu_minus, mu_plus, alpha, S::c(1e-10))?.path;
    let Some((k, _)) = t_opt
        .edges
        .iter()
        .enumerate()
        .map(|(k, e)| (k, t_opt.edge_len(e)))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    else {
        return Err(Error::Invalid("optimum has no edges".into()));
    };
    let e = t_opt.edges[k];
    let (a, b) = (t_opt.vertices[e.tail], t_opt.vertices[e.head]);
    let len = a.dist(&b);
    let half = (len + energy_gap / flow_pow(e.theta, alpha)) / S::c(2.0);
    let height = (half * half - len * len / S::c(4.0)).max(S::zero()).sqrt();
    let dir = (b - a) * (S::one() / len);
    let normal = if dim == 3 && dir.x().abs() < S::c(0.5) && dir.y().abs() < S::c(0.5) {
        dir.cross(&Point::new(S::one(), S::zero(), S::zero())).normalized()
    } else {
        Point::new(-dir.y(), dir.x(), S::zero()).normalized()
    }
    .unwrap_or(Point::new(S::zero(), S::one(), S::zero()));
    let apex = a.lerp(&b, S::c(0.5)) + normal * height;
    let mut segs: Vec<_> = t_opt.segments().into_iter().enumerate().filter(|(j, _)| *j != k).map(|(_, s)| s).collect();
    segs.push((a, apex, e.theta));
    segs.push((apex, b, e.theta));
    let t = TrafficPath::from_segments(segs);

    let bd = t.boundary();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut moves = Vec::new();
    for (p, _) in &bd.atoms {
        let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        let z: f64 = if dim == 3 { rng.gen::<f64>() * 2.0 - 1.0 } else { 0.0 };
        let rho = (1.0 - z * z).sqrt();
        moves.push((*p, Point::new(S::c(rho * phi.cos()), S::c(rho * phi.sin()), S::c(z)) * shift));
    }
    let tol = S::tol(crate::currents::GEOM_TOL);
    let mut t_n = t.clone();
    for v in &mut t_n.vertices {
        if let Some((_, m)) = moves.iter().find(|(p, _)| p.dist(v) <= tol) {
            *v = *v + *m;
        }
    }
    Ok(SyntheticInstance { t_n, t, t_opt, energy_gap, shift })
}

/// Runs the construction on a synthetic instance with covers from [`build_covers`].
pub fn competitor_for_instance<S: Real>(inst: &SyntheticInstance<S>, cc: &CompetitorConfig<S>) -> Result<CompetitorReport<S>> {
    let pi_n = good_decomposition(&inst.t_n)?;
    let pi_opt = good_decomposition(&inst.t_opt)?;
    let atoms = [inst.t.boundary(), inst.t_n.boundary()];
    let covers = build_covers(&inst.t, &inst.t_opt, &atoms, cc)?;
    build_competitor(&inst.t_n, &pi_n, &inst.t, &inst.t_opt, &pi_opt, &covers, cc)
}
