use rayon::prelude::*;

use super::local::{cleanup, reroute_improvement};
use super::positions::solve_positions;
use super::{full_topologies, initial_steiner, terminals_of, Topology};
use crate::currents::{AtomicMeasure, TrafficPath};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Real;

/// Largest number of terminals the enumeration oracle accepts.
pub const ORACLE_MAX_ATOMS: usize = 6;

/// Exact optimum over tree topologies, with the metadata of how it was found.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution<S> {
    pub path: TrafficPath<S>,
    pub cost: S,
    /// One tree per balanced block of the optimal partition.
    pub blocks: Vec<Topology<S>>,
    /// Canonical label of the winning combinatorics (tie-break key).
    pub label: String,
    pub topologies_evaluated: usize,
    /// Set when the reroute safeguard found a cheaper tree than the enumeration.
    pub safeguard_improved: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Run the single-edge reroute check on the result.
    pub safeguard: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { safeguard: true }
    }
}

/// Optimal traffic path between two atomic measures with at most six atoms in total.
pub fn brute_force_optimal<S: Real>(
    mu_minus: &AtomicMeasure<S>,
    mu_plus: &AtomicMeasure<S>,
    alpha: S,
    tol: S,
) -> Result<OracleSolution<S>> {
    brute_force_optimal_with(mu_minus, mu_plus, alpha, tol, OracleOptions::default())
}

pub fn brute_force_optimal_with<S: Real>(
    mu_minus: &AtomicMeasure<S>,
    mu_plus: &AtomicMeasure<S>,
    alpha: S,
    tol: S,
    opts: OracleOptions,
) -> Result<OracleSolution<S>> {
    let (a, b) = (mu_minus.total(), mu_plus.total());
    if (a - b).abs() > S::tol(1e-9) * (S::one() + a.abs()) {
        return Err(Error::Unbalanced { positive: b.f64(), negative: a.f64() });
    }
    let terms = terminals_of(mu_minus, mu_plus);
    let k = terms.len();
    if k > ORACLE_MAX_ATOMS {
        return Err(Error::OracleRange);
    }
    if k == 0 {
        return Ok(OracleSolution {
            path: TrafficPath::empty(),
            cost: S::zero(),
            blocks: Vec::new(),
            label: String::new(),
            topologies_evaluated: 0,
            safeguard_improved: false,
        });
    }
    let scale = terms.iter().map(|t| t.1.abs()).fold(S::zero(), S::max);
    let balanced = |mask: usize| -> bool {
        let s: S = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| terms[i].1).sum();
        s.abs() <= S::tol(1e-9) * scale.max(S::one())
    };
    let full = (1usize << k) - 1;
    let blocks: Vec<usize> = (1..=full).filter(|&m| m.count_ones() >= 2 && balanced(m)).collect();
    // every (block, topology) pair is one independent job
    let mut jobs: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for &m in &blocks {
        let idx: Vec<usize> = (0..m.count_ones() as usize).collect();
        let first_steiner = idx.len();
        for edges in full_topologies(&idx, first_steiner) {
            jobs.push((m, edges));
        }
    }
    let results: Vec<(usize, S, Topology<S>)> = jobs
        .par_iter()
        .filter_map(|(m, edges)| {
            let local: Vec<(Point<S>, S)> = (0..k).filter(|i| m >> i & 1 == 1).map(|i| terms[i]).collect();
            let ns = if local.len() >= 3 { local.len() - 2 } else { 0 };
            let topo = Topology::new(&local, initial_steiner(&local, ns), edges.clone()).ok()?;
            let rep = solve_positions(&topo, alpha, tol);
            let t = cleanup(&rep.topology);
            Some((*m, t.cost(alpha), t))
        })
        .collect();
    let evaluated = results.len();
    let mut best_tree: Vec<Option<(S, String, Topology<S>)>> = vec![None; full + 1];
    for (m, c, t) in results {
        let label = t.label();
        let better = match &best_tree[m] {
            None => true,
            Some((bc, bl, _)) => prefer(c, &label, *bc, bl),
        };
        if better {
            best_tree[m] = Some((c, label, t));
        }
    }
    // partition of the terminals into balanced blocks
    let mut dp: Vec<Option<(S, String, Vec<usize>)>> = vec![None; full + 1];
    dp[0] = Some((S::zero(), String::new(), Vec::new()));
    for mask in 1..=full {
        if !balanced(mask) {
            continue;
        }
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let blk = sub | low;
            if let (Some((tc, tl, _)), Some((rc, rl, rb))) = (&best_tree[blk], &dp[mask ^ blk]) {
                let c = *tc + *rc;
                let label = if rl.is_empty() { format!("[{blk:b}:{tl}]") } else { format!("{rl}[{blk:b}:{tl}]") };
                let better = match &dp[mask] {
                    None => true,
                    Some((bc, bl, _)) => prefer(c, &label, *bc, bl),
                };
                if better {
                    let mut parts = rb.clone();
                    parts.push(blk);
                    dp[mask] = Some((c, label, parts));
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let (_, label, parts) = dp[full].clone().ok_or_else(|| Error::Precondition("no balanced partition".into()))?;
    let mut chosen: Vec<Topology<S>> = parts.iter().map(|&m| best_tree[m].as_ref().expect("block solved").2.clone()).collect();
    let mut safeguard_improved = false;
    if opts.safeguard {
        for t in &mut chosen {
            if let Some(better) = reroute_improvement(t, alpha, tol) {
                *t = better;
                safeguard_improved = true;
            }
        }
    }
    let cost = chosen.iter().map(|t| t.cost(alpha)).sum();
    let path = TrafficPath::sum(chosen.iter().map(|t| t.to_path()).collect::<Vec<_>>().iter());
    Ok(OracleSolution { path, cost, blocks: chosen, label, topologies_evaluated: evaluated, safeguard_improved })
}

/// Lower cost wins; costs equal up to relative 1e-12 fall back to the label.
fn prefer<S: Real>(c: S, label: &str, bc: S, bl: &str) -> bool {
    let tie = S::c(1e-12) * (S::one() + bc.abs());
    if c < bc - tie {
        true
    } else if c > bc + tie {
        false
    } else {
        label < bl
    }
}

/// Optimality verdict of a path against the oracle on its own boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport<S> {
    pub optimal: bool,
    /// `alpha_mass(path) - oracle cost`.
    pub gap: S,
    pub cost: S,
    pub oracle_cost: S,
}

pub fn is_optimal<S: Real>(t: &TrafficPath<S>, alpha: S, tol: S) -> Result<OptimalityReport<S>> {
    let bd = t.boundary();
    let sol = brute_force_optimal(&bd.negative_part(), &bd.positive_part(), alpha, tol)?;
    let cost = t.alpha_mass(alpha);
    let gap = cost - sol.cost;
    Ok(OptimalityReport { optimal: gap <= tol, gap, cost, oracle_cost: sol.cost })
}
