use thiserror::Error;

use super::Topology;
use crate::geometry::Point;
use crate::scalar::Real;

/// Relative objective change below which the iteration stops.
pub const REL_STOP: f64 = 1e-10;
/// Iteration budget of the position solver.
pub const MAX_ITERS: usize = 10_000;
/// Steiner points closer than this to a neighbour are snapped onto it.
pub const COLLISION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Error)]
#[error("position solver did not converge after {iterations} iterations")]
pub struct NonConvergence<S: Real> {
    pub iterations: usize,
    /// Best iterate reached.
    pub best: Topology<S>,
}

/// Solver trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionReport<S> {
    pub topology: Topology<S>,
    pub objective: S,
    pub iterations: usize,
    pub converged: bool,
    /// Accepted objective values, nonincreasing.
    pub history: Vec<S>,
}

/// Places the Steiner points to minimize `sum |flow|^alpha * length` for fixed
/// combinatorics.
pub fn optimize_positions<S: Real>(topology: &Topology<S>, alpha: S, tol: S) -> Result<Topology<S>, NonConvergence<S>> {
    let rep = solve_positions(topology, alpha, tol);
    if rep.converged {
        Ok(rep.topology)
    } else {
        Err(NonConvergence { iterations: rep.iterations, best: rep.topology })
    }
}

/// Majorize-minimize iteration on a smoothed objective `sum w sqrt(len^2 + eta^2)`,
/// with `eta` driven to zero in stages. Each step solves the weighted Laplacian
/// system for all Steiner points at once; a step that raises the true objective
/// is halved until it does not.
pub fn solve_positions<S: Real>(topology: &Topology<S>, alpha: S, tol: S) -> PositionReport<S> {
    let mut topo = topology.clone();
    let ns = topo.n_steiner();
    let k = topo.n_terminals;
    let w = topo.weights(alpha);
    let objective = |t: &Topology<S>| -> S { t.edges.iter().zip(w.iter()).map(|(&(a, b), wi)| *wi * t.nodes[a].dist(&t.nodes[b])).sum() };
    let mut history = vec![objective(&topo)];
    if ns == 0 {
        return PositionReport { objective: history[0], topology: topo, iterations: 0, converged: true, history };
    }
    let scale = {
        let mut s = S::zero();
        for i in 0..k {
            for j in 0..i {
                s = s.max(topo.nodes[i].dist(&topo.nodes[j]));
            }
        }
        s.max(S::tol(1e-12))
    };
    let rel_stop = S::tol(REL_STOP).max(tol.min(S::c(1e-6)) * S::c(1e-4));
    let mut eta = scale * S::c(1e-3);
    let eta_min = scale * S::tol(1e-10).max(S::epsilon() * S::c(8.0));
    let mut iters = 0usize;
    let mut converged = false;
    let mut current = history[0];
    'stages: loop {
        let last_stage = eta <= eta_min;
        let stage_cap = if last_stage { MAX_ITERS } else { MAX_ITERS / 8 };
        let mut stage_iters = 0;
        loop {
            if iters >= MAX_ITERS {
                break 'stages;
            }
            iters += 1;
            stage_iters += 1;
            let proposal = mm_step(&topo, &w, eta);
            let mut step = S::one();
            let mut accepted = false;
            for _ in 0..40 {
                let mut trial = topo.clone();
                for i in 0..ns {
                    let a = topo.nodes[k + i];
                    trial.nodes[k + i] = a + (proposal[i] - a) * step;
                }
                let f = objective(&trial);
                if f <= current {
                    let change = (current - f) / current.max(S::tol(1e-300));
                    topo = trial;
                    current = f;
                    history.push(f);
                    accepted = true;
                    if change < rel_stop {
                        accepted = false;
                    }
                    break;
                }
                step = step / S::c(2.0);
            }
            if !accepted || stage_iters >= stage_cap {
                if last_stage {
                    converged = !accepted;
                    break 'stages;
                }
                break;
            }
        }
        eta = (eta / S::c(10.0)).max(eta_min);
    }
    collapse_pendants(&mut topo);
    snap_collisions(&mut topo, scale);
    let obj = objective(&topo);
    if obj <= current {
        current = obj;
    }
    PositionReport { objective: current, topology: topo, iterations: iters, converged, history }
}

/// One majorize-minimize step; returns the new Steiner positions.
fn mm_step<S: Real>(topo: &Topology<S>, w: &[S], eta: S) -> Vec<Point<S>> {
    let k = topo.n_terminals;
    let ns = topo.n_steiner();
    let mut a = vec![vec![S::zero(); ns]; ns];
    let mut rhs = vec![Point::origin(); ns];
    let mut total = S::zero();
    for (&(u, v), &wi) in topo.edges.iter().zip(w.iter()) {
        if wi <= S::zero() {
            continue;
        }
        let d = topo.nodes[u].dist(&topo.nodes[v]);
        let c = wi / (d * d + eta * eta).sqrt();
        total += c;
        match (u >= k, v >= k) {
            (true, true) => {
                let (i, j) = (u - k, v - k);
                a[i][i] += c;
                a[j][j] += c;
                a[i][j] -= c;
                a[j][i] -= c;
            }
            (true, false) => {
                a[u - k][u - k] += c;
                rhs[u - k] = rhs[u - k] + topo.nodes[v] * c;
            }
            (false, true) => {
                a[v - k][v - k] += c;
                rhs[v - k] = rhs[v - k] + topo.nodes[u] * c;
            }
            (false, false) => {}
        }
    }
    // proximal term keeps the system regular when a Steiner point carries no flow
    let rho = total.max(S::one()) * S::c(1e-12);
    for i in 0..ns {
        a[i][i] += rho;
        rhs[i] = rhs[i] + topo.nodes[k + i] * rho;
    }
    solve_spd(a, rhs)
}

/// Gaussian elimination with partial pivoting; `rhs` holds one point per row.
fn solve_spd<S: Real>(mut a: Vec<Vec<S>>, mut b: Vec<Point<S>>) -> Vec<Point<S>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / d;
            if f == S::zero() {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[row][c] -= f * v;
            }
            b[row] = b[row] - b[col] * f;
        }
    }
    let mut x = vec![Point::origin(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc = acc - x[c] * a[row][c];
        }
        x[row] = acc * (S::one() / a[row][row]);
    }
    x
}

/// A Steiner point of degree one carries no flow; it is moved onto its neighbour,
/// repeatedly so that dangling chains fold up.
fn collapse_pendants<S: Real>(topo: &mut Topology<S>) {
    let k = topo.n_terminals;
    let adj = topo.adjacency();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut done = vec![false; topo.nodes.len()];
    let mut order = Vec::new();
    let mut stack: Vec<usize> = (k..topo.nodes.len()).filter(|&s| degree[s] == 1).collect();
    while let Some(s) = stack.pop() {
        if done[s] || degree[s] != 1 {
            continue;
        }
        done[s] = true;
        let Some(&(nb, _)) = adj[s].iter().find(|(nb, _)| !done[*nb]) else { continue };
        order.push((s, nb));
        degree[nb] -= 1;
        if nb >= k && degree[nb] == 1 {
            stack.push(nb);
        }
    }
    // place from the innermost outwards
    for &(s, nb) in order.iter().rev() {
        topo.nodes[s] = topo.nodes[nb];
    }
}

/// Snaps Steiner points lying within the collision tolerance of a neighbour onto it.
fn snap_collisions<S: Real>(topo: &mut Topology<S>, scale: S) {
    let tol = S::c(COLLISION_TOL) * scale.max(S::one());
    let k = topo.n_terminals;
    let adj = topo.adjacency();
    for s in k..topo.nodes.len() {
        let mut target = None;
        for &(nb, _) in &adj[s] {
            if topo.nodes[s].dist(&topo.nodes[nb]) < tol {
                // prefer terminals, then lower index
                let better = match target {
                    None => true,
                    Some(t) => (nb < k && t >= k) || ((nb < k) == (t < k) && nb < t),
                };
                if better {
                    target = Some(nb);
                }
            }
        }
        if let Some(t) = target {
            topo.nodes[s] = topo.nodes[t];
        }
    }
}

/// Steiner point positions for a fresh topology: the terminal centroid with small
/// distinct offsets.
pub fn initial_steiner<S: Real>(terminals: &[(Point<S>, S)], count: usize) -> Vec<Point<S>> {
    let n = S::from_usize_lossy(terminals.len().max(1));
    let c = terminals.iter().fold(Point::origin(), |acc, t| acc + t.0) * (S::one() / n);
    let mut spread = S::zero();
    for t in terminals {
        spread = spread.max(t.0.dist(&c));
    }
    let spread = spread.max(S::c(1e-6));
    (0..count)
        .map(|i| {
            let phi = S::c(2.399963229728653) * S::from_usize_lossy(i + 1);
            c + Point::new(phi.cos(), phi.sin(), S::zero()) * (spread * S::c(1e-3))
        })
        .collect()
}
