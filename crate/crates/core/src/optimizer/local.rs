use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::positions::solve_positions;
use super::{initial_steiner, terminals_of, Topology};
use crate::currents::{AtomicMeasure, TrafficPath};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchReport<S> {
    pub path: TrafficPath<S>,
    pub cost: S,
    pub topology: Topology<S>,
    pub accepted_moves: usize,
    /// Cost after each accepted move, nonincreasing.
    pub history: Vec<S>,
}

/// Move kinds tried by [`local_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Split,
    Merge,
    Reroute,
}

/// Randomized descent over tree topologies. Moves: split a node by a new Steiner
/// point, contract a Steiner edge, reattach a subtree elsewhere; every move is
/// followed by position descent and kept only if it lowers the cost.
pub fn local_search<S: Real>(
    mu_minus: &AtomicMeasure<S>,
    mu_plus: &AtomicMeasure<S>,
    alpha: S,
    init: Option<&TrafficPath<S>>,
    budget: usize,
    seed: u64,
) -> Result<LocalSearchReport<S>> {
    let (a, b) = (mu_minus.total(), mu_plus.total());
    if (a - b).abs() > S::tol(1e-9) * (S::one() + a.abs()) {
        return Err(Error::Unbalanced { positive: b.f64(), negative: a.f64() });
    }
    let terminals = terminals_of(mu_minus, mu_plus);
    if terminals.is_empty() {
        let t = Topology::new(&[], Vec::new(), Vec::new())?;
        return Ok(LocalSearchReport { path: TrafficPath::empty(), cost: S::zero(), topology: t, accepted_moves: 0, history: vec![S::zero()] });
    }
    let start = match init {
        Some(p) => {
            let target = mu_plus.sub(mu_minus);
            if !p.boundary().approx_eq(&target, S::tol(1e-9) * (S::one() + a)) {
                return Err(Error::Precondition("initial path has the wrong boundary".into()));
            }
            Topology::from_path(p).map(|t| cleanup(&t)).unwrap_or_else(|| star(&terminals))
        }
        None => star(&terminals),
    };
    let tol = S::tol(1e-9);
    let mut best = polish(&start, alpha, tol);
    let mut best_cost = best.cost(alpha);
    let start_cost = start.cost(alpha);
    if start_cost < best_cost {
        best = start.clone();
        best_cost = start_cost;
    }
    let mut history = vec![best_cost];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = 0;
    for _ in 0..budget {
        let mv = [Move::Split, Move::Merge, Move::Reroute][rng.gen_range(0..3)];
        let Some(cand) = propose(&best, mv, &mut rng) else { continue };
        let cand = polish(&cand, alpha, tol);
        let c = cand.cost(alpha);
        if c < best_cost - S::tol(1e-12) * (S::one() + best_cost) {
            best = cand;
            best_cost = c;
            accepted += 1;
            history.push(c);
        }
    }
    Ok(LocalSearchReport { path: best.to_path(), cost: best_cost, topology: best, accepted_moves: accepted, history })
}

fn star<S: Real>(terminals: &[(Point<S>, S)]) -> Topology<S> {
    let k = terminals.len();
    if k == 2 {
        return Topology::new(terminals, Vec::new(), vec![(0, 1)]).expect("balanced pair");
    }
    let s = initial_steiner(terminals, 1);
    Topology::new(terminals, s, (0..k).map(|i| (i, k)).collect()).expect("balanced star")
}

/// Position descent followed by removal of Steiner points of degree at most 2.
pub(crate) fn polish<S: Real>(t: &Topology<S>, alpha: S, tol: S) -> Topology<S> {
    cleanup(&solve_positions(&cleanup(t), alpha, tol).topology)
}

/// Drops Steiner points of degree <= 2 (splicing degree-2 ones out).
pub(crate) fn cleanup<S: Real>(t: &Topology<S>) -> Topology<S> {
    let mut edges = t.edges.clone();
    let k = t.n_terminals;
    let n = t.nodes.len();
    let mut alive = vec![true; n];
    loop {
        let mut deg = vec![0usize; n];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let Some(s) = (k..n).find(|&s| alive[s] && deg[s] <= 2) else { break };
        let inc: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].0 == s || edges[i].1 == s).collect();
        if inc.len() == 2 {
            let other = |i: usize| if edges[i].0 == s { edges[i].1 } else { edges[i].0 };
            let (x, y) = (other(inc[0]), other(inc[1]));
            edges[inc[0]] = (x, y);
            edges.remove(inc[1]);
        } else {
            for &i in inc.iter().rev() {
                edges.remove(i);
            }
        }
        alive[s] = false;
    }
    reindex(t, &alive, edges)
}

fn reindex<S: Real>(t: &Topology<S>, alive: &[bool], edges: Vec<(usize, usize)>) -> Topology<S> {
    let k = t.n_terminals;
    let mut map = vec![usize::MAX; t.nodes.len()];
    let mut steiner = Vec::new();
    for i in 0..t.nodes.len() {
        if i < k {
            map[i] = i;
        } else if alive[i] {
            map[i] = k + steiner.len();
            steiner.push(t.nodes[i]);
        }
    }
    let edges = edges.into_iter().map(|(a, b)| (map[a], map[b])).collect();
    Topology::new(&t.terminals(), steiner, edges).expect("tree stays balanced")
}

/// Proposes a neighbouring topology, or `None` when the move does not apply.
pub(crate) fn propose<S: Real>(t: &Topology<S>, mv: Move, rng: &mut ChaCha8Rng) -> Option<Topology<S>> {
    let k = t.n_terminals;
    let n = t.nodes.len();
    let adj = t.adjacency();
    match mv {
        Move::Split => {
            let cands: Vec<usize> = (0..n).filter(|&v| adj[v].len() >= 2).collect();
            let &v = cands.choose(rng)?;
            let mut inc = adj[v].clone();
            inc.shuffle(rng);
            let (a, ea) = inc[0];
            let (b, eb) = inc[1];
            let s = n;
            let pos = t.nodes[v] + ((t.nodes[a] + t.nodes[b]) * S::c(0.5) - t.nodes[v]) * S::c(0.1);
            let mut edges: Vec<(usize, usize)> = t.edges.iter().enumerate().filter(|(i, _)| *i != ea && *i != eb).map(|(_, e)| *e).collect();
            edges.extend([(v, s), (s, a), (s, b)]);
            let mut steiner: Vec<Point<S>> = t.nodes[k..].to_vec();
            steiner.push(pos);
            Topology::new(&t.terminals(), steiner, edges).ok()
        }
        Move::Merge => {
            let cands: Vec<usize> = (0..t.edges.len()).filter(|&i| t.edges[i].0 >= k || t.edges[i].1 >= k).collect();
            let &e = cands.choose(rng)?;
            let (a, b) = t.edges[e];
            let (s, keep) = if a >= k && (b < k || rng.gen_bool(0.5)) { (a, b) } else { (b, a) };
            let edges: Vec<(usize, usize)> = t
                .edges
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != e)
                .map(|(_, &(x, y))| (if x == s { keep } else { x }, if y == s { keep } else { y }))
                .collect();
            let mut alive = vec![true; n];
            alive[s] = false;
            Some(reindex(t, &alive, edges))
        }
        Move::Reroute => {
            if t.edges.len() < 2 {
                return None;
            }
            let e = rng.gen_range(0..t.edges.len());
            let (a, b) = t.edges[e];
            // side of b after removing e
            let mut side = vec![false; n];
            let mut stack = vec![b];
            side[b] = true;
            while let Some(v) = stack.pop() {
                for &(w, i) in &adj[v] {
                    if i != e && !side[w] {
                        side[w] = true;
                        stack.push(w);
                    }
                }
            }
            let (x, other_side): (usize, Vec<usize>) = if rng.gen_bool(0.5) {
                (b, (0..n).filter(|&v| !side[v]).collect())
            } else {
                (a, (0..n).filter(|&v| side[v]).collect())
            };
            let in_other = |v: usize| other_side.contains(&v);
            let targets: Vec<usize> = (0..t.edges.len()).filter(|&i| i != e && in_other(t.edges[i].0) && in_other(t.edges[i].1)).collect();
            let mut edges: Vec<(usize, usize)> = t.edges.iter().enumerate().filter(|(i, _)| *i != e).map(|(_, e)| *e).collect();
            let mut steiner: Vec<Point<S>> = t.nodes[k..].to_vec();
            if !targets.is_empty() && rng.gen_bool(0.7) {
                let &ti = targets.choose(rng)?;
                let (p, q) = t.edges[ti];
                let s = n;
                let pos = (t.nodes[p] + t.nodes[q]) * S::c(0.5);
                let idx = edges.iter().position(|&ed| ed == (p, q))?;
                edges[idx] = (p, s);
                edges.extend([(s, q), (x, s)]);
                steiner.push(pos);
            } else {
                let &y = other_side.choose(rng)?;
                edges.push((x, y));
            }
            Topology::new(&t.terminals(), steiner, edges).ok()
        }
    }
}

/// Deterministic safeguard: tries every single-edge removal with reconnection of
/// the detached side to each node of the other side. Returns an improving
/// topology if one exists.
pub fn reroute_improvement<S: Real>(t: &Topology<S>, alpha: S, tol: S) -> Option<Topology<S>> {
    let n = t.nodes.len();
    let adj = t.adjacency();
    let base = t.cost(alpha);
    let mut best: Option<(S, Topology<S>)> = None;
    for e in 0..t.edges.len() {
        let (a, b) = t.edges[e];
        let mut side = vec![false; n];
        let mut stack = vec![b];
        side[b] = true;
        while let Some(v) = stack.pop() {
            for &(w, i) in &adj[v] {
                if i != e && !side[w] {
                    side[w] = true;
                    stack.push(w);
                }
            }
        }
        for (x, on_x_side) in [(b, true), (a, false)] {
            for y in 0..n {
                if side[y] == on_x_side || (x == a && y == b) || (x == b && y == a) {
                    continue;
                }
                let mut edges = t.edges.clone();
                edges[e] = (x, y);
                let Ok(cand) = Topology::new(&t.terminals(), t.nodes[t.n_terminals..].to_vec(), edges) else { continue };
                let cand = polish(&cand, alpha, tol);
                let c = cand.cost(alpha);
                if c < base - tol && best.as_ref().map_or(true, |(bc, _)| c < *bc) {
                    best = Some((c, cand));
                }
            }
        }
    }
    best.map(|b| b.1)
}
