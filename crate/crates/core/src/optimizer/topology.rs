use serde::{Deserialize, Serialize};

use crate::currents::{AtomicMeasure, TrafficPath};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::{flow_pow, Real};

/// Tree (or forest) combinatorics with node positions and the flows forced by
/// mass balance. Terminals come first in `nodes`; the rest are free Steiner points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology<S> {
    pub nodes: Vec<Point<S>>,
    /// Signed demand: `+m` for an atom of the target, `-m` for an atom of the source,
    /// 0 at Steiner points.
    pub supply: Vec<S>,
    pub n_terminals: usize,
    pub edges: Vec<(usize, usize)>,
    /// Flow along `edges[i].0 -> edges[i].1`; negative means the reverse direction.
    pub flows: Vec<S>,
}

impl<S: Real> Topology<S> {
    /// Builds the topology and derives its flows.
    pub fn new(terminals: &[(Point<S>, S)], steiner: Vec<Point<S>>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut nodes: Vec<Point<S>> = terminals.iter().map(|t| t.0).collect();
        let mut supply: Vec<S> = terminals.iter().map(|t| t.1).collect();
        let n_terminals = nodes.len();
        for p in steiner {
            nodes.push(p);
            supply.push(S::zero());
        }
        let mut t = Topology { nodes, supply, n_terminals, edges, flows: Vec::new() };
        t.compute_flows()?;
        Ok(t)
    }

    pub fn n_steiner(&self) -> usize {
        self.nodes.len() - self.n_terminals
    }

    pub fn terminals(&self) -> Vec<(Point<S>, S)> {
        (0..self.n_terminals).map(|i| (self.nodes[i], self.supply[i])).collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        adj
    }

    /// Recomputes edge flows from the supplies; fails on cycles or unbalanced components.
    pub fn compute_flows(&mut self) -> Result<()> {
        let n = self.nodes.len();
        let adj = self.adjacency();
        let mut flows = vec![S::zero(); self.edges.len()];
        let mut seen = vec![false; n];
        let scale = self.supply.iter().map(|s| s.abs()).fold(S::zero(), S::max).max(S::one());
        for root in 0..n {
            if seen[root] {
                continue;
            }
            let mut order = Vec::new();
            let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut stack = vec![root];
            seen[root] = true;
            while let Some(v) = stack.pop() {
                order.push(v);
                for &(w, k) in &adj[v] {
                    if parent[v].map(|p| p.1) == Some(k) {
                        continue;
                    }
                    if seen[w] {
                        return Err(Error::Precondition("topology has a cycle".into()));
                    }
                    seen[w] = true;
                    parent[w] = Some((v, k));
                    stack.push(w);
                }
            }
            let mut sub: Vec<S> = vec![S::zero(); n];
            for &v in order.iter().rev() {
                sub[v] += self.supply[v];
                if let Some((p, k)) = parent[v] {
                    let s = sub[v];
                    sub[p] += s;
                    flows[k] = if self.edges[k].0 == p { s } else { -s };
                }
            }
            if sub[root].abs() > S::tol(1e-9) * scale {
                return Err(Error::Unbalanced { positive: sub[root].max(S::zero()).f64(), negative: (-sub[root]).max(S::zero()).f64() });
            }
        }
        self.flows = flows;
        Ok(())
    }

    /// Cost weight `|flow|^alpha` per edge.
    pub fn weights(&self, alpha: S) -> Vec<S> {
        self.flows.iter().map(|f| flow_pow(f.abs(), alpha)).collect()
    }

    pub fn cost(&self, alpha: S) -> S {
        self.edges
            .iter()
            .zip(self.flows.iter())
            .map(|(&(a, b), f)| flow_pow(f.abs(), alpha) * self.nodes[a].dist(&self.nodes[b]))
            .sum()
    }

    pub fn to_path(&self) -> TrafficPath<S> {
        TrafficPath::from_segments(
            self.edges
                .iter()
                .zip(self.flows.iter())
                .map(|(&(a, b), &f)| (self.nodes[a], self.nodes[b], f))
                .collect(),
        )
    }

    /// Canonical text form, used to break ties between equal-cost topologies.
    pub fn label(&self) -> String {
        let name = |i: usize| if i < self.n_terminals { format!("t{i}") } else { format!("s{}", i - self.n_terminals) };
        let mut parts: Vec<String> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (name(a), name(b));
                if x <= y {
                    format!("{x}-{y}")
                } else {
                    format!("{y}-{x}")
                }
            })
            .collect();
        parts.sort();
        parts.join(",")
    }

    /// Reads a tree-shaped path back as a topology. Vertices carrying boundary
    /// mass become terminals. Returns `None` if the support has an undirected cycle.
    pub fn from_path(path: &TrafficPath<S>) -> Option<Self> {
        let bd = path.boundary();
        let mut terminals = Vec::new();
        let mut steiner = Vec::new();
        let mut index = vec![0usize; path.vertices.len()];
        let mut is_term = vec![false; path.vertices.len()];
        for (i, v) in path.vertices.iter().enumerate() {
            let m = bd.mass_at(v);
            if m != S::zero() {
                is_term[i] = true;
                index[i] = terminals.len();
                terminals.push((*v, m));
            }
        }
        for (i, v) in path.vertices.iter().enumerate() {
            if !is_term[i] {
                index[i] = terminals.len() + steiner.len();
                steiner.push(*v);
            }
        }
        let edges = path.edges.iter().map(|e| (index[e.tail], index[e.head])).collect();
        Topology::new(&terminals, steiner, edges).ok()
    }
}

/// Terminals `(point, signed demand)` of the transport from `mu_minus` to `mu_plus`,
/// sorted lexicographically.
pub fn terminals_of<S: Real>(mu_minus: &AtomicMeasure<S>, mu_plus: &AtomicMeasure<S>) -> Vec<(Point<S>, S)> {
    let mut t = mu_plus.sub(mu_minus).atoms;
    t.sort_by(|a, b| a.0.lex_cmp(&b.0));
    t
}

/// All full Steiner topologies on the given terminal indices, built by inserting
/// terminals one at a time into every edge. Steiner indices start at `first_steiner`.
pub fn full_topologies(terms: &[usize], first_steiner: usize) -> Vec<Vec<(usize, usize)>> {
    match terms.len() {
        0 | 1 => vec![Vec::new()],
        2 => vec![vec![(terms[0], terms[1])]],
        _ => {
            let s0 = first_steiner;
            let mut current = vec![vec![(terms[0], s0), (terms[1], s0), (terms[2], s0)]];
            for (m, &t) in terms.iter().enumerate().skip(3) {
                let s = first_steiner + m - 2;
                let mut next = Vec::new();
                for tree in &current {
                    for k in 0..tree.len() {
                        let (a, b) = tree[k];
                        let mut e = tree.clone();
                        e[k] = (a, s);
                        e.push((s, b));
                        e.push((t, s));
                        next.push(e);
                    }
                }
                current = next;
            }
            current
        }
    }
}
