//! Minimum-cost circulation by negative-arc saturation followed by successive
//! shortest paths with Dijkstra and node potentials.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: f64,
    cost: f64,
}

#[derive(Debug, Clone, Default)]
pub struct MinCostFlow {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl MinCostFlow {
    pub fn new(n: usize) -> Self {
        MinCostFlow { arcs: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds arc `u -> v`; returns its index. Capacities must be finite.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: f64, cost: f64) -> usize {
        debug_assert!(cap.is_finite() && cap >= 0.0);
        let i = self.arcs.len();
        self.arcs.push(Arc { to: v, cap, cost });
        self.arcs.push(Arc { to: u, cap: 0.0, cost: -cost });
        self.adj[u].push(i);
        self.adj[v].push(i + 1);
        i
    }

    /// Flow on arc `i` after solving.
    pub fn flow(&self, i: usize) -> f64 {
        self.arcs[i + 1].cap
    }

    /// Solves the minimum-cost circulation and returns its cost.
    pub fn min_cost_circulation(&mut self) -> f64 {
        let n = self.adj.len();
        let mut excess = vec![0.0; n];
        let mut total = 0.0;
        for i in (0..self.arcs.len()).step_by(2) {
            if self.arcs[i].cost < 0.0 && self.arcs[i].cap > 0.0 {
                let c = self.arcs[i].cap;
                let u = self.arcs[i + 1].to;
                let v = self.arcs[i].to;
                self.arcs[i].cap = 0.0;
                self.arcs[i + 1].cap += c;
                excess[v] += c;
                excess[u] -= c;
                total += c * self.arcs[i].cost;
            }
        }
        let scale = excess.iter().map(|x: &f64| x.abs()).fold(0.0, f64::max).max(1e-300);
        let eps = scale * 1e-13;
        let s = self.add_node();
        let t = self.add_node();
        let mut need = 0.0;
        for (v, &e) in excess.iter().enumerate() {
            if e > eps {
                self.add_arc(s, v, e, 0.0);
                need += e;
            } else if e < -eps {
                self.add_arc(v, t, -e, 0.0);
            }
        }
        total += self.ssp(s, t, need, eps);
        total
    }

    fn ssp(&mut self, s: usize, t: usize, need: f64, eps: f64) -> f64 {
        let n = self.adj.len();
        let mut pot = vec![0.0; n];
        let mut sent = 0.0;
        let mut total = 0.0;
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        while need - sent > eps {
            dist.iter_mut().for_each(|d| *d = f64::INFINITY);
            prev.iter_mut().for_each(|p| *p = usize::MAX);
            dist[s] = 0.0;
            let mut heap = BinaryHeap::new();
            heap.push(Item(0.0, s));
            while let Some(Item(d, u)) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &i in &self.adj[u] {
                    let a = &self.arcs[i];
                    if a.cap <= eps {
                        continue;
                    }
                    // reduced costs are nonnegative up to rounding
                    let nd = d + (a.cost + pot[u] - pot[a.to]).max(0.0);
                    if nd < dist[a.to] {
                        dist[a.to] = nd;
                        prev[a.to] = i;
                        heap.push(Item(nd, a.to));
                    }
                }
            }
            if !dist[t].is_finite() {
                break;
            }
            for v in 0..n {
                if dist[v].is_finite() {
                    pot[v] += dist[v];
                }
            }
            let mut push = need - sent;
            let mut v = t;
            while v != s {
                let i = prev[v];
                push = push.min(self.arcs[i].cap);
                v = self.arcs[i ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let i = prev[v];
                self.arcs[i].cap -= push;
                self.arcs[i ^ 1].cap += push;
                total += push * self.arcs[i].cost;
                v = self.arcs[i ^ 1].to;
            }
            sent += push;
        }
        total
    }
}
