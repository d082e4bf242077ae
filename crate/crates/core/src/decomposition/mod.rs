//! Cycle removal, good decompositions into weighted simple curves, and cuts of
//! curve families at first exits and last entries.

mod curve;

pub use curve::{first_exit, last_entry, reconstruct, restrict_curve, Curve, PathMeasure};

use crate::currents::{TrafficPath, ZERO_MASS};
use crate::error::{Error, Result};
use crate::geometry::{Ball, BallRegion, Point};
use crate::scalar::Real;

/// Edge indices of some directed cycle of the support digraph, if any.
fn find_cycle<S: Real>(t: &TrafficPath<S>) -> Option<Vec<usize>> {
    let out = t.out_edges();
    let n = t.vertices.len();
    // 0 = unseen, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut via = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        state[root] = 1;
        while let Some(top) = stack.last_mut() {
            let v = top.0;
            if top.1 < out[v].len() {
                let e = out[v][top.1];
                top.1 += 1;
                let w = t.edges[e].head;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        via[w] = e;
                        stack.push((w, 0));
                    }
                    1 => {
                        let mut cyc = vec![e];
                        let mut x = v;
                        while x != w {
                            let ei = via[x];
                            cyc.push(ei);
                            x = t.edges[ei].tail;
                        }
                        cyc.reverse();
                        return Some(cyc);
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

pub fn is_acyclic<S: Real>(t: &TrafficPath<S>) -> bool {
    find_cycle(t).is_none()
}

/// Cancels directed cycles until the support is acyclic. The boundary is kept
/// and the mass does not increase.
pub fn remove_cycles<S: Real>(t: &TrafficPath<S>) -> TrafficPath<S> {
    let mut out = t.clone();
    while let Some(cyc) = find_cycle(&out) {
        let m = cyc.iter().map(|&e| out.edges[e].theta).fold(S::infinity(), S::min);
        for &e in &cyc {
            out.edges[e].theta -= m;
        }
        // the bottleneck edge must vanish even under rounding
        if let Some(&e) = cyc.iter().find(|&&e| out.edges[e].theta <= S::tol(ZERO_MASS)) {
            out.edges[e].theta = S::zero();
        }
        out.edges.retain(|e| e.theta > S::tol(ZERO_MASS));
    }
    out.compact();
    out
}

/// Decomposes an acyclic traffic path into weighted simple curves from the
/// negative to the positive part of its boundary.
pub fn good_decomposition<S: Real>(t: &TrafficPath<S>) -> Result<PathMeasure<S>> {
    if !is_acyclic(t) {
        return Err(Error::NotAcyclic);
    }
    let n = t.vertices.len();
    let mut excess = vec![S::zero(); n];
    for e in &t.edges {
        excess[e.head] += e.theta;
        excess[e.tail] -= e.theta;
    }
    let scale = t.max_theta().max(S::one());
    let zero = S::tol(ZERO_MASS) * scale;
    let pos: S = excess.iter().filter(|x| **x > zero).copied().sum();
    let neg: S = excess.iter().filter(|x| **x < -zero).map(|x| -*x).sum();
    if (pos - neg).abs() > S::tol(1e-9) * scale {
        return Err(Error::Unbalanced { positive: pos.f64(), negative: neg.f64() });
    }
    let mut residual: Vec<S> = t.edges.iter().map(|e| e.theta).collect();
    let mut out = t.out_edges();
    for list in &mut out {
        list.sort_by(|&a, &b| t.vertices[t.edges[a].head].lex_cmp(&t.vertices[t.edges[b].head]));
    }
    let mut deficit: Vec<S> = excess.iter().map(|x| (-*x).max(S::zero())).collect();
    let mut surplus: Vec<S> = excess.iter().map(|x| x.max(S::zero())).collect();
    let mut sources: Vec<usize> = (0..n).filter(|&v| deficit[v] > zero).collect();
    sources.sort_by(|&a, &b| t.vertices[a].lex_cmp(&t.vertices[b]));
    let mut entries = Vec::new();
    let cap = t.edges.len() + 2 * n + 1;
    for &s in &sources {
        let mut guard = 0;
        while deficit[s] > zero && guard < cap {
            guard += 1;
            let mut walk = vec![s];
            let mut used = Vec::new();
            let mut v = s;
            loop {
                match out[v].iter().find(|&&e| residual[e] > zero) {
                    Some(&e) => {
                        used.push(e);
                        v = t.edges[e].head;
                        walk.push(v);
                    }
                    None => break,
                }
            }
            if used.is_empty() {
                deficit[s] = S::zero();
                break;
            }
            // bottleneck, then force its attaining quantity to exactly zero
            let mut w = deficit[s].min(surplus[v]);
            for &e in &used {
                w = w.min(residual[e]);
            }
            if w <= S::zero() {
                surplus[v] = S::zero();
                continue;
            }
            deficit[s] -= w;
            surplus[v] -= w;
            for &e in &used {
                residual[e] -= w;
                if residual[e] <= zero {
                    residual[e] = S::zero();
                }
            }
            if deficit[s] <= zero {
                deficit[s] = S::zero();
            }
            if surplus[v] <= zero {
                surplus[v] = S::zero();
            }
            entries.push((Curve::new(walk.iter().map(|&i| t.vertices[i]).collect()), w));
        }
    }
    Ok(PathMeasure::new(entries))
}

/// Which end of each curve is cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutMode {
    /// Keep `[0, first exit from the parent ball]` of curves starting in a cell.
    FromStart,
    /// Keep `[last entry into the parent ball, end]` of curves ending in a cell.
    FromLastEntry,
}

/// A cell together with the ball it was carved from.
#[derive(Debug, Clone, PartialEq)]
pub struct CellWithParent<S> {
    pub cell: BallRegion<S>,
    pub parent: Ball<S>,
}

/// Start and end measures of `pi` share no atom.
pub fn endpoints_mutually_singular<S: Real>(pi: &PathMeasure<S>) -> bool {
    let starts = pi.start_measure();
    let ends = pi.end_measure();
    let tol = S::tol(crate::currents::GEOM_TOL);
    !starts.atoms.iter().any(|(p, _)| ends.atoms.iter().any(|(q, _)| p.dist(q) <= tol))
}

/// Cut family: each curve whose relevant endpoint lies in a cell is restricted at
/// the parent ball; other curves are dropped.
pub fn cut_decomposition<S: Real>(
    pi: &PathMeasure<S>,
    cells: &[CellWithParent<S>],
    mode: CutMode,
) -> Result<PathMeasure<S>> {
    if !endpoints_mutually_singular(pi) {
        return Err(Error::NotMutuallySingular);
    }
    let mut entries = Vec::new();
    for (c, w) in &pi.entries {
        let anchor = match mode {
            CutMode::FromStart => c.start(),
            CutMode::FromLastEntry => c.end(),
        };
        let Some(cell) = cells.iter().find(|cp| cp.cell.contains(&anchor)) else { continue };
        let parent = BallRegion::ball(cell.parent);
        let piece = match mode {
            CutMode::FromStart => {
                let t = first_exit(c, &parent);
                if t.is_infinite() {
                    Some(c.clone())
                } else {
                    restrict_curve(c, S::zero(), t)?
                }
            }
            CutMode::FromLastEntry => {
                let t = last_entry(c, &parent);
                restrict_curve(c, t, c.length())?
            }
        };
        if let Some(p) = piece {
            entries.push((p, *w));
        }
    }
    Ok(PathMeasure::new(entries))
}

/// Current of the cut family.
pub fn cut_paths<S: Real>(pi: &PathMeasure<S>, cells: &[CellWithParent<S>], mode: CutMode) -> Result<TrafficPath<S>> {
    Ok(reconstruct(&cut_decomposition(pi, cells, mode)?))
}

/// Keeps the curves satisfying `keep` and returns them with their current.
pub fn sub_decomposition<S: Real>(
    pi: &PathMeasure<S>,
    keep: impl Fn(&Curve<S>) -> bool,
) -> (PathMeasure<S>, TrafficPath<S>) {
    let sub = PathMeasure::new(pi.entries.iter().filter(|(c, _)| keep(c)).cloned().collect());
    let t = reconstruct(&sub);
    (sub, t)
}

/// Predicate: curve starts in `a` and ends in `b`.
pub fn starts_and_ends_in<'a, S: Real>(a: &'a BallRegion<S>, b: &'a BallRegion<S>) -> impl Fn(&Curve<S>) -> bool + 'a {
    move |c| a.contains(&c.start()) && b.contains(&c.end())
}

/// Endpoints of a curve, convenience for predicates.
pub fn endpoints<S: Real>(c: &Curve<S>) -> (Point<S>, Point<S>) {
    (c.start(), c.end())
}
