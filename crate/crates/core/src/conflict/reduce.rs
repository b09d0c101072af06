//! Edge splitting and the greedy rank-reduction loop.

use std::collections::BTreeMap;

use super::{build_conflict_hypergraph, ConflictHypergraph, Feasibility};
use crate::error::{Error, Result};
use crate::mesh::SimplicialPartition;

/// How the value at a split point is chosen.
#[derive(Clone, Copy)]
pub enum ValueRule<'a> {
    /// Keep the interpolant unchanged: the mean of the endpoint values.
    Preserve,
    /// Evaluate a function at the midpoint (changes the interpolant).
    Evaluate(&'a dyn Fn(&[f64]) -> f64),
}

impl ValueRule<'_> {
    fn value(&self, p: &SimplicialPartition, u: usize, v: usize) -> f64 {
        match self {
            ValueRule::Preserve => 0.5 * (p.values[u] + p.values[v]),
            ValueRule::Evaluate(f) => {
                let mid: Vec<f64> = p.points[u].iter().zip(&p.points[v]).map(|(a, b)| 0.5 * (a + b)).collect();
                f(&mid)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitRecord {
    pub u: usize,
    pub v: usize,
    pub w: usize,
    /// Rank at the time of the split.
    pub k: usize,
    /// Rank-k conflicts removed and created by the split.
    pub eliminated: usize,
    pub created: usize,
}

/// Feasibility after splitting `{u, v}` with a new vertex `w`, answered
/// through the oracle of the unsplit system.
struct SplitView<'a> {
    old: &'a Feasibility,
    u: usize,
    v: usize,
    w: usize,
}

impl SplitView<'_> {
    fn feasible(&self, xs: &[usize]) -> bool {
        let (hu, hv) = (xs.contains(&self.u), xs.contains(&self.v));
        if hu && hv {
            return false;
        }
        if xs.contains(&self.w) {
            // X - w must fit in some simplex that held the edge.
            let mut y: Vec<usize> = xs.iter().copied().filter(|&x| x != self.w).collect();
            if !hu {
                y.push(self.u);
            }
            if !hv {
                y.push(self.v);
            }
            self.old.feasible(&y)
        } else {
            self.old.feasible(xs)
        }
    }

    fn minimal_infeasible(&self, xs: &[usize]) -> bool {
        if self.feasible(xs) {
            return false;
        }
        let mut sub = Vec::with_capacity(xs.len());
        (0..xs.len()).all(|i| {
            sub.clear();
            sub.extend(xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
            self.feasible(&sub)
        })
    }

    /// Old vertices sharing a simplex with `w` after the split.
    fn link(&self) -> Vec<usize> {
        (0..self.w).filter(|&x| self.feasible(&[x, self.w])).collect()
    }

    /// New minimal conflicts through `w` with sizes in `sizes`. Members other
    /// than `w` must share a simplex with it, so only link subsets are tried.
    fn conflicts_through_w(&self, sizes: std::ops::RangeInclusive<usize>) -> Vec<Vec<usize>> {
        let link = self.link();
        let mut out = Vec::new();
        if sizes.contains(&2) {
            let mut it = link.iter().peekable();
            for x in 0..self.w {
                if it.peek() == Some(&&x) {
                    it.next();
                } else {
                    out.push(vec![x, self.w]);
                }
            }
        }
        let mut cur = Vec::new();
        fn rec(
            view: &SplitView,
            link: &[usize],
            start: usize,
            want: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if cur.len() == want {
                cur.push(view.w);
                if view.minimal_infeasible(cur) {
                    out.push(cur.clone());
                }
                cur.pop();
                return;
            }
            for i in start..link.len() {
                cur.push(link[i]);
                rec(view, link, i + 1, want, cur, out);
                cur.pop();
            }
        }
        for size in (*sizes.start()).max(3)..=*sizes.end() {
            rec(self, &link, 0, size - 1, &mut cur, &mut out);
        }
        out
    }
}

fn rank_k_counts(hg: &ConflictHypergraph, k: usize) -> BTreeMap<(usize, usize), usize> {
    let mut m = BTreeMap::new();
    for e in hg.edges.iter().filter(|e| e.len() >= k) {
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                *m.entry((e[i], e[j])).or_default() += 1;
            }
        }
    }
    m
}

fn effect(feas: &Feasibility, hg: &ConflictHypergraph, n: usize, u: usize, v: usize, k: usize) -> (usize, usize) {
    let r = hg
        .edges
        .iter()
        .filter(|e| e.len() == k && e.binary_search(&u).is_ok() && e.binary_search(&v).is_ok())
        .count();
    let view = SplitView { old: feas, u, v, w: n };
    let c = view.conflicts_through_w(k..=k).len();
    (r, c)
}

/// Rank-`k` conflicts removed (`r`) and created (`c`) by splitting `{u, v}`.
pub fn count_split_effect(p: &SimplicialPartition, hg: &ConflictHypergraph, u: usize, v: usize, k: usize) -> (usize, usize) {
    let feas = Feasibility::new(&p.to_set_system());
    let (u, v) = (u.min(v), u.max(v));
    effect(&feas, hg, p.num_vertices(), u, v, k)
}

/// Conflict hypergraph after splitting `{u, v}` with vertex `w`, derived
/// from the hypergraph and oracle of the unsplit system.
pub fn update_after_split(
    hg: &ConflictHypergraph,
    old: &Feasibility,
    u: usize,
    v: usize,
    w: usize,
    max_size: usize,
) -> ConflictHypergraph {
    let (u, v) = (u.min(v), u.max(v));
    let mut edges: Vec<Vec<usize>> = hg
        .edges
        .iter()
        .filter(|e| !(e.binary_search(&u).is_ok() && e.binary_search(&v).is_ok()))
        .cloned()
        .collect();
    edges.push(vec![u, v]);
    let view = SplitView { old, u, v, w };
    edges.extend(view.conflicts_through_w(2..=max_size));
    ConflictHypergraph::new(w + 1, edges)
}

/// Splits `{u, v}` at its midpoint and updates the hypergraph in place of a
/// rebuild.
pub fn split_edge(
    p: &SimplicialPartition,
    hg: &ConflictHypergraph,
    u: usize,
    v: usize,
    rule: ValueRule,
) -> Result<(SimplicialPartition, ConflictHypergraph, SplitRecord)> {
    let (u, v) = (u.min(v), u.max(v));
    let feas = Feasibility::new(&p.to_set_system());
    if u == v || v >= p.num_vertices() || !feas.feasible(&[u, v]) {
        return Err(Error::NotAnEdge(u, v));
    }
    let k = hg.rank();
    let (eliminated, created) = effect(&feas, hg, p.num_vertices(), u, v, k);
    let mut q = p.clone();
    let w = q.split_edge(u, v, rule.value(p, u, v))?;
    let next = update_after_split(hg, &feas, u, v, w, p.dim + 1);
    Ok((
        q,
        next,
        SplitRecord {
            u,
            v,
            w,
            k,
            eliminated,
            created,
        },
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct ReduceOptions {
    pub max_splits: usize,
    /// Rebuild the hypergraph after each split and fail on any mismatch.
    pub check_rebuild: bool,
    pub budget: u128,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            max_splits: 10_000,
            check_rebuild: false,
            budget: super::DEFAULT_BUDGET,
        }
    }
}

/// Greedy rank reduction: while the rank `k` is at least 3, split the edge
/// inside a rank-`k` conflict that maximizes eliminated minus created
/// rank-`k` conflicts (ties to the smallest pair), stopping when no split
/// gains.
pub fn reduce_rank(
    p: &SimplicialPartition,
    rule: ValueRule,
    opts: ReduceOptions,
) -> Result<(SimplicialPartition, ConflictHypergraph, Vec<SplitRecord>)> {
    let mut p = p.clone();
    let max_size = p.dim + 1;
    let mut hg = build_conflict_hypergraph(&p.to_set_system(), max_size, opts.budget)?;
    let mut records = Vec::new();
    while records.len() < opts.max_splits {
        let k = hg.rank();
        if k < 3 {
            break;
        }
        let feas = Feasibility::new(&p.to_set_system());
        let mut best: Option<((usize, usize), isize, usize, usize)> = None;
        for &(u, v) in rank_k_counts(&hg, k).keys() {
            let (r, c) = effect(&feas, &hg, p.num_vertices(), u, v, k);
            let delta = r as isize - c as isize;
            if best.is_none_or(|b| delta > b.1) {
                best = Some(((u, v), delta, r, c));
            }
        }
        let Some(((u, v), delta, r, c)) = best else { break };
        if delta <= 0 {
            break;
        }
        let w = p.split_edge(u, v, rule.value(&p, u, v))?;
        hg = update_after_split(&hg, &feas, u, v, w, max_size);
        if opts.check_rebuild {
            let fresh = build_conflict_hypergraph(&p.to_set_system(), max_size, opts.budget)?;
            if fresh != hg {
                return Err(Error::Validation(format!("incremental update diverged after splitting ({u}, {v})")));
            }
        }
        records.push(SplitRecord {
            u,
            v,
            w,
            k,
            eliminated: r,
            created: c,
        });
    }
    Ok((p, hg, records))
}
