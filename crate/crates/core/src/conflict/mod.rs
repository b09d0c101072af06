//! Conflict hypergraphs: the minimal vertex sets contained in no simplex.
//!
//! For a simplicial partition of dimension `d` no minimal conflict has more
//! than `d + 1` vertices, so enumeration stops there. Splitting an edge
//! `{u, v}` kills every larger conflict through both endpoints, and every
//! conflict it creates contains the new vertex, which keeps updates local.

mod reduce;

pub use reduce::{count_split_effect, reduce_rank, split_edge, update_after_split, ReduceOptions, SplitRecord, ValueRule};

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::mesh::SetSystem;

pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Hyperedges sorted by size, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictHypergraph {
    pub num_vertices: usize,
    pub edges: Vec<Vec<usize>>,
}

impl ConflictHypergraph {
    pub fn new(num_vertices: usize, mut edges: Vec<Vec<usize>>) -> Self {
        for e in &mut edges {
            e.sort_unstable();
        }
        edges.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        edges.dedup();
        ConflictHypergraph { num_vertices, edges }
    }

    pub fn rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of hyperedges per size.
    pub fn counts_by_size(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for e in &self.edges {
            *m.entry(e.len()).or_default() += 1;
        }
        m
    }

    /// The rank-2 conflict graph as sorted pairs.
    pub fn pairs(&self) -> Vec<[usize; 2]> {
        self.edges.iter().filter(|e| e.len() == 2).map(|e| [e[0], e[1]]).collect()
    }

    pub fn high_rank(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.edges.iter().filter(|e| e.len() >= 3)
    }
}

/// Feasibility oracle over a set system using per-vertex incidence bitsets.
#[derive(Debug, Clone)]
pub struct Feasibility {
    words: usize,
    bits: Vec<Vec<u64>>,
}

impl Feasibility {
    pub fn new(s: &SetSystem) -> Self {
        let words = s.sets.len().div_ceil(64).max(1);
        let mut bits = vec![vec![0u64; words]; s.num_vertices];
        for (i, set) in s.sets.iter().enumerate() {
            for &v in set {
                bits[v][i / 64] |= 1 << (i % 64);
            }
        }
        Feasibility { words, bits }
    }

    /// Whether some set contains every vertex of `xs` (true for empty `xs`).
    pub fn feasible(&self, xs: &[usize]) -> bool {
        let Some((&first, rest)) = xs.split_first() else { return true };
        (0..self.words).any(|w| rest.iter().fold(self.bits[first][w], |acc, &v| acc & self.bits[v][w]) != 0)
    }

    /// Whether `xs` is infeasible while each set obtained by dropping one
    /// element is feasible.
    pub fn is_minimal_infeasible(&self, xs: &[usize]) -> bool {
        if self.feasible(xs) {
            return false;
        }
        let mut sub = Vec::with_capacity(xs.len());
        (0..xs.len()).all(|i| {
            sub.clear();
            sub.extend(xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
            self.feasible(&sub)
        })
    }
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Minimal infeasible sets with at most `max_size` vertices.
///
/// Candidates of size `k` are joins of two feasible `(k-1)`-sets sharing
/// their first `k-2` elements, so only sets whose every proper subset is
/// feasible are ever tested. `budget` caps the number of candidates.
pub fn build_conflict_hypergraph(s: &SetSystem, max_size: usize, budget: u128) -> Result<ConflictHypergraph> {
    let feas = Feasibility::new(s);
    let n = s.num_vertices;
    let mut used = vec![false; n];
    for set in &s.sets {
        for &v in set {
            used[v] = true;
        }
    }
    let mut edges = Vec::new();
    let mut candidates: u128 = binom(used.iter().filter(|&&u| u).count(), 2);
    if candidates > budget {
        return Err(Error::SizeLimit { candidates, limit: budget });
    }
    // Feasible sets of the current size, sorted.
    let mut level: Vec<Vec<usize>> = (0..n).filter(|&v| used[v]).map(|v| vec![v]).collect();
    for k in 2..=max_size {
        let faces: HashSet<&[usize]> = level.iter().map(|f| f.as_slice()).collect();
        let mut next = Vec::new();
        let mut i = 0;
        while i < level.len() {
            let prefix = &level[i][..k - 2];
            let mut j = i;
            while j < level.len() && &level[j][..k - 2] == prefix {
                j += 1;
            }
            let group = j - i;
            candidates += (group * (group - 1) / 2) as u128;
            if candidates > budget {
                return Err(Error::SizeLimit { candidates, limit: budget });
            }
            for a in i..j {
                for b in a + 1..j {
                    let mut c = level[a].clone();
                    c.push(level[b][k - 2]);
                    let mut sub = Vec::with_capacity(k - 1);
                    let all_faces = (0..k - 2).all(|drop| {
                        sub.clear();
                        sub.extend(c.iter().enumerate().filter(|&(t, _)| t != drop).map(|(_, &v)| v));
                        faces.contains(sub.as_slice())
                    });
                    if !all_faces {
                        continue;
                    }
                    if feas.feasible(&c) {
                        next.push(c);
                    } else {
                        edges.push(c);
                    }
                }
            }
            i = j;
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    Ok(ConflictHypergraph::new(n, edges))
}

/// Every minimal infeasible set of at most `max_size` vertices, by testing
/// all subsets. Exponential; meant as a reference for small instances.
pub fn brute_force_conflicts(s: &SetSystem, max_size: usize) -> ConflictHypergraph {
    let feas = Feasibility::new(s);
    let n = s.num_vertices;
    let mut edges = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, max: usize, cur: &mut Vec<usize>, feas: &Feasibility, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() && feas.is_minimal_infeasible(cur) {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, max, cur, feas, out);
            cur.pop();
        }
    }
    rec(0, n, max_size, &mut cur, &feas, &mut edges);
    ConflictHypergraph::new(n, edges)
}
