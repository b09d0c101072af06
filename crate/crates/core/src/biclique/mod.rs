//! Biclique covers of conflict graphs.
//!
//! Each biclique `(A, B)` of the conflict graph becomes one binary in the
//! formulation, so the cover is built greedily: repeatedly take a biclique
//! of maximum weight, where an edge weighs 1 until it is covered.

mod planar;

pub use planar::planar_cut_biclique;

use serde::{Deserialize, Serialize};

use crate::conflict::ConflictHypergraph;
use crate::error::{Error, Result};
use crate::mesh::SimplicialPartition;

/// Simple undirected graph with a bit-matrix for adjacency tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<[usize; 2]>,
    words: usize,
    adj: Vec<u64>,
}

impl Graph {
    /// Builds from edges; pairs are normalized, deduplicated and sorted.
    pub fn new(n: usize, edges: impl IntoIterator<Item = [usize; 2]>) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut es: Vec<[usize; 2]> = edges
            .into_iter()
            .filter(|e| e[0] != e[1])
            .map(|[a, b]| [a.min(b), a.max(b)])
            .collect();
        es.sort_unstable();
        es.dedup();
        let mut adj = vec![0u64; n * words];
        for &[a, b] in &es {
            adj[a * words + b / 64] |= 1 << (b % 64);
            adj[b * words + a / 64] |= 1 << (a % 64);
        }
        Graph {
            n,
            edges: es,
            words,
            adj,
        }
    }

    /// The rank-2 part of a conflict hypergraph.
    pub fn from_conflicts(hg: &ConflictHypergraph) -> Self {
        Graph::new(hg.num_vertices, hg.pairs())
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.has_edge(v, u))
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&[u.min(v), u.max(v)]).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Biclique {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl Biclique {
    pub fn new(mut a: Vec<usize>, mut b: Vec<usize>) -> Self {
        a.sort_unstable();
        b.sort_unstable();
        Biclique { a, b }
    }

    /// Disjoint, nonempty sides with every cross pair an edge of `g`.
    pub fn is_valid(&self, g: &Graph) -> bool {
        !self.a.is_empty()
            && !self.b.is_empty()
            && self.a.iter().all(|&u| self.b.iter().all(|&v| u != v && g.has_edge(u, v)))
    }

    pub fn covered_edges(&self) -> Vec<[usize; 2]> {
        let mut out: Vec<[usize; 2]> = self
            .a
            .iter()
            .flat_map(|&u| self.b.iter().map(move |&v| [u.min(v), u.max(v)]))
            .collect();
        out.sort_unstable();
        out
    }

    /// Sum of `w` over covered edges; `w` is indexed like `g.edges()`.
    pub fn weight(&self, g: &Graph, w: &[f64]) -> f64 {
        self.covered_edges()
            .iter()
            .map(|e| g.edge_index(e[0], e[1]).map_or(0.0, |i| w[i]))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicliqueCover {
    pub bicliques: Vec<Biclique>,
    pub num_edges: usize,
    /// Whether every exact search finished within its node limit.
    pub proven: bool,
}

impl BicliqueCover {
    pub fn len(&self) -> usize {
        self.bicliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bicliques.is_empty()
    }

    /// Whether the union of covered edges is exactly the edge set of `g`.
    pub fn covers(&self, g: &Graph) -> bool {
        let mut seen = vec![false; g.edges().len()];
        for bc in &self.bicliques {
            if !bc.is_valid(g) {
                return false;
            }
            for e in bc.covered_edges() {
                match g.edge_index(e[0], e[1]) {
                    Some(i) => seen[i] = true,
                    None => return false,
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Search nodes before returning the incumbent unproven.
    pub node_limit: u64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { node_limit: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub biclique: Biclique,
    pub weight: f64,
    pub proven: bool,
    pub nodes: u64,
}

struct Bnb<'a> {
    g: &'a Graph,
    n: usize,
    w: Vec<f64>,
    order: Vec<usize>,
    integral: bool,
    side: Vec<u8>,
    sum_a: Vec<f64>,
    sum_b: Vec<f64>,
    half: Vec<f64>,
    bad_a: Vec<u32>,
    bad_b: Vec<u32>,
    n_a: usize,
    n_b: usize,
    cur: f64,
    best: f64,
    best_sides: Option<Vec<u8>>,
    nodes: u64,
    limit: u64,
    aborted: bool,
}

const OUT: u8 = 0;
const SIDE_A: u8 = 1;
const SIDE_B: u8 = 2;

impl Bnb<'_> {
    fn bound(&self, depth: usize) -> f64 {
        let mut extra = 0.0;
        for &u in &self.order[depth..] {
            let mut best: f64 = 0.0;
            if self.bad_a[u] == 0 {
                best = best.max(self.sum_b[u] + self.half[u]);
            }
            if self.bad_b[u] == 0 {
                best = best.max(self.sum_a[u] + self.half[u]);
            }
            extra += best;
        }
        self.cur + extra
    }

    fn place(&mut self, v: usize, s: u8, sign: f64) {
        if s == SIDE_A {
            self.cur += sign * self.sum_b[v];
            if sign > 0.0 {
                self.n_a += 1;
            } else {
                self.n_a -= 1;
            }
        } else if s == SIDE_B {
            self.cur += sign * self.sum_a[v];
            if sign > 0.0 {
                self.n_b += 1;
            } else {
                self.n_b -= 1;
            }
        }
        for u in 0..self.n {
            let wv = self.w[u * self.n + v];
            self.half[u] -= sign * 0.5 * wv;
            if s == SIDE_A {
                self.sum_a[u] += sign * wv;
                if u != v && !self.g.has_edge(u, v) {
                    self.bad_b[u] = (self.bad_b[u] as i64 + sign as i64) as u32;
                }
            } else if s == SIDE_B {
                self.sum_b[u] += sign * wv;
                if u != v && !self.g.has_edge(u, v) {
                    self.bad_a[u] = (self.bad_a[u] as i64 + sign as i64) as u32;
                }
            }
        }
        self.side[v] = if sign > 0.0 { s } else { OUT };
    }

    fn beats(&self, bound: f64) -> bool {
        if self.integral {
            (bound + 1e-9).floor() > self.best + 0.5
        } else {
            bound > self.best + 1e-12
        }
    }

    fn search(&mut self, depth: usize) {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return;
        }
        if depth == self.order.len() {
            if self.n_a > 0 && self.n_b > 0 && self.beats(self.cur) {
                self.best = self.cur;
                self.best_sides = Some(self.side.clone());
            }
            return;
        }
        if !self.beats(self.bound(depth)) {
            return;
        }
        let v = self.order[depth];
        let mut opts: Vec<(u8, f64)> = Vec::with_capacity(3);
        if self.bad_a[v] == 0 {
            opts.push((SIDE_A, self.sum_b[v]));
        }
        // Swapping the sides gives the same biclique: the first vertex
        // placed goes to A.
        if self.bad_b[v] == 0 && self.n_a + self.n_b > 0 {
            opts.push((SIDE_B, self.sum_a[v]));
        }
        opts.sort_by(|x, y| y.1.total_cmp(&x.1));
        opts.push((OUT, 0.0));
        for (s, _) in opts {
            self.place(v, s, 1.0);
            self.search(depth + 1);
            self.place(v, s, -1.0);
            if self.aborted {
                return;
            }
        }
    }
}

/// Maximum-weight biclique by branch and bound over the in-A / in-B / out
/// state of each vertex with a positive-weight edge. The bound credits each
/// undecided vertex with its best side, counting edges to other undecided
/// vertices at half weight.
pub fn max_weight_biclique(g: &Graph, w: &[f64], opts: ExactOptions) -> Result<SearchResult> {
    let n = g.num_vertices();
    let mut dense = vec![0.0; n * n];
    let mut wdeg = vec![0.0; n];
    for (i, &[a, b]) in g.edges().iter().enumerate() {
        let x = w[i].max(0.0);
        dense[a * n + b] = x;
        dense[b * n + a] = x;
        wdeg[a] += x;
        wdeg[b] += x;
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| wdeg[v] > 0.0).collect();
    if order.is_empty() {
        return Err(Error::Infeasible);
    }
    order.sort_by(|&a, &b| wdeg[b].total_cmp(&wdeg[a]).then(a.cmp(&b)));
    // Incumbent: the heaviest star.
    let center = order[0];
    let star = Biclique::new(
        vec![center],
        g.neighbors(center).filter(|&u| dense[center * n + u] > 0.0).collect(),
    );
    let star_w = wdeg[center];
    let integral = w.iter().all(|x| x.fract() == 0.0);
    let half: Vec<f64> = (0..n).map(|v| 0.5 * wdeg[v]).collect();
    let mut s = Bnb {
        g,
        n,
        w: dense,
        order,
        integral,
        side: vec![OUT; n],
        sum_a: vec![0.0; n],
        sum_b: vec![0.0; n],
        half,
        bad_a: vec![0; n],
        bad_b: vec![0; n],
        n_a: 0,
        n_b: 0,
        cur: 0.0,
        best: star_w,
        best_sides: None,
        nodes: 0,
        limit: opts.node_limit,
        aborted: false,
    };
    s.search(0);
    let (biclique, weight) = match &s.best_sides {
        Some(sides) => (
            Biclique::new(
                (0..n).filter(|&v| sides[v] == SIDE_A).collect(),
                (0..n).filter(|&v| sides[v] == SIDE_B).collect(),
            ),
            s.best,
        ),
        None => (star, star_w),
    };
    Ok(SearchResult {
        biclique,
        weight,
        proven: !s.aborted,
        nodes: s.nodes,
    })
}

/// Best biclique over all `3^n` side assignments. Reference for small graphs.
pub fn brute_force_biclique(g: &Graph, w: &[f64]) -> Option<(Biclique, f64)> {
    let n = g.num_vertices();
    let mut best: Option<(Biclique, f64)> = None;
    for code in 0..3u64.pow(n as u32) {
        let mut x = code;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for v in 0..n {
            match x % 3 {
                1 => a.push(v),
                2 => b.push(v),
                _ => {}
            }
            x /= 3;
        }
        let bc = Biclique::new(a, b);
        if !bc.is_valid(g) {
            continue;
        }
        let wt = bc.weight(g, w);
        if wt > 0.0 && best.as_ref().is_none_or(|(_, bw)| wt > *bw) {
            best = Some((bc, wt));
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub enum CoverStrategy<'a> {
    Exact,
    /// Planar cut heuristic on `mesh` for the first `k` rounds, exact after.
    GeomThenExact {
        mesh: &'a SimplicialPartition,
        k: usize,
        n_lines: usize,
    },
}

/// Greedy cover: each round takes a maximum-weight biclique under weights
/// that are 1 on uncovered edges and 0 on covered ones.
pub fn cover_bicliques(g: &Graph, strategy: CoverStrategy, seed: u64, opts: ExactOptions) -> Result<BicliqueCover> {
    let m = g.edges().len();
    let mut w = vec![1.0; m];
    let mut left = m;
    let mut bicliques = Vec::new();
    let mut proven = true;
    while left > 0 {
        let round = bicliques.len();
        let mut pick = None;
        if let CoverStrategy::GeomThenExact { mesh, k, n_lines } = strategy {
            if round < k {
                match planar_cut_biclique(mesh, g, &w, n_lines, seed.wrapping_add(round as u64)) {
                    Ok((bc, wt)) if wt > 0.0 => pick = Some(bc),
                    Ok(_) | Err(Error::NoCandidate) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        let bc = match pick {
            Some(bc) => bc,
            None => {
                let r = max_weight_biclique(g, &w, opts)?;
                proven &= r.proven;
                r.biclique
            }
        };
        let before = left;
        for e in bc.covered_edges() {
            if let Some(i) = g.edge_index(e[0], e[1]) {
                if w[i] > 0.0 {
                    w[i] = 0.0;
                    left -= 1;
                }
            }
        }
        debug_assert!(left < before);
        bicliques.push(bc);
    }
    Ok(BicliqueCover {
        bicliques,
        num_edges: m,
        proven,
    })
}

/// Smallest number of bicliques covering `g`, by iterative deepening over
/// covers drawn from all maximal bicliques. Reference for tiny graphs.
pub fn brute_force_min_cover(g: &Graph) -> usize {
    let n = g.num_vertices();
    let m = g.edges().len();
    if m == 0 {
        return 0;
    }
    let mut masks: Vec<u128> = Vec::new();
    for code in 0..3u64.pow(n as u32) {
        let mut x = code;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for v in 0..n {
            match x % 3 {
                1 => a.push(v),
                2 => b.push(v),
                _ => {}
            }
            x /= 3;
        }
        let bc = Biclique::new(a, b);
        if bc.is_valid(g) {
            let mask = bc
                .covered_edges()
                .iter()
                .fold(0u128, |acc, e| acc | 1 << g.edge_index(e[0], e[1]).unwrap());
            masks.push(mask);
        }
    }
    masks.sort_unstable();
    masks.dedup();
    let full = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
    fn reach(masks: &[u128], full: u128, acc: u128, k: usize) -> bool {
        if acc == full {
            return true;
        }
        if k == 0 {
            return false;
        }
        let first = (!acc & full).trailing_zeros();
        masks
            .iter()
            .filter(|&&mk| mk >> first & 1 == 1)
            .any(|&mk| reach(masks, full, acc | mk, k - 1))
    }
    (1..=m).find(|&k| reach(&masks, full, 0, k)).unwrap_or(m)
}

/// Graph file: vertex count, edges and optional weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl GraphFile {
    pub fn from_graph(g: &Graph) -> Self {
        GraphFile {
            vertices: g.num_vertices(),
            edges: g.edges().to_vec(),
            weights: None,
        }
    }

    /// The graph and its edge weights (1 when absent), in graph edge order.
    pub fn into_graph(self) -> Result<(Graph, Vec<f64>)> {
        if let Some(e) = self.edges.iter().find(|e| e[0] >= self.vertices || e[1] >= self.vertices) {
            return Err(Error::Validation(format!("edge {e:?} out of range")));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.edges.len() {
                return Err(Error::Validation("weights and edges differ in length".into()));
            }
        }
        let g = Graph::new(self.vertices, self.edges.iter().copied());
        let mut w = vec![1.0; g.edges().len()];
        if let Some(ws) = &self.weights {
            for (e, &x) in self.edges.iter().zip(ws) {
                if let Some(i) = g.edge_index(e[0], e[1]) {
                    w[i] = x;
                }
            }
        }
        Ok((g, w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::{build_conflict_hypergraph, DEFAULT_BUDGET};
    use crate::mesh::random_delaunay;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
        let mut es = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    es.push([a, b]);
                }
            }
        }
        Graph::new(n, es)
    }

    #[test]
    fn single_edge_and_star() {
        let g = Graph::new(2, [[0, 1]]);
        let r = max_weight_biclique(&g, &[1.0], ExactOptions::default()).unwrap();
        assert_eq!(r.weight, 1.0);
        assert!(r.biclique.is_valid(&g));
        let g = Graph::new(6, (1..6).map(|i| [0, i]));
        let r = max_weight_biclique(&g, &[1.0; 5], ExactOptions::default()).unwrap();
        assert_eq!(r.weight, 5.0);
        assert_eq!(r.biclique, Biclique::new(vec![0], vec![1, 2, 3, 4, 5]));
        assert!(matches!(
            max_weight_biclique(&Graph::new(3, []), &[], ExactOptions::default()),
            Err(Error::Infeasible)
        ));
    }

    #[test]
    fn exact_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let g = random_graph(8, 0.5, &mut rng);
            if g.edges().is_empty() {
                continue;
            }
            let w: Vec<f64> = g.edges().iter().map(|_| rng.gen_range(0.0..3.0)).collect();
            let r = max_weight_biclique(&g, &w, ExactOptions::default()).unwrap();
            let (_, bw) = brute_force_biclique(&g, &w).unwrap();
            assert!(r.proven && r.biclique.is_valid(&g));
            assert!((r.weight - bw).abs() < 1e-9, "{} vs {bw}", r.weight);
            assert!((r.biclique.weight(&g, &w) - r.weight).abs() < 1e-9);
        }
    }

    #[test]
    fn four_cycle() {
        let g = Graph::new(4, [[0, 1], [1, 2], [2, 3], [0, 3]]);
        let c = cover_bicliques(&g, CoverStrategy::Exact, 0, ExactOptions::default()).unwrap();
        assert!(c.covers(&g));
        assert_eq!(c.len(), brute_force_min_cover(&g));
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn edgeless_graph_has_empty_cover() {
        let c = cover_bicliques(&Graph::new(4, []), CoverStrategy::Exact, 0, ExactOptions::default()).unwrap();
        assert!(c.is_empty() && c.proven);
    }

    #[test]
    fn mesh_cover() {
        let p = random_delaunay(10, 4, 1);
        let hg = build_conflict_hypergraph(&p.to_set_system(), 3, DEFAULT_BUDGET).unwrap();
        let g = Graph::from_conflicts(&hg);
        let c = cover_bicliques(&g, CoverStrategy::Exact, 0, ExactOptions::default()).unwrap();
        assert!(c.covers(&g) && c.proven);
        assert!(c.len() < g.num_vertices());
        let geo = cover_bicliques(
            &g,
            CoverStrategy::GeomThenExact { mesh: &p, k: 4, n_lines: 200 },
            3,
            ExactOptions::default(),
        )
        .unwrap();
        assert!(geo.covers(&g));
    }

    #[test]
    fn graph_file_round_trip() {
        let g = Graph::new(4, [[2, 1], [0, 3]]);
        let f = GraphFile::from_graph(&g);
        let text = serde_json::to_string(&f).unwrap();
        let (h, w) = serde_json::from_str::<GraphFile>(&text).unwrap().into_graph().unwrap();
        assert_eq!(g, h);
        assert_eq!(w, vec![1.0, 1.0]);
        let bad = GraphFile { vertices: 2, edges: vec![[0, 5]], weights: None };
        assert!(bad.into_graph().is_err());
    }
}
