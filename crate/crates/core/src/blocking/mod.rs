//! Blocking hypergraphs and their colorings.
//!
//! A set of simplices is blocking when the union of their vertices contains
//! a conflict of size at least 3. Coloring the simplices so that no minimal
//! blocking set is monochromatic lets one binary per color exclude all those
//! conflicts at once.

pub mod sat;

use std::collections::BTreeSet;

use crate::conflict::ConflictHypergraph;
use crate::error::{Error, Result};
use crate::mesh::SetSystem;
use sat::Cnf;

/// Minimal blocking sets over simplex ids, sorted by size then
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingHypergraph {
    pub num_simplices: usize,
    pub edges: Vec<Vec<usize>>,
}

impl BlockingHypergraph {
    fn new(num_simplices: usize, edges: BTreeSet<Vec<usize>>) -> Self {
        let mut edges: Vec<Vec<usize>> = edges.into_iter().collect();
        edges.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        BlockingHypergraph { num_simplices, edges }
    }

    pub fn rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Detects whether a vertex set contains one of the large conflicts.
struct BlockTest<'a> {
    large: Vec<&'a Vec<usize>>,
    by_vertex: Vec<Vec<usize>>,
}

impl<'a> BlockTest<'a> {
    fn new(hg: &'a ConflictHypergraph) -> Self {
        let large: Vec<&Vec<usize>> = hg.high_rank().collect();
        let mut by_vertex = vec![Vec::new(); hg.num_vertices];
        for (i, c) in large.iter().enumerate() {
            by_vertex[c[0]].push(i);
        }
        BlockTest { large, by_vertex }
    }

    /// `union` must be sorted.
    fn blocks(&self, union: &[usize]) -> bool {
        union.iter().any(|&v| {
            self.by_vertex[v]
                .iter()
                .any(|&i| self.large[i].iter().all(|x| union.binary_search(x).is_ok()))
        })
    }

    fn is_minimal_blocking(&self, s: &SetSystem, b: &[usize]) -> bool {
        if !self.blocks(&union_of(s, b)) {
            return false;
        }
        (0..b.len()).all(|i| {
            let rest: Vec<usize> = b.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            !self.blocks(&union_of(s, &rest))
        })
    }
}

fn union_of(s: &SetSystem, b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = b.iter().flat_map(|&i| s.sets[i].iter().copied()).collect();
    u.sort_unstable();
    u.dedup();
    u
}

/// Minimal blocking sets. Each is a minimal cover of some large conflict
/// `C` by simplices meeting `C`, so covers are grown one simplex at a time,
/// each adding an uncovered vertex of `C`. `budget` caps the covers tried.
pub fn build_blocking_hypergraph(s: &SetSystem, hg: &ConflictHypergraph, budget: u128) -> Result<BlockingHypergraph> {
    let test = BlockTest::new(hg);
    let inc = s.incidence();
    let mut found = BTreeSet::new();
    let mut visited: u128 = 0;
    for c in hg.high_rank() {
        let mut touching: Vec<usize> = c.iter().flat_map(|&v| inc[v].iter().copied()).collect();
        touching.sort_unstable();
        touching.dedup();
        // Bitmask over positions in C covered by each touching simplex.
        let masks: Vec<u32> = touching
            .iter()
            .map(|&t| {
                c.iter()
                    .enumerate()
                    .filter(|(_, v)| s.sets[t].binary_search(v).is_ok())
                    .fold(0u32, |m, (i, _)| m | 1 << i)
            })
            .collect();
        let full = (1u32 << c.len()) - 1;
        let mut stack: Vec<(usize, u32, Vec<usize>)> = vec![(0, 0, Vec::new())];
        while let Some((start, covered, chosen)) = stack.pop() {
            visited += 1;
            if visited > budget {
                return Err(Error::SizeLimit {
                    candidates: visited,
                    limit: budget,
                });
            }
            if covered == full {
                let b: Vec<usize> = chosen.iter().map(|&i| touching[i]).collect();
                if test.is_minimal_blocking(s, &b) {
                    found.insert(b);
                }
                continue;
            }
            if chosen.len() == c.len() {
                continue;
            }
            for i in (start..touching.len()).rev() {
                if masks[i] & !covered != 0 {
                    let mut next = chosen.clone();
                    next.push(i);
                    stack.push((i + 1, covered | masks[i], next));
                }
            }
        }
    }
    Ok(BlockingHypergraph::new(s.sets.len(), found))
}

/// Every minimal blocking set of at most `max_size` simplices, by testing
/// all subsets. Reference for small instances.
pub fn brute_force_blocking(s: &SetSystem, hg: &ConflictHypergraph, max_size: usize) -> BlockingHypergraph {
    let test = BlockTest::new(hg);
    let m = s.sets.len();
    let mut found = BTreeSet::new();
    let mut cur = Vec::new();
    fn rec(s: &SetSystem, test: &BlockTest, m: usize, start: usize, max: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if !cur.is_empty() && test.is_minimal_blocking(s, cur) {
            out.insert(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(s, test, m, i + 1, max, cur, out);
            cur.pop();
        }
    }
    rec(s, &test, m, 0, max_size, &mut cur, &mut found);
    BlockingHypergraph::new(m, found)
}

/// Colors `gamma[i]` in `0..q` for each simplex.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Coloring {
    pub q: usize,
    pub gamma: Vec<usize>,
}

impl Coloring {
    pub fn trivial(m: usize) -> Self {
        Coloring { q: 1, gamma: vec![0; m] }
    }

    pub fn is_valid(&self, bh: &BlockingHypergraph) -> bool {
        self.gamma.len() == bh.num_simplices
            && self.gamma.iter().all(|&c| c < self.q)
            && bh.edges.iter().all(|b| b.iter().any(|&i| self.gamma[i] != self.gamma[b[0]]))
    }

    /// Simplices of each color.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut k = vec![Vec::new(); self.q];
        for (i, &c) in self.gamma.iter().enumerate() {
            k[c].push(i);
        }
        k
    }

    /// Sorted colors of the simplices containing each vertex.
    pub fn patterns(&self, s: &SetSystem) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); s.num_vertices];
        for (i, set) in s.sets.iter().enumerate() {
            for &v in set {
                p[v].push(self.gamma[i]);
            }
        }
        for x in &mut p {
            x.sort_unstable();
            x.dedup();
        }
        p
    }
}

fn var(i: usize, c: usize, q: usize) -> i32 {
    (i * q + c + 1) as i32
}

/// Every simplex gets exactly one color and no blocking set is
/// monochromatic; variable `i * q + c + 1` means simplex `i` has color `c`.
pub fn coloring_cnf(bh: &BlockingHypergraph, q: usize) -> Cnf {
    let m = bh.num_simplices;
    let mut clauses = Vec::new();
    for i in 0..m {
        clauses.push((0..q).map(|c| var(i, c, q)).collect());
        for c in 0..q {
            for c2 in c + 1..q {
                clauses.push(vec![-var(i, c, q), -var(i, c2, q)]);
            }
        }
    }
    for b in &bh.edges {
        for c in 0..q {
            clauses.push(b.iter().map(|&i| -var(i, c, q)).collect());
        }
    }
    Cnf { num_vars: m * q, clauses }
}

/// Reads a coloring from a model of [`coloring_cnf`].
pub fn decode_coloring(model: &[bool], m: usize, q: usize) -> Option<Coloring> {
    let gamma: Option<Vec<usize>> = (0..m).map(|i| (0..q).find(|&c| model[i * q + c])).collect();
    gamma.map(|gamma| Coloring { q, gamma })
}

/// Welsh-Powell coloring of the graph formed by the 2-element edges.
pub fn greedy_pair_coloring(bh: &BlockingHypergraph) -> Coloring {
    let m = bh.num_simplices;
    let mut adj = vec![Vec::new(); m];
    for b in bh.edges.iter().filter(|b| b.len() == 2) {
        adj[b[0]].push(b[1]);
        adj[b[1]].push(b[0]);
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| adj[b].len().cmp(&adj[a].len()).then(a.cmp(&b)));
    let mut gamma = vec![usize::MAX; m];
    for &i in &order {
        let used: BTreeSet<usize> = adj[i].iter().map(|&j| gamma[j]).collect();
        gamma[i] = (0..).find(|c| !used.contains(c)).unwrap();
    }
    let q = gamma.iter().max().map_or(1, |&c| c + 1);
    Coloring { q, gamma }
}

fn sat_color(bh: &BlockingHypergraph, q: usize) -> Option<Coloring> {
    let cnf = coloring_cnf(bh, q);
    let model = sat::solve(&cnf)?;
    decode_coloring(&model, bh.num_simplices, q)
}

/// Fewest colors found by stepping `q` one at a time from the greedy
/// coloring of the pair edges: down while satisfiable, else up until
/// satisfiable.
pub fn color_blocking(bh: &BlockingHypergraph) -> Coloring {
    if bh.edges.is_empty() {
        return Coloring::trivial(bh.num_simplices);
    }
    let start = greedy_pair_coloring(bh).q.max(1);
    match sat_color(bh, start) {
        Some(mut best) => {
            while best.q > 1 {
                match sat_color(bh, best.q - 1) {
                    Some(c) => best = c,
                    None => break,
                }
            }
            best
        }
        None => {
            let mut q = start + 1;
            loop {
                if let Some(c) = sat_color(bh, q) {
                    return c;
                }
                q += 1;
            }
        }
    }
}

/// Chromatic number by trying every assignment for q = 1, 2, ...
/// Exponential; reference for small instances.
pub fn chromatic_brute_force(bh: &BlockingHypergraph) -> usize {
    let m = bh.num_simplices;
    for q in 1..=m.max(1) {
        let total = (q as u64).pow(m as u32);
        for code in 0..total {
            let mut x = code;
            let gamma: Vec<usize> = (0..m)
                .map(|_| {
                    let c = (x % q as u64) as usize;
                    x /= q as u64;
                    c
                })
                .collect();
            if (Coloring { q, gamma }).is_valid(bh) {
                return q;
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::{build_conflict_hypergraph, DEFAULT_BUDGET};
    use crate::mesh::{b3_example, grid_triangulation, random_partition, DiagRule};
    use crate::Rect;

    fn blocking_of(s: &SetSystem, d: usize) -> (ConflictHypergraph, BlockingHypergraph) {
        let hg = build_conflict_hypergraph(s, d + 1, DEFAULT_BUDGET).unwrap();
        let bh = build_blocking_hypergraph(s, &hg, DEFAULT_BUDGET).unwrap();
        (hg, bh)
    }

    #[test]
    fn b3_example_blocking_and_coloring() {
        let s = b3_example().to_set_system();
        let (_, bh) = blocking_of(&s, 2);
        assert_eq!(bh.edges, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let c = color_blocking(&bh);
        assert_eq!(c.q, 3);
        assert!(c.is_valid(&bh));
        assert_eq!(c.gamma[0], c.gamma[3]);
        let k = c.classes();
        assert!(k.iter().any(|cls| cls == &vec![0, 3]));
    }

    #[test]
    fn rank_two_has_no_blocking_sets() {
        let p = grid_triangulation(3, 2, Rect::unit(), DiagRule::Random, 1);
        let (_, bh) = blocking_of(&p.to_set_system(), 2);
        assert!(bh.edges.is_empty());
        assert_eq!(color_blocking(&bh), Coloring::trivial(p.num_simplices()));
    }

    #[test]
    fn matches_brute_force_in_3d() {
        let mut nonempty = 0;
        for seed in 0..8 {
            let p = random_partition(3, 10, seed);
            let s = p.to_set_system();
            let (hg, bh) = blocking_of(&s, 3);
            assert_eq!(bh, brute_force_blocking(&s, &hg, 5), "seed {seed}");
            assert!(bh.rank() <= hg.rank());
            nonempty += usize::from(!bh.edges.is_empty());
            // Each large conflict induces a pair edge.
            for c in hg.high_rank() {
                let inc = s.incidence();
                let touching: BTreeSet<usize> = c.iter().flat_map(|&v| inc[v].iter().copied()).collect();
                assert!(bh.edges.iter().any(|b| b.len() == 2 && b.iter().all(|i| touching.contains(i))));
            }
        }
        assert!(nonempty > 0);
    }

    #[test]
    fn sat_coloring_is_minimal() {
        for seed in 0..8 {
            let p = random_partition(3, 9, seed);
            let s = p.to_set_system();
            let (_, bh) = blocking_of(&s, 3);
            if bh.num_simplices > 8 {
                continue;
            }
            let c = color_blocking(&bh);
            assert!(c.is_valid(&bh));
            assert_eq!(c.q, chromatic_brute_force(&bh));
        }
    }

    #[test]
    fn encoding_round_trip() {
        let s = b3_example().to_set_system();
        let (_, bh) = blocking_of(&s, 2);
        let cnf = coloring_cnf(&bh, 3);
        for code in 0..81u32 {
            let mut x = code;
            let gamma: Vec<usize> = (0..4)
                .map(|_| {
                    let c = (x % 3) as usize;
                    x /= 3;
                    c
                })
                .collect();
            let col = Coloring { q: 3, gamma };
            let model: Vec<bool> = (0..12).map(|v| col.gamma[v / 3] == v % 3).collect();
            assert_eq!(cnf.satisfied_by(&model), col.is_valid(&bh));
        }
        assert!(sat::solve(&coloring_cnf(&bh, 2)).is_none());
    }

    #[test]
    fn color_classes_hold_no_blocking_set() {
        let p = random_partition(3, 9, 3);
        let s = p.to_set_system();
        let (hg, bh) = blocking_of(&s, 3);
        let c = color_blocking(&bh);
        let test = BlockTest::new(&hg);
        for k in c.classes() {
            assert!(!test.blocks(&union_of(&s, &k)));
        }
    }
}
