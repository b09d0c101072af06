//! Line-cut heuristic for planar triangulations.
//!
//! Give each mesh vertex the barycentric dual cell around it (bounded by
//! triangle centroids and edge midpoints). The vertices whose cells meet a
//! straight line separate the mesh graph: any mesh edge crossing the line
//! does so inside the cell of one of its endpoints. Vertices in different
//! components of the remainder never share a triangle, so any split of the
//! components into two groups is a biclique of the conflict graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Biclique, Graph};
use crate::error::{Error, Result};
use crate::mesh::SimplicialPartition;

// Components beyond this are paired rather than split exhaustively.
const MAX_SPLIT_COMPONENTS: usize = 12;

/// Best biclique over `n_lines` random lines, by weight `w` (indexed like
/// `g.edges()`). Lines join two uniform points on a circle around the mesh
/// and are redrawn when they pass too close to a cell corner.
pub fn planar_cut_biclique(
    mesh: &SimplicialPartition,
    g: &Graph,
    w: &[f64],
    n_lines: usize,
    seed: u64,
) -> Result<(Biclique, f64)> {
    if mesh.dim != 2 {
        return Err(Error::Validation("line cuts need a planar mesh".into()));
    }
    let n = mesh.num_vertices();
    if g.num_vertices() != n {
        return Err(Error::Validation("graph and mesh differ in vertex count".into()));
    }
    let b = mesh.bounds();
    let center = [(b[0].0 + b[0].1) / 2.0, (b[1].0 + b[1].1) / 2.0];
    let radius = 0.5 * ((b[0].1 - b[0].0).powi(2) + (b[1].1 - b[1].0).powi(2)).sqrt() * 1.01;
    let tol = 1e-9 * radius.max(f64::MIN_POSITIVE);

    // Cell corners of each vertex.
    let mut cells: Vec<Vec<[f64; 2]>> = (0..n).map(|v| vec![mesh.point2(v)]).collect();
    for s in &mesh.simplices {
        let p: Vec<[f64; 2]> = s.iter().map(|&v| mesh.point2(v)).collect();
        let c = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
        for i in 0..3 {
            cells[s[i]].push(c);
            for j in 0..3 {
                if i != j {
                    cells[s[i]].push([(p[i][0] + p[j][0]) / 2.0, (p[i][1] + p[j][1]) / 2.0]);
                }
            }
        }
    }
    let mesh_adj: Vec<Vec<usize>> = {
        let mut adj = vec![Vec::new(); n];
        for [a, b] in mesh.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Biclique, f64)> = None;
    let mut drawn = 0;
    let mut attempts = 0;
    let mut comp = vec![usize::MAX; n];
    while drawn < n_lines && attempts < 10 * n_lines.max(1) {
        attempts += 1;
        let t0 = rng.gen_range(0.0..std::f64::consts::TAU);
        let t1 = rng.gen_range(0.0..std::f64::consts::TAU);
        let p0 = [center[0] + radius * t0.cos(), center[1] + radius * t0.sin()];
        let p1 = [center[0] + radius * t1.cos(), center[1] + radius * t1.sin()];
        let d = [p1[0] - p0[0], p1[1] - p0[1]];
        let len = d[0].hypot(d[1]);
        if len < tol {
            continue;
        }
        let side = |x: &[f64; 2]| (d[0] * (x[1] - p0[1]) - d[1] * (x[0] - p0[0])) / len;
        let mut cut = vec![false; n];
        let mut degenerate = false;
        for v in 0..n {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for x in &cells[v] {
                let s = side(x);
                if s.abs() < tol {
                    degenerate = true;
                }
                lo = lo.min(s);
                hi = hi.max(s);
            }
            cut[v] = lo < 0.0 && hi > 0.0;
        }
        if degenerate {
            continue;
        }
        drawn += 1;

        // Components of the mesh graph without the cut.
        comp.iter_mut().for_each(|c| *c = usize::MAX);
        let mut k = 0;
        for s in 0..n {
            if cut[s] || comp[s] != usize::MAX || mesh_adj[s].is_empty() {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = k;
            while let Some(u) = stack.pop() {
                for &x in &mesh_adj[u] {
                    if !cut[x] && comp[x] == usize::MAX {
                        comp[x] = k;
                        stack.push(x);
                    }
                }
            }
            k += 1;
        }
        if k < 2 {
            continue;
        }
        let mut between = vec![0.0; k * k];
        for (i, &[a, b]) in g.edges().iter().enumerate() {
            let (ca, cb) = (comp[a], comp[b]);
            if ca != usize::MAX && cb != usize::MAX && ca != cb {
                between[ca * k + cb] += w[i];
                between[cb * k + ca] += w[i];
            }
        }
        let Some((group, wt)) = best_split(&between, k) else { continue };
        if best.as_ref().is_some_and(|(_, bw)| wt <= *bw) {
            continue;
        }
        let side_of = |c: usize| group.iter().position(|g| g.contains(&c));
        let (mut xa, mut xb) = (Vec::new(), Vec::new());
        for v in 0..n {
            if comp[v] == usize::MAX {
                continue;
            }
            match side_of(comp[v]) {
                Some(0) => xa.push(v),
                Some(1) => xb.push(v),
                _ => {}
            }
        }
        let bc = Biclique::new(xa, xb);
        if bc.is_valid(g) {
            best = Some((bc, wt));
        }
    }
    best.ok_or(Error::NoCandidate)
}

/// Heaviest split of components into two groups, given pairwise weights.
fn best_split(between: &[f64], k: usize) -> Option<([Vec<usize>; 2], f64)> {
    let mut best: Option<([Vec<usize>; 2], f64)> = None;
    if k <= MAX_SPLIT_COMPONENTS {
        // Component 0 always sits in the first group.
        for mask in 0..1u32 << (k - 1) {
            let full = (mask << 1) as usize;
            let in_b = |c: usize| full >> c & 1 == 1;
            let mut wt = 0.0;
            for a in 0..k {
                for b in 0..k {
                    if !in_b(a) && in_b(b) {
                        wt += between[a * k + b];
                    }
                }
            }
            if wt > 0.0 && best.as_ref().is_none_or(|(_, bw)| wt > *bw) {
                let ga = (0..k).filter(|&c| !in_b(c)).collect();
                let gb = (0..k).filter(|&c| in_b(c)).collect();
                best = Some(([ga, gb], wt));
            }
        }
    } else {
        for a in 0..k {
            for b in a + 1..k {
                let wt = between[a * k + b];
                if wt > 0.0 && best.as_ref().is_none_or(|(_, bw)| wt > *bw) {
                    best = Some(([vec![a], vec![b]], wt));
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::{build_conflict_hypergraph, DEFAULT_BUDGET};
    use crate::mesh::{grid_triangulation, random_delaunay};

    #[test]
    fn cuts_are_valid_bicliques() {
        for seed in 0..5 {
            let p = random_delaunay(30, 6, seed);
            let hg = build_conflict_hypergraph(&p.to_set_system(), 3, DEFAULT_BUDGET).unwrap();
            let g = Graph::from_conflicts(&hg);
            let w = vec![1.0; g.edges().len()];
            let (bc, wt) = planar_cut_biclique(&p, &g, &w, 200, seed).unwrap();
            assert!(bc.is_valid(&g));
            assert_eq!(bc.weight(&g, &w), wt);
        }
    }

    #[test]
    fn two_triangles_have_no_cut() {
        let p = grid_triangulation(1, 1, crate::geometry::Rect::unit(), crate::mesh::DiagRule::Fixed, 0);
        let hg = build_conflict_hypergraph(&p.to_set_system(), 3, DEFAULT_BUDGET).unwrap();
        let g = Graph::from_conflicts(&hg);
        let w = vec![1.0; g.edges().len()];
        // One conflict pair; a single line cannot leave both endpoints uncut
        // and separated, but it may cut the shared diagonal.
        match planar_cut_biclique(&p, &g, &w, 100, 0) {
            Ok((bc, wt)) => assert!(bc.is_valid(&g) && wt == 1.0),
            Err(e) => assert!(matches!(e, Error::NoCandidate)),
        }
    }

    #[test]
    fn split_prefers_heaviest_grouping() {
        // Three components; 0 and 2 both attach to 1.
        let between = [0.0, 2.0, 0.0, 2.0, 0.0, 3.0, 0.0, 3.0, 0.0];
        let (g, w) = best_split(&between, 3).unwrap();
        assert_eq!(w, 5.0);
        assert_eq!(g, [vec![0, 2], vec![1]]);
    }
}
