//! Formulation builders. Every disjunction model has columns `lam_{v}`
//! holding the convex weight of vertex `v`; models whose native variables
//! are something else define them through equality rows.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{MilpModel, ObjSense, Sense};
use crate::biclique::{Biclique, Graph};
use crate::blocking::Coloring;
use crate::conflict::ConflictHypergraph;
use crate::error::{Error, Result};
use crate::mesh::{SetSystem, SimplicialPartition};

/// Everything the formulations need about one disjunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjunctionSpec {
    pub sets: SetSystem,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub cover: Vec<Biclique>,
    pub coloring: Option<Coloring>,
    /// Whether the conflict hypergraph has edges of size three or more.
    pub high_rank: bool,
}

impl DisjunctionSpec {
    pub fn new(p: &SimplicialPartition, cover: Vec<Biclique>, coloring: Option<Coloring>, high_rank: bool) -> Self {
        DisjunctionSpec {
            sets: p.to_set_system(),
            points: p.points.clone(),
            values: p.values.clone(),
            cover,
            coloring,
            high_rank,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.sets.num_vertices
    }

    /// Whether the cover is exactly the rank-2 part of `hg`.
    pub fn cover_matches(&self, hg: &ConflictHypergraph) -> bool {
        let g = Graph::from_conflicts(hg);
        crate::biclique::BicliqueCover {
            bicliques: self.cover.clone(),
            num_edges: g.edges().len(),
            proven: true,
        }
        .covers(&g)
    }
}

fn lambda_columns(m: &mut MilpModel, n: usize) -> Vec<usize> {
    let lam: Vec<usize> = (0..n).map(|v| m.add_continuous(format!("lam_{v}"), 0.0, 1.0)).collect();
    m.lambda = lam.clone();
    lam
}

/// Colors renumbered by first appearance in simplex order.
fn canonical_colors(c: &Coloring) -> Vec<usize> {
    let mut map = vec![usize::MAX; c.q];
    let mut next = 0;
    c.gamma
        .iter()
        .map(|&g| {
            if map[g] == usize::MAX {
                map[g] = next;
                next += 1;
            }
            map[g]
        })
        .collect()
}

/// Adds the biclique rows and, when present, the coloring rows for one
/// disjunction whose weights sit in columns `lam`. `on` is the column the
/// color sum must equal (`None` for 1) and `tag` prefixes names.
pub(crate) fn add_gib_block(
    m: &mut MilpModel,
    spec: &DisjunctionSpec,
    lam: &[usize],
    on: Option<usize>,
    tag: &str,
) -> Result<()> {
    if spec.high_rank && spec.coloring.is_none() {
        return Err(Error::SpecIncomplete("rank-3 conflicts present but no coloring given".into()));
    }
    for (l, bc) in spec.cover.iter().enumerate() {
        let y = m.add_binary(format!("y_{tag}{}", l + 1));
        let mut a: Vec<(usize, f64)> = bc.a.iter().map(|&v| (lam[v], 1.0)).collect();
        a.push((y, -1.0));
        m.add_constraint(format!("bic_a_{tag}{}", l + 1), a, Sense::Le, 0.0);
        let mut b: Vec<(usize, f64)> = bc.b.iter().map(|&v| (lam[v], 1.0)).collect();
        b.push((y, 1.0));
        m.add_constraint(format!("bic_b_{tag}{}", l + 1), b, Sense::Le, 1.0);
    }
    if !spec.high_rank {
        return Ok(());
    }
    let col = spec.coloring.as_ref().expect("checked above");
    let gamma = canonical_colors(col);
    let q = gamma.iter().max().map_or(0, |&g| g + 1);
    let z: Vec<usize> = (0..q).map(|c| m.add_binary(format!("z_{tag}{}", c + 1))).collect();
    let mut sum: Vec<(usize, f64)> = z.iter().map(|&j| (j, 1.0)).collect();
    let rhs = match on {
        Some(g) => {
            sum.push((g, -1.0));
            0.0
        }
        None => 1.0,
    };
    m.add_constraint(format!("colors_{tag}").trim_end_matches('_'), sum, Sense::Eq, rhs);
    let patterns = Coloring { q, gamma }.patterns(&spec.sets);
    // Group vertices by pattern, in order of each pattern's first vertex.
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for (v, pat) in patterns.into_iter().enumerate() {
        if pat.is_empty() {
            continue;
        }
        match groups.iter_mut().find(|(p, _)| *p == pat) {
            Some((_, vs)) => vs.push(v),
            None => groups.push((pat, vec![v])),
        }
    }
    for (k, (pat, vs)) in groups.iter().enumerate() {
        let mut row: Vec<(usize, f64)> = vs.iter().map(|&v| (lam[v], 1.0)).collect();
        row.extend(pat.iter().map(|&c| (z[c], -1.0)));
        m.add_constraint(format!("pat_{tag}{}", k + 1), row, Sense::Le, 0.0);
    }
    Ok(())
}

/// Biclique rows `Σ_{A} λ ≤ y`, `Σ_{B} λ ≤ 1 - y`, plus the color-class
/// rows grouped by color pattern when higher-rank conflicts exist, plus
/// `Σ λ = 1`.
pub fn build_gib(spec: &DisjunctionSpec) -> Result<MilpModel> {
    let mut m = MilpModel::new("gib");
    let lam = lambda_columns(&mut m, spec.num_vertices());
    m.add_constraint("convex", lam.iter().map(|&j| (j, 1.0)).collect(), Sense::Eq, 1.0);
    add_gib_block(&mut m, spec, &lam, None, "")?;
    Ok(m)
}

/// Formulation from an independent branching scheme `(L, R)`:
/// `Σ_{v∉L} λ ≤ z`, `Σ_{v∉R} λ ≤ 1 - z` per level.
pub fn build_log_scheme(sets: &SetSystem, scheme: &[(Vec<usize>, Vec<usize>)]) -> MilpModel {
    let n = sets.num_vertices;
    let mut m = MilpModel::new("ib");
    let lam = lambda_columns(&mut m, n);
    m.add_constraint("convex", lam.iter().map(|&j| (j, 1.0)).collect(), Sense::Eq, 1.0);
    for (l, (left, right)) in scheme.iter().enumerate() {
        let z = m.add_binary(format!("z_{}", l + 1));
        let mut a: Vec<(usize, f64)> = (0..n).filter(|v| !left.contains(v)).map(|v| (lam[v], 1.0)).collect();
        a.push((z, -1.0));
        m.add_constraint(format!("ib_l_{}", l + 1), a, Sense::Le, 0.0);
        let mut b: Vec<(usize, f64)> = (0..n).filter(|v| !right.contains(v)).map(|v| (lam[v], 1.0)).collect();
        b.push((z, 1.0));
        m.add_constraint(format!("ib_r_{}", l + 1), b, Sense::Le, 1.0);
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    /// Disaggregated logarithmic: one binary per bit of the simplex index.
    Dlog,
    /// Incremental: simplices chained so each exit vertex enters the next.
    Inc,
    /// Multiple choice: per-simplex copies of the point, scaled by a binary.
    Mc,
    /// Disaggregated convex combination.
    Dcc,
    /// Convex combination with aggregated weights.
    Cc,
}

impl Baseline {
    pub const ALL: [Baseline; 5] = [Baseline::Dlog, Baseline::Inc, Baseline::Mc, Baseline::Dcc, Baseline::Cc];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Dlog => "dlog",
            Baseline::Inc => "inc",
            Baseline::Mc => "mc",
            Baseline::Dcc => "dcc",
            Baseline::Cc => "cc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Baseline::ALL.into_iter().find(|b| b.name() == s)
    }
}

fn ceil_log2(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

pub fn build_baseline(spec: &DisjunctionSpec, which: Baseline) -> Result<MilpModel> {
    let sets = &spec.sets.sets;
    let n = spec.num_vertices();
    let mut m = MilpModel::new(which.name());
    let lam = lambda_columns(&mut m, n);
    match which {
        Baseline::Cc => {
            let y: Vec<usize> = (0..sets.len()).map(|i| m.add_binary(format!("y_{}", i + 1))).collect();
            m.add_constraint("pick", y.iter().map(|&j| (j, 1.0)).collect(), Sense::Eq, 1.0);
            m.add_constraint("convex", lam.iter().map(|&j| (j, 1.0)).collect(), Sense::Eq, 1.0);
            for v in 0..n {
                let mut row = vec![(lam[v], 1.0)];
                row.extend((0..sets.len()).filter(|&i| sets[i].contains(&v)).map(|i| (y[i], -1.0)));
                m.add_constraint(format!("cc_{v}"), row, Sense::Le, 0.0);
            }
        }
        Baseline::Dcc | Baseline::Dlog => {
            let parts: Vec<Vec<usize>> = sets
                .iter()
                .enumerate()
                .map(|(i, s)| s.iter().map(|&v| m.add_continuous(format!("l_{}_{v}", i + 1), 0.0, 1.0)).collect())
                .collect();
            if which == Baseline::Dcc {
                let y: Vec<usize> = (0..sets.len()).map(|i| m.add_binary(format!("y_{}", i + 1))).collect();
                m.add_constraint("pick", y.iter().map(|&j| (j, 1.0)).collect(), Sense::Eq, 1.0);
                for (i, p) in parts.iter().enumerate() {
                    let mut row: Vec<(usize, f64)> = p.iter().map(|&j| (j, 1.0)).collect();
                    row.push((y[i], -1.0));
                    m.add_constraint(format!("conv_{}", i + 1), row, Sense::Eq, 0.0);
                }
            } else {
                m.add_constraint("convex", parts.iter().flatten().map(|&j| (j, 1.0)).collect(), Sense::Eq, 1.0);
                for bit in 0..ceil_log2(sets.len()) {
                    let z = m.add_binary(format!("z_{}", bit + 1));
                    let side = |one: bool| -> Vec<(usize, f64)> {
                        parts
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| (i >> bit & 1 == 1) == one)
                            .flat_map(|(_, p)| p.iter().map(|&j| (j, 1.0)))
                            .collect()
                    };
                    let mut hi = side(true);
                    hi.push((z, -1.0));
                    m.add_constraint(format!("br_{}_1", bit + 1), hi, Sense::Le, 0.0);
                    let mut lo = side(false);
                    lo.push((z, 1.0));
                    m.add_constraint(format!("br_{}_0", bit + 1), lo, Sense::Le, 1.0);
                }
            }
            for v in 0..n {
                let mut row = vec![(lam[v], 1.0)];
                for (i, s) in sets.iter().enumerate() {
                    if let Some(k) = s.iter().position(|&u| u == v) {
                        row.push((parts[i][k], -1.0));
                    }
                }
                m.add_constraint(format!("link_{v}"), row, Sense::Eq, 0.0);
            }
        }
        Baseline::Mc => build_mc(&mut m, spec, &lam)?,
        Baseline::Inc => {
            let (order, _) = incremental_ordering(&spec.sets)?;
            build_inc(&mut m, &lam, &order);
        }
    }
    Ok(m)
}

/// Affine barycentric map of a simplex: row `v` gives `β_v(x) = a·x + c`
/// as `[a_1..a_d, c]`.
fn barycentric_map(pts: &[&[f64]]) -> Result<DMatrix<f64>> {
    let d = pts.len() - 1;
    let mut a = DMatrix::zeros(d + 1, d + 1);
    for (j, p) in pts.iter().enumerate() {
        for k in 0..d {
            a[(k, j)] = p[k];
        }
        a[(d, j)] = 1.0;
    }
    a.try_inverse()
        .ok_or_else(|| Error::Degenerate("simplex with zero volume".into()))
}

fn build_mc(m: &mut MilpModel, spec: &DisjunctionSpec, lam: &[usize]) -> Result<()> {
    let sets = &spec.sets.sets;
    let d = spec.points.first().map_or(0, Vec::len);
    let x: Vec<usize> = (0..d)
        .map(|k| m.add_continuous(format!("x_{k}"), f64::NEG_INFINITY, f64::INFINITY))
        .collect();
    let f = m.add_continuous("f", f64::NEG_INFINITY, f64::INFINITY);
    let y: Vec<usize> = (0..sets.len()).map(|i| m.add_binary(format!("y_{}", i + 1))).collect();
    m.add_constraint("pick", y.iter().map(|&j| (j, 1.0)).collect(), Sense::Eq, 1.0);
    let mut xlink: Vec<Vec<(usize, f64)>> = x.iter().map(|&j| vec![(j, 1.0)]).collect();
    let mut flink = vec![(f, 1.0)];
    let mut lamlink: Vec<Vec<(usize, f64)>> = lam.iter().map(|&j| vec![(j, 1.0)]).collect();
    for (i, s) in sets.iter().enumerate() {
        let xi: Vec<usize> = (0..d)
            .map(|k| m.add_continuous(format!("x_{}_{k}", i + 1), f64::NEG_INFINITY, f64::INFINITY))
            .collect();
        let pts: Vec<&[f64]> = s.iter().map(|&v| spec.points[v].as_slice()).collect();
        let inv = barycentric_map(&pts)?;
        for (r, &v) in s.iter().enumerate() {
            // β_v(x_i, y_i) = Σ_k a_k x_i_k + c y_i
            let mut beta: Vec<(usize, f64)> = (0..d).map(|k| (xi[k], inv[(r, k)])).collect();
            beta.push((y[i], inv[(r, d)]));
            m.add_constraint(format!("bary_{}_{v}", i + 1), beta.clone(), Sense::Ge, 0.0);
            let fv = spec.values.get(v).copied().unwrap_or(0.0);
            flink.extend(beta.iter().map(|&(j, a)| (j, -a * fv)));
            lamlink[v].extend(beta.iter().map(|&(j, a)| (j, -a)));
        }
        for k in 0..d {
            xlink[k].push((xi[k], -1.0));
        }
    }
    for (k, row) in xlink.into_iter().enumerate() {
        m.add_constraint(format!("xlink_{k}"), row, Sense::Eq, 0.0);
    }
    m.add_constraint("flink", flink, Sense::Eq, 0.0);
    for (v, row) in lamlink.into_iter().enumerate() {
        m.add_constraint(format!("link_{v}"), row, Sense::Eq, 0.0);
    }
    Ok(())
}

fn build_inc(m: &mut MilpModel, lam: &[usize], order: &[Vec<usize>]) {
    let d = order[0].len() - 1;
    let nsimp = order.len();
    let delta: Vec<Vec<usize>> = (0..nsimp)
        .map(|i| (1..=d).map(|j| m.add_continuous(format!("d_{}_{j}", i + 1), 0.0, 1.0)).collect())
        .collect();
    let w: Vec<usize> = (1..nsimp).map(|i| m.add_binary(format!("w_{i}"))).collect();
    for (i, di) in delta.iter().enumerate() {
        m.add_constraint(format!("fill_{}", i + 1), di.iter().map(|&j| (j, 1.0)).collect(), Sense::Le, 1.0);
    }
    for i in 0..nsimp - 1 {
        m.add_constraint(format!("seq_a_{}", i + 1), vec![(w[i], 1.0), (delta[i][d - 1], -1.0)], Sense::Le, 0.0);
        let mut row: Vec<(usize, f64)> = delta[i + 1].iter().map(|&j| (j, 1.0)).collect();
        row.push((w[i], -1.0));
        m.add_constraint(format!("seq_b_{}", i + 1), row, Sense::Le, 0.0);
    }
    // λ = e_{v^1_0} + Σ_i Σ_j δ_ij (e_{v^i_j} - e_{v^i_0})
    let mut link: Vec<Vec<(usize, f64)>> = lam.iter().map(|&j| vec![(j, 1.0)]).collect();
    for (i, s) in order.iter().enumerate() {
        for j in 1..=d {
            link[s[j]].push((delta[i][j - 1], -1.0));
            link[s[0]].push((delta[i][j - 1], 1.0));
        }
    }
    let start = order[0][0];
    for (v, row) in link.into_iter().enumerate() {
        m.add_constraint(format!("link_{v}"), row, Sense::Eq, f64::from(u8::from(v == start)));
    }
}

const ORDERING_NODE_LIMIT: u64 = 2_000_000;

/// Orders the simplices so consecutive ones share a vertex that is the
/// last vertex of one and the first of the next (first and last distinct).
/// Facet-sharing chains are tried first; the flag reports whether one was
/// found.
pub fn incremental_ordering(s: &SetSystem) -> Result<(Vec<Vec<usize>>, bool)> {
    let m = s.sets.len();
    if m == 0 {
        return Err(Error::OrderingUnavailable("no simplices".into()));
    }
    if s.sets.iter().any(|x| x.len() < 2) {
        return Err(Error::OrderingUnavailable("simplices need at least two vertices".into()));
    }
    let d = s.sets[0].len() - 1;
    for facet_only in [true, false] {
        let need = if facet_only { d } else { 1 };
        let adj: Vec<Vec<usize>> = (0..m)
            .map(|i| {
                (0..m)
                    .filter(|&j| j != i && s.sets[i].iter().filter(|v| s.sets[j].contains(v)).count() >= need)
                    .collect()
            })
            .collect();
        let mut starts: Vec<usize> = (0..m).collect();
        starts.sort_by_key(|&i| (adj[i].len(), i));
        let mut nodes = 0u64;
        for &st in &starts {
            for &entry in &s.sets[st] {
                let mut path = vec![(st, entry)];
                let mut used = vec![false; m];
                used[st] = true;
                if chain(s, &adj, &mut path, &mut used, &mut nodes) {
                    let order = path_to_order(s, &path);
                    return Ok((order, facet_only));
                }
                if nodes > ORDERING_NODE_LIMIT {
                    break;
                }
            }
        }
    }
    Err(Error::OrderingUnavailable("no simplex chain with shared entry/exit vertices".into()))
}

fn chain(s: &SetSystem, adj: &[Vec<usize>], path: &mut Vec<(usize, usize)>, used: &mut [bool], nodes: &mut u64) -> bool {
    *nodes += 1;
    if path.len() == used.len() {
        return true;
    }
    if *nodes > ORDERING_NODE_LIMIT {
        return false;
    }
    let (cur, entry) = *path.last().expect("nonempty path");
    // Fewest onward options first.
    let mut next: Vec<(usize, usize)> = adj[cur]
        .iter()
        .filter(|&&j| !used[j])
        .map(|&j| (adj[j].iter().filter(|&&k| !used[k]).count(), j))
        .collect();
    next.sort_unstable();
    for (_, j) in next {
        for &x in &s.sets[cur] {
            if x == entry || !s.sets[j].contains(&x) {
                continue;
            }
            used[j] = true;
            path.push((j, x));
            if chain(s, adj, path, used, nodes) {
                return true;
            }
            path.pop();
            used[j] = false;
        }
    }
    false
}

fn path_to_order(s: &SetSystem, path: &[(usize, usize)]) -> Vec<Vec<usize>> {
    path.iter()
        .enumerate()
        .map(|(k, &(i, entry))| {
            let exit = match path.get(k + 1) {
                Some(&(_, x)) => x,
                None => *s.sets[i].iter().find(|&&v| v != entry).expect("two vertices"),
            };
            let mut o = vec![entry];
            o.extend(s.sets[i].iter().copied().filter(|&v| v != entry && v != exit));
            o.push(exit);
            o
        })
        .collect()
}

/// Maximum-weight biclique as a MILP: side indicators `x1_u`, `x2_u` and
/// edge indicators `e_{u}_{v}`.
pub fn biclique_model(g: &Graph, w: &[f64]) -> MilpModel {
    let n = g.num_vertices();
    let mut m = MilpModel::new("max_weight_biclique");
    let x1: Vec<usize> = (0..n).map(|u| m.add_binary(format!("x1_{u}"))).collect();
    let x2: Vec<usize> = (0..n).map(|u| m.add_binary(format!("x2_{u}"))).collect();
    let y: Vec<usize> = g.edges().iter().map(|&[u, v]| m.add_binary(format!("e_{u}_{v}"))).collect();
    m.sense = ObjSense::Maximize;
    m.objective = y.iter().zip(w).map(|(&j, &wt)| (j, wt)).collect();
    for u in 0..n {
        for v in 0..n {
            if u == v || !g.has_edge(u, v) {
                m.add_constraint(format!("sep_{u}_{v}"), vec![(x1[u], 1.0), (x2[v], 1.0)], Sense::Le, 1.0);
            }
        }
    }
    m.add_constraint("side_1", x1.iter().map(|&j| (j, 1.0)).collect(), Sense::Ge, 1.0);
    m.add_constraint("side_2", x2.iter().map(|&j| (j, 1.0)).collect(), Sense::Ge, 1.0);
    for (k, &[a, b]) in g.edges().iter().enumerate() {
        for (u, v) in [(a, b), (b, a)] {
            m.add_constraint(format!("cov_{u}_{v}"), vec![(x1[u], 1.0), (x2[v], 1.0), (y[k], -1.0)], Sense::Le, 1.0);
            m.add_constraint(format!("in_{u}_{v}"), vec![(x1[u], 1.0), (x2[u], 1.0), (y[k], -1.0)], Sense::Ge, 0.0);
        }
        for (i, x) in [(1, &x1), (2, &x2)] {
            m.add_constraint(format!("opp_{i}_{a}_{b}"), vec![(x[a], 1.0), (x[b], 1.0), (y[k], -1.0)], Sense::Ge, 0.0);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::lp::lp_string;
    use crate::mesh::{b3_example, grid_triangulation, random_delaunay, DiagRule};
    use crate::geometry::Rect;

    fn b3_spec() -> DisjunctionSpec {
        let p = b3_example();
        DisjunctionSpec::new(
            &p,
            vec![Biclique::new(vec![4], vec![0, 3])],
            Some(Coloring { q: 3, gamma: vec![2, 0, 1, 2] }),
            true,
        )
    }

    #[test]
    fn gib_on_the_four_triangle_example() {
        let m = build_gib(&b3_spec()).unwrap();
        let s = lp_string(&m);
        let rows: Vec<&str> = s.lines().skip_while(|l| *l != "Subject To").skip(1).take_while(|l| *l != "Bounds").collect();
        assert_eq!(
            rows,
            vec![
                " convex: lam_0 + lam_1 + lam_2 + lam_3 + lam_4 = 1",
                " bic_a_1: lam_4 - y_1 <= 0",
                " bic_b_1: lam_0 + lam_3 + y_1 <= 1",
                " colors: z_1 + z_2 + z_3 = 1",
                " pat_1: lam_0 - z_1 - z_2 - z_3 <= 0",
                " pat_2: lam_1 - z_1 - z_2 <= 0",
                " pat_3: lam_2 - z_1 - z_3 <= 0",
                " pat_4: lam_3 - z_2 - z_3 <= 0",
                " pat_5: lam_4 - z_1 <= 0",
            ]
        );
        assert_eq!(m.size().binaries, 4);
    }

    #[test]
    fn gib_needs_coloring_for_high_rank() {
        let mut spec = b3_spec();
        spec.coloring = None;
        assert!(matches!(build_gib(&spec), Err(Error::SpecIncomplete(_))));
    }

    #[test]
    fn single_simplex_has_no_binaries() {
        let p = SimplicialPartition::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0; 3], vec![vec![0, 1, 2]]).unwrap();
        let m = build_gib(&DisjunctionSpec::new(&p, vec![], None, false)).unwrap();
        assert_eq!(m.size().binaries, 0);
        assert_eq!(m.size().rows, 1);
    }

    #[test]
    fn baseline_binary_counts() {
        let two = grid_triangulation(1, 1, Rect::unit(), DiagRule::Fixed, 0);
        let spec = DisjunctionSpec::new(&two, vec![], None, false);
        let bins = |b| build_baseline(&spec, b).unwrap().size().binaries;
        assert_eq!(bins(Baseline::Dlog), 1);
        assert_eq!(bins(Baseline::Inc), 1);
        assert_eq!(bins(Baseline::Mc), 2);
        assert_eq!(bins(Baseline::Dcc), 2);
        assert_eq!(bins(Baseline::Cc), 2);
        let p = random_delaunay(10, 4, 0);
        assert_eq!(p.num_simplices(), 26);
        let spec = DisjunctionSpec::new(&p, vec![], None, false);
        assert_eq!(build_baseline(&spec, Baseline::Dlog).unwrap().size().binaries, 5);
        assert_eq!(build_baseline(&spec, Baseline::Inc).unwrap().size().binaries, 25);
    }

    #[test]
    fn orderings_chain_through_shared_vertices() {
        for seed in 0..5 {
            let p = random_delaunay(12, 4, seed);
            let s = p.to_set_system();
            let (order, _) = incremental_ordering(&s).unwrap();
            assert_eq!(order.len(), s.sets.len());
            for w in order.windows(2) {
                assert_eq!(w[0].last(), w[1].first());
            }
            let mut seen: Vec<Vec<usize>> = order.iter().map(|o| { let mut o = o.clone(); o.sort_unstable(); o }).collect();
            seen.sort();
            let mut want = s.sets.clone();
            want.sort();
            assert_eq!(seen, want);
        }
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!([1, 2, 3, 4, 5, 26, 32, 33].map(ceil_log2), [0, 1, 2, 2, 3, 5, 5, 6]);
    }
}
