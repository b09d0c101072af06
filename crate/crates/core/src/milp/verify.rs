//! Formulation check by enumeration of binary assignments.
//!
//! With the binaries fixed, the feasible weights form a polytope. Averaging
//! the maximizers of each `λ_v` gives a feasible point whose support is the
//! union `P` of all reachable supports, so the assignment is sound iff `P`
//! lies in one simplex. A simplex counts as reached when, for one
//! assignment, every unit vector on its vertices is feasible.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use super::{MilpModel, Sense, VarKind};
use crate::conflict::Feasibility;
use crate::error::{Error, Result};
use crate::mesh::SetSystem;

pub const MAX_VERIFY_BINARIES: usize = 24;
const TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub assignments: u64,
    pub feasible_assignments: u64,
    /// Distinct union supports over feasible assignments.
    pub supports: Vec<Vec<usize>>,
    /// Supports not contained in any set.
    pub bad_supports: Vec<Vec<usize>>,
    /// Minimal infeasible subsets found inside bad supports.
    pub conflicts: Vec<Vec<usize>>,
    /// Sets whose whole face is reached by no assignment.
    pub unreached: Vec<usize>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.bad_supports.is_empty() && self.unreached.is_empty()
    }

    /// Supports closed under subsets, for comparing formulations.
    pub fn closure(&self) -> Vec<Vec<usize>> {
        let mut out = std::collections::BTreeSet::new();
        for s in &self.supports {
            for mask in 1..1u64 << s.len() {
                out.insert(
                    s.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v)
                        .collect::<Vec<usize>>(),
                );
            }
        }
        out.into_iter().collect()
    }
}

struct Lp<'a> {
    m: &'a MilpModel,
    lb: Vec<f64>,
    ub: Vec<f64>,
}

impl Lp<'_> {
    /// Optimum of `max x_j` (or any feasible point when `target` is None).
    fn solve(&self, target: Option<usize>) -> Result<Option<Vec<f64>>> {
        let mut p = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = (0..self.m.variables.len())
            .map(|j| {
                let c = if Some(j) == target { 1.0 } else { 0.0 };
                p.add_var(c, (self.lb[j], self.ub[j]))
            })
            .collect();
        for c in &self.m.constraints {
            let expr: Vec<_> = c.coefs.iter().map(|&(j, a)| (vars[j], a)).collect();
            let op = match c.sense {
                Sense::Le => ComparisonOp::Le,
                Sense::Ge => ComparisonOp::Ge,
                Sense::Eq => ComparisonOp::Eq,
            };
            p.add_constraint(expr.as_slice(), op, c.rhs);
        }
        match p.solve() {
            Ok(out) => {
                let sol = out
                    .into_solution()
                    .map_err(|_| Error::Validation("LP solve interrupted".into()))?;
                Ok(Some(vars.iter().map(|&v| sol.var_value(v)).collect()))
            }
            Err(microlp::Error::Infeasible) => Ok(None),
            Err(e) => Err(Error::Validation(format!("LP solve failed: {e}"))),
        }
    }
}

/// Enumerates every binary assignment of `m` and checks that the weights
/// `m.lambda` range exactly over the faces of the sets in `s`.
pub fn verify_formulation(m: &MilpModel, s: &SetSystem) -> Result<VerifyReport> {
    let bins = m.binaries();
    if bins.len() > MAX_VERIFY_BINARIES {
        return Err(Error::TooManyBinaries(bins.len(), MAX_VERIFY_BINARIES));
    }
    if m.lambda.len() != s.num_vertices {
        return Err(Error::Validation("model weights do not match the set system".into()));
    }
    let feas = Feasibility::new(s);
    let is_bin: Vec<bool> = m.variables.iter().map(|v| v.kind == VarKind::Binary).collect();
    // Rows over binaries only are checked before any LP.
    let pure_rows: Vec<usize> = (0..m.constraints.len())
        .filter(|&r| m.constraints[r].coefs.iter().all(|&(j, _)| is_bin[j]))
        .collect();
    let mut report = VerifyReport {
        assignments: 1u64 << bins.len(),
        feasible_assignments: 0,
        supports: Vec::new(),
        bad_supports: Vec::new(),
        conflicts: Vec::new(),
        unreached: Vec::new(),
    };
    let mut reached = vec![false; s.sets.len()];
    let mut x = vec![0.0; m.variables.len()];
    for code in 0..report.assignments {
        for (k, &j) in bins.iter().enumerate() {
            x[j] = (code >> k & 1) as f64;
        }
        let pure_ok = pure_rows.iter().all(|&r| {
            let c = &m.constraints[r];
            let lhs: f64 = c.coefs.iter().map(|&(j, a)| a * x[j]).sum();
            c.sense.holds(lhs, c.rhs, TOL)
        });
        if !pure_ok {
            continue;
        }
        let mut lp = Lp {
            m,
            lb: m.variables.iter().map(|v| v.lb).collect(),
            ub: m.variables.iter().map(|v| v.ub).collect(),
        };
        for &j in &bins {
            lp.lb[j] = x[j];
            lp.ub[j] = x[j];
        }
        let Some(first) = lp.solve(None)? else { continue };
        report.feasible_assignments += 1;
        let mut support = vec![false; s.num_vertices];
        let mark = |sol: &[f64], support: &mut Vec<bool>| {
            for (v, &j) in m.lambda.iter().enumerate() {
                if sol[j] > TOL {
                    support[v] = true;
                }
            }
        };
        mark(&first, &mut support);
        for v in 0..s.num_vertices {
            if support[v] {
                continue;
            }
            if let Some(sol) = lp.solve(Some(m.lambda[v]))? {
                mark(&sol, &mut support);
            }
        }
        let p: Vec<usize> = (0..s.num_vertices).filter(|&v| support[v]).collect();
        if !report.supports.contains(&p) {
            report.supports.push(p.clone());
        }
        if !feas.feasible(&p) {
            if !report.bad_supports.contains(&p) {
                for c in minimal_conflicts(&feas, &p) {
                    if !report.conflicts.contains(&c) {
                        report.conflicts.push(c);
                    }
                }
                report.bad_supports.push(p);
            }
            continue;
        }
        for (i, set) in s.sets.iter().enumerate() {
            if reached[i] || !set.iter().all(|v| support[*v]) {
                continue;
            }
            let all_units = set.iter().all(|&v| {
                let mut unit = Lp { m, lb: lp.lb.clone(), ub: lp.ub.clone() };
                for (u, &j) in m.lambda.iter().enumerate() {
                    let val = f64::from(u8::from(u == v));
                    unit.lb[j] = val;
                    unit.ub[j] = val;
                }
                matches!(unit.solve(None), Ok(Some(_)))
            });
            reached[i] = all_units;
        }
    }
    report.unreached = (0..s.sets.len()).filter(|&i| !reached[i]).collect();
    report.supports.sort();
    report.bad_supports.sort();
    report.conflicts.sort();
    Ok(report)
}

/// Minimal infeasible subsets of `p` with at most four vertices.
fn minimal_conflicts(feas: &Feasibility, p: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(p: &[usize], start: usize, cur: &mut Vec<usize>, feas: &Feasibility, out: &mut Vec<Vec<usize>>) {
        if cur.len() >= 2 && feas.is_minimal_infeasible(cur) {
            out.push(cur.clone());
            return;
        }
        if cur.len() == 4 {
            return;
        }
        for i in start..p.len() {
            cur.push(p[i]);
            if feas.feasible(cur) || cur.len() >= 2 {
                rec(p, i + 1, cur, feas, out);
            }
            cur.pop();
        }
    }
    rec(p, 0, &mut cur, feas, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biclique::{cover_bicliques, Biclique, CoverStrategy, ExactOptions, Graph};
    use crate::blocking::Coloring;
    use crate::conflict::{build_conflict_hypergraph, DEFAULT_BUDGET};
    use crate::geometry::Rect;
    use crate::mesh::{b3_example, grid_triangulation, random_delaunay, DiagRule};
    use crate::milp::{build_baseline, build_gib, Baseline, DisjunctionSpec};

    fn b3_spec() -> DisjunctionSpec {
        DisjunctionSpec::new(
            &b3_example(),
            vec![Biclique::new(vec![4], vec![0, 3])],
            Some(Coloring { q: 3, gamma: vec![0, 1, 2, 0] }),
            true,
        )
    }

    #[test]
    fn gib_example_reaches_exactly_the_faces() {
        let spec = b3_spec();
        let r = verify_formulation(&build_gib(&spec).unwrap(), &spec.sets).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.assignments, 16);
        let mut want: Vec<Vec<usize>> = spec.sets.sets.clone();
        want.sort();
        let maximal: Vec<Vec<usize>> = r
            .supports
            .iter()
            .filter(|a| !r.supports.iter().any(|b| b != *a && a.iter().all(|v| b.contains(v))))
            .cloned()
            .collect();
        assert_eq!(maximal, want);
    }

    #[test]
    fn missing_coloring_row_is_caught() {
        let mut spec = b3_spec();
        spec.high_rank = false;
        let r = verify_formulation(&build_gib(&spec).unwrap(), &spec.sets).unwrap();
        assert!(!r.ok());
        assert!(r.conflicts.contains(&vec![1, 2, 3]));
    }

    #[test]
    fn uncovered_conflict_edge_is_reported() {
        // Two triangles over the diagonal 0-3: corners 1 and 2 conflict.
        let p = grid_triangulation(1, 1, Rect::unit(), DiagRule::Fixed, 0);
        let spec = DisjunctionSpec::new(&p, vec![], None, false);
        let r = verify_formulation(&build_gib(&spec).unwrap(), &spec.sets).unwrap();
        assert!(!r.ok());
        assert_eq!(r.conflicts, vec![vec![1, 2]]);
        let fixed = DisjunctionSpec::new(&p, vec![Biclique::new(vec![1], vec![2])], None, false);
        assert!(verify_formulation(&build_gib(&fixed).unwrap(), &fixed.sets).unwrap().ok());
    }

    #[test]
    fn cc_on_two_triangles() {
        let p = grid_triangulation(1, 1, Rect::unit(), DiagRule::Fixed, 0);
        let spec = DisjunctionSpec::new(&p, vec![], None, false);
        let r = verify_formulation(&build_baseline(&spec, Baseline::Cc).unwrap(), &spec.sets).unwrap();
        assert!(r.ok());
        assert_eq!(r.feasible_assignments, 2);
    }

    #[test]
    fn all_formulations_agree_on_a_small_mesh() {
        let (mut p, hg) = (0..)
            .map(|seed| {
                let p = random_delaunay(3, 1, seed);
                let hg = build_conflict_hypergraph(&p.to_set_system(), 3, DEFAULT_BUDGET).unwrap();
                (p, hg)
            })
            .find(|(_, hg)| hg.rank() == 2)
            .unwrap();
        for v in 0..p.points.len() {
            p.values[v] = p.points[v][0].powi(2) - p.points[v][1];
        }
        let g = Graph::from_conflicts(&hg);
        let cover = cover_bicliques(&g, CoverStrategy::Exact, 0, ExactOptions::default()).unwrap();
        let spec = DisjunctionSpec::new(&p, cover.bicliques, None, false);
        let gib = verify_formulation(&build_gib(&spec).unwrap(), &spec.sets).unwrap();
        assert!(gib.ok());
        for b in Baseline::ALL {
            let r = verify_formulation(&build_baseline(&spec, b).unwrap(), &spec.sets).unwrap();
            assert!(r.ok(), "{b:?}: {r:?}");
            assert_eq!(r.closure(), gib.closure(), "{b:?}");
        }
    }

    #[test]
    fn too_many_binaries() {
        let mut m = MilpModel::new("big");
        for i in 0..25 {
            m.add_binary(format!("b{i}"));
        }
        let s = SetSystem::new(0, vec![]);
        assert!(matches!(verify_formulation(&m, &s), Err(Error::TooManyBinaries(25, 24))));
    }
}
