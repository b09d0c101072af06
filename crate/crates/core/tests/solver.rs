//! External solver round trips. Skipped when no solver is available.

mod common;

use common::{b3_model, solver};
use pwlmilp::milp::{MilpModel, ObjSense, Sense};
use pwlmilp::solver::{solve_external, SolveStatus};

#[test]
fn lower_bound_is_the_optimum() {
    let Some(cmd) = solver() else { return };
    let mut m = MilpModel::new("lb");
    let x = m.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY);
    m.add_constraint("c", vec![(x, 1.0)], Sense::Ge, 3.0);
    m.objective = vec![(x, 1.0)];
    let dir = tempfile::tempdir().unwrap();
    let r = solve_external(&m, &cmd, 10.0, dir.path()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.objective.unwrap() - 3.0).abs() < 1e-6);
    assert!(r.log_path.is_file());
}

#[test]
fn shared_vertex_weight_reaches_one() {
    let Some(cmd) = solver() else { return };
    let mut m = b3_model();
    // Vertex 0 lies in three of the four triangles.
    let u = m.lambda[0];
    m.sense = ObjSense::Maximize;
    m.objective = vec![(u, 1.0)];
    let dir = tempfile::tempdir().unwrap();
    let r = solve_external(&m, &cmd, 10.0, dir.path()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.objective.unwrap() - 1.0).abs() < 1e-6);
    for (k, &j) in m.lambda.iter().enumerate() {
        assert_eq!(r.values[j], if k == 0 { 1.0 } else { 0.0 }, "lam_{k}");
    }
}

#[test]
fn contradictory_bounds_are_infeasible() {
    let Some(cmd) = solver() else { return };
    let mut m = MilpModel::new("inf");
    let x = m.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY);
    m.add_constraint("hi", vec![(x, 1.0)], Sense::Le, 0.0);
    m.add_constraint("lo", vec![(x, 1.0)], Sense::Ge, 1.0);
    m.objective = vec![(x, 1.0)];
    let dir = tempfile::tempdir().unwrap();
    let r = solve_external(&m, &cmd, 10.0, dir.path()).unwrap();
    assert_eq!(r.status, SolveStatus::Infeasible);
    assert!(r.values.is_empty());
}
