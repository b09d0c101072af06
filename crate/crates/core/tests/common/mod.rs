//! Fixtures shared by the golden-file and acceptance targets.
#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use pwlmilp::biclique::Biclique;
use pwlmilp::blocking::Coloring;
use pwlmilp::mesh::{b3_example, grid_triangulation, DiagRule};
use pwlmilp::milp::{build_gib, DisjunctionSpec, MilpModel};
use pwlmilp::solver::solver_from_env;
use pwlmilp::sths::{build_sths, Hpf, Plant, Scenario};
use pwlmilp::SimplicialPartition;

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// The four-triangle example with the cover {4} x {0, 3} and three colors.
pub fn b3_spec() -> DisjunctionSpec {
    DisjunctionSpec::new(
        &b3_example(),
        vec![Biclique::new(vec![4], vec![0, 3])],
        Some(Coloring { q: 3, gamma: vec![2, 0, 1, 2] }),
        true,
    )
}

pub fn b3_model() -> MilpModel {
    build_gib(&b3_spec()).unwrap()
}

/// Power function sampled on a `k x k` grid of its operating domain.
pub fn hpf_grid(k: usize) -> SimplicialPartition {
    let h = Hpf::default();
    let mut p = grid_triangulation(k, k, h.domain(), DiagRule::Fixed, 0);
    p.values = p.points.iter().map(|x| h.eval(x[0], x[1])).collect();
    p
}

pub fn sths_toy_model() -> MilpModel {
    let spec = DisjunctionSpec::new(&hpf_grid(1), vec![Biclique::new(vec![1], vec![2])], None, false);
    let sc = Scenario::from_csv("period,price,inflow\n1,30,12.5\n2,45.25,8\n", Plant::default()).unwrap();
    build_sths(&sc, &spec).unwrap()
}

/// The configured solver, else the bundled scipy adapter when scipy imports.
pub fn solver() -> Option<String> {
    if let Some(cmd) = solver_from_env() {
        return Some(cmd);
    }
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scripts/scipy_solve.py");
    let ok = Command::new("python3")
        .args(["-c", "import scipy.optimize"])
        .output()
        .is_ok_and(|o| o.status.success());
    (ok && script.is_file()).then(|| format!("python3 {} {{lp}} {{sol}} {{tl}}", script.display()))
}
