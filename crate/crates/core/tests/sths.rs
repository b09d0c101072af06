//! Three-period scheduling toy, solved externally when a solver exists.

mod common;

use common::{hpf_grid, solver};
use pwlmilp::milp::{parse_lp, lp_string};
use pwlmilp::pipeline::{run_pipeline, PipelineOptions};
use pwlmilp::solver::{solve_external, SolveStatus};
use pwlmilp::sths::{build_sths, evaluate_schedule, Hpf, Plant, Scenario, Schedule};

fn scenario() -> Scenario {
    Scenario::from_csv("period,price,inflow\n1,20,15\n2,60,10\n3,35,5\n", Plant::default()).unwrap()
}

#[test]
fn toy_schedule_is_self_consistent() {
    let h = Hpf::default();
    let out = run_pipeline(&hpf_grid(3), &PipelineOptions::default()).unwrap();
    let sc = scenario();
    let m = build_sths(&sc, &out.spec).unwrap();
    assert_eq!(parse_lp(&lp_string(&m)).unwrap(), m);

    let Some(cmd) = solver() else {
        eprintln!("no solver configured; skipping the solve");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let r = solve_external(&m, &cmd, 60.0, dir.path()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    let s = Schedule::from_solution(&m, &r.values, 3).unwrap();
    let phi = |q: f64, v: f64| h.eval(q, v);
    let e = evaluate_schedule(&s, &sc, &phi);

    assert!(e.balance_residual <= 1e-6, "{e:?}");
    assert!((e.pwl_obj - r.objective.unwrap()).abs() <= 1e-6);
    // Generating output is the interpolant at (q, r); recompute the error.
    let mut err = 0.0;
    for t in 0..3 {
        if s.g[t] {
            let pwl = out.mesh.interpolate(&[s.q[t], s.r[t]]).unwrap();
            assert!((pwl - s.p[t]).abs() <= 1e-6, "period {t}: {pwl} vs {}", s.p[t]);
            err += (s.p[t] - h.eval(s.q[t], s.r[t])).abs();
        }
    }
    assert!(e.generating_periods > 0);
    assert!((err / e.generating_periods as f64 - e.avg_abs_hpf_err).abs() <= 1e-6);
}
