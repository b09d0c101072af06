//! Bridge to an external MILP solver.
//!
//! The solver is a command template such as
//! `python3 scripts/scipy_solve.py {lp} {sol} {tl}`. The template is split
//! on whitespace (no shell quoting), `{lp}`, `{sol}` and `{tl}` are
//! substituted, and the program is run once per call. The solution file
//! it leaves behind has the form
//!
//! ```text
//! status optimal
//! objective 3
//! x 3
//! ```
//!
//! with one `name value` line per column. Columns left out are read as 0.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::milp::{write_lp, MilpModel, VarKind};

/// Environment variable holding the default command template.
pub const SOLVER_ENV: &str = "PWLMILP_SOLVER";

const FEAS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Timeout,
    Error,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    /// Column values in model order; empty without a solution.
    pub values: Vec<f64>,
    pub log_path: PathBuf,
    pub wall_time_s: f64,
}

/// Reads the command template from [`SOLVER_ENV`], if set and non-blank.
pub fn solver_from_env() -> Option<String> {
    std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty())
}

fn resolve_program(prog: &str) -> Option<PathBuf> {
    let p = Path::new(prog);
    if p.components().count() > 1 {
        return p.is_file().then(|| p.to_path_buf());
    }
    std::env::split_paths(&std::env::var_os("PATH")?)
        .map(|dir| dir.join(prog))
        .find(|c| c.is_file())
}

/// Writes `model` to `workdir/model.lp`, runs the solver and re-checks the
/// returned point against the model.
pub fn solve_external(model: &MilpModel, solver_cmd: &str, time_limit_s: f64, workdir: &Path) -> Result<SolveResult> {
    std::fs::create_dir_all(workdir).map_err(|e| Error::io(workdir, e))?;
    let lp = workdir.join("model.lp");
    let sol = workdir.join("model.sol");
    let log_path = workdir.join("solver.log");
    write_lp(model, &lp)?;
    // A stale solution must not be mistaken for a fresh one.
    let _ = std::fs::remove_file(&sol);

    let tl = format!("{time_limit_s}");
    let args: Vec<String> = solver_cmd
        .split_whitespace()
        .map(|t| {
            t.replace("{lp}", &lp.to_string_lossy())
                .replace("{sol}", &sol.to_string_lossy())
                .replace("{tl}", &tl)
        })
        .collect();
    let Some((prog, rest)) = args.split_first() else {
        return Err(Error::SolverNotFound("empty solver command".into()));
    };
    let exe = resolve_program(prog).ok_or_else(|| Error::SolverNotFound(prog.clone()))?;

    let start = Instant::now();
    let out = Command::new(&exe)
        .args(rest)
        .output()
        .map_err(|e| Error::SolverNotFound(format!("{prog}: {e}")))?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let mut log = out.stdout;
    log.extend_from_slice(&out.stderr);
    std::fs::write(&log_path, &log).map_err(|e| Error::io(&log_path, e))?;

    if !sol.exists() {
        return Ok(SolveResult {
            status: SolveStatus::Error,
            objective: None,
            values: Vec::new(),
            log_path,
            wall_time_s,
        });
    }
    let text = std::fs::read_to_string(&sol).map_err(|e| Error::io(&sol, e))?;
    let (status, _, raw) = parse_solution(model, &text)?;
    let mut res = SolveResult {
        status,
        objective: None,
        values: Vec::new(),
        log_path,
        wall_time_s,
    };
    if let Some(x) = raw {
        if status.has_solution() {
            let x = accept(model, x)?;
            res.objective = Some(model.objective_value(&x));
            res.values = x;
        }
    }
    Ok(res)
}

/// Parses a solution file against `model`'s column names.
pub fn parse_solution(model: &MilpModel, text: &str) -> Result<(SolveStatus, Option<f64>, Option<Vec<f64>>)> {
    let mut status = None;
    let mut objective = None;
    let mut x = vec![0.0; model.variables.len()];
    let mut any = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(key), Some(val), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::parse(i + 1, format!("expected `name value`, got {line:?}")));
        };
        let num = || {
            val.parse::<f64>()
                .map_err(|_| Error::parse(i + 1, format!("bad number {val:?}")))
        };
        match key {
            "status" => {
                status = Some(match val {
                    "optimal" => SolveStatus::Optimal,
                    "feasible" => SolveStatus::Feasible,
                    "infeasible" => SolveStatus::Infeasible,
                    "timeout" => SolveStatus::Timeout,
                    _ => SolveStatus::Error,
                })
            }
            "objective" => objective = Some(num()?),
            name => {
                let j = model
                    .var(name)
                    .ok_or_else(|| Error::parse(i + 1, format!("unknown column {name}")))?;
                x[j] = num()?;
                any = true;
            }
        }
    }
    let status = status.ok_or_else(|| Error::parse(0, "missing status line"))?;
    Ok((status, objective, any.then_some(x)))
}

/// Rounds near-integral binaries and checks every bound and row.
fn accept(model: &MilpModel, mut x: Vec<f64>) -> Result<Vec<f64>> {
    for (v, xj) in model.variables.iter().zip(x.iter_mut()) {
        if v.kind == VarKind::Binary {
            let r = xj.round();
            if (*xj - r).abs() > FEAS_TOL || !(r == 0.0 || r == 1.0) {
                return Err(Error::ValidationFailed(format!("{} = {xj} is not binary", v.name)));
            }
            *xj = r;
        }
    }
    let viol = model.max_violation(&x);
    if viol > FEAS_TOL {
        return Err(Error::ValidationFailed(format!("max violation {viol:e}")));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::Sense;

    fn tiny() -> MilpModel {
        let mut m = MilpModel::new("t");
        let x = m.add_continuous("x", 0.0, 10.0);
        let y = m.add_binary("y");
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Sense::Ge, 3.0);
        m.objective = vec![(x, 1.0)];
        m
    }

    #[test]
    fn parses_and_rounds() {
        let m = tiny();
        let (s, obj, x) = parse_solution(&m, "status optimal\nobjective 2\ny 0.9999999\nx 2\n").unwrap();
        assert_eq!(s, SolveStatus::Optimal);
        assert_eq!(obj, Some(2.0));
        let x = accept(&m, x.unwrap()).unwrap();
        assert_eq!(x, vec![2.0, 1.0]);
    }

    #[test]
    fn rejects_bad_files_and_points() {
        let m = tiny();
        assert!(matches!(parse_solution(&m, "objective 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_solution(&m, "status optimal\nz 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_solution(&m, "status optimal\nx one\n"), Err(Error::Parse { .. })));
        assert!(matches!(accept(&m, vec![2.0, 0.5]), Err(Error::ValidationFailed(_))));
        assert!(matches!(accept(&m, vec![1.0, 1.0]), Err(Error::ValidationFailed(_))));
    }

    #[test]
    fn missing_program() {
        let dir = tempfile::tempdir().unwrap();
        let err = solve_external(&tiny(), "no-such-solver-xyz {lp} {sol}", 1.0, dir.path()).unwrap_err();
        assert!(matches!(err, Error::SolverNotFound(_)));
    }
}
