mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pwlmilp::biclique::GraphFile;
use pwlmilp::blocking::coloring_cnf;
use pwlmilp::conflict::{reduce_rank, ReduceOptions, ValueRule};
use pwlmilp::fitting::{convergence_svg, fit, report_csv, FitConfig, FitResult, TargetFunction};
use pwlmilp::mesh::{load_mesh, save_mesh};
use pwlmilp::milp::{build_baseline, build_gib, read_lp, verify_formulation, write_lp, Baseline, MilpModel};
use pwlmilp::pipeline::{analyze, run_pipeline, CoverMethod, PipelineOptions, PipelineOutput};
use pwlmilp::solver::{solve_external, SolveResult};
use pwlmilp::sths::{build_sths, evaluate_schedule, Plant, Scenario, Schedule};
use pwlmilp::{Error, Rect, SimplicialPartition};
use serde::Serialize;

use config::CliConfig;

#[derive(Parser)]
#[command(name = "pwlmilp", version, about = "Certified PWL fitting and compact MILP formulations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Settings file with `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Solver command template with {lp}, {sol} and {tl} placeholders.
    #[arg(long, global = true)]
    solver: Option<String>,
    /// Solver time limit in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    /// Candidate budget for conflict and blocking enumeration.
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Search-node limit per exact biclique search.
    #[arg(long, global = true)]
    node_limit: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit a function to a certified absolute tolerance.
    Fit(FitArgs),
    /// Conflict, blocking and cover statistics of a mesh.
    Analyze(PipeArgs),
    /// Split edges until no rank-3 or larger conflict remains (if possible).
    Reduce(ReduceArgs),
    /// Biclique cover of the pairwise conflict graph.
    Cover(PipeArgs),
    /// Emit the MILP formulation of a mesh.
    Formulate(FormulateArgs),
    /// Check a formulation against the mesh by enumerating its binaries.
    Verify(FormulateArgs),
    /// Build (and, with a solver, solve) the hydro scheduling model.
    Sths(SthsArgs),
    /// Solve an LP file with the configured solver.
    Solve(SolveArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Built-in function: f1..f5, ripple or hpf.
    #[arg(long = "fn", conflicts_with = "expr", required_unless_present = "expr")]
    function: Option<String>,
    /// Expression in x and y.
    #[arg(long)]
    expr: Option<String>,
    /// Lipschitz constant for --expr (estimated when absent).
    #[arg(long)]
    lipschitz: Option<f64>,
    /// Domain for --expr as x_min,x_max,y_min,y_max.
    #[arg(long, value_delimiter = ',')]
    domain: Option<Vec<f64>>,
    /// Absolute error tolerance (default 0.1).
    #[arg(long)]
    eps: Option<f64>,
    /// Minimum-angle bound in degrees.
    #[arg(long)]
    alpha: Option<f64>,
    /// Share of the tolerance kept for the Lipschitz margin.
    #[arg(long)]
    theta: Option<f64>,
    /// Refinement rounds before giving up.
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverKind {
    Exact,
    Geom,
}

#[derive(Args)]
struct PipeArgs {
    mesh: PathBuf,
    /// Skip rank reduction.
    #[arg(long)]
    no_reduce: bool,
    #[arg(long, value_enum, default_value = "exact")]
    cover: CoverKind,
    /// Rounds of line-cut heuristic before the exact search.
    #[arg(long, default_value_t = 3)]
    geom_rounds: usize,
    /// Candidate lines per heuristic round.
    #[arg(long, default_value_t = 200)]
    lines: usize,
    /// Also write the coloring instance in DIMACS CNF.
    #[arg(long)]
    dimacs: bool,
}

#[derive(Args)]
struct ReduceArgs {
    mesh: PathBuf,
    #[arg(long)]
    max_splits: Option<usize>,
}

#[derive(Args)]
struct FormulateArgs {
    #[command(flatten)]
    pipe: PipeArgs,
    /// gib, dlog, inc, mc, dcc or cc.
    #[arg(long, default_value = "gib")]
    formulation: String,
}

#[derive(Args)]
struct SthsArgs {
    /// CSV with columns period, price, inflow.
    #[arg(long)]
    scenario: PathBuf,
    /// Plant settings (`key = value`); defaults when absent.
    #[arg(long)]
    plant: Option<PathBuf>,
    /// Fitted power-function mesh.
    #[arg(long)]
    mesh: PathBuf,
    /// Skip rank reduction.
    #[arg(long)]
    no_reduce: bool,
    /// Skip solving even when a solver is configured.
    #[arg(long)]
    no_solve: bool,
}

#[derive(Args)]
struct SolveArgs {
    model: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::MaxIterExceeded(_) | Error::RefinementLimit(_)) => 2,
        Some(Error::SizeLimit { .. } | Error::TooManyBinaries(..)) => 4,
        Some(
            Error::Parse { .. }
            | Error::Io { .. }
            | Error::Json(_)
            | Error::Config(_)
            | Error::DomainMismatch(_)
            | Error::DegenerateInput(_)
            | Error::DuplicatePoint(..)
            | Error::Degenerate(_)
            | Error::Validation(_),
        ) => 3,
        Some(_) => 1,
        None if e.downcast_ref::<std::io::Error>().is_some() => 3,
        None => 1,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = cli.global;
    let file = match &g.config {
        Some(p) => CliConfig::load(p)?,
        None => CliConfig::default(),
    };
    let mut flags = CliConfig {
        seed: g.seed,
        out: g.out,
        solver: g.solver,
        time_limit: g.time_limit,
        budget: g.budget,
        node_limit: g.node_limit,
        ..Default::default()
    };
    match &cli.cmd {
        Cmd::Fit(a) => {
            flags.eps = a.eps;
            flags.alpha_lb = a.alpha;
            flags.theta = a.theta;
            flags.max_iter = a.max_iter;
        }
        Cmd::Reduce(a) => flags.max_splits = a.max_splits,
        _ => {}
    }
    let cfg = file.merge(flags)?;
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
    match cli.cmd {
        Cmd::Fit(a) => cmd_fit(&cfg, &out, &a),
        Cmd::Analyze(a) => {
            let res = pipeline(&cfg, &a)?;
            write_analysis(&out, &res, a.dimacs)?;
            println!("{}", serde_json::to_string_pretty(&res.analysis)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Reduce(a) => cmd_reduce(&cfg, &out, &a),
        Cmd::Cover(a) => {
            let res = pipeline(&cfg, &a)?;
            write_json(&out.join("cover.json"), &res.cover)?;
            let graph = GraphFile {
                vertices: res.conflicts.num_vertices,
                edges: res.conflicts.pairs(),
                weights: None,
            };
            write_json(&out.join("graph.json"), &graph)?;
            println!("{} bicliques cover {} edges", res.cover.len(), res.cover.num_edges);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Formulate(a) => {
            let (res, m) = formulate(&cfg, &a)?;
            write_analysis(&out, &res, a.pipe.dimacs)?;
            save_mesh(&res.mesh, out.join("mesh.json"))?;
            write_lp(&m, out.join("model.lp"))?;
            let s = m.size();
            println!("{}: {} rows, {} columns, {} binaries", a.formulation, s.rows, s.cols, s.binaries);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify(a) => {
            let (res, m) = formulate(&cfg, &a)?;
            let report = verify_formulation(&m, &res.mesh.to_set_system())?;
            write_json(&out.join("verify.json"), &report)?;
            if report.ok() {
                println!("{}: ok ({} feasible assignments)", a.formulation, report.feasible_assignments);
                Ok(ExitCode::SUCCESS)
            } else {
                println!(
                    "{}: FAILED ({} bad supports, {} unreached sets)",
                    a.formulation,
                    report.bad_supports.len(),
                    report.unreached.len()
                );
                Ok(ExitCode::FAILURE)
            }
        }
        Cmd::Sths(a) => cmd_sths(&cfg, &out, &a),
        Cmd::Solve(a) => {
            let m = read_lp(&a.model)?;
            let Some(cmd) = cfg.solver_cmd() else {
                bail!(Error::SolverNotFound("no solver configured".into()));
            };
            let r = solve(&m, &cmd, &cfg, &out)?;
            println!("{} objective {:?}", format!("{:?}", r.status).to_lowercase(), r.objective);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    std::fs::write(path, s).map_err(|e| Error::Io { path: path.into(), source: e })?;
    Ok(())
}

fn write_text(path: &Path, s: &str) -> Result<()> {
    std::fs::write(path, s).map_err(|e| Error::Io { path: path.into(), source: e })?;
    Ok(())
}

fn cmd_fit(cfg: &CliConfig, out: &Path, a: &FitArgs) -> Result<ExitCode> {
    let f = match (&a.function, &a.expr) {
        (Some(name), _) => TargetFunction::by_name(name).ok_or_else(|| Error::Config(format!("unknown function {name}")))?,
        (None, Some(expr)) => {
            let d = match a.domain.as_deref() {
                None => Rect::unit(),
                Some(&[x0, x1, y0, y1]) if x0 < x1 && y0 < y1 => Rect::new(x0, x1, y0, y1),
                Some(d) => return Err(Error::Config(format!("bad domain {d:?}; expected x_min,x_max,y_min,y_max")).into()),
            };
            TargetFunction::from_expr(expr, a.lipschitz, d)?
        }
        (None, None) => unreachable!("clap requires one of --fn and --expr"),
    };
    if !f.lipschitz_verified {
        eprintln!("warning: Lipschitz constant {:.4} is an estimate; the error bound is not certified", f.lipschitz);
    }
    let d = FitConfig::default();
    let fc = FitConfig {
        eps: cfg.eps.unwrap_or(d.eps),
        alpha_lb: cfg.alpha_lb.unwrap_or(d.alpha_lb),
        theta: cfg.theta.unwrap_or(d.theta),
        seed: cfg.seed.unwrap_or(d.seed),
        max_iter: cfg.max_iter.unwrap_or(d.max_iter),
    };
    let (res, code) = match fit(&f, &fc) {
        Ok(r) => (r, ExitCode::SUCCESS),
        Err(Error::MaxIterExceeded(r)) => {
            eprintln!("warning: stopped after {} iterations above the tolerance", r.report.records.len());
            (*r, ExitCode::from(2))
        }
        Err(e) => return Err(e.into()),
    };
    write_fit(out, &res, &fc)?;
    println!(
        "{}: {} triangles, {} points, sampled error {:.3e}",
        f.name,
        res.pwl.num_simplices(),
        res.pwl.num_vertices(),
        res.report.final_eps_hat()
    );
    Ok(code)
}

fn write_fit(out: &Path, res: &FitResult, fc: &FitConfig) -> Result<()> {
    save_mesh(&res.pwl, out.join("mesh.json"))?;
    write_text(&out.join("report.csv"), &report_csv(&res.report))?;
    write_text(&out.join("convergence.svg"), &convergence_svg(&res.report, (1.0 - fc.theta) * fc.eps))?;
    Ok(())
}

fn pipe_options(cfg: &CliConfig, a: &PipeArgs) -> PipelineOptions {
    let d = PipelineOptions::default();
    PipelineOptions {
        reduce: !a.no_reduce,
        max_splits: cfg.max_splits.unwrap_or(d.max_splits),
        budget: cfg.budget.unwrap_or(d.budget),
        cover: match a.cover {
            CoverKind::Exact => CoverMethod::Exact,
            CoverKind::Geom => CoverMethod::Geom { k: a.geom_rounds, n_lines: a.lines },
        },
        node_limit: cfg.node_limit.unwrap_or(d.node_limit),
        seed: cfg.seed.unwrap_or(d.seed),
    }
}

fn pipeline(cfg: &CliConfig, a: &PipeArgs) -> Result<PipelineOutput> {
    let mesh = load_mesh(&a.mesh)?;
    Ok(run_pipeline(&mesh, &pipe_options(cfg, a))?)
}

fn write_analysis(out: &Path, res: &PipelineOutput, dimacs: bool) -> Result<()> {
    write_json(&out.join("analysis.json"), &res.analysis)?;
    if dimacs {
        if let (Some(bh), Some(c)) = (&res.blocking, &res.coloring) {
            write_text(&out.join("coloring.cnf"), &coloring_cnf(bh, c.q).to_dimacs())?;
        }
    }
    Ok(())
}

fn model_for(res: &PipelineOutput, name: &str) -> Result<MilpModel> {
    if name == "gib" {
        return Ok(build_gib(&res.spec)?);
    }
    let b = Baseline::parse(name).ok_or_else(|| Error::Config(format!("unknown formulation {name}")))?;
    Ok(build_baseline(&res.spec, b)?)
}

fn formulate(cfg: &CliConfig, a: &FormulateArgs) -> Result<(PipelineOutput, MilpModel)> {
    // Baselines need no cover or coloring, but sharing the pipeline keeps
    // the (possibly refined) mesh identical across formulations.
    let res = pipeline(cfg, &a.pipe)?;
    let m = model_for(&res, &a.formulation)?;
    Ok((res, m))
}

fn cmd_reduce(cfg: &CliConfig, out: &Path, a: &ReduceArgs) -> Result<ExitCode> {
    let mesh = load_mesh(&a.mesh)?;
    let d = ReduceOptions::default();
    let opts = ReduceOptions {
        max_splits: cfg.max_splits.unwrap_or(d.max_splits),
        check_rebuild: false,
        budget: cfg.budget.unwrap_or(d.budget),
    };
    let before = analyze(&mesh, opts.budget)?.rank();
    let (reduced, hg, splits) = reduce_rank(&mesh, ValueRule::Preserve, opts)?;
    save_mesh(&reduced, out.join("mesh.json"))?;
    let mut csv = String::from("u,v,w,rank,eliminated,created\n");
    for s in &splits {
        let _ = writeln!(csv, "{},{},{},{},{},{}", s.u, s.v, s.w, s.k, s.eliminated, s.created);
    }
    write_text(&out.join("splits.csv"), &csv)?;
    println!("rank {before} -> {} after {} splits", hg.rank(), splits.len());
    Ok(ExitCode::SUCCESS)
}

fn solve(m: &MilpModel, cmd: &str, cfg: &CliConfig, out: &Path) -> Result<SolveResult> {
    let r = solve_external(m, cmd, cfg.time_limit.unwrap_or(600.0), &out.join("solve"))?;
    let values: serde_json::Map<String, serde_json::Value> = m
        .variables
        .iter()
        .zip(&r.values)
        .map(|(v, &x)| (v.name.clone(), x.into()))
        .collect();
    write_json(
        &out.join("solution.json"),
        &serde_json::json!({
            "status": r.status,
            "objective": r.objective,
            "wall_time_s": r.wall_time_s,
            "log": r.log_path,
            "values": values,
        }),
    )?;
    Ok(r)
}

fn cmd_sths(cfg: &CliConfig, out: &Path, a: &SthsArgs) -> Result<ExitCode> {
    let plant = match &a.plant {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io { path: p.clone(), source: e })?;
            Plant::from_toml(&text)?
        }
        None => Plant::default(),
    };
    let csv = std::fs::read_to_string(&a.scenario).map_err(|e| Error::Io { path: a.scenario.clone(), source: e })?;
    let scenario = Scenario::from_csv(&csv, plant)?;
    let mesh: SimplicialPartition = load_mesh(&a.mesh)?;
    let args = PipeArgs {
        mesh: a.mesh.clone(),
        no_reduce: a.no_reduce,
        cover: CoverKind::Exact,
        geom_rounds: 0,
        lines: 0,
        dimacs: false,
    };
    let res = run_pipeline(&mesh, &pipe_options(cfg, &args))?;
    let m = build_sths(&scenario, &res.spec)?;
    write_lp(&m, out.join("sths.lp"))?;
    let s = m.size();
    println!("{} periods: {} rows, {} columns, {} binaries", scenario.periods(), s.rows, s.cols, s.binaries);
    if a.no_solve {
        return Ok(ExitCode::SUCCESS);
    }
    let Some(cmd) = cfg.solver_cmd() else {
        println!("no solver configured; model written only");
        return Ok(ExitCode::SUCCESS);
    };
    let r = solve(&m, &cmd, cfg, out)?;
    if !r.status.has_solution() {
        println!("solver returned {:?}", r.status);
        return Ok(ExitCode::FAILURE);
    }
    let sched = Schedule::from_solution(&m, &r.values, scenario.periods())?;
    let hpf = pwlmilp::sths::Hpf::default();
    let eval = evaluate_schedule(&sched, &scenario, &|q, v| hpf.eval(q, v));
    write_json(&out.join("evaluation.json"), &serde_json::json!({ "schedule": sched, "evaluation": eval }))?;
    println!(
        "objective {:.4} (true {:.4}, rel. error {:.2e})",
        eval.pwl_obj, eval.nl_obj, eval.rel_err
    );
    Ok(ExitCode::SUCCESS)
}
