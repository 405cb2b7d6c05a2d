//! `hjsg` — benchmark driver for the adaptive sparse-grid LDG
//! Hamilton-Jacobi solver.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hjsg_core::bench::{
    annotate_rates, mean_gradient_field, run_case_with_hook, CaseId, ConvergenceRow, GridMode,
    RateMode, RunConfig, RunOutcome,
};
use hjsg_core::error::SolverError;
use hjsg_core::io;
use hjsg_core::project::eval_field_at;
use hjsg_core::tables::BoundaryCondition;

#[derive(Parser)]
#[command(
    name = "hjsg",
    about = "Adaptive sparse-grid LDG solver for Hamilton-Jacobi equations",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one benchmark configuration and report the L2 error.
    Run(RunArgs),
    /// Sweep the adaptivity threshold and tabulate convergence rates.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// burgers | cos | nonlinear2d | eikonal | hjb | control
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Polynomial degree of the trial space (0..=3).
    #[arg(long)]
    k: Option<usize>,
    /// Interpolation degree (k..=5); defaults to the per-case choice.
    #[arg(long)]
    m: Option<usize>,
    /// Maximum mesh level N.
    #[arg(long = "max-level")]
    max_level: Option<u8>,
    /// full | sparse | adaptive
    #[arg(long)]
    mode: Option<String>,
    /// Coarsening threshold (default eps / 10).
    #[arg(long)]
    eta: Option<f64>,
    /// Courant number (default 0.1).
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// periodic | outflow (overrides the per-case default).
    #[arg(long)]
    bc: Option<String>,
    /// analytic | sampled dissipation bounds.
    #[arg(long)]
    alpha: Option<String>,
    /// Write the result table as CSV.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Sample the solution on a uniform grid (x1 .. xd value rows).
    #[arg(long = "dump-solution")]
    dump_solution: Option<PathBuf>,
    /// Dump the active elements with indicators.
    #[arg(long = "dump-active")]
    dump_active: Option<PathBuf>,
    /// Dump the control sign field (control case only).
    #[arg(long = "dump-controls")]
    dump_controls: Option<PathBuf>,
    /// Write the per-step trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Flat key-value config file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reserved for randomized property tooling; deterministic runs ignore it.
    #[arg(long)]
    seed: Option<u64>,
    /// Disable the C1 Hamiltonian regularization (stability study).
    #[arg(long = "no-regularization")]
    no_regularization: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Refinement threshold for adaptive mode.
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Threshold range `A..B` swept by decades (e.g. `1e-3..1e-7`).
    #[arg(long)]
    eps: Option<String>,
}

fn invalid(msg: impl Into<String>) -> SolverError {
    SolverError::InvalidConfig(msg.into())
}

fn merge_config(common: &mut CommonArgs, eps_run: &mut Option<f64>, eps_sweep: &mut Option<String>)
    -> Result<(), SolverError>
{
    let Some(path) = &common.config else { return Ok(()) };
    let map = config::load(path).map_err(invalid)?;
    config::fill(&mut common.case, &map, "case").map_err(invalid)?;
    config::fill(&mut common.dim, &map, "dim").map_err(invalid)?;
    config::fill(&mut common.k, &map, "k").map_err(invalid)?;
    config::fill(&mut common.m, &map, "m").map_err(invalid)?;
    config::fill(&mut common.max_level, &map, "max-level").map_err(invalid)?;
    config::fill(&mut common.mode, &map, "mode").map_err(invalid)?;
    config::fill(&mut common.eta, &map, "eta").map_err(invalid)?;
    config::fill(&mut common.cfl, &map, "cfl").map_err(invalid)?;
    config::fill(&mut common.t_final, &map, "t-final").map_err(invalid)?;
    config::fill(&mut common.bc, &map, "bc").map_err(invalid)?;
    config::fill(&mut common.alpha, &map, "alpha").map_err(invalid)?;
    config::fill(&mut common.output, &map, "output").map_err(invalid)?;
    config::fill(&mut common.dump_solution, &map, "dump-solution").map_err(invalid)?;
    config::fill(&mut common.dump_active, &map, "dump-active").map_err(invalid)?;
    config::fill(&mut common.dump_controls, &map, "dump-controls").map_err(invalid)?;
    config::fill(&mut common.trace, &map, "trace").map_err(invalid)?;
    config::fill(&mut common.seed, &map, "seed").map_err(invalid)?;
    config::fill(eps_run, &map, "eps").map_err(invalid)?;
    if eps_sweep.is_none() {
        if let Some(v) = map.get("eps") {
            *eps_sweep = Some(v.clone());
        }
    }
    Ok(())
}

fn build_run_config(common: &CommonArgs, eps: f64) -> Result<RunConfig, SolverError> {
    let case = CaseId::parse(common.case.as_deref().ok_or_else(|| invalid("--case required"))?)?;
    let d = common.dim.ok_or_else(|| invalid("--dim required"))?;
    let k = common.k.ok_or_else(|| invalid("--k required"))?;
    let mut cfg = RunConfig::defaults(case, d, k)?;
    if let Some(m) = common.m {
        if m < k {
            return Err(invalid(format!(
                "M = {m} below k = {k}: the interpolation degree must satisfy M >= k"
            )));
        }
        cfg.m = m;
    }
    if let Some(n) = common.max_level {
        if n == 0 || n > 12 {
            return Err(invalid("--max-level must be in 1..=12"));
        }
        cfg.max_level = n;
    }
    cfg.mode = match common.mode.as_deref() {
        None | Some("adaptive") => GridMode::Adaptive,
        Some("full") => GridMode::Full,
        Some("sparse") => GridMode::Sparse,
        Some(other) => return Err(invalid(format!("unknown mode `{other}`"))),
    };
    cfg.eps = eps;
    cfg.eta = common.eta.unwrap_or(eps / 10.0);
    if cfg.mode == GridMode::Adaptive && !(cfg.eta < cfg.eps) {
        return Err(invalid("eta must be smaller than eps"));
    }
    if let Some(cfl) = common.cfl {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(invalid("cfl must lie in (0, 1]"));
        }
        cfg.cfl = cfl;
    }
    if let Some(t) = common.t_final {
        if t <= 0.0 {
            return Err(invalid("t-final must be positive"));
        }
        cfg.t_final = t;
    }
    cfg.bc_override = match common.bc.as_deref() {
        None => None,
        Some("periodic") => Some(BoundaryCondition::Periodic),
        Some("outflow") => Some(BoundaryCondition::Outflow),
        Some(other) => return Err(invalid(format!("unknown bc `{other}`"))),
    };
    cfg.sampled_alpha = match common.alpha.as_deref() {
        None | Some("analytic") => false,
        Some("sampled") => true,
        Some(other) => return Err(invalid(format!("unknown alpha mode `{other}`"))),
    };
    cfg.regularization = !common.no_regularization;
    Ok(cfg)
}

fn write_dumps(common: &CommonArgs, cfg: &RunConfig, out: &RunOutcome) -> Result<(), SolverError> {
    let control_sign = if cfg.case == CaseId::Control
        && (common.dump_solution.is_some() || common.dump_controls.is_some())
    {
        Some(mean_gradient_field(&out.phi, &out.space, &out.tables, 1)?)
    } else {
        None
    };
    let signf = control_sign.as_ref().map(|mean| {
        move |x: &[f64]| {
            eval_field_at(mean, &out.space, &out.tables.alpert, &out.tables.interp, x)
                .map(f64::signum)
                .unwrap_or(f64::NAN)
        }
    });

    if let Some(path) = &common.dump_solution {
        let extra: Option<(&str, &dyn Fn(&[f64]) -> f64)> = match &signf {
            Some(f) => Some(("control_sign", f)),
            None => None,
        };
        io::write_solution_dump(
            path,
            &out.phi,
            &out.space,
            &out.tables.alpert,
            &out.tables.interp,
            129,
            extra,
        )?;
    }
    if let Some(path) = &common.dump_controls {
        let (Some(mean), Some(f)) = (&control_sign, &signf) else {
            return Err(invalid("--dump-controls is only meaningful for the control case"));
        };
        // value column: mean second gradient component; extra: its sign
        io::write_solution_dump(
            path,
            mean,
            &out.space,
            &out.tables.alpert,
            &out.tables.interp,
            129,
            Some(("control_sign", f)),
        )?;
    }
    if let Some(path) = &common.dump_active {
        io::write_active_csv(path, &out.phi, &out.space)?;
    }
    if let Some(path) = &common.trace {
        io::write_trace_csv(path, &out.trace)?;
    }
    Ok(())
}

fn cmd_run(mut args: RunArgs) -> Result<(), SolverError> {
    let mut eps_sweep = None;
    merge_config(&mut args.common, &mut args.eps, &mut eps_sweep)?;
    let eps = args.eps.unwrap_or(1e-5);
    let cfg = build_run_config(&args.common, eps)?;
    let out = run_case_with_hook(&cfg, |_, _, _| {})?;
    let err_str = out
        .l2_error
        .map(|e| format!("{e:.6e}"))
        .unwrap_or_else(|| "n/a".into());
    println!(
        "case={} d={} k={} M={} N={} mode={:?} dof={} steps={} l2_error={}",
        cfg.case.name(),
        cfg.d,
        cfg.k,
        cfg.m,
        cfg.max_level,
        cfg.mode,
        out.max_dof,
        out.steps,
        err_str
    );
    if let Some(path) = &args.common.output {
        let mut rows = vec![ConvergenceRow::new(cfg.max_level as f64, out.max_dof, 0.0)];
        rows[0].error = out.l2_error.unwrap_or(f64::NAN);
        io::write_table_csv(path, &rows, RateMode::ByLevel)?;
    }
    write_dumps(&args.common, &cfg, &out)?;
    Ok(())
}

fn parse_eps_range(raw: &str) -> Result<Vec<f64>, SolverError> {
    if let Some((a, b)) = raw.split_once("..") {
        let hi: f64 = a.parse().map_err(|_| invalid(format!("bad eps `{a}`")))?;
        let lo: f64 = b.parse().map_err(|_| invalid(format!("bad eps `{b}`")))?;
        if !(hi > 0.0 && lo > 0.0 && lo < hi) {
            return Err(invalid("eps range must satisfy 0 < low < high (e.g. 1e-3..1e-7)"));
        }
        let mut out = Vec::new();
        let mut e = hi;
        while e > lo * (1.0 + 1e-12) {
            out.push(e);
            e /= 10.0;
        }
        out.push(lo);
        Ok(out)
    } else {
        let e: f64 = raw.parse().map_err(|_| invalid(format!("bad eps `{raw}`")))?;
        Ok(vec![e])
    }
}

fn cmd_sweep(mut args: SweepArgs) -> Result<(), SolverError> {
    let mut eps_run = None;
    merge_config(&mut args.common, &mut eps_run, &mut args.eps)?;
    let raw = args.eps.clone().ok_or_else(|| invalid("--eps range required (e.g. 1e-3..1e-7)"))?;
    let eps_list = parse_eps_range(&raw)?;
    // HJSG_THREADS caps sweep parallelism; runs are sequential (cap >= 1)
    let _threads: usize = std::env::var("HJSG_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1);

    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &eps in &eps_list {
        let cfg = build_run_config(&args.common, eps)?;
        if cfg.mode != GridMode::Adaptive {
            return Err(invalid("sweep requires --mode adaptive"));
        }
        let out = run_case_with_hook(&cfg, |_, _, _| {})?;
        let err = out.l2_error.ok_or_else(|| {
            invalid(format!("case `{}` has no reference solution to sweep against", cfg.case.name()))
        })?;
        println!(
            "eps={eps:.1e} dof={} l2_error={err:.6e} steps={}",
            out.max_dof, out.steps
        );
        rows.push(ConvergenceRow::new(eps, out.max_dof, err));
    }
    if rows.len() >= 2 {
        annotate_rates(&mut rows, RateMode::ByThreshold)?;
    }
    println!("eps,dof,l2_error,r_eps,r_dof");
    for r in &rows {
        println!(
            "{:.1e},{},{:.6e},{},{}",
            r.control,
            r.dof,
            r.error,
            r.r_eps.map(|v| format!("{v:.2}")).unwrap_or_default(),
            r.r_dof.map(|v| format!("{v:.2}")).unwrap_or_default()
        );
    }
    if let Some(path) = &args.common.output {
        io::write_table_csv(path, &rows, RateMode::ByThreshold)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match &err {
                SolverError::NumericalFailure { diagnostics, .. } => {
                    if !diagnostics.is_empty() {
                        let path = PathBuf::from("hjsg-nonfinite-diagnostics.csv");
                        if io::write_diagnostics_csv(&path, diagnostics).is_ok() {
                            eprintln!("diagnostics written to {}", path.display());
                        }
                    }
                    3
                }
                SolverError::InvalidConfig(_)
                | SolverError::UnsupportedDegree { .. }
                | SolverError::NoExactSolution { .. } => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
