//! Command-line driver: batch runs, restarts, parameter sweeps, series
//! analysis, and the acceptance suites.
//!
//! Exit codes: 0 on success, 1 on configuration/analysis errors, 2 when a
//! run dies of non-finite fields (partial output is still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nemf::diagnostics::{detect_steady, estimate_lojasiewicz, fit_decay, DiagRecord, FitResult};
use nemf::integrator::{run, RunOptions, Trajectory};
use nemf::io::{
    generate_initial, load_config, read_series, read_snapshot, write_series, write_snapshot,
    RunConfig,
};
use nemf::spectral::{norm_sq_vec, NormKind, TorusGrid};
use nemf::{Error, Result};

#[derive(Parser)]
#[command(
    name = "nemf",
    version,
    about = "Pseudo-spectral solver for coupled flow/director dynamics on the periodic torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a config file
    Run {
        config: PathBuf,
        /// Override initial.seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override output.dir
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override scheme.dt
        #[arg(long)]
        dt: Option<f64>,
        /// Override params.alpha
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Continue a run from a snapshot
    Resume {
        checkpoint: PathBuf,
        /// New final time (must exceed the checkpoint time)
        #[arg(long)]
        t_end: f64,
        /// Optional config for scheme/output settings; its grid must match
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// One sub-run per parameter value plus a summary table
    Sweep {
        config: PathBuf,
        /// Comma-separated molecule-shape values, e.g. 0,0.5,1
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        /// Comma-separated viscosities
        #[arg(long, value_delimiter = ',')]
        nus: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Fit decay models and the dual-norm exponent to a series CSV, or
    /// compare two snapshots
    Analyze {
        /// Series CSV produced by `run`
        series: Option<PathBuf>,
        /// Two snapshot files to difference
        #[arg(long, num_args = 2)]
        snapshots: Option<Vec<PathBuf>>,
    },
    /// Run a named acceptance suite ("all" for every suite)
    Verify { suite: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run {
            config,
            seed,
            out_dir,
            dt,
            alpha,
        } => {
            let mut cfg = load_config(&config)?;
            apply_overrides(&mut cfg, seed, out_dir, dt, alpha)?;
            cmd_run(&cfg)
        }
        Command::Resume {
            checkpoint,
            t_end,
            config,
            out_dir,
            dt,
        } => cmd_resume(&checkpoint, t_end, config.as_deref(), out_dir, dt),
        Command::Sweep {
            config,
            alphas,
            nus,
            seed,
            out_dir,
            dt,
        } => {
            let mut cfg = load_config(&config)?;
            apply_overrides(&mut cfg, seed, out_dir, dt, None)?;
            cmd_sweep(&cfg, alphas, nus)
        }
        Command::Analyze { series, snapshots } => cmd_analyze(series.as_deref(), snapshots),
        Command::Verify { suite } => cmd_verify(&suite),
    }
}

fn apply_overrides(
    cfg: &mut RunConfig,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    dt: Option<f64>,
    alpha: Option<f64>,
) -> Result<()> {
    if let Some(seed) = seed {
        cfg.initial.seed = seed;
    }
    if let Some(dir) = out_dir {
        cfg.output.dir = dir;
    }
    if let Some(dt) = dt {
        cfg.scheme.dt = dt;
    }
    if let Some(alpha) = alpha {
        cfg.params.alpha = alpha;
    }
    cfg.validate()
}

fn run_options(cfg: &RunConfig) -> RunOptions {
    RunOptions {
        diag_every: cfg.output.diag_every,
        snapshot_every: cfg.output.snapshot_every,
        stop_on_steady: cfg
            .detect
            .stop_on_steady
            .then_some((cfg.detect.tol_a, cfg.detect.tol_resid)),
    }
}

/// Run, write series + snapshots, print a short report. Exit 2 on blow-up.
fn execute(cfg: &RunConfig, initial: nemf::model::State) -> Result<ExitCode> {
    std::fs::create_dir_all(&cfg.output.dir)?;
    let dim = initial.grid().dim();
    let traj = run(initial, &cfg.params, &cfg.scheme, &run_options(cfg))?;
    write_series(&traj.records, dim, cfg.output.dir.join("series.csv"))?;
    write_snapshot(
        &traj.final_state,
        &cfg.params,
        cfg.output.dir.join("final.snap"),
    )?;
    for (i, snap) in traj.snapshots.iter().enumerate() {
        write_snapshot(
            snap,
            &cfg.params,
            cfg.output.dir.join(format!("checkpoint_{i:04}.snap")),
        )?;
    }
    report_trajectory(&traj, cfg);
    if let Some(abort) = traj.aborted {
        eprintln!(
            "run aborted: non-finite fields at t = {} (step {}); partial output in {}",
            abort.t,
            abort.step,
            cfg.output.dir.display()
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn report_trajectory(traj: &Trajectory, cfg: &RunConfig) {
    let last = traj.last_record();
    println!(
        "final t = {:.6}: E = {:.6e}, A = {:.6e}, resid_d = {:.6e}, mean_v = [{}]",
        last.t,
        last.energy,
        last.quantity_a,
        last.resid_d,
        last.mean_v
            .iter()
            .map(|m| format!("{m:.6e}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    match detect_steady(traj, cfg.detect.tol_a, cfg.detect.tol_resid) {
        Some((t_star, _)) => println!(
            "steady state detected at t = {t_star:.6} (A < {:.1e}, resid_d < {:.1e})",
            cfg.detect.tol_a, cfg.detect.tol_resid
        ),
        None => println!("no steady state within the run tolerances"),
    }
    println!(
        "series written to {}",
        cfg.output.dir.join("series.csv").display()
    );
}

fn cmd_run(cfg: &RunConfig) -> Result<ExitCode> {
    let grid = cfg.grid.build()?;
    let initial = generate_initial(&cfg.initial, &grid)?;
    execute(cfg, initial)
}

fn cmd_resume(
    checkpoint: &Path,
    t_end: f64,
    config: Option<&Path>,
    out_dir: Option<PathBuf>,
    dt: Option<f64>,
) -> Result<ExitCode> {
    let snap = read_snapshot(checkpoint)?;
    let mut cfg = match config {
        Some(path) => {
            let cfg = load_config(path)?;
            if cfg.grid.dim != snap.dim || cfg.grid.resolution != snap.resolution {
                return Err(Error::GridMismatch(format!(
                    "config grid {}d/{} vs snapshot {}d/{}",
                    cfg.grid.dim, cfg.grid.resolution, snap.dim, snap.resolution
                )));
            }
            cfg
        }
        None => {
            let mut cfg = RunConfig::default();
            cfg.grid.dim = snap.dim;
            cfg.grid.resolution = snap.resolution;
            cfg
        }
    };
    // physics travels with the checkpoint
    cfg.params = snap.params;
    cfg.scheme.t_end = t_end;
    if let Some(dt) = dt {
        cfg.scheme.dt = dt;
    }
    if let Some(dir) = out_dir {
        cfg.output.dir = dir;
    }
    cfg.validate()?;
    let grid = TorusGrid::new(snap.dim, snap.resolution, cfg.grid.padding)?;
    let state = snap.into_state(&grid)?;
    if t_end <= state.t {
        return Err(Error::validation(
            "t_end",
            format!("must exceed the checkpoint time {}", state.t),
        ));
    }
    println!("resuming from t = {} to t = {}", state.t, t_end);
    execute(&cfg, state)
}

fn cmd_sweep(
    base: &RunConfig,
    alphas: Option<Vec<f64>>,
    nus: Option<Vec<f64>>,
) -> Result<ExitCode> {
    let (key, values) = match (alphas, nus) {
        (Some(a), None) => ("alpha", a),
        (None, Some(n)) => ("nu", n),
        _ => {
            return Err(Error::validation(
                "sweep",
                "provide exactly one of --alphas or --nus",
            ))
        }
    };
    if values.is_empty() {
        return Err(Error::validation("sweep", "empty value list"));
    }
    std::fs::create_dir_all(&base.output.dir)?;
    let mut rows = Vec::new();
    let mut worst = ExitCode::SUCCESS;
    for &value in &values {
        let mut cfg = base.clone();
        match key {
            "alpha" => cfg.params.alpha = value,
            _ => cfg.params.nu = value,
        }
        cfg.output.dir = base.output.dir.join(format!("{key}_{value}"));
        cfg.validate()?;
        println!("--- {key} = {value} ---");
        let grid = cfg.grid.build()?;
        let initial = generate_initial(&cfg.initial, &grid)?;
        std::fs::create_dir_all(&cfg.output.dir)?;
        let dim = grid.dim();
        let traj = run(initial, &cfg.params, &cfg.scheme, &run_options(&cfg))?;
        write_series(&traj.records, dim, cfg.output.dir.join("series.csv"))?;
        write_snapshot(
            &traj.final_state,
            &cfg.params,
            cfg.output.dir.join("final.snap"),
        )?;
        report_trajectory(&traj, &cfg);
        if traj.aborted.is_some() {
            worst = ExitCode::from(2);
        }
        rows.push(summary_row(key, value, &traj, &cfg));
    }

    let header = "param,value,t_steady,theta,fit_model,fit_rate,fit_r2";
    let mut csv = String::from(header);
    csv.push('\n');
    println!("{header}");
    for row in &rows {
        println!("{row}");
        csv.push_str(row);
        csv.push('\n');
    }
    std::fs::write(base.output.dir.join("summary.csv"), csv)?;
    println!(
        "summary written to {}",
        base.output.dir.join("summary.csv").display()
    );
    Ok(worst)
}

fn summary_row(key: &str, value: f64, traj: &Trajectory, cfg: &RunConfig) -> String {
    let t_steady = detect_steady(traj, cfg.detect.tol_a, cfg.detect.tol_resid)
        .map(|(t, _)| format!("{t:.6}"))
        .unwrap_or_else(|| "-".into());
    let e_inf = traj.last_record().energy;
    let theta = estimate_lojasiewicz(&traj.records, e_inf)
        .ok()
        .and_then(|f| f.theta)
        .map(|t| format!("{t:.4}"))
        .unwrap_or_else(|| "-".into());
    let fit = fit_decay(&traj.series(|r| r.quantity_a)).ok();
    let (model, rate, r2) = match &fit {
        Some(f) => (
            f.model.to_string(),
            format!("{:.6}", f.rate),
            format!("{:.6}", f.r_squared),
        ),
        None => ("-".into(), "-".into(), "-".into()),
    };
    format!("{key},{value},{t_steady},{theta},{model},{rate},{r2}")
}

fn print_fit(label: &str, fit: &FitResult) {
    let theta = fit
        .theta
        .map(|t| format!(" theta={t:.6}"))
        .unwrap_or_default();
    println!(
        "{label}: model={} rate={:.9} amplitude={:.6e} r2={:.6} window=[{:.4}, {:.4}]{theta}{}",
        fit.model,
        fit.rate,
        fit.amplitude,
        fit.r_squared,
        fit.window.0,
        fit.window.1,
        if fit.theta_clamped {
            " exponential_regime"
        } else {
            ""
        }
    );
}

fn cmd_analyze(series: Option<&Path>, snapshots: Option<Vec<PathBuf>>) -> Result<ExitCode> {
    if let Some(paths) = snapshots {
        let a = read_snapshot(&paths[0])?;
        let b = read_snapshot(&paths[1])?;
        if a.dim != b.dim || a.resolution != b.resolution {
            return Err(Error::GridMismatch(format!(
                "{}d/{} vs {}d/{}",
                a.dim, a.resolution, b.dim, b.resolution
            )));
        }
        let grid = TorusGrid::new(a.dim, a.resolution, Default::default())?;
        let sa = a.into_state(&grid)?;
        let sb = b.into_state(&grid)?;
        let dv = sa.v.sub(&sb.v).l2_norm_sq();
        let dd = norm_sq_vec(&sa.d.sub(&sb.d), NormKind::H1);
        println!("t_a = {}, t_b = {}", sa.t, sb.t);
        println!("|v_a - v_b|^2_L2  = {dv:.9e}");
        println!("|d_a - d_b|^2_H1  = {dd:.9e}");
        println!("delta             = {:.9e}", dv + dd);
        return Ok(ExitCode::SUCCESS);
    }
    let Some(path) = series else {
        return Err(Error::validation(
            "analyze",
            "provide a series CSV or --snapshots a b",
        ));
    };
    let (_, records) = read_series(path)?;
    let series_of = |f: &dyn Fn(&DiagRecord) -> f64| -> Vec<(f64, f64)> {
        records.iter().map(|r| (r.t, f(r))).collect()
    };
    let a_fit = fit_decay(&series_of(&|r| r.quantity_a))?;
    print_fit("A", &a_fit);
    match fit_decay(&series_of(&|r| r.resid_d)) {
        Ok(fit) => print_fit("resid_d", &fit),
        Err(e) => println!("resid_d: {e}"),
    }
    match fit_decay(&series_of(&|r| r.l2_v)) {
        Ok(fit) => print_fit("l2_v", &fit),
        Err(e) => println!("l2_v: {e}"),
    }
    let e_inf = records
        .iter()
        .map(|r| r.energy)
        .fold(f64::INFINITY, f64::min);
    match estimate_lojasiewicz(&records, e_inf) {
        Ok(fit) => print_fit("lojasiewicz", &fit),
        Err(e) => println!("lojasiewicz: {e}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str) -> Result<ExitCode> {
    let reports = nemf::verify::run_suite(suite)?;
    let mut all_passed = true;
    for r in &reports {
        println!(
            "[{}] {:<22} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        all_passed &= r.passed;
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
