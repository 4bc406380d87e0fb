//! End-to-end tests of the binary: exit codes, file outputs, overrides,
//! resume determinism, sweeps, analysis.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nemf"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("nemf-cli-tests").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_series_column(path: &Path, column: &str) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let t_idx = header.iter().position(|&c| c == "t").unwrap();
    let c_idx = header
        .iter()
        .position(|&c| c == column)
        .unwrap_or_else(|| panic!("no column {column}"));
    lines
        .map(|l| {
            let cells: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            (cells[t_idx], cells[c_idx])
        })
        .collect()
}

#[test]
fn run_equilibrium_config_exits_clean_with_zero_a() {
    let out_dir = tmp("equilibrium");
    let out = bin()
        .args(["run"])
        .arg(repo_config("equilibrium.cfg"))
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let series = read_series_column(&out_dir.join("series.csv"), "A");
    assert!(!series.is_empty());
    assert_eq!(series.last().unwrap().1, 0.0);
    assert!(out_dir.join("final.snap").exists());
}

/// Small frozen-director vortex run: the fitted ‖v‖ decay rate must be
/// −8π²ν within 1%.
#[test]
fn run_taylor_green_decay_rate() {
    let dir = tmp("taylor-green");
    let cfg_path = dir.join("tg.cfg");
    std::fs::write(
        &cfg_path,
        "grid.dim = 2\n\
         grid.resolution = 32\n\
         params.nu = 0.05\n\
         scheme.name = imex_bdf2\n\
         scheme.dt = 1e-3\n\
         scheme.t_end = 0.5\n\
         scheme.frozen_director = true\n\
         initial.generator = taylor_green\n\
         initial.amplitude = 1.0\n\
         output.diag_every = 25\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = bin()
        .args(["run"])
        .arg(&cfg_path)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let series = read_series_column(&out_dir.join("series.csv"), "l2_v");
    // least-squares slope of log ||v|| against t
    let n = series.len() as f64;
    let mx = series.iter().map(|p| p.0).sum::<f64>() / n;
    let my = series.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = series.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = series.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let rate = sxy / sxx;
    let exact = -8.0 * std::f64::consts::PI * std::f64::consts::PI * 0.05;
    assert!(
        (rate - exact).abs() <= 0.01 * exact.abs(),
        "fitted rate {rate} vs {exact}"
    );
}

/// Run to t=0.2 in one piece and in two pieces through a checkpoint; the
/// final records must agree to 1e-12.
#[test]
fn resume_matches_uninterrupted_run() {
    let dir = tmp("resume");
    let cfg_path = dir.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "grid.dim = 2\n\
         grid.resolution = 16\n\
         initial.generator = perturbed_constant_director\n\
         initial.seed = 21\n\
         initial.amplitude = 0.1\n\
         scheme.dt = 1e-3\n\
         scheme.t_end = 0.2\n\
         output.diag_every = 10\n",
    )
    .unwrap();
    let full_dir = dir.join("full");
    let out = bin()
        .args(["run"])
        .arg(&cfg_path)
        .arg("--out-dir")
        .arg(&full_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);

    let half_cfg = dir.join("half.cfg");
    std::fs::write(
        &half_cfg,
        std::fs::read_to_string(&cfg_path)
            .unwrap()
            .replace("scheme.t_end = 0.2", "scheme.t_end = 0.1"),
    )
    .unwrap();
    let half_dir = dir.join("half");
    let out = bin()
        .args(["run"])
        .arg(&half_cfg)
        .arg("--out-dir")
        .arg(&half_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);

    let resumed_dir = dir.join("resumed");
    let out = bin()
        .args(["resume"])
        .arg(half_dir.join("final.snap"))
        .args(["--t-end", "0.2", "--config"])
        .arg(&cfg_path)
        .arg("--out-dir")
        .arg(&resumed_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let full = read_series_column(&full_dir.join("series.csv"), "E");
    let resumed = read_series_column(&resumed_dir.join("series.csv"), "E");
    let last_full = full.last().unwrap();
    let last_resumed = resumed.last().unwrap();
    assert!((last_full.0 - last_resumed.0).abs() < 1e-9);
    assert!(
        (last_full.1 - last_resumed.1).abs() <= 1e-12 * last_full.1.abs().max(1e-3),
        "E {} vs {}",
        last_full.1,
        last_resumed.1
    );
}

#[test]
fn sweep_over_alphas_writes_summary_rows() {
    let dir = tmp("sweep");
    let cfg_path = dir.join("sweep.cfg");
    std::fs::write(
        &cfg_path,
        "grid.dim = 2\n\
         grid.resolution = 16\n\
         initial.generator = perturbed_constant_director\n\
         initial.seed = 5\n\
         initial.amplitude = 0.05\n\
         scheme.dt = 1e-3\n\
         scheme.t_end = 5.0\n\
         output.diag_every = 10\n\
         detect.stop_on_steady = true\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = bin()
        .args(["sweep"])
        .arg(&cfg_path)
        .args(["--alphas", "0,0.5,1"])
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        // every alpha reached a steady state
        let t_steady = row.split(',').nth(2).unwrap();
        assert_ne!(t_steady, "-", "row: {row}");
    }

    // single-value sweep: one row
    let single_dir = dir.join("single");
    let out = bin()
        .args(["sweep"])
        .arg(&cfg_path)
        .args(["--alphas", "0.3"])
        .arg("--out-dir")
        .arg(&single_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let summary = std::fs::read_to_string(single_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().skip(1).count(), 1);

    // out-of-range alpha: validation error, exit 1
    let out = bin()
        .args(["sweep"])
        .arg(&cfg_path)
        .args(["--alphas", "2"])
        .arg("--out-dir")
        .arg(dir.join("bad"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.alpha"));

    // viscosity sweep works the same way
    let nu_dir = dir.join("nus");
    let out = bin()
        .args(["sweep"])
        .arg(&cfg_path)
        .args(["--nus", "1,2"])
        .arg("--out-dir")
        .arg(&nu_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(nu_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().skip(1).count(), 2);
    assert!(summary.lines().nth(1).unwrap().starts_with("nu,1"));
}

#[test]
fn analyze_recovers_synthetic_power_law_and_rejects_empty_series() {
    let dir = tmp("analyze");
    // synthetic series with A = 5(1+t)^{-3}
    let mut csv = String::from(
        "t,E,D,A,l2_v,h1_v,h2_d,resid_d,resid_d_dual,mean_v_1,mean_v_2,energy_residual,max_div_v\n",
    );
    for i in 0..100 {
        let t = 0.2 * i as f64;
        let a = 5.0 * (1.0 + t).powi(-3);
        csv.push_str(&format!(
            "{t:e},1e0,0e0,{a:e},0e0,0e0,0e0,0e0,0e0,0e0,0e0,0e0,0e0\n"
        ));
    }
    let series_path = dir.join("synthetic.csv");
    std::fs::write(&series_path, csv).unwrap();
    let out = bin().args(["analyze"]).arg(&series_path).output().unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let a_line = stdout.lines().find(|l| l.starts_with("A:")).unwrap();
    assert!(a_line.contains("model=power_law"), "{a_line}");
    let rate: f64 = a_line
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix("rate=").map(|v| v.parse().unwrap()))
        .unwrap();
    assert!((rate + 3.0).abs() < 1e-6, "rate {rate}");

    // header-only series: insufficient data, exit 1
    let empty_path = dir.join("empty.csv");
    std::fs::write(
        &empty_path,
        "t,E,D,A,l2_v,h1_v,h2_d,resid_d,resid_d_dual,mean_v_1,mean_v_2,energy_residual,max_div_v\n",
    )
    .unwrap();
    let out = bin().args(["analyze"]).arg(&empty_path).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient data"));
}

#[test]
fn analyze_snapshot_pair_reports_separation() {
    let dir = tmp("analyze-snaps");
    let cfg_path = dir.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "grid.dim = 2\n\
         grid.resolution = 16\n\
         initial.generator = perturbed_constant_director\n\
         initial.seed = 8\n\
         initial.amplitude = 0.1\n\
         scheme.dt = 1e-3\n\
         scheme.t_end = 0.05\n",
    )
    .unwrap();
    for (seed, name) in [("8", "a"), ("9", "b")] {
        let out = bin()
            .args(["run"])
            .arg(&cfg_path)
            .args(["--seed", seed])
            .arg("--out-dir")
            .arg(dir.join(name))
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
    }
    let out = bin()
        .args(["analyze", "--snapshots"])
        .arg(dir.join("a/final.snap"))
        .arg(dir.join("b/final.snap"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let delta_line = stdout.lines().find(|l| l.starts_with("delta")).unwrap();
    let delta: f64 = delta_line
        .split('=')
        .nth(1)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(delta > 0.0);
}

#[test]
fn blow_up_exits_2_with_partial_series() {
    let dir = tmp("blowup");
    let cfg_path = dir.join("bad.cfg");
    // dt far beyond the penalty stability budget
    std::fs::write(
        &cfg_path,
        "grid.dim = 2\n\
         grid.resolution = 8\n\
         params.eta = 0.1\n\
         initial.generator = perturbed_constant_director\n\
         initial.seed = 1\n\
         initial.amplitude = 0.9\n\
         scheme.dt = 10\n\
         scheme.t_end = 1000\n\
         scheme.cfl_warn_threshold = 1e300\n\
         output.diag_every = 1\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = bin()
        .args(["run"])
        .arg(&cfg_path)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-finite"));
    let series = read_series_column(&out_dir.join("series.csv"), "E");
    assert!(!series.is_empty());
    assert!(series.iter().all(|&(_, e)| e.is_finite()));
}

#[test]
fn verify_subcommand_runs_fast_suites() {
    for suite in ["operator-identities", "lojasiewicz", "relaxation"] {
        let out = bin().args(["verify", suite]).output().unwrap();
        assert_eq!(
            code(&out),
            0,
            "suite {suite}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS]"));
    }
    let out = bin().args(["verify", "no-such-suite"]).output().unwrap();
    assert_eq!(code(&out), 1);
}

/// Every bundled config parses and validates.
#[test]
fn bundled_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            nemf::io::load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 6, "expected the bundled configs, found {seen}");
}

/// Identical invocations produce byte-identical series files.
#[test]
fn runs_are_reproducible_byte_for_byte() {
    let dir = tmp("repro");
    let cfg_path = dir.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "grid.dim = 2\n\
         grid.resolution = 16\n\
         initial.generator = random_smooth\n\
         initial.seed = 77\n\
         initial.amplitude = 0.1\n\
         initial.mean_v = 0.1,0\n\
         scheme.dt = 1e-3\n\
         scheme.t_end = 0.05\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for name in ["one", "two"] {
        let out_dir = dir.join(name);
        let out = bin()
            .args(["run"])
            .arg(&cfg_path)
            .arg("--out-dir")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        outputs.push(std::fs::read(out_dir.join("series.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
