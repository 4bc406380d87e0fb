//! Executable acceptance suites. Each suite runs one structural claim of
//! the solver end to end at pinned tolerances and reports pass/fail; the
//! `acceptance` integration test and the CLI `verify` subcommand both
//! drive these.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;

use crate::diagnostics::{
    detect_steady, estimate_lojasiewicz, fit_decay, twin_divergence, DiagRecord, FitModel,
};
use crate::error::{Error, Result};
use crate::integrator::{run, RunOptions, Scheme, SchemeConfig, Stepper};
use crate::io::{perturbed_constant_director, random_smooth, taylor_green};
use crate::model::{
    director_rhs, dirichlet_energy, energy, penalty_f, potential_integral, PhysParams, State,
};
use crate::spectral::{
    dealiased_product, divergence, gradient, jacobian, l2_inner_vec, laplacian, leray_project,
    max_divergence, norm, norm_vec, NormKind, Padding, SpectralField, TorusGrid, VectorField,
};

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionReport {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CriterionReport {
            name,
            passed,
            detail,
        }
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "taylor-green",
    "energy-law",
    "mean-velocity",
    "convergence",
    "relaxation",
    "lojasiewicz",
    "continuous-dependence",
    "operator-identities",
    "smoke-3d",
];

/// Run one named suite, or every suite for "all".
pub fn run_suite(name: &str) -> Result<Vec<CriterionReport>> {
    let runner: &[(&str, fn() -> CriterionReport)] = &[
        ("taylor-green", taylor_green_suite),
        ("energy-law", energy_law_suite),
        ("mean-velocity", mean_velocity_suite),
        ("convergence", convergence_suite),
        ("relaxation", relaxation_suite),
        ("lojasiewicz", lojasiewicz_suite),
        ("continuous-dependence", continuous_dependence_suite),
        ("operator-identities", operator_identities_suite),
        ("smoke-3d", smoke_3d_suite),
    ];
    if name == "all" {
        return Ok(runner.iter().map(|(_, f)| f()).collect());
    }
    match runner.iter().find(|(n, _)| *n == name) {
        Some((_, f)) => Ok(vec![f()]),
        None => Err(Error::validation(
            "suite",
            format!(
                "unknown suite '{name}'; known: all, {}",
                SUITE_NAMES.join(", ")
            ),
        )),
    }
}

fn fail(name: &'static str, detail: String) -> CriterionReport {
    CriterionReport::new(name, false, detail)
}

/// Criterion 1 — with the director frozen at a unit constant, the 64²
/// Taylor–Green velocity must track ‖v₀‖e^{−8π²νt} to relative 1e-4 over
/// t ∈ [0,1] for α ∈ {0, 1/2, 1}, in under 30 s.
fn taylor_green_suite() -> CriterionReport {
    const NAME: &str = "taylor-green";
    let started = Instant::now();
    let nu = 0.05;
    let mut worst_rel: f64 = 0.0;
    for alpha in [0.0, 0.5, 1.0] {
        let grid = match TorusGrid::square(2, 64) {
            Ok(g) => g,
            Err(e) => return fail(NAME, e.to_string()),
        };
        let params = PhysParams {
            nu,
            alpha,
            ..PhysParams::default()
        };
        let cfg = SchemeConfig {
            scheme: Scheme::ImexBdf2,
            dt: 1e-3,
            t_end: 1.0,
            frozen_director: true,
            ..SchemeConfig::default()
        };
        let opts = RunOptions {
            diag_every: 50,
            ..RunOptions::default()
        };
        let traj = match run(taylor_green(&grid, 1.0), &params, &cfg, &opts) {
            Ok(t) => t,
            Err(e) => return fail(NAME, format!("alpha={alpha}: {e}")),
        };
        if traj.aborted.is_some() {
            return fail(NAME, format!("alpha={alpha}: run aborted"));
        }
        let v0 = traj.records[0].l2_v;
        for rec in &traj.records {
            let exact = v0 * (-8.0 * PI * PI * nu * rec.t).exp();
            worst_rel = worst_rel.max((rec.l2_v - exact).abs() / exact);
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let passed = worst_rel <= 1e-4 && elapsed < 30.0;
    CriterionReport::new(
        NAME,
        passed,
        format!("max |‖v‖/exact − 1| = {worst_rel:.3e} (tol 1e-4) over α∈{{0,½,1}}, {elapsed:.1} s (limit 30)"),
    )
}

/// Criterion 2 — halving dt on a generic perturbed run halves the
/// energy-law residual (ratio in [1.7, 2.3] for the first-order scheme),
/// and E never increases beyond 1e-10 relative per accepted step. Run at
/// dt = 5e-4 vs 2.5e-4, inside the asymptotic O(dt) regime of this
/// configuration.
fn energy_law_suite() -> CriterionReport {
    const NAME: &str = "energy-law";
    let grid = match TorusGrid::new(2, 32, Padding::DOUBLE) {
        Ok(g) => g,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let params = PhysParams::default();
    let mut trajs = Vec::new();
    for dt in [5e-4, 2.5e-4] {
        let cfg = SchemeConfig {
            dt,
            t_end: 0.2,
            ..SchemeConfig::default()
        };
        let opts = RunOptions {
            diag_every: 1,
            ..RunOptions::default()
        };
        let traj = match run(
            perturbed_constant_director(&grid, 7, 0.1),
            &params,
            &cfg,
            &opts,
        ) {
            Ok(t) => t,
            Err(e) => return fail(NAME, e.to_string()),
        };
        if traj.aborted.is_some() {
            return fail(NAME, format!("dt={dt}: run aborted"));
        }
        for pair in traj.records.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if b.energy > a.energy + 1e-10 * (1.0 + a.energy.abs()) {
                return fail(
                    NAME,
                    format!(
                        "dt={dt}: energy rose from {} to {} at t={}",
                        a.energy, b.energy, b.t
                    ),
                );
            }
        }
        trajs.push(traj);
    }
    // median of matched-time residual ratios, skipping t <= 0.05 where the
    // stiffest director modes have dt·rate ~ 1 (outside the O(dt) regime)
    let (coarse, fine) = (&trajs[0], &trajs[1]);
    let mut ratios = Vec::new();
    for (j, rec) in coarse.records.iter().enumerate().skip(1) {
        if rec.t <= 0.05 {
            continue;
        }
        let fine_rec = &fine.records[2 * j];
        debug_assert!((fine_rec.t - rec.t).abs() < 1e-12);
        if fine_rec.energy_residual > 0.0 {
            ratios.push(rec.energy_residual / fine_rec.energy_residual);
        }
    }
    if ratios.len() < 8 {
        return fail(NAME, "too few matched-time residual samples".into());
    }
    ratios.sort_by(f64::total_cmp);
    let ratio = ratios[ratios.len() / 2];
    let passed = (1.7..=2.3).contains(&ratio);
    CriterionReport::new(
        NAME,
        passed,
        format!(
            "median matched-time residual ratio {ratio:.3} over {} samples at dt 5e-4 vs 2.5e-4 (accept [1.7, 2.3]); E monotone at both dt",
            ratios.len()
        ),
    )
}

/// Criterion 3 — the mean velocity (0.3, −0.2) survives 10⁴ steps to
/// 1e-12 while the oscillatory part dies: final ‖ṽ‖_{H¹} < 1e-6.
fn mean_velocity_suite() -> CriterionReport {
    const NAME: &str = "mean-velocity";
    let grid = match TorusGrid::square(2, 32) {
        Ok(g) => g,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let mean = [0.3, -0.2];
    let params = PhysParams::default();
    let cfg = SchemeConfig {
        dt: 1e-3,
        t_end: 10.0,
        ..SchemeConfig::default()
    };
    let opts = RunOptions {
        diag_every: 10,
        ..RunOptions::default()
    };
    let traj = match run(random_smooth(&grid, 11, 0.05, &mean), &params, &cfg, &opts) {
        Ok(t) => t,
        Err(e) => return fail(NAME, e.to_string()),
    };
    if traj.aborted.is_some() {
        return fail(NAME, "run aborted".into());
    }
    let mut max_dev: f64 = 0.0;
    for rec in &traj.records {
        for (i, &m) in mean.iter().enumerate() {
            max_dev = max_dev.max((rec.mean_v[i] - m).abs());
        }
    }
    let (_, tilde) = crate::integrator::split_mean_velocity(&traj.final_state.v);
    let tilde_h1 = norm_vec(&tilde, NormKind::H1);
    let passed = max_dev <= 1e-12 && tilde_h1 < 1e-6;
    CriterionReport::new(
        NAME,
        passed,
        format!(
            "max |mean_v − m| = {max_dev:.3e} (tol 1e-12) over 10⁴ steps; final ‖ṽ‖_H1 = {tilde_h1:.3e} (tol 1e-6)"
        ),
    )
}

/// Criterion 4 — perturbed-constant-director runs at 64², amplitude 0.1,
/// reach A < 1e-8 and ‖−Δd+f(d)‖ < 1e-6 within t ≤ 50 for each
/// α ∈ {0, 1/2, 1}; the detected d∞ is unit length to 1e-4; under 2 min
/// per α.
fn convergence_suite() -> CriterionReport {
    const NAME: &str = "convergence";
    let mut details = Vec::new();
    for alpha in [0.0, 0.5, 1.0] {
        let started = Instant::now();
        let grid = match TorusGrid::square(2, 64) {
            Ok(g) => g,
            Err(e) => return fail(NAME, e.to_string()),
        };
        let params = PhysParams {
            alpha,
            ..PhysParams::default()
        };
        let cfg = SchemeConfig {
            dt: 1e-3,
            t_end: 50.0,
            ..SchemeConfig::default()
        };
        let opts = RunOptions {
            diag_every: 20,
            snapshot_every: 0,
            stop_on_steady: Some((1e-8, 1e-6)),
        };
        let traj = match run(
            perturbed_constant_director(&grid, 3, 0.1),
            &params,
            &cfg,
            &opts,
        ) {
            Ok(t) => t,
            Err(e) => return fail(NAME, format!("alpha={alpha}: {e}")),
        };
        if traj.aborted.is_some() {
            return fail(NAME, format!("alpha={alpha}: run aborted"));
        }
        let elapsed = started.elapsed().as_secs_f64();
        let Some((t_star, d_inf)) = detect_steady(&traj, 1e-8, 1e-6) else {
            return fail(
                NAME,
                format!(
                    "alpha={alpha}: no steady state by t={} (A={:.3e}, resid={:.3e})",
                    traj.last_record().t,
                    traj.last_record().quantity_a,
                    traj.last_record().resid_d
                ),
            );
        };
        let unit_dev = d_inf
            .magnitude_samples()
            .iter()
            .fold(0.0f64, |m, &s| m.max((s - 1.0).abs()));
        if t_star > 50.0 || unit_dev >= 1e-4 || elapsed >= 120.0 {
            return fail(
                NAME,
                format!(
                    "alpha={alpha}: t*={t_star:.2}, sup||d∞|−1| = {unit_dev:.3e}, {elapsed:.0} s"
                ),
            );
        }
        details.push(format!(
            "α={alpha}: t*={t_star:.2}, sup||d∞|−1|={unit_dev:.1e}, {elapsed:.0}s"
        ));
    }
    CriterionReport::new(NAME, true, details.join("; "))
}

/// Criterion 5 — a spatially-constant director follows the logistic
/// closed form of r' = −η⁻²(r²−1)r to 1e-5 at t = 1 with dt = 1e-3
/// (second-order scheme) for r₀ ∈ {0.5, 2}.
fn relaxation_suite() -> CriterionReport {
    const NAME: &str = "relaxation";
    let grid = match TorusGrid::square(2, 8) {
        Ok(g) => g,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let params = PhysParams::default();
    let cfg = SchemeConfig {
        scheme: Scheme::ImexBdf2,
        dt: 1e-3,
        t_end: 1.0,
        ..SchemeConfig::default()
    };
    let mut details = Vec::new();
    for r0 in [0.5, 2.0] {
        let mut state = State::new(
            VectorField::zeros(&grid),
            VectorField::constant(&grid, &[r0, 0.0]),
            0.0,
        );
        let mut stepper = Stepper::new(&cfg, 2);
        for _ in 0..1000 {
            state = match stepper.advance(&state, &params) {
                Ok(s) => s,
                Err(e) => return fail(NAME, format!("r0={r0}: {e}")),
            };
        }
        let r_num = state.d.component(0).mean();
        let sigma = 2.0 * params.gamma / (params.eta * params.eta);
        let r_exact = (1.0 / (1.0 + (1.0 / (r0 * r0) - 1.0) * (-sigma).exp())).sqrt();
        let err = (r_num - r_exact).abs();
        if err > 1e-5 {
            return fail(NAME, format!("r0={r0}: |r − exact| = {err:.3e} (tol 1e-5)"));
        }
        details.push(format!("r0={r0}: |r − logistic| = {err:.1e}"));
    }
    CriterionReport::new(NAME, true, details.join("; "))
}

/// Criterion 6 — the fitting machinery recovers synthetic exponents:
/// θ = 0.25 ± 0.02 for the quartic scalar flow, θ = 0.5 (flagged) for the
/// quadratic one, and power/exponential rates to 1e-6.
fn lojasiewicz_suite() -> CriterionReport {
    const NAME: &str = "lojasiewicz";
    // quartic flow ẋ = −4x³: x(t) = (1+8t)^{−1/2}
    let quartic: Vec<DiagRecord> = (0..200)
        .map(|i| {
            let t = 0.05 + 0.5 * i as f64;
            let x = (1.0 + 8.0 * t).powf(-0.5);
            DiagRecord::synthetic(t, x.powi(4), 4.0 * x.powi(3))
        })
        .collect();
    let quartic_fit = match estimate_lojasiewicz(&quartic, 0.0) {
        Ok(f) => f,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let theta_q = quartic_fit.theta.unwrap_or(f64::NAN);
    if (theta_q - 0.25).abs() > 0.02 || quartic_fit.theta_clamped {
        return fail(
            NAME,
            format!("quartic flow: θ = {theta_q:.4} (want 0.25 ± 0.02)"),
        );
    }
    // quadratic flow ẋ = −2x: exponential regime
    let quadratic: Vec<DiagRecord> = (0..200)
        .map(|i| {
            let t = 0.02 * i as f64;
            let x = (-2.0 * t).exp();
            DiagRecord::synthetic(t, x * x, 2.0 * x)
        })
        .collect();
    let quad_fit = match estimate_lojasiewicz(&quadratic, 0.0) {
        Ok(f) => f,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let theta_2 = quad_fit.theta.unwrap_or(f64::NAN);
    if (theta_2 - 0.5).abs() > 1e-6 || !quad_fit.theta_clamped {
        return fail(
            NAME,
            format!(
                "quadratic flow: θ = {theta_2:.6}, flagged={}",
                quad_fit.theta_clamped
            ),
        );
    }
    // synthetic decay fits
    let power: Vec<(f64, f64)> = (0..100)
        .map(|i| {
            let t = 0.2 * i as f64;
            (t, 5.0 * (1.0 + t).powi(-3))
        })
        .collect();
    let pfit = match fit_decay(&power) {
        Ok(f) => f,
        Err(e) => return fail(NAME, e.to_string()),
    };
    if pfit.model != FitModel::PowerLaw || (pfit.rate + 3.0).abs() > 1e-6 {
        return fail(
            NAME,
            format!("power-law fit: {} rate {:.8}", pfit.model, pfit.rate),
        );
    }
    let expo: Vec<(f64, f64)> = (0..100)
        .map(|i| {
            let t = 0.05 * i as f64;
            (t, 2.0 * (-4.0 * t).exp())
        })
        .collect();
    let efit = match fit_decay(&expo) {
        Ok(f) => f,
        Err(e) => return fail(NAME, e.to_string()),
    };
    if efit.model != FitModel::Exponential || (efit.rate + 4.0).abs() > 1e-6 {
        return fail(
            NAME,
            format!("exponential fit: {} rate {:.8}", efit.model, efit.rate),
        );
    }
    CriterionReport::new(
        NAME,
        true,
        format!(
            "θ(x⁴) = {theta_q:.3}, θ(x²) = {theta_2:.3} flagged; power exponent {:.6}, exp rate {:.6}",
            pfit.rate, efit.rate
        ),
    )
}

/// Criterion 7 — twin runs separated by δ(0) = 1e-16 stay under
/// 2e^{Ct}δ(0) with finite fitted C over t ∈ [0,1], and log δ never beats
/// an affine fit by more than 10%.
fn continuous_dependence_suite() -> CriterionReport {
    const NAME: &str = "continuous-dependence";
    let grid = match TorusGrid::square(2, 32) {
        Ok(g) => g,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let params = PhysParams::default();
    let cfg = SchemeConfig {
        dt: 1e-3,
        t_end: 1.0,
        ..SchemeConfig::default()
    };
    let opts = RunOptions {
        diag_every: 100,
        snapshot_every: 10,
        stop_on_steady: None,
    };
    let base = perturbed_constant_director(&grid, 5, 0.1);

    // unit-L² solenoidal single-mode bump, scaled to 1e-8
    let mut p_coeffs = vec![Complex64::default(); grid.modes()];
    let n = grid.resolution();
    let idx = |kx: i64, ky: i64| -> usize {
        (kx.rem_euclid(n as i64) as usize) * n + ky.rem_euclid(n as i64) as usize
    };
    p_coeffs[idx(1, 2)] = Complex64::new(0.5, 0.0);
    p_coeffs[idx(-1, -2)] = Complex64::new(0.5, 0.0);
    let raw = VectorField::new(vec![
        SpectralField::from_coeffs(&grid, p_coeffs.clone()),
        SpectralField::from_coeffs(&grid, p_coeffs).scaled(-0.5),
    ]);
    let sol = leray_project(&raw);
    let bump = sol.scaled(1e-8 / sol.l2_norm_sq().sqrt());

    let twin = State::new(base.v.add(&bump), base.d.clone(), 0.0);
    let ta = match run(base, &params, &cfg, &opts) {
        Ok(t) => t,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let tb = match run(twin, &params, &cfg, &opts) {
        Ok(t) => t,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let div = match twin_divergence(&ta, &tb) {
        Ok(d) => d,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let delta0 = div.series[0].1;
    if (delta0 / 1e-16 - 1.0).abs() > 1e-6 {
        return fail(NAME, format!("δ(0) = {delta0:.6e}, wanted 1e-16"));
    }
    if !div.growth_c.is_finite() || div.growth_c > 1e3 {
        return fail(NAME, format!("fitted C = {}", div.growth_c));
    }
    // affine envelope on log δ: the secant through the window endpoints
    // plus 10% slack must dominate every sample (a mid-window bump above
    // the endpoint exponential would be super-exponential growth)
    let pts: Vec<(f64, f64)> = div
        .series
        .iter()
        .filter(|&&(_, d)| d > 0.0)
        .map(|&(t, d)| (t, d.ln()))
        .collect();
    let (t0, l0) = pts[0];
    let (t1, l1) = *pts.last().unwrap();
    let slope = (l1 - l0) / (t1 - t0);
    let icept = l0 - slope * t0;
    let margin = 0.10
        * pts
            .iter()
            .map(|p| (icept + slope * p.0).abs())
            .fold(0.0f64, f64::max);
    let mut worst_excess = f64::MIN;
    for &(t, ld) in &pts {
        worst_excess = worst_excess.max(ld - (icept + slope * t));
    }
    let passed = worst_excess <= margin;
    CriterionReport::new(
        NAME,
        passed,
        format!(
            "δ(0) = {delta0:.3e}, fitted C = {:.3}, max affine excess {worst_excess:.3} (margin {margin:.3})",
            div.growth_c
        ),
    )
}

/// Criterion 8 — operator and identity spot-suite: the ω/A transport
/// decomposition to 1e-12, f = ∇F to 1e-6, projector and calculus
/// identities, dealiasing exactness, norm ordering.
fn operator_identities_suite() -> CriterionReport {
    const NAME: &str = "operator-identities";
    let grid = match TorusGrid::square(2, 32) {
        Ok(g) => g,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let donor = random_smooth(&grid, 17, 0.4, &[0.0, 0.0]);
    let scalar = donor.d.component(1).clone();
    let v = donor.v.clone();
    let d = donor.d.clone();
    let mut checks: Vec<(String, bool)> = Vec::new();

    // transport decomposition: α(∇v)d − (1−α)(∇ᵀv)d = ωd + (2α−1)Ad
    for alpha in [0.0, 0.37, 0.5, 1.0] {
        let j = jacobian(&v);
        let mut worst: f64 = 0.0;
        let scale = d.l2_norm_sq().sqrt() * v.l2_norm_sq().sqrt();
        for i in 0..2 {
            let mut lhs = SpectralField::zeros(&grid);
            let mut rhs = SpectralField::zeros(&grid);
            for jj in 0..2 {
                let t_lhs = j
                    .get(i, jj)
                    .scaled(alpha)
                    .sub(&j.get(jj, i).scaled(1.0 - alpha));
                lhs = lhs.add(&dealiased_product(&[&t_lhs, d.component(jj)]));
                let omega = j.get(i, jj).sub(j.get(jj, i)).scaled(0.5);
                let sym = j.get(i, jj).add(j.get(jj, i)).scaled(0.5);
                let t_rhs = omega.add(&sym.scaled(2.0 * alpha - 1.0));
                rhs = rhs.add(&dealiased_product(&[&t_rhs, d.component(jj)]));
            }
            worst = worst.max(lhs.sub(&rhs).l2_norm_sq().sqrt() / scale);
        }
        checks.push((
            format!("transport identity α={alpha} ({worst:.1e})"),
            worst <= 1e-12,
        ));
    }

    // f = ∇F by central differences of ∫F
    {
        let delta = random_smooth(&grid, 18, 0.3, &[0.0, 0.0]).d;
        let pairing = l2_inner_vec(&penalty_f(&d, 1.0), &delta);
        let eps = 1e-5;
        let fd = (potential_integral(&d.add_scaled(eps, &delta), 1.0)
            - potential_integral(&d.add_scaled(-eps, &delta), 1.0))
            / (2.0 * eps);
        let rel = (pairing - fd).abs() / pairing.abs().max(1e-30);
        checks.push((format!("f = ∇F ({rel:.1e})"), rel <= 1e-6));
    }

    // projector: annihilates gradients, idempotent, keeps the mean
    {
        let g = gradient(&scalar);
        let killed = leray_project(&g).l2_norm_sq().sqrt();
        checks.push((
            format!("P∇f = 0 ({killed:.1e})"),
            killed <= 1e-12 * g.l2_norm_sq().sqrt().max(1.0),
        ));
        let p1 = leray_project(&v);
        let p2 = leray_project(&p1);
        let drift: f64 = p1
            .components()
            .iter()
            .zip(p2.components())
            .map(|(a, b)| a.sub(b).l2_norm_sq())
            .sum::<f64>()
            .sqrt();
        checks.push((format!("P idempotent ({drift:.1e})"), drift <= 1e-12));
        checks.push((
            "P keeps k=0".into(),
            (0..2).all(|c| p1.component(c).coeffs()[0] == v.component(c).coeffs()[0]),
        ));
    }

    // div ∘ grad = Δ and discrete integration by parts
    {
        let lhs = divergence(&gradient(&scalar));
        let rhs = laplacian(&scalar);
        let rel = lhs.sub(&rhs).l2_norm_sq().sqrt() / rhs.l2_norm_sq().sqrt();
        checks.push((format!("div∘grad = Δ ({rel:.1e})"), rel <= 1e-12));
        let ibp_lhs = l2_inner_vec(&gradient(&scalar), &v);
        let ibp_rhs = -crate::spectral::l2_inner(&scalar, &divergence(&v));
        let dev = (ibp_lhs - ibp_rhs).abs() / ibp_lhs.abs().max(1.0);
        checks.push((format!("⟨∇f,V⟩ = −⟨f,∇·V⟩ ({dev:.1e})"), dev <= 1e-12));
    }

    // Taylor–Green is solenoidal; sin² dealiases exactly
    {
        let tg = taylor_green(&grid, 1.0);
        let div = max_divergence(&tg.v);
        checks.push((format!("∇·TG = 0 ({div:.1e})"), div <= 1e-12));
        let s = SpectralField::from_fn(&grid, |x| (2.0 * PI * x[0]).sin());
        let sq = dealiased_product(&[&s, &s]);
        let mut worst: f64 = 0.0;
        for (idx, &c) in sq.coeffs().iter().enumerate() {
            let k = grid.wavenumber(idx);
            let expected = match (k[0], k[1]) {
                (0, 0) => Complex64::new(0.5, 0.0),
                (2, 0) | (-2, 0) => Complex64::new(-0.25, 0.0),
                _ => Complex64::default(),
            };
            worst = worst.max((c - expected).norm());
        }
        checks.push((format!("sin² exact ({worst:.1e})"), worst <= 1e-14));
    }

    // norm ladder and duality pairing
    {
        let dual = norm(&scalar, NormKind::H1Dual);
        let l2 = norm(&scalar, NormKind::L2);
        let h1 = norm(&scalar, NormKind::H1);
        let h2 = norm(&scalar, NormKind::H2);
        checks.push((
            "H1' ≤ L2 ≤ H1 ≤ H2".into(),
            dual <= l2 && l2 <= h1 && h1 <= h2,
        ));
        checks.push((
            "dual pairing ≥ L2²".into(),
            dual * h1 >= l2 * l2 * (1.0 - 1e-12),
        ));
    }

    // director_rhs of a stretched constant is pure penalty relaxation
    {
        let c = 0.5;
        let state = State::new(
            VectorField::zeros(&grid),
            VectorField::constant(&grid, &[c, 0.0]),
            0.0,
        );
        let rhs = director_rhs(&state, &PhysParams::default());
        let expected = -(c * c - 1.0) * c;
        let dev = (rhs.component(0).mean() - expected).abs();
        checks.push((format!("penalty relaxation ({dev:.1e})"), dev <= 1e-12));
    }

    // energy of a stretched constant director is the quartic well depth
    {
        let d2 = VectorField::constant(&grid, &[2.0, 0.0]);
        let dev = (dirichlet_energy(&d2, 1.0) - 2.25).abs();
        checks.push((format!("E(2e₁) = 9/4 ({dev:.1e})"), dev <= 1e-12));
        let tg = taylor_green(&grid, 1.0);
        let e = energy(
            &State::new(tg.v.clone(), VectorField::constant(&grid, &[1.0, 0.0]), 0.0),
            &PhysParams::default(),
        );
        checks.push((
            format!("E(TG) = 1/4 ({:.1e})", (e - 0.25).abs()),
            (e - 0.25).abs() <= 1e-12,
        ));
    }

    // spectral gradient against refined 4th-order finite differences
    {
        let f = &scalar;
        let g = gradient(f);
        let fine = 512usize;
        let h = 1.0 / fine as f64;
        let gnorm = (g.l2_norm_sq() / 2.0).sqrt();
        let mut worst: f64 = 0.0;
        for &(ix, iy) in &[(3usize, 7usize), (11, 29), (19, 2), (30, 30), (0, 16)] {
            let x0 = [ix as f64 / 32.0, iy as f64 / 32.0];
            for axis in 0..2 {
                let at = |s: f64| {
                    let mut x = x0;
                    x[axis] += s;
                    crate::spectral::eval_direct(f, &x)
                };
                let fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
                let sp = g.component(axis).real_samples()[ix * 32 + iy];
                worst = worst.max((sp - fd).abs() / gnorm);
            }
        }
        checks.push((format!("∇ vs FD oracle ({worst:.1e})"), worst <= 1e-6));
    }

    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name.as_str())
        .collect();
    let passed = failed.is_empty();
    let detail = if passed {
        format!("{} identity checks passed", checks.len())
    } else {
        format!("failed: {}", failed.join(", "))
    };
    CriterionReport::new(NAME, passed, detail)
}

/// Criterion 9 — 3D smoke test at 16³ with large viscosity: the run
/// completes, E never increases, and A decays monotonically once past its
/// peak. Qualitative by construction (no computable viscosity threshold).
fn smoke_3d_suite() -> CriterionReport {
    const NAME: &str = "smoke-3d";
    let grid = match TorusGrid::square(3, 16) {
        Ok(g) => g,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let params = PhysParams {
        nu: 5.0,
        ..PhysParams::default()
    };
    let cfg = SchemeConfig {
        dt: 1e-3,
        t_end: 0.5,
        ..SchemeConfig::default()
    };
    let opts = RunOptions {
        diag_every: 10,
        ..RunOptions::default()
    };
    let traj = match run(
        perturbed_constant_director(&grid, 9, 0.02),
        &params,
        &cfg,
        &opts,
    ) {
        Ok(t) => t,
        Err(e) => return fail(NAME, e.to_string()),
    };
    if traj.aborted.is_some() {
        return fail(NAME, "run aborted with non-finite fields".into());
    }
    for pair in traj.records.windows(2) {
        if pair[1].energy > pair[0].energy + 1e-10 * (1.0 + pair[0].energy.abs()) {
            return fail(NAME, format!("energy rose at t={}", pair[1].t));
        }
    }
    let peak = traj
        .records
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.quantity_a.total_cmp(&b.1.quantity_a))
        .map(|(i, _)| i)
        .unwrap_or(0);
    for pair in traj.records[peak..].windows(2) {
        if pair[1].quantity_a > pair[0].quantity_a * (1.0 + 1e-8) + 1e-20 {
            return fail(
                NAME,
                format!(
                    "A rose after the transient at t={}: {} -> {}",
                    pair[1].t, pair[0].quantity_a, pair[1].quantity_a
                ),
            );
        }
    }
    CriterionReport::new(
        NAME,
        true,
        format!(
            "completed to t={}; E {} → {}; A peak at record {peak}, final {:.3e}",
            traj.last_record().t,
            traj.records[0].energy,
            traj.last_record().energy,
            traj.last_record().quantity_a
        ),
    )
}
