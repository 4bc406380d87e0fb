//! Monitored quantities and post-hoc analyses: the per-step energy-law
//! defect, steady-state detection, decay-rate fitting, the dual-norm
//! exponent estimate, and twin-run divergence.

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::model::{self, director_residual, grad_norm_sq_vec, PhysParams, State};
use crate::spectral::{norm_sq_vec, norm_vec, NormKind, VectorField};

/// One time-sample of every monitored scalar.
#[derive(Clone, Debug)]
pub struct DiagRecord {
    pub t: f64,
    /// Lyapunov energy E = ½‖v‖² + (λ/2)‖∇d‖² + λ∫F(d).
    pub energy: f64,
    /// Dissipation rate ν‖∇v‖² + λγ‖G‖².
    pub dissipation: f64,
    /// A = ‖∇v‖² + λ‖G‖².
    pub quantity_a: f64,
    pub l2_v: f64,
    pub h1_v: f64,
    pub h2_d: f64,
    /// ‖−Δd + f(d)‖.
    pub resid_d: f64,
    /// ‖−Δd + f(d)‖ in the (H¹)' dual norm.
    pub resid_d_dual: f64,
    pub mean_v: Vec<f64>,
    /// Trapezoidal defect of the discrete energy law over the step that
    /// produced this state; 0 for the initial record.
    pub energy_residual: f64,
    pub max_div_v: f64,
}

impl DiagRecord {
    /// Synthetic record carrying only (t, E, resid_d_dual); used by the
    /// scalar gradient-flow self-tests.
    pub fn synthetic(t: f64, energy: f64, resid_d_dual: f64) -> DiagRecord {
        DiagRecord {
            t,
            energy,
            dissipation: 0.0,
            quantity_a: 0.0,
            l2_v: 0.0,
            h1_v: 0.0,
            h2_d: 0.0,
            resid_d: resid_d_dual,
            resid_d_dual,
            mean_v: Vec::new(),
            energy_residual: 0.0,
            max_div_v: 0.0,
        }
    }
}

/// Compute all monitored scalars for a state. `prev` carries
/// (energy, dissipation, dt) of the preceding accepted state so the
/// energy-law defect of the step can be recorded.
pub fn compute_record(
    state: &State,
    params: &PhysParams,
    prev: Option<(f64, f64, f64)>,
) -> DiagRecord {
    let g = director_residual(&state.d, params.eta);
    let grad_v_sq = grad_norm_sq_vec(&state.v);
    let g_sq = g.l2_norm_sq();
    let energy = model::energy(state, params);
    let dissipation = params.nu * grad_v_sq + params.lambda * params.gamma * g_sq;
    let quantity_a = grad_v_sq + params.lambda * g_sq;
    let energy_residual = match prev {
        Some((e_prev, d_prev, dt)) => ((energy - e_prev) / dt + 0.5 * (d_prev + dissipation)).abs(),
        None => 0.0,
    };
    DiagRecord {
        t: state.t,
        energy,
        dissipation,
        quantity_a,
        l2_v: state.v.l2_norm_sq().sqrt(),
        h1_v: norm_vec(&state.v, NormKind::H1),
        h2_d: norm_vec(&state.d, NormKind::H2),
        resid_d: g_sq.sqrt(),
        resid_d_dual: norm_sq_vec(&g, NormKind::H1Dual).sqrt(),
        mean_v: state.v.mean(),
        energy_residual,
        max_div_v: state.max_div(),
    }
}

/// Trapezoidal defect |(E(b)−E(a))/dt + (D(a)+D(b))/2| of the discrete
/// energy law across one accepted step a → b.
pub fn energy_law_residual(a: &State, b: &State, params: &PhysParams, dt: f64) -> f64 {
    let e_a = model::energy(a, params);
    let e_b = model::energy(b, params);
    let d_a = model::dissipation(a, params);
    let d_b = model::dissipation(b, params);
    ((e_b - e_a) / dt + 0.5 * (d_a + d_b)).abs()
}

/// First time at which A(t) < tol_a and ‖−Δd+f(d)‖ < tol_resid, together
/// with the director field at (or just after) that time. A is built from
/// ∇v, so runs with a nonzero conserved mean velocity are judged on the
/// mean-removed flow automatically.
pub fn detect_steady(traj: &Trajectory, tol_a: f64, tol_resid: f64) -> Option<(f64, VectorField)> {
    let hit = traj
        .records
        .iter()
        .find(|r| r.quantity_a < tol_a && r.resid_d < tol_resid)?;
    let t_star = hit.t;
    let d_inf = traj
        .snapshots
        .iter()
        .find(|s| s.t >= t_star - 1e-12)
        .map(|s| s.d.clone())
        .unwrap_or_else(|| traj.final_state.d.clone());
    Some((t_star, d_inf))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitModel {
    PowerLaw,
    Exponential,
    Constant,
}

impl std::fmt::Display for FitModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitModel::PowerLaw => write!(f, "power_law"),
            FitModel::Exponential => write!(f, "exponential"),
            FitModel::Constant => write!(f, "constant"),
        }
    }
}

/// Outcome of a decay fit or dual-exponent estimate.
#[derive(Clone, Debug)]
pub struct FitResult {
    pub model: FitModel,
    /// Fitted slope: the power-law exponent (y ~ (1+t)^rate), the
    /// exponential rate (y ~ e^{rate·t}), or the regression slope for the
    /// dual-norm estimate.
    pub rate: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    /// Time range actually used for the fit.
    pub window: (f64, f64),
    /// Decay exponent θ mapped from the fit, where applicable: a power law
    /// (1+t)^{−p} maps to θ = p/(1+2p); the dual-norm regression maps
    /// slope s to θ = 1−s clamped to [0, 1/2].
    pub theta: Option<f64>,
    /// θ hit the exponential-regime boundary 1/2 and was clamped/flagged.
    pub theta_clamped: bool,
}

/// Keep the trailing 60% of the usable samples (fits are asymptotic; the
/// initial transient is excluded), requiring at least `min_len`.
fn fit_window<T: Copy>(samples: &[T], min_len: usize) -> Result<&[T]> {
    if samples.len() < min_len {
        return Err(Error::InsufficientData(format!(
            "need at least {min_len} usable samples, have {}",
            samples.len()
        )));
    }
    let w = ((0.6 * samples.len() as f64).ceil() as usize)
        .max(min_len)
        .min(samples.len());
    Ok(&samples[samples.len() - w..])
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return (0.0, my, 0.0);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    (slope, intercept, r2)
}

const FIT_FLOOR: f64 = 1e-13;

/// Least-squares fit of log y against both log(1+t) (power law) and t
/// (exponential); returns the better-r² model. A power-law exponent −p
/// maps to the decay exponent θ = p/(1+2p).
pub fn fit_decay(series: &[(f64, f64)]) -> Result<FitResult> {
    let usable: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(_, y)| y > FIT_FLOOR && y.is_finite())
        .collect();
    let window = fit_window(&usable, 8)?;
    let t0 = window.first().unwrap().0;
    let t1 = window.last().unwrap().0;
    let ys: Vec<f64> = window.iter().map(|&(_, y)| y.ln()).collect();

    let ymax = window.iter().fold(f64::MIN, |m, &(_, y)| m.max(y));
    let ymin = window.iter().fold(f64::MAX, |m, &(_, y)| m.min(y));
    if ymax - ymin <= 1e-12 * ymax.abs() {
        return Ok(FitResult {
            model: FitModel::Constant,
            rate: 0.0,
            amplitude: window.iter().map(|&(_, y)| y).sum::<f64>() / window.len() as f64,
            r_squared: 1.0,
            window: (t0, t1),
            theta: None,
            theta_clamped: false,
        });
    }

    let xp: Vec<f64> = window.iter().map(|&(t, _)| (1.0 + t).ln()).collect();
    let (p_slope, p_icept, p_r2) = linear_fit(&xp, &ys);
    let xe: Vec<f64> = window.iter().map(|&(t, _)| t).collect();
    let (e_slope, e_icept, e_r2) = linear_fit(&xe, &ys);

    if p_r2 >= e_r2 {
        let theta = (p_slope < 0.0).then(|| {
            let p = -p_slope;
            p / (1.0 + 2.0 * p)
        });
        Ok(FitResult {
            model: FitModel::PowerLaw,
            rate: p_slope,
            amplitude: p_icept.exp(),
            r_squared: p_r2,
            window: (t0, t1),
            theta,
            theta_clamped: false,
        })
    } else {
        Ok(FitResult {
            model: FitModel::Exponential,
            rate: e_slope,
            amplitude: e_icept.exp(),
            r_squared: e_r2,
            window: (t0, t1),
            theta: None,
            theta_clamped: false,
        })
    }
}

/// Estimate the dual-norm exponent: regress log ‖−Δd+f(d)‖_{(H¹)'} against
/// log(E(t) − E∞). The slope s estimates 1−θ; θ is reported clamped to
/// [0, 1/2], values at or above 1/2 flagged as the exponential regime.
pub fn estimate_lojasiewicz(records: &[DiagRecord], e_infinity: f64) -> Result<FitResult> {
    let usable: Vec<(f64, f64, f64)> = records
        .iter()
        .filter(|r| r.energy - e_infinity > 1e-14 && r.resid_d_dual > 0.0)
        .map(|r| (r.t, r.energy - e_infinity, r.resid_d_dual))
        .collect();
    if usable.is_empty() {
        return Err(Error::DegenerateWindow(
            "no records with E − E∞ above 1e-14 and a positive dual residual".into(),
        ));
    }
    let window = fit_window(&usable, 8)?;
    let xs: Vec<f64> = window.iter().map(|&(_, de, _)| de.ln()).collect();
    let ys: Vec<f64> = window.iter().map(|&(_, _, du)| du.ln()).collect();
    let (slope, icept, r2) = linear_fit(&xs, &ys);
    let theta_raw = 1.0 - slope;
    let clamped = theta_raw >= 0.5 - 1e-6;
    let theta = theta_raw.clamp(0.0, 0.5);
    Ok(FitResult {
        model: if clamped {
            FitModel::Exponential
        } else {
            FitModel::PowerLaw
        },
        rate: slope,
        amplitude: icept.exp(),
        r_squared: r2,
        window: (window.first().unwrap().0, window.last().unwrap().0),
        theta: Some(theta),
        theta_clamped: clamped,
    })
}

/// Twin-run separation δ(t) = ‖v_a−v_b‖² + ‖d_a−d_b‖²_{H¹} per matching
/// snapshot, plus the smallest C with δ(t) ≤ 2e^{Ct}δ(0) over the window.
#[derive(Clone, Debug)]
pub struct TwinDivergence {
    pub series: Vec<(f64, f64)>,
    pub growth_c: f64,
}

pub fn twin_divergence(a: &Trajectory, b: &Trajectory) -> Result<TwinDivergence> {
    if a.snapshots.len() != b.snapshots.len() || a.snapshots.is_empty() {
        return Err(Error::MismatchedTrajectories(format!(
            "snapshot counts differ or empty: {} vs {}",
            a.snapshots.len(),
            b.snapshots.len()
        )));
    }
    let mut series = Vec::with_capacity(a.snapshots.len());
    for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
        if (sa.t - sb.t).abs() > 1e-12 {
            return Err(Error::MismatchedTrajectories(format!(
                "snapshot times differ: {} vs {}",
                sa.t, sb.t
            )));
        }
        if !sa.grid().same_grid(sb.grid()) {
            return Err(Error::MismatchedTrajectories("grids differ".into()));
        }
        let dv = sa.v.sub(&sb.v);
        let dd = sa.d.sub(&sb.d);
        let delta = dv.l2_norm_sq() + norm_sq_vec(&dd, NormKind::H1);
        series.push((sa.t, delta));
    }
    let delta0 = series[0].1;
    let mut growth_c = 0.0f64;
    for &(t, delta) in &series[1..] {
        if delta <= 0.0 {
            continue;
        }
        if delta0 <= 0.0 {
            growth_c = f64::INFINITY;
            break;
        }
        if t > 0.0 {
            growth_c = growth_c.max((delta / (2.0 * delta0)).ln() / t);
        }
    }
    Ok(TwinDivergence { series, growth_c })
}
