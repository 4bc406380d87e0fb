//! Time advancement: IMEX schemes with per-mode diagonal implicit solves,
//! mean-velocity bookkeeping, and the top-level simulation driver.
//!
//! Both schemes treat the stiff linear diffusion (νΔv, γΔd) implicitly and
//! everything nonlinear — advection, stress divergence, kinematic
//! transport, the penalty — explicitly:
//!
//! ```text
//! imex_euler:  (y* − yⁿ)/dt = L y* + N(yⁿ)
//! imex_bdf2:   (3y* − 4yⁿ + yⁿ⁻¹)/(2dt) = L y* + 2N(yⁿ) − N(yⁿ⁻¹)
//! ```
//!
//! Each mode solves by a scalar division; the velocity is Leray-projected
//! after the solve (the projector commutes with the diagonal solve). The
//! k=0 velocity mode sees neither diffusion nor projection and its
//! explicit terms integrate to zero, so the mean velocity is conserved to
//! rounding at every step.
//!
//! Two explicit rates govern stability, and the driver emits a warning
//! (not an error) when the configured `cfl_warn_threshold` is exceeded at
//! start-up:
//! - the penalty: dt ≲ η²/(γ·sup||d|²−1|);
//! - the stress–transport coupling, which oscillates at frequencies up to
//!   ~√λ·4π²|k|²·sup|d| against the implicit damping (1+dtνL)(1+dtγL):
//!   harmless for λ ≤ νγ at any dt, otherwise requiring
//!   dt ≲ 1/(√λ·4π²|k|²_max).

use num_complex::Complex64;

use crate::diagnostics::{compute_record, DiagRecord};
use crate::error::{Error, Result};
use crate::model::{self, nonlinear_terms, PhysParams, State};
use crate::spectral::{leray_project, SpectralField, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    ImexEuler,
    ImexBdf2,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ImexEuler => "imex_euler",
            Scheme::ImexBdf2 => "imex_bdf2",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Scheme> {
        match s {
            "imex_euler" => Ok(Scheme::ImexEuler),
            "imex_bdf2" => Ok(Scheme::ImexBdf2),
            other => Err(Error::validation(
                "scheme.name",
                format!("unknown scheme '{other}' (imex_euler | imex_bdf2)"),
            )),
        }
    }
}

/// Time-stepping configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    /// Warn when dt times the estimated explicit rate exceeds this.
    pub cfl_warn_threshold: f64,
    /// Hold the director fixed (d_t ≡ 0). The momentum equation still sees
    /// the (static) director stress. Used by pure-fluid validation runs.
    pub frozen_director: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            scheme: Scheme::ImexEuler,
            dt: 1e-3,
            t_end: 1.0,
            cfl_warn_threshold: 0.5,
            frozen_director: false,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::validation("scheme.dt", "time step must be > 0"));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::validation("scheme.t_end", "final time must be >= 0"));
        }
        Ok(())
    }
}

/// Split v into its conserved mean and the zero-mean remainder. The k=0
/// coefficient moves wholesale (real part reported as the mean), so
/// v_tilde + m_v reconstructs v bit-exactly.
pub fn split_mean_velocity(v: &VectorField) -> (Vec<f64>, VectorField) {
    let mean: Vec<f64> = v.components().iter().map(|c| c.coeffs()[0].re).collect();
    let tilde = VectorField::new(
        v.components()
            .iter()
            .map(|c| {
                c.map_coeffs(|idx, z| {
                    if idx == 0 {
                        Complex64::new(0.0, z.im)
                    } else {
                        z
                    }
                })
            })
            .collect(),
    );
    (mean, tilde)
}

/// y* = (ŷ + dt·N̂)/(1 + dt·κ·4π²|k|²) per mode.
fn euler_solve(y: &SpectralField, n: &SpectralField, dt: f64, kappa: f64) -> SpectralField {
    let grid = y.grid().clone();
    let coeffs = y
        .coeffs()
        .iter()
        .zip(n.coeffs())
        .enumerate()
        .map(|(idx, (&a, &b))| (a + b * dt) / (1.0 + dt * kappa * grid.lap_sq(idx)))
        .collect();
    SpectralField::from_coeffs(&grid, coeffs)
}

/// y* = (4ŷ − ŷ_prev + 2dt(2N̂ − N̂_prev))/(3 + 2dt·κ·4π²|k|²) per mode.
fn bdf2_solve(
    y: &SpectralField,
    y_prev: &SpectralField,
    n: &SpectralField,
    n_prev: &SpectralField,
    dt: f64,
    kappa: f64,
) -> SpectralField {
    let grid = y.grid().clone();
    let coeffs = y
        .coeffs()
        .iter()
        .zip(y_prev.coeffs())
        .zip(n.coeffs().iter().zip(n_prev.coeffs()))
        .enumerate()
        .map(|(idx, ((&a, &ap), (&b, &bp)))| {
            (a * 4.0 - ap + (b * 2.0 - bp) * 2.0 * dt) / (3.0 + 2.0 * dt * kappa * grid.lap_sq(idx))
        })
        .collect();
    SpectralField::from_coeffs(&grid, coeffs)
}

struct PrevLevel {
    state: State,
    n_v: VectorField,
    n_d: Option<VectorField>,
}

/// Multi-step driver for one trajectory. Keeps the single history level
/// BDF2 needs; the first step of a BDF2 run (and every step of an Euler
/// run) is an IMEX-Euler step.
pub struct Stepper {
    cfg: SchemeConfig,
    mean_offset: Vec<f64>,
    prev: Option<PrevLevel>,
}

impl Stepper {
    pub fn new(cfg: &SchemeConfig, dim: usize) -> Stepper {
        Stepper {
            cfg: *cfg,
            mean_offset: vec![0.0; dim],
            prev: None,
        }
    }

    /// Stepper for the transformed system of a mean-split run: the state
    /// holds the zero-mean ṽ and the advecting velocity is ṽ + m_v.
    pub fn comoving(cfg: &SchemeConfig, mean: &[f64]) -> Stepper {
        Stepper {
            cfg: *cfg,
            mean_offset: mean.to_vec(),
            prev: None,
        }
    }

    pub fn advance(&mut self, state: &State, params: &PhysParams) -> Result<State> {
        let dt = self.cfg.dt;
        let nt = nonlinear_terms(state, params, &self.mean_offset, self.cfg.frozen_director);
        let use_bdf2 = self.cfg.scheme == Scheme::ImexBdf2 && self.prev.is_some();

        let (v_new, d_new) = if use_bdf2 {
            let prev = self.prev.as_ref().unwrap();
            let v = VectorField::new(
                (0..state.v.dim())
                    .map(|i| {
                        bdf2_solve(
                            state.v.component(i),
                            prev.state.v.component(i),
                            nt.n_v.component(i),
                            prev.n_v.component(i),
                            dt,
                            params.nu,
                        )
                    })
                    .collect(),
            );
            let d = match (&nt.n_d, &prev.n_d) {
                (Some(n_d), Some(n_d_prev)) => VectorField::new(
                    (0..state.d.dim())
                        .map(|i| {
                            bdf2_solve(
                                state.d.component(i),
                                prev.state.d.component(i),
                                n_d.component(i),
                                n_d_prev.component(i),
                                dt,
                                params.gamma,
                            )
                        })
                        .collect(),
                ),
                _ => state.d.clone(),
            };
            (v, d)
        } else {
            let v = VectorField::new(
                (0..state.v.dim())
                    .map(|i| euler_solve(state.v.component(i), nt.n_v.component(i), dt, params.nu))
                    .collect(),
            );
            let d = match &nt.n_d {
                Some(n_d) => VectorField::new(
                    (0..state.d.dim())
                        .map(|i| {
                            euler_solve(state.d.component(i), n_d.component(i), dt, params.gamma)
                        })
                        .collect(),
                ),
                None => state.d.clone(),
            };
            (v, d)
        };

        let next = State::new(leray_project(&v_new), d_new, state.t + dt);
        // norms beyond 1e40 are treated as blow-up too: quartic/sextic
        // diagnostics of such states overflow to inf
        let norm_sq = next.v.l2_norm_sq() + next.d.l2_norm_sq();
        if !norm_sq.is_finite() || norm_sq > 1e80 {
            return Err(Error::NonFinite { t: next.t, step: 0 });
        }
        self.prev = Some(PrevLevel {
            state: state.clone(),
            n_v: nt.n_v,
            n_d: nt.n_d,
        });
        Ok(next)
    }
}

/// One time step from a bare state (no history): an IMEX-Euler step, which
/// is also how a BDF2 run bootstraps.
pub fn step(state: &State, params: &PhysParams, cfg: &SchemeConfig) -> Result<State> {
    Stepper::new(cfg, state.grid().dim()).advance(state, params)
}

/// Output cadences and optional early termination for [`run`].
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Record diagnostics every this many steps (0 = initial/final only).
    pub diag_every: usize,
    /// Keep full state snapshots every this many steps (0 = none).
    pub snapshot_every: usize,
    /// Stop once a record satisfies A < tol_a and resid_d < tol_resid.
    pub stop_on_steady: Option<(f64, f64)>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            diag_every: 10,
            snapshot_every: 0,
            stop_on_steady: None,
        }
    }
}

/// Where and when a run died of non-finite fields.
#[derive(Clone, Copy, Debug)]
pub struct Abort {
    pub t: f64,
    pub step: u64,
}

/// A completed (or aborted) run: diagnostic records at the configured
/// cadence, optional state snapshots, the last accepted state, and the
/// abort flag if the run blew up.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<DiagRecord>,
    pub snapshots: Vec<State>,
    pub final_state: State,
    pub aborted: Option<Abort>,
}

impl Trajectory {
    pub fn last_record(&self) -> &DiagRecord {
        self.records.last().expect("trajectory has records")
    }

    /// (t, quantity) series for the fitting helpers.
    pub fn series(&self, f: impl Fn(&DiagRecord) -> f64) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.t, f(r))).collect()
    }
}

/// Advance `initial` to t_end in the lab frame. The initial velocity is
/// Leray-projected (its mean is preserved, not zeroed).
pub fn run(
    initial: State,
    params: &PhysParams,
    cfg: &SchemeConfig,
    opts: &RunOptions,
) -> Result<Trajectory> {
    let dim = initial.grid().dim();
    run_with_offset(initial, params, cfg, opts, &vec![0.0; dim])
}

/// Advance the transformed mean-split system: the state carries the
/// zero-mean ṽ and `mean` is the conserved average velocity entering the
/// advection terms.
pub fn run_comoving(
    initial: State,
    params: &PhysParams,
    cfg: &SchemeConfig,
    opts: &RunOptions,
    mean: &[f64],
) -> Result<Trajectory> {
    run_with_offset(initial, params, cfg, opts, mean)
}

fn run_with_offset(
    initial: State,
    params: &PhysParams,
    cfg: &SchemeConfig,
    opts: &RunOptions,
    mean_offset: &[f64],
) -> Result<Trajectory> {
    params.validate()?;
    cfg.validate()?;
    if initial.grid().resolution() < 8 {
        return Err(Error::Degenerate(initial.grid().resolution()));
    }
    let mut state = State::projected(initial.v, initial.d, initial.t);
    warn_if_stiff(&state, params, cfg);

    let t0 = state.t;
    let n_steps = if cfg.t_end <= t0 {
        0
    } else {
        ((cfg.t_end - t0) / cfg.dt - 1e-9).ceil() as u64
    };
    let diag_every = opts.diag_every.max(1) as u64;
    let is_record = |s: u64| s == 0 || s == n_steps || s % diag_every == 0;
    let want_snapshot =
        |s: u64| opts.snapshot_every > 0 && (s % opts.snapshot_every as u64 == 0 || s == n_steps);

    let mut records: Vec<DiagRecord> = Vec::new();
    let mut snapshots: Vec<State> = Vec::new();
    let mut stepper = Stepper {
        cfg: *cfg,
        mean_offset: mean_offset.to_vec(),
        prev: None,
    };
    let mut aborted = None;
    // (energy, dissipation) of the state one step before the next record
    let mut pending_prev: Option<(f64, f64)> = None;

    let push_record =
        |records: &mut Vec<DiagRecord>, state: &State, pending: Option<(f64, f64)>| -> DiagRecord {
            let rec = compute_record(state, params, pending.map(|(e, d)| (e, d, cfg.dt)));
            if let Some(prev) = records.last() {
                assert!(rec.t > prev.t, "record times must increase");
            }
            records.push(rec.clone());
            rec
        };

    let mut steady = false;
    if is_record(0) {
        let rec = push_record(&mut records, &state, None);
        if let Some((tol_a, tol_resid)) = opts.stop_on_steady {
            steady = rec.quantity_a < tol_a && rec.resid_d < tol_resid;
        }
    }
    if want_snapshot(0) {
        snapshots.push(state.clone());
    }

    let mut s = 0u64;
    while s < n_steps && !steady {
        if is_record(s + 1) {
            pending_prev = Some((
                model::energy(&state, params),
                model::dissipation(&state, params),
            ));
        }
        match stepper.advance(&state, params) {
            Ok(mut next) => {
                next.t = t0 + (s + 1) as f64 * cfg.dt;
                state = next;
                s += 1;
            }
            Err(Error::NonFinite { t, .. }) => {
                aborted = Some(Abort { t, step: s + 1 });
                break;
            }
            Err(e) => return Err(e),
        }
        if is_record(s) {
            let rec = push_record(&mut records, &state, pending_prev.take());
            if let Some((tol_a, tol_resid)) = opts.stop_on_steady {
                if rec.quantity_a < tol_a && rec.resid_d < tol_resid {
                    steady = true;
                }
            }
        }
        if want_snapshot(s) {
            snapshots.push(state.clone());
        }
    }

    Ok(Trajectory {
        records,
        snapshots,
        final_state: state,
        aborted,
    })
}

fn warn_if_stiff(state: &State, params: &PhysParams, cfg: &SchemeConfig) {
    let d_mags = state.d.magnitude_samples();
    let sup_d = d_mags.iter().fold(0.0f64, |m, &s| m.max(s));
    let dev = d_mags
        .iter()
        .fold(0.0f64, |m, &s| m.max((s * s - 1.0).abs()));
    let penalty_rate = params.gamma * dev / (params.eta * params.eta);
    let advective_rate = state
        .v
        .magnitude_samples()
        .iter()
        .fold(0.0f64, |m, &s| m.max(s))
        * std::f64::consts::PI
        * state.grid().resolution() as f64;
    let mut rate = penalty_rate.max(advective_rate);
    if !cfg.frozen_director && params.lambda > params.nu * params.gamma {
        // explicit stress-transport coupling not fully damped by the
        // implicit diffusion pair
        let n = state.grid().resolution() as f64;
        let lap_max = 4.0
            * std::f64::consts::PI
            * std::f64::consts::PI
            * state.grid().dim() as f64
            * (n / 2.0)
            * (n / 2.0);
        let coupling = (params.lambda.sqrt() - (params.nu * params.gamma).sqrt()) * lap_max * sup_d;
        rate = rate.max(coupling);
    }
    if cfg.dt * rate > cfg.cfl_warn_threshold {
        eprintln!(
            "warning: dt = {} vs explicit rate ~{rate:.3e} (dt·rate = {:.2} > {}); \
             expect instability — reduce dt, increase eta, or keep lambda <= nu*gamma",
            cfg.dt,
            cfg.dt * rate,
            cfg.cfl_warn_threshold
        );
    }
}
