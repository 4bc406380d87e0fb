//! The physics layer: parameters, the Ginzburg–Landau penalty, energy
//! functionals, elastic stress assembly, and the right-hand sides of the
//! momentum and director equations.
//!
//! The coupled system on the unit torus reads
//!
//! ```text
//! v_t + (v·∇)v − ν Δv + ∇P = −∇·σ,     σ = λ[∇d⊙∇d + α G⊗d − (1−α) d⊗G],
//! ∇·v = 0,
//! d_t + (v·∇)d − α (∇v)d + (1−α)(∇ᵀv)d = γ G,
//! ```
//!
//! with the director residual G = Δd − f(d) and penalty
//! f(d) = η⁻²(|d|²−1)d = ∇F, F(d) = (|d|²−1)²/(4η²).
//!
//! G is always the *band-truncated* residual: f(d) is evaluated on the
//! padded grid and truncated back before anything else uses it, and the
//! stress is assembled from that same truncated field. With exact
//! dealiasing of the quadratic pairings this makes the semidiscrete energy
//! balance
//!
//! ```text
//! dE/dt = −ν‖∇v‖² − λγ‖G‖²,   E = ½‖v‖² + (λ/2)‖∇d‖² + λ∫F(d)
//! ```
//!
//! hold to rounding, so the recorded energy-law residual measures the time
//! discretization alone.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{
    derivative, field_from_padded_real, laplacian, laplacian_vec, leray_project, max_divergence,
    to_padded_real, FieldMatrix, SpectralField, TorusGrid, VectorField,
};

/// Physical parameters (ν, λ, γ, α, η): viscosity, elastic coupling,
/// relaxation rate, molecule-shape parameter, penalty width.
///
/// α = 0, 1/2, 1 correspond to disc-like, spherical and rod-like molecules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysParams {
    pub nu: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub eta: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            nu: 1.0,
            lambda: 1.0,
            gamma: 1.0,
            alpha: 0.5,
            eta: 1.0,
        }
    }
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::validation("params.nu", "viscosity must be > 0"));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::validation(
                "params.lambda",
                "elastic coupling must be > 0",
            ));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::validation(
                "params.gamma",
                "relaxation rate must be > 0",
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::validation(
                "params.alpha",
                format!("shape parameter must lie in [0, 1], got {}", self.alpha),
            ));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::validation(
                "params.eta",
                format!("penalty width must lie in (0, 1], got {}", self.eta),
            ));
        }
        Ok(())
    }
}

/// The pair (v, d) at time t. v is kept spectrally divergence-free; v and
/// d share one grid.
#[derive(Clone, Debug)]
pub struct State {
    pub v: VectorField,
    pub d: VectorField,
    pub t: f64,
}

impl State {
    pub fn new(v: VectorField, d: VectorField, t: f64) -> State {
        assert!(v.grid().same_grid(d.grid()), "v and d on different grids");
        State { v, d, t }
    }

    /// Build a state with the velocity Leray-projected. The k=0 mode (the
    /// mean velocity) passes through the projector untouched.
    pub fn projected(v: VectorField, d: VectorField, t: f64) -> State {
        State::new(leray_project(&v), d, t)
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        self.v.grid()
    }

    pub fn max_div(&self) -> f64 {
        max_divergence(&self.v)
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d.is_finite()
    }
}

/// ‖∇f‖² = Σ_k 4π²|k|² |f̂_k|².
pub fn grad_norm_sq(f: &SpectralField) -> f64 {
    let grid = f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| grid.lap_sq(idx) * c.norm_sqr())
        .sum()
}

pub fn grad_norm_sq_vec(v: &VectorField) -> f64 {
    v.components().iter().map(grad_norm_sq).sum()
}

/// Padded penalty samples: (d samples, f(d) samples) on the padded grid.
fn padded_penalty_samples(d: &VectorField, eta: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let dim = d.dim();
    let d_r: Vec<Vec<f64>> = d.components().iter().map(to_padded_real).collect();
    let plen = d_r[0].len();
    let inv_eta2 = 1.0 / (eta * eta);
    let mut f_r = vec![vec![0.0f64; plen]; dim];
    for p in 0..plen {
        let mut mag2 = 0.0;
        for comp in d_r.iter() {
            mag2 += comp[p] * comp[p];
        }
        let fac = inv_eta2 * (mag2 - 1.0);
        for (c, out) in f_r.iter_mut().enumerate() {
            out[p] = fac * d_r[c][p];
        }
    }
    (d_r, f_r)
}

/// The penalty f(d) = η⁻²(|d|²−1)d, dealiased (cubic) and truncated to the
/// base band.
pub fn penalty_f(d: &VectorField, eta: f64) -> VectorField {
    let grid = d.grid().clone();
    let (_, f_r) = padded_penalty_samples(d, eta);
    VectorField::new(
        f_r.iter()
            .map(|s| field_from_padded_real(&grid, s))
            .collect(),
    )
}

/// The band-truncated director residual G = Δd − f(d). Its L² norm is the
/// steady-state defect ‖−Δd+f(d)‖ monitored along every run.
pub fn director_residual(d: &VectorField, eta: f64) -> VectorField {
    let f = penalty_f(d, eta);
    VectorField::new(
        d.components()
            .iter()
            .zip(f.components())
            .map(|(dc, fc)| laplacian(dc).sub(fc))
            .collect(),
    )
}

/// Pointwise potential density F(d) = (|d|²−1)²/(4η²) as a spectral field.
pub fn potential_density(d: &VectorField, eta: f64) -> SpectralField {
    let grid = d.grid().clone();
    let samples = padded_potential_samples(d, eta);
    field_from_padded_real(&grid, &samples)
}

fn padded_potential_samples(d: &VectorField, eta: f64) -> Vec<f64> {
    let d_r: Vec<Vec<f64>> = d.components().iter().map(to_padded_real).collect();
    let quarter_inv_eta2 = 0.25 / (eta * eta);
    (0..d_r[0].len())
        .map(|p| {
            let mut mag2 = 0.0;
            for comp in d_r.iter() {
                mag2 += comp[p] * comp[p];
            }
            let dev = mag2 - 1.0;
            quarter_inv_eta2 * dev * dev
        })
        .collect()
}

/// ∫_Q F(d) dx, evaluated by the padded-grid quadrature (|Q| = 1).
pub fn potential_integral(d: &VectorField, eta: f64) -> f64 {
    let samples = padded_potential_samples(d, eta);
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Lyapunov energy E = ½‖v‖² + (λ/2)‖∇d‖² + λ∫F(d).
pub fn energy(state: &State, params: &PhysParams) -> f64 {
    0.5 * state.v.l2_norm_sq()
        + 0.5 * params.lambda * grad_norm_sq_vec(&state.d)
        + params.lambda * potential_integral(&state.d, params.eta)
}

/// Director-only energy E(d) = ½‖∇d‖² + ∫F(d), whose critical points are
/// the steady director profiles.
pub fn dirichlet_energy(d: &VectorField, eta: f64) -> f64 {
    0.5 * grad_norm_sq_vec(d) + potential_integral(d, eta)
}

/// Dissipation rate ν‖∇v‖² + λγ‖G‖² (the negated dE/dt).
pub fn dissipation(state: &State, params: &PhysParams) -> f64 {
    let g = director_residual(&state.d, params.eta);
    params.nu * grad_norm_sq_vec(&state.v) + params.lambda * params.gamma * g.l2_norm_sq()
}

/// The higher-order monitor A = ‖∇v‖² + λ‖G‖² whose decay signals
/// convergence to a steady state.
pub fn quantity_a(state: &State, params: &PhysParams) -> f64 {
    let g = director_residual(&state.d, params.eta);
    grad_norm_sq_vec(&state.v) + params.lambda * g.l2_norm_sq()
}

/// Everything the nonlinear terms need from the director field, evaluated
/// once on the padded grid.
struct DirectorEval {
    /// d samples per component.
    d_r: Vec<Vec<f64>>,
    /// ∂_a d_c samples at [c·dim + a].
    grad_d_r: Vec<Vec<f64>>,
    /// Raw penalty samples per component.
    f_r: Vec<Vec<f64>>,
    /// Samples of the truncated residual G per component.
    g_r: Vec<Vec<f64>>,
}

// TODO: pool the padded scratch buffers across a step; the per-call
// allocations are a measurable slice of step cost on small grids.
fn eval_director(d: &VectorField, eta: f64) -> DirectorEval {
    let grid = d.grid().clone();
    let dim = grid.dim();
    let (d_r, f_r) = padded_penalty_samples(d, eta);
    let mut grad_d_r = Vec::with_capacity(dim * dim);
    for c in 0..dim {
        for a in 0..dim {
            grad_d_r.push(to_padded_real(&derivative(d.component(c), a)));
        }
    }
    let g_r = d
        .components()
        .iter()
        .zip(f_r.iter())
        .map(|(dc, fs)| to_padded_real(&laplacian(dc).sub(&field_from_padded_real(&grid, fs))))
        .collect();
    DirectorEval {
        d_r,
        grad_d_r,
        f_r,
        g_r,
    }
}

/// σ_ij samples = λ[Σ_c ∂_i d_c ∂_j d_c + α G_i d_j − (1−α) d_i G_j].
fn stress_samples(eval: &DirectorEval, params: &PhysParams, dim: usize) -> Vec<Vec<f64>> {
    let plen = eval.d_r[0].len();
    let alpha = params.alpha;
    let lambda = params.lambda;
    let mut sigma = vec![vec![0.0f64; plen]; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let out = &mut sigma[i * dim + j];
            for (p, slot) in out.iter_mut().enumerate() {
                let mut dot = 0.0;
                for c in 0..dim {
                    dot += eval.grad_d_r[c * dim + i][p] * eval.grad_d_r[c * dim + j][p];
                }
                *slot = lambda
                    * (dot + alpha * eval.g_r[i][p] * eval.d_r[j][p]
                        - (1.0 - alpha) * eval.d_r[i][p] * eval.g_r[j][p]);
            }
        }
    }
    sigma
}

/// The elastic stress σ = λ[∇d⊙∇d + α G⊗d − (1−α) d⊗G], entry (i,j) of the
/// distortion part being ∇_i d·∇_j d. The momentum equation uses −∇·σ with
/// (∇·σ)_i = ∂_j σ_ij.
pub fn elastic_stress(d: &VectorField, params: &PhysParams) -> FieldMatrix {
    let grid = d.grid().clone();
    let dim = grid.dim();
    let eval = eval_director(d, params.eta);
    let sigma = stress_samples(&eval, params, dim);
    FieldMatrix::new(
        dim,
        sigma
            .iter()
            .map(|s| field_from_padded_real(&grid, s))
            .collect(),
    )
}

pub(crate) struct NonlinearTerms {
    /// Leray-projected explicit momentum terms P[−(v·∇)v − ∇·σ].
    pub n_v: VectorField,
    /// Explicit director terms −(v·∇)d + α(∇v)d − (1−α)(∇ᵀv)d − γf(d);
    /// `None` when the director is frozen.
    pub n_d: Option<VectorField>,
}

/// Explicit (non-stiff) parts of both equations, with every product
/// dealiased on the padded grid. `mean_offset` adds a uniform translation
/// to the advecting velocity (the transformed system for runs split as
/// v = ṽ + m_v); pass zeros for the lab frame.
pub(crate) fn nonlinear_terms(
    state: &State,
    params: &PhysParams,
    mean_offset: &[f64],
    frozen_director: bool,
) -> NonlinearTerms {
    let grid = state.grid().clone();
    let dim = grid.dim();
    assert_eq!(mean_offset.len(), dim);
    let eval = eval_director(&state.d, params.eta);
    let v_r: Vec<Vec<f64>> = state.v.components().iter().map(to_padded_real).collect();
    let mut jac_r = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for a in 0..dim {
            jac_r.push(to_padded_real(&derivative(state.v.component(i), a)));
        }
    }
    let plen = v_r[0].len();

    // momentum: advection and stress divergence
    let mut adv = vec![vec![0.0f64; plen]; dim];
    for i in 0..dim {
        for p in 0..plen {
            let mut s = 0.0;
            for a in 0..dim {
                s += (v_r[a][p] + mean_offset[a]) * jac_r[i * dim + a][p];
            }
            adv[i][p] = s;
        }
    }
    let sigma = stress_samples(&eval, params, dim);
    let sigma_mat = FieldMatrix::new(
        dim,
        sigma
            .iter()
            .map(|s| field_from_padded_real(&grid, s))
            .collect(),
    );
    let div_sigma = sigma_mat.divergence();
    let n_v_raw = VectorField::new(
        (0..dim)
            .map(|i| {
                field_from_padded_real(&grid, &adv[i])
                    .add(div_sigma.component(i))
                    .scaled(-1.0)
            })
            .collect(),
    );
    let n_v = leray_project(&n_v_raw);

    let n_d = if frozen_director {
        None
    } else {
        let gamma = params.gamma;
        let alpha = params.alpha;
        let mut nd = vec![vec![0.0f64; plen]; dim];
        for i in 0..dim {
            for p in 0..plen {
                let mut advection = 0.0;
                for a in 0..dim {
                    advection += (v_r[a][p] + mean_offset[a]) * eval.grad_d_r[i * dim + a][p];
                }
                let mut stretch = 0.0;
                for j in 0..dim {
                    stretch += alpha * jac_r[i * dim + j][p] * eval.d_r[j][p]
                        - (1.0 - alpha) * jac_r[j * dim + i][p] * eval.d_r[j][p];
                }
                nd[i][p] = -advection + stretch - gamma * eval.f_r[i][p];
            }
        }
        Some(VectorField::new(
            nd.iter()
                .map(|s| field_from_padded_real(&grid, s))
                .collect(),
        ))
    };

    NonlinearTerms { n_v, n_d }
}

/// Full momentum right-hand side P[−(v·∇)v + νΔv − ∇·σ] in the frame
/// translating at `mean_offset` (the advecting velocity is v + offset).
pub fn momentum_rhs_in_frame(
    state: &State,
    params: &PhysParams,
    mean_offset: &[f64],
) -> VectorField {
    let nt = nonlinear_terms(state, params, mean_offset, false);
    leray_project(&nt.n_v.add(&laplacian_vec(&state.v).scaled(params.nu)))
}

/// Full momentum right-hand side; the pressure is never materialized.
pub fn momentum_rhs(state: &State, params: &PhysParams) -> VectorField {
    momentum_rhs_in_frame(state, params, &vec![0.0; state.grid().dim()])
}

/// Full director right-hand side in the translating frame:
/// −((v+m)·∇)d + α(∇v)d − (1−α)(∇ᵀv)d + γ(Δd − f(d)).
pub fn director_rhs_in_frame(
    state: &State,
    params: &PhysParams,
    mean_offset: &[f64],
) -> VectorField {
    let nt = nonlinear_terms(state, params, mean_offset, false);
    nt.n_d
        .expect("director not frozen")
        .add(&laplacian_vec(&state.d).scaled(params.gamma))
}

pub fn director_rhs(state: &State, params: &PhysParams) -> VectorField {
    director_rhs_in_frame(state, params, &vec![0.0; state.grid().dim()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{
        dealiased_product, eval_direct, gradient, jacobian, l2_inner_vec, Padding,
    };
    use crate::testutil::{rel_err_vector, seeded_solenoidal, seeded_vector, taylor_green, TAU};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn unit_e1(grid: &Arc<TorusGrid>) -> VectorField {
        let mut value = vec![0.0; grid.dim()];
        value[0] = 1.0;
        VectorField::constant(grid, &value)
    }

    #[test]
    fn params_validation_names_keys() {
        let bad = PhysParams {
            alpha: 1.5,
            ..PhysParams::default()
        };
        match bad.validate() {
            Err(Error::Validation { key, .. }) => assert_eq!(key, "params.alpha"),
            other => panic!("expected validation error, got {other:?}"),
        }
        assert!(PhysParams::default().validate().is_ok());
    }

    #[test]
    fn penalty_vanishes_on_the_unit_sphere() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let f = penalty_f(&unit_e1(&grid), 1.0);
        assert!(f.l2_norm_sq() < 1e-28);
    }

    #[test]
    fn penalty_of_stretched_constant() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let d = VectorField::constant(&grid, &[2.0, 0.0]);
        let f = penalty_f(&d, 1.0);
        assert!((f.component(0).mean() - 6.0).abs() < 1e-12);
        assert!(f.component(1).l2_norm_sq() < 1e-24);
        // off-mean modes empty
        let high: f64 = f.component(0).coeffs()[1..]
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        assert!(high < 1e-24);
    }

    /// f = ∇F: ⟨f(d), δ⟩ against central differences of ∫F under a
    /// pointwise perturbation.
    #[test]
    fn penalty_is_the_potential_gradient() {
        let grid = TorusGrid::new(2, 32, Padding::DOUBLE).unwrap();
        let d = unit_e1(&grid).add(&seeded_vector(&grid, 51, 3).scaled(0.2));
        let delta = seeded_vector(&grid, 77, 3).scaled(0.3);
        let pairing = l2_inner_vec(&penalty_f(&d, 1.0), &delta);
        let eps = 1e-5;
        let plus = potential_integral(&d.add_scaled(eps, &delta), 1.0);
        let minus = potential_integral(&d.add_scaled(-eps, &delta), 1.0);
        let fd = (plus - minus) / (2.0 * eps);
        assert!(
            (pairing - fd).abs() <= 1e-6 * pairing.abs().max(1.0),
            "pairing {pairing} vs fd {fd}"
        );
    }

    #[test]
    fn potential_density_of_stretched_constant() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let d = VectorField::constant(&grid, &[2.0, 0.0]);
        let density = potential_density(&d, 1.0);
        assert!((density.mean() - 2.25).abs() < 1e-13);
        let high: f64 = density.coeffs()[1..].iter().map(|c| c.norm_sqr()).sum();
        assert!(high < 1e-24);
    }

    #[test]
    fn energy_of_equilibrium_is_zero() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let state = State::new(VectorField::zeros(&grid), unit_e1(&grid), 0.0);
        assert_eq!(energy(&state, &PhysParams::default()), 0.0);
    }

    #[test]
    fn energy_of_stretched_constant_is_potential_only() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let state = State::new(
            VectorField::zeros(&grid),
            VectorField::constant(&grid, &[2.0, 0.0]),
            0.0,
        );
        let e = energy(&state, &PhysParams::default());
        assert!((e - 2.25).abs() < 1e-12, "energy {e}"); // (4−1)²/4 on |Q|=1
    }

    #[test]
    fn energy_of_taylor_green_is_kinetic_only() {
        let grid = TorusGrid::square(2, 32).unwrap();
        let state = State::new(taylor_green(&grid, 1.0), unit_e1(&grid), 0.0);
        let e = energy(&state, &PhysParams::default());
        assert!((e - 0.25).abs() < 1e-12, "energy {e}"); // ½·‖v‖² = ½·½
    }

    #[test]
    fn stress_of_uniform_director_vanishes() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let sigma = elastic_stress(&unit_e1(&grid), &PhysParams::default());
        for i in 0..2 {
            for j in 0..2 {
                assert!(sigma.get(i, j).l2_norm_sq() < 1e-26);
            }
        }
    }

    /// The α=1 transport stress is minus the transpose of the α=0 one, and
    /// the α=1/2 stress splits into the symmetric distortion part plus an
    /// antisymmetric half-difference.
    #[test]
    fn stress_transport_part_transposition() {
        let grid = TorusGrid::new(2, 32, Padding::DOUBLE).unwrap();
        let d = unit_e1(&grid).add(&seeded_vector(&grid, 61, 3).scaled(0.3));
        let mk = |alpha: f64| {
            elastic_stress(
                &d,
                &PhysParams {
                    alpha,
                    ..PhysParams::default()
                },
            )
        };
        let s_rod = mk(1.0);
        let s_disc = mk(0.0);
        let s_sphere = mk(0.5);

        // symmetric distortion part assembled independently
        let grads: Vec<VectorField> = d.components().iter().map(gradient).collect();
        let sym = |i: usize, j: usize| {
            let mut acc = dealiased_product(&[grads[0].component(i), grads[0].component(j)]);
            acc = acc.add(&dealiased_product(&[
                grads[1].component(i),
                grads[1].component(j),
            ]));
            acc
        };
        let scale = s_rod.get(0, 0).l2_norm_sq().sqrt().max(1.0);
        for i in 0..2 {
            for j in 0..2 {
                let sym_ij = sym(i, j);
                let extra_rod = s_rod.get(i, j).sub(&sym_ij);
                let extra_disc_t = s_disc.get(j, i).sub(&sym(j, i));
                // (a⊗b)ᵀ = b⊗a
                let mismatch = extra_rod.add(&extra_disc_t).l2_norm_sq().sqrt();
                assert!(mismatch < 1e-12 * scale, "entry ({i},{j}): {mismatch}");
                // α=1/2: symmetric part is exactly the distortion tensor
                let sym_of_sphere = s_sphere
                    .get(i, j)
                    .add(s_sphere.get(j, i))
                    .scaled(0.5)
                    .sub(&sym_ij);
                assert!(sym_of_sphere.l2_norm_sq().sqrt() < 1e-12 * scale);
            }
        }
    }

    /// ∇·σ against a 4th-order finite-difference divergence of the stress
    /// assembled pointwise from direct Fourier evaluations on a refined
    /// sampling (independent of the FFT/dealiasing path).
    #[test]
    fn stress_divergence_matches_finite_differences() {
        let grid = TorusGrid::new(2, 64, Padding::DOUBLE).unwrap();
        let params = PhysParams {
            alpha: 0.7,
            ..PhysParams::default()
        };
        let d = unit_e1(&grid).add(&seeded_vector(&grid, 81, 2).scaled(0.4));
        let div_code = elastic_stress(&d, &params).divergence();

        // pointwise σ from direct evaluations
        let grads: Vec<VectorField> = d.components().iter().map(gradient).collect();
        let laps: Vec<SpectralField> = d.components().iter().map(laplacian).collect();
        let f = penalty_f(&d, params.eta);
        let sigma_at = |x: &[f64], i: usize, j: usize| {
            let mut dot = 0.0;
            for c in 0..2 {
                dot +=
                    eval_direct(grads[c].component(i), x) * eval_direct(grads[c].component(j), x);
            }
            let g_i = eval_direct(&laps[i], x) - eval_direct(f.component(i), x);
            let g_j = eval_direct(&laps[j], x) - eval_direct(f.component(j), x);
            let d_i = eval_direct(d.component(i), x);
            let d_j = eval_direct(d.component(j), x);
            params.lambda * (dot + params.alpha * g_i * d_j - (1.0 - params.alpha) * d_i * g_j)
        };
        let h = 1.0 / 512.0;
        let scale = (div_code.l2_norm_sq() / 2.0).sqrt();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let mut worst: f64 = 0.0;
        for _ in 0..60 {
            let ix = rand::Rng::random_range(&mut rng, 0..64usize);
            let iy = rand::Rng::random_range(&mut rng, 0..64usize);
            let x0 = [ix as f64 / 64.0, iy as f64 / 64.0];
            for i in 0..2 {
                let mut fd = 0.0;
                for j in 0..2 {
                    let at = |s: f64| {
                        let mut x = x0;
                        x[j] += s;
                        sigma_at(&x, i, j)
                    };
                    fd += (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
                }
                let spectral = div_code.component(i).real_samples()[ix * 64 + iy];
                worst = worst.max((spectral - fd).abs() / scale);
            }
        }
        assert!(worst < 1e-5, "max relative deviation {worst}");
    }

    #[test]
    fn momentum_rhs_vanishes_at_global_equilibrium() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let state = State::new(VectorField::zeros(&grid), unit_e1(&grid), 0.0);
        let rhs = momentum_rhs(&state, &PhysParams::default());
        assert!(rhs.l2_norm_sq() < 1e-28);
    }

    #[test]
    fn momentum_rhs_vanishes_for_uniform_translation() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let state = State::new(
            VectorField::constant(&grid, &[1.0, 0.0]),
            unit_e1(&grid),
            0.0,
        );
        let rhs = momentum_rhs(&state, &PhysParams::default());
        assert!(rhs.l2_norm_sq() < 1e-26);
    }

    /// For Taylor–Green and a uniform director the advection is a pure
    /// gradient (killed by the projector) and the stress vanishes, so the
    /// full right-hand side is exactly νΔv.
    #[test]
    fn momentum_rhs_of_taylor_green_is_viscous() {
        let grid = TorusGrid::square(2, 32).unwrap();
        let params = PhysParams {
            nu: 0.05,
            ..PhysParams::default()
        };
        let state = State::new(taylor_green(&grid, 1.0), unit_e1(&grid), 0.0);
        let rhs = momentum_rhs(&state, &params);
        let expected = laplacian_vec(&state.v).scaled(params.nu);
        assert!(rel_err_vector(&rhs, &expected) < 1e-12);
    }

    #[test]
    fn momentum_rhs_is_divergence_free() {
        let grid = TorusGrid::square(2, 32).unwrap();
        let state = State::projected(
            seeded_vector(&grid, 91, 4).scaled(0.1),
            unit_e1(&grid).add(&seeded_vector(&grid, 92, 4).scaled(0.2)),
            0.0,
        );
        let rhs = momentum_rhs(&state, &PhysParams::default());
        assert!(max_divergence(&rhs) < 1e-10);
    }

    #[test]
    fn director_rhs_vanishes_at_equilibrium() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let state = State::new(VectorField::zeros(&grid), unit_e1(&grid), 0.0);
        let rhs = director_rhs(&state, &PhysParams::default());
        assert!(rhs.l2_norm_sq() < 1e-28);
    }

    #[test]
    fn director_rhs_of_stretched_constant_is_pure_relaxation() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let params = PhysParams {
            gamma: 1.3,
            eta: 0.8,
            ..PhysParams::default()
        };
        let c = 0.5f64;
        let state = State::new(
            VectorField::zeros(&grid),
            VectorField::constant(&grid, &[c, 0.0]),
            0.0,
        );
        let rhs = director_rhs(&state, &params);
        let expected = -params.gamma / (params.eta * params.eta) * (c * c - 1.0) * c;
        assert!((rhs.component(0).mean() - expected).abs() < 1e-12);
        assert!(rhs.component(1).l2_norm_sq() < 1e-24);
    }

    /// The kinematic transport equals ωd + (2α−1)Ad with A = (J+Jᵀ)/2 and
    /// ω = (J−Jᵀ)/2; director_rhs reassembled through that route must agree
    /// to rounding.
    #[test]
    fn transport_decomposition_identity() {
        let grid = TorusGrid::square(2, 32).unwrap();
        let params = PhysParams {
            alpha: 0.37,
            ..PhysParams::default()
        };
        let state = State::projected(
            seeded_vector(&grid, 101, 4),
            unit_e1(&grid).add(&seeded_vector(&grid, 102, 4).scaled(0.3)),
            0.0,
        );
        let rhs = director_rhs(&state, &params);

        let j = jacobian(&state.v);
        let d = &state.d;
        let mut comps = Vec::new();
        for i in 0..2 {
            // ω d + (2α−1) A d
            let mut acc = SpectralField::zeros(&grid);
            for jj in 0..2 {
                let omega_ij = j.get(i, jj).sub(j.get(jj, i)).scaled(0.5);
                let a_ij = j.get(i, jj).add(j.get(jj, i)).scaled(0.5);
                let coeff = omega_ij.add(&a_ij.scaled(2.0 * params.alpha - 1.0));
                acc = acc.add(&dealiased_product(&[&coeff, d.component(jj)]));
            }
            // − (v·∇)d_i
            for a in 0..2 {
                let adv =
                    dealiased_product(&[state.v.component(a), &derivative(d.component(i), a)]);
                acc = acc.sub(&adv);
            }
            comps.push(acc);
        }
        let transport_route =
            VectorField::new(comps).add(&director_residual(d, params.eta).scaled(params.gamma));
        assert!(rel_err_vector(&rhs, &transport_route) < 1e-12);
    }

    #[test]
    fn dissipation_and_a_at_special_states() {
        let grid = TorusGrid::square(2, 32).unwrap();
        let params = PhysParams::default();

        let eq = State::new(VectorField::zeros(&grid), unit_e1(&grid), 0.0);
        assert_eq!(dissipation(&eq, &params), 0.0);
        assert_eq!(quantity_a(&eq, &params), 0.0);

        let c = 0.5f64;
        let stretched = State::new(
            VectorField::zeros(&grid),
            VectorField::constant(&grid, &[c, 0.0]),
            0.0,
        );
        let expected = (c * c - 1.0).powi(2) * c * c; // ‖f(d)‖² pointwise
        assert!((dissipation(&stretched, &params) - expected).abs() < 1e-13);
        assert!((quantity_a(&stretched, &params) - expected).abs() < 1e-13);

        let nu = 0.05;
        let tg = State::new(taylor_green(&grid, 1.0), unit_e1(&grid), 0.0);
        let tg_params = PhysParams {
            nu,
            ..PhysParams::default()
        };
        let expected_d = nu * 4.0 * PI * PI; // ‖∇v‖² = 8π²·‖v‖² = 4π²
        assert!((dissipation(&tg, &tg_params) - expected_d).abs() < 1e-9);
        assert!((quantity_a(&tg, &tg_params) - 4.0 * PI * PI).abs() < 1e-9);
    }

    /// Shifting both fields by τ·e_i commutes with all six operations.
    #[test]
    fn translation_equivariance() {
        let grid = TorusGrid::square(2, 32).unwrap();
        let params = PhysParams {
            alpha: 0.8,
            nu: 0.3,
            ..PhysParams::default()
        };
        let state = State::projected(
            seeded_solenoidal(&grid, 111, 3),
            unit_e1(&grid).add(&seeded_vector(&grid, 112, 3).scaled(0.25)),
            0.0,
        );
        let tau = 0.3127;
        let shift_field = |f: &SpectralField| {
            f.map_coeffs(|idx, c| {
                let k0 = f64::from(grid.wavenumber(idx)[0]);
                c * Complex64::from_polar(1.0, TAU * k0 * tau)
            })
        };
        let shift_vec =
            |v: &VectorField| VectorField::new(v.components().iter().map(shift_field).collect());
        let shifted = State::new(shift_vec(&state.v), shift_vec(&state.d), 0.0);

        let rhs_then_shift = shift_vec(&momentum_rhs(&state, &params));
        let shift_then_rhs = momentum_rhs(&shifted, &params);
        assert!(rel_err_vector(&shift_then_rhs, &rhs_then_shift) < 1e-11);

        let drhs_then_shift = shift_vec(&director_rhs(&state, &params));
        let shift_then_drhs = director_rhs(&shifted, &params);
        assert!(rel_err_vector(&shift_then_drhs, &drhs_then_shift) < 1e-11);

        assert!((energy(&shifted, &params) - energy(&state, &params)).abs() < 1e-12);
        assert!(
            (dissipation(&shifted, &params) - dissipation(&state, &params)).abs()
                < 1e-10 * dissipation(&state, &params).max(1.0)
        );
    }
}
