//! Deterministic initial-data generators. Every generator Leray-projects
//! the velocity it hands out; a given seed always produces bit-identical
//! states (single-threaded, fixed mode order).

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::io::config::{GeneratorKind, InitialConfig};
use crate::io::snapshot::read_snapshot;
use crate::model::State;
use crate::spectral::{leray_project, SpectralField, TorusGrid, VectorField};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Band limit of the random generators: modes with 0 < |k_i| <= 3.
const KMAX: i32 = 3;

/// Build the state described by an initial-data spec on the given grid.
pub fn generate_initial(initial: &InitialConfig, grid: &Arc<TorusGrid>) -> Result<State> {
    if let Some(path) = &initial.snapshot {
        let snap = read_snapshot(path)?;
        return snap.into_state(grid);
    }
    let mut mean_v = initial.mean_v.clone();
    mean_v.resize(grid.dim(), 0.0);
    let state = match initial.generator {
        GeneratorKind::TaylorGreen => taylor_green(grid, initial.amplitude),
        GeneratorKind::PerturbedConstantDirector => {
            perturbed_constant_director(grid, initial.seed, initial.amplitude)
        }
        GeneratorKind::RandomSmooth => {
            random_smooth(grid, initial.seed, initial.amplitude, &mean_v)
        }
    };
    Ok(state)
}

fn unit_e1(grid: &Arc<TorusGrid>) -> VectorField {
    let mut value = vec![0.0; grid.dim()];
    value[0] = 1.0;
    VectorField::constant(grid, &value)
}

/// The classical stationary-director vortex: amplitude·(sin2πx₁cos2πx₂,
/// −cos2πx₁sin2πx₂) in 2D (the 3D variant carries a cos2πx₃ envelope and a
/// zero third component); d is the unit constant e₁.
pub fn taylor_green(grid: &Arc<TorusGrid>, amplitude: f64) -> State {
    let v = match grid.dim() {
        2 => VectorField::new(vec![
            SpectralField::from_fn(grid, |x| {
                amplitude * (TAU * x[0]).sin() * (TAU * x[1]).cos()
            }),
            SpectralField::from_fn(grid, |x| {
                -amplitude * (TAU * x[0]).cos() * (TAU * x[1]).sin()
            }),
        ]),
        _ => VectorField::new(vec![
            SpectralField::from_fn(grid, |x| {
                amplitude * (TAU * x[0]).sin() * (TAU * x[1]).cos() * (TAU * x[2]).cos()
            }),
            SpectralField::from_fn(grid, |x| {
                -amplitude * (TAU * x[0]).cos() * (TAU * x[1]).sin() * (TAU * x[2]).cos()
            }),
            SpectralField::zeros(grid),
        ]),
    };
    State::projected(v, unit_e1(grid), 0.0)
}

/// Unit constant director plus a seeded band-limited perturbation of the
/// given sup-norm amplitude on both d and v (v solenoidal).
pub fn perturbed_constant_director(grid: &Arc<TorusGrid>, seed: u64, amplitude: f64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = unit_e1(grid).add(&perturbation(grid, &mut rng, amplitude));
    let v = solenoidal_perturbation(grid, &mut rng, amplitude);
    State::projected(v, d, 0.0)
}

/// Solenoidal random velocity of the given amplitude around the mean
/// `mean_v`, and a perturbed unit-constant director.
pub fn random_smooth(grid: &Arc<TorusGrid>, seed: u64, amplitude: f64, mean_v: &[f64]) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = solenoidal_perturbation(grid, &mut rng, amplitude);
    for (c, &m) in v.components_mut().iter_mut().zip(mean_v) {
        c.coeffs_mut()[0] += Complex64::new(m, 0.0);
    }
    let d = unit_e1(grid).add(&perturbation(grid, &mut rng, amplitude));
    State::projected(v, d, 0.0)
}

/// Zero-mean band-limited field with random mode amplitudes/phases,
/// rescaled to the requested sup norm. amplitude = 0 gives the exact zero
/// field.
fn band_limited(grid: &Arc<TorusGrid>, rng: &mut ChaCha8Rng) -> SpectralField {
    let n = grid.resolution();
    let dim = grid.dim();
    let mut coeffs = vec![Complex64::default(); grid.modes()];
    let index_of = |k: &[i32]| -> usize {
        let mut idx = 0usize;
        for &c in k.iter().take(dim) {
            let i = if c >= 0 {
                c as usize
            } else {
                (n as i32 + c) as usize
            };
            idx = idx * n + i;
        }
        idx
    };
    // canonical representative: first nonzero component positive
    let canonical = |k: &[i32]| k.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0);
    let mut visit = |k: Vec<i32>, rng: &mut ChaCha8Rng| {
        if !canonical(&k) {
            return;
        }
        let amp: f64 = rng.random_range(0.25..1.0);
        let phase: f64 = rng.random_range(0.0..TAU);
        let c = Complex64::from_polar(0.5 * amp, phase);
        let neg: Vec<i32> = k.iter().map(|&c| -c).collect();
        coeffs[index_of(&k)] = c;
        coeffs[index_of(&neg)] = c.conj();
    };
    if dim == 2 {
        for kx in -KMAX..=KMAX {
            for ky in -KMAX..=KMAX {
                visit(vec![kx, ky], rng);
            }
        }
    } else {
        for kx in -KMAX..=KMAX {
            for ky in -KMAX..=KMAX {
                for kz in -KMAX..=KMAX {
                    visit(vec![kx, ky, kz], rng);
                }
            }
        }
    }
    SpectralField::from_coeffs(grid, coeffs)
}

fn perturbation(grid: &Arc<TorusGrid>, rng: &mut ChaCha8Rng, amplitude: f64) -> VectorField {
    let raw = VectorField::new((0..grid.dim()).map(|_| band_limited(grid, rng)).collect());
    if amplitude == 0.0 {
        return VectorField::zeros(grid);
    }
    normalize_sup(raw, amplitude)
}

fn solenoidal_perturbation(
    grid: &Arc<TorusGrid>,
    rng: &mut ChaCha8Rng,
    amplitude: f64,
) -> VectorField {
    let raw = leray_project(&VectorField::new(
        (0..grid.dim()).map(|_| band_limited(grid, rng)).collect(),
    ));
    if amplitude == 0.0 {
        return VectorField::zeros(grid);
    }
    normalize_sup(raw, amplitude)
}

fn normalize_sup(v: VectorField, amplitude: f64) -> VectorField {
    let sup = v.magnitude_samples().iter().fold(0.0f64, |m, &s| m.max(s));
    if sup == 0.0 {
        return v;
    }
    v.scaled(amplitude / sup)
}
