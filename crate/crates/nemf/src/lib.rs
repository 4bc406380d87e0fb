//! Pseudo-spectral simulation of an incompressible flow coupled to a
//! unit-length-penalized director field on the periodic unit torus.
//!
//! The model couples the Navier–Stokes momentum balance to a kinematic
//! transport equation for the molecular orientation field `d`:
//!
//! ```text
//! v_t + (v·∇)v − ν Δv + ∇P = −λ ∇·[ ∇d⊙∇d + α G⊗d − (1−α) d⊗G ],
//! ∇·v = 0,
//! d_t + (v·∇)d − α (∇v)d + (1−α)(∇ᵀv)d = γ G,      G = Δd − f(d),
//! ```
//!
//! with the Ginzburg–Landau penalty `f(d) = η⁻²(|d|²−1)d` relaxing the
//! unit-length constraint, and `α ∈ [0,1]` encoding the molecule shape
//! (0 disc, 1/2 sphere, 1 rod). The total energy
//! `E = ½‖v‖² + (λ/2)‖∇d‖² + λ∫F(d)` decays along solutions at the rate
//! `ν‖∇v‖² + λγ‖G‖²`, the mean velocity is exactly conserved, and
//! trajectories converge to steady states `(m_v, d∞)` with `−Δd∞+f(d∞)=0`.
//!
//! Modules:
//! - [`spectral`]: Fourier grids, transforms, operators, Leray projection,
//!   dealiased products, Sobolev/dual norms.
//! - [`model`]: parameters, penalty, energies, elastic stress, equation
//!   right-hand sides.
//! - [`integrator`]: IMEX time stepping, mean-velocity bookkeeping, the
//!   simulation driver.
//! - [`diagnostics`]: monitored scalars, energy-law residual, steady-state
//!   detection, decay-rate and dual-exponent fitting, twin-run divergence.
//! - [`io`]: config files, deterministic initial data, CSV series, binary
//!   snapshots.
//! - [`verify`]: the executable acceptance suites.

pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod io;
pub mod model;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
