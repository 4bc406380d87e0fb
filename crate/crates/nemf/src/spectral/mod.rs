//! Periodic-grid Fourier calculus: grids and wavenumber lattices, fields
//! stored as Fourier coefficients, transforms, differential operators, the
//! Leray projector, dealiased products, and Sobolev/dual norms.
//!
//! Everything here is value-semantics over immutable grids; no shared
//! mutable state, so fields and grids can cross threads freely.

mod fft;
mod field;
mod grid;
mod norm;
mod ops;

pub use field::{SpectralField, VectorField};
pub use grid::{Padding, TorusGrid};
pub use norm::{norm, norm_sq, norm_sq_vec, norm_vec, NormKind};
pub use ops::{
    dealiased_product, derivative, divergence, eval_direct, gradient, jacobian, l2_inner,
    l2_inner_vec, laplacian, laplacian_vec, leray_project, max_divergence, FieldMatrix,
};

pub(crate) use field::{field_from_padded_real, to_padded_real};
