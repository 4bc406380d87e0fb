//! Fourier-side calculus: differential operators, the Leray projector,
//! dealiased pointwise products, and discrete inner products.
//!
//! Conventions fixed once for the whole crate:
//! - angular wavenumbers 2πk on the unit torus (period 1 per axis);
//! - Jacobian J_ij = ∂v_i/∂x_j, so (∇v)d = Jd = (d·∇)v and (∇ᵀv)d = Jᵀd;
//! - matrix divergence (∇·σ)_i = ∂_j σ_ij (row-wise);
//! - the Nyquist plane is zeroed by differentiation and truncation.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::field::{field_from_padded_real, to_padded_real, SpectralField, VectorField};

/// ∇f, component i carrying coefficients (2πi·k_i)·f̂_k.
pub fn gradient(f: &SpectralField) -> VectorField {
    let grid = f.grid();
    let comps = (0..grid.dim()).map(|axis| derivative(f, axis)).collect();
    VectorField::new(comps)
}

/// ∂f/∂x_axis.
pub fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    let grid = f.grid();
    let ny = (grid.resolution() / 2) as i32;
    f.map_coeffs(|idx, c| {
        let k = grid.wavenumber(idx)[axis];
        if k == -ny {
            Complex64::default()
        } else {
            c * Complex64::new(0.0, 2.0 * PI * f64::from(k))
        }
    })
}

/// ∇·V = Σ_i ∂_i V_i.
pub fn divergence(v: &VectorField) -> SpectralField {
    let mut acc = derivative(v.component(0), 0);
    for axis in 1..v.dim() {
        acc = acc.add(&derivative(v.component(axis), axis));
    }
    acc
}

/// Δf, coefficients −4π²|k|²·f̂_k.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    f.map_coeffs(|idx, c| c * (-grid.lap_sq(idx)))
}

pub fn laplacian_vec(v: &VectorField) -> VectorField {
    VectorField::new(v.components().iter().map(laplacian).collect())
}

/// A dim×dim matrix of scalar fields, row-major: entry (i,j) at i·dim+j.
#[derive(Debug, Clone)]
pub struct FieldMatrix {
    dim: usize,
    entries: Vec<SpectralField>,
}

impl FieldMatrix {
    pub fn new(dim: usize, entries: Vec<SpectralField>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        FieldMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &SpectralField {
        &self.entries[i * self.dim + j]
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 0..self.dim {
            for j in 0..self.dim {
                entries.push(self.get(j, i).clone());
            }
        }
        FieldMatrix {
            dim: self.dim,
            entries,
        }
    }

    /// Row-wise divergence: (∇·σ)_i = Σ_j ∂_j σ_ij.
    pub fn divergence(&self) -> VectorField {
        let comps = (0..self.dim)
            .map(|i| {
                let mut acc = derivative(self.get(i, 0), 0);
                for j in 1..self.dim {
                    acc = acc.add(&derivative(self.get(i, j), j));
                }
                acc
            })
            .collect();
        VectorField::new(comps)
    }
}

/// Jacobian J_ij = ∂v_i/∂x_j.
pub fn jacobian(v: &VectorField) -> FieldMatrix {
    let dim = v.dim();
    let mut entries = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            entries.push(derivative(v.component(i), j));
        }
    }
    FieldMatrix::new(dim, entries)
}

/// Per-mode removal of the gradient part: v̂ ← v̂ − k(k·v̂)/|k|² for k ≠ 0.
/// The k=0 mode (the mean velocity) passes through untouched.
pub fn leray_project(v: &VectorField) -> VectorField {
    let grid = v.grid().clone();
    let dim = v.dim();
    let modes = grid.modes();
    let mut comps: Vec<Vec<Complex64>> =
        v.components().iter().map(|c| c.coeffs().to_vec()).collect();
    for idx in 1..modes {
        let k = grid.wavenumber(idx);
        let ksq = grid.k_sq(idx);
        if ksq == 0.0 {
            continue;
        }
        let mut kdotv = Complex64::default();
        for (a, comp) in comps.iter().enumerate().take(dim) {
            kdotv += comp[idx] * f64::from(k[a]);
        }
        let factor = kdotv / ksq;
        for (a, comp) in comps.iter_mut().enumerate().take(dim) {
            comp[idx] -= factor * f64::from(k[a]);
        }
    }
    VectorField::new(
        comps
            .into_iter()
            .map(|c| SpectralField::from_coeffs(&grid, c))
            .collect(),
    )
}

/// Pointwise product of the factors, evaluated on the grid's padded lattice
/// and truncated back to the base band. Exactness depends on the padding
/// factor relative to the product degree (= number of factors).
pub fn dealiased_product(factors: &[&SpectralField]) -> SpectralField {
    assert!(!factors.is_empty(), "empty product");
    let grid = factors[0].grid().clone();
    assert!(
        factors.iter().all(|f| f.grid().same_grid(&grid)),
        "factors on different grids"
    );
    let mut acc = to_padded_real(factors[0]);
    for f in &factors[1..] {
        let other = to_padded_real(f);
        for (a, b) in acc.iter_mut().zip(other.iter()) {
            *a *= b;
        }
    }
    field_from_padded_real(&grid, &acc)
}

/// Discrete L² inner product ⟨f, g⟩ = ∫_Q f g dx via Parseval (|Q| = 1).
pub fn l2_inner(f: &SpectralField, g: &SpectralField) -> f64 {
    f.coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| (a * b.conj()).re)
        .sum()
}

pub fn l2_inner_vec(f: &VectorField, g: &VectorField) -> f64 {
    f.components()
        .iter()
        .zip(g.components())
        .map(|(a, b)| l2_inner(a, b))
        .sum()
}

/// Max |∇·V| over the real-space samples.
pub fn max_divergence(v: &VectorField) -> f64 {
    divergence(v).linf_norm()
}

/// Evaluate a band-limited field by direct Fourier summation at arbitrary
/// points. O(modes) per point; test-oracle and small-scale use only.
pub fn eval_direct(f: &SpectralField, x: &[f64]) -> f64 {
    let grid = f.grid();
    let mut acc = Complex64::default();
    for (idx, &c) in f.coeffs().iter().enumerate() {
        if c == Complex64::default() {
            continue;
        }
        let k = grid.wavenumber(idx);
        let mut phase = 0.0;
        for (a, &xa) in x.iter().enumerate() {
            phase += f64::from(k[a]) * xa;
        }
        acc += c * Complex64::from_polar(1.0, 2.0 * PI * phase);
    }
    acc.re
}
