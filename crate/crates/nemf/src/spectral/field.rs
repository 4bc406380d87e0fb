use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::fft;
use super::grid::TorusGrid;

/// A real scalar field on a [`TorusGrid`], stored as normalized Fourier
/// coefficients: f(x) = Σ_k f̂_k e^{2πik·x}. Real-space samples are cached
/// lazily. Conjugate symmetry f̂_{−k} = conj(f̂_k) is maintained by every
/// constructor that starts from real data.
#[derive(Debug)]
pub struct SpectralField {
    grid: Arc<TorusGrid>,
    coeffs: Vec<Complex64>,
    real: OnceLock<Vec<f64>>,
}

impl Clone for SpectralField {
    fn clone(&self) -> Self {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self.coeffs.clone(),
            real: OnceLock::new(),
        }
    }
}

impl SpectralField {
    pub fn zeros(grid: &Arc<TorusGrid>) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.modes()],
            real: OnceLock::new(),
        }
    }

    pub fn constant(grid: &Arc<TorusGrid>, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    pub fn from_coeffs(grid: &Arc<TorusGrid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.modes());
        SpectralField {
            grid: grid.clone(),
            coeffs,
            real: OnceLock::new(),
        }
    }

    /// Transform real samples (row-major, x-major order) to coefficients.
    /// The samples are kept as the cached real-space view.
    pub fn from_real_samples(grid: &Arc<TorusGrid>, samples: Vec<f64>) -> Self {
        assert_eq!(samples.len(), grid.modes());
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        fft::forward_nd(&mut buf, &grid.shape());
        let scale = 1.0 / grid.modes() as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
        let f = SpectralField {
            grid: grid.clone(),
            coeffs: buf,
            real: OnceLock::new(),
        };
        let _ = f.real.set(samples);
        f
    }

    /// Sample a closure at the grid points and transform.
    pub fn from_fn(grid: &Arc<TorusGrid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let samples: Vec<f64> = (0..grid.modes())
            .map(|idx| {
                let x = grid.coords(idx);
                f(&x[..grid.dim()])
            })
            .collect();
        Self::from_real_samples(grid, samples)
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Mutate coefficients; drops the cached real-space view.
    pub fn coeffs_mut(&mut self) -> &mut Vec<Complex64> {
        self.real = OnceLock::new();
        &mut self.coeffs
    }

    /// Real-space samples, computed on first use.
    pub fn real_samples(&self) -> &[f64] {
        self.real.get_or_init(|| {
            let mut buf = self.coeffs.clone();
            fft::inverse_nd(&mut buf, &self.grid.shape());
            buf.iter().map(|c| c.re).collect()
        })
    }

    /// Spatial mean = the k=0 coefficient.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn linf_norm(&self) -> f64 {
        self.real_samples()
            .iter()
            .fold(0.0_f64, |m, &s| m.max(s.abs()))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.l2_norm_sq().is_finite()
    }

    pub fn map_coeffs(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(i, c))
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            coeffs,
            real: OnceLock::new(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn add(&self, other: &SpectralField) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> Self {
        self.zip(other, |a, b| a - b)
    }

    /// self + s·other
    pub fn add_scaled(&self, s: f64, other: &SpectralField) -> Self {
        self.zip(other, |a, b| a + b * s)
    }

    fn zip(&self, other: &SpectralField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(
            Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_grid(&other.grid),
            "fields on different grids"
        );
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            coeffs,
            real: OnceLock::new(),
        }
    }
}

/// Per-axis map from a base-grid index to the matching slot on the padded
/// grid; Nyquist columns map to None and are dropped.
fn embed_map(n: usize, m: usize) -> Vec<Option<usize>> {
    (0..n)
        .map(|i| {
            let k = if i < n / 2 {
                i as i64
            } else {
                i as i64 - n as i64
            };
            if k.unsigned_abs() as usize == n / 2 {
                None
            } else if k >= 0 {
                Some(k as usize)
            } else {
                Some((m as i64 + k) as usize)
            }
        })
        .collect()
}

/// Evaluate a field on its padded grid: zero-embed the spectrum into the
/// padded lattice and inverse transform. Used for dealiased products.
pub(crate) fn to_padded_real(f: &SpectralField) -> Vec<f64> {
    let grid = f.grid();
    let n = grid.resolution();
    let m = grid.padded_resolution();
    let dim = grid.dim();
    let map = embed_map(n, m);
    let padded_total = m.pow(dim as u32);
    let mut buf = vec![Complex64::default(); padded_total];
    let n_strides: Vec<usize> = (0..dim).map(|a| n.pow((dim - 1 - a) as u32)).collect();
    let m_strides: Vec<usize> = (0..dim).map(|a| m.pow((dim - 1 - a) as u32)).collect();
    'modes: for (idx, &c) in f.coeffs().iter().enumerate() {
        let mut rem = idx;
        let mut pidx = 0usize;
        for a in 0..dim {
            let i = rem / n_strides[a];
            rem %= n_strides[a];
            match map[i] {
                Some(j) => pidx += j * m_strides[a],
                None => continue 'modes,
            }
        }
        buf[pidx] = c;
    }
    fft::inverse_nd(&mut buf, &grid.padded_shape());
    buf.iter().map(|c| c.re).collect()
}

/// Transform padded real samples back and truncate to the base band
/// (Nyquist zeroed). Inverse of [`to_padded_real`] composed with any
/// pointwise operation.
pub(crate) fn field_from_padded_real(grid: &Arc<TorusGrid>, samples: &[f64]) -> SpectralField {
    let n = grid.resolution();
    let m = grid.padded_resolution();
    let dim = grid.dim();
    assert_eq!(samples.len(), m.pow(dim as u32));
    let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    fft::forward_nd(&mut buf, &grid.padded_shape());
    let scale = 1.0 / buf.len() as f64;
    let map = embed_map(n, m);
    let n_strides: Vec<usize> = (0..dim).map(|a| n.pow((dim - 1 - a) as u32)).collect();
    let m_strides: Vec<usize> = (0..dim).map(|a| m.pow((dim - 1 - a) as u32)).collect();
    let mut coeffs = vec![Complex64::default(); grid.modes()];
    'modes: for (idx, slot) in coeffs.iter_mut().enumerate() {
        let mut rem = idx;
        let mut pidx = 0usize;
        for a in 0..dim {
            let i = rem / n_strides[a];
            rem %= n_strides[a];
            match map[i] {
                Some(j) => pidx += j * m_strides[a],
                None => continue 'modes,
            }
        }
        *slot = buf[pidx] * scale;
    }
    SpectralField::from_coeffs(grid, coeffs)
}

/// An n-vector-valued field; one component per grid dimension.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<SpectralField>,
}

impl VectorField {
    pub fn new(components: Vec<SpectralField>) -> Self {
        assert!(!components.is_empty());
        let grid = components[0].grid();
        assert_eq!(
            components.len(),
            grid.dim(),
            "component count must equal grid dim"
        );
        assert!(components.iter().all(|c| c.grid().same_grid(grid)));
        VectorField { components }
    }

    pub fn zeros(grid: &Arc<TorusGrid>) -> Self {
        VectorField {
            components: (0..grid.dim())
                .map(|_| SpectralField::zeros(grid))
                .collect(),
        }
    }

    /// Spatially constant vector field.
    pub fn constant(grid: &Arc<TorusGrid>, value: &[f64]) -> Self {
        assert_eq!(value.len(), grid.dim());
        VectorField {
            components: value
                .iter()
                .map(|&v| SpectralField::constant(grid, v))
                .collect(),
        }
    }

    pub fn from_fns(grid: &Arc<TorusGrid>, fns: &[&dyn Fn(&[f64]) -> f64]) -> Self {
        assert_eq!(fns.len(), grid.dim());
        VectorField {
            components: fns
                .iter()
                .map(|f| SpectralField::from_fn(grid, f))
                .collect(),
        }
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &SpectralField {
        &self.components[i]
    }

    pub fn components(&self) -> &[SpectralField] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [SpectralField] {
        &mut self.components
    }

    pub fn into_components(self) -> Vec<SpectralField> {
        self.components
    }

    /// Spatial mean per component.
    pub fn mean(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.mean()).collect()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.components.iter().map(|c| c.l2_norm_sq()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.l2_norm_sq().is_finite()
    }

    pub fn scaled(&self, s: f64) -> Self {
        VectorField {
            components: self.components.iter().map(|c| c.scaled(s)).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> Self {
        self.zip(other, SpectralField::add)
    }

    pub fn sub(&self, other: &VectorField) -> Self {
        self.zip(other, SpectralField::sub)
    }

    pub fn add_scaled(&self, s: f64, other: &VectorField) -> Self {
        self.zip(other, |a, b| a.add_scaled(s, b))
    }

    fn zip(
        &self,
        other: &VectorField,
        f: impl Fn(&SpectralField, &SpectralField) -> SpectralField,
    ) -> Self {
        assert_eq!(self.dim(), other.dim());
        VectorField {
            components: self
                .components
                .iter()
                .zip(other.components.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Pointwise Euclidean magnitude |V(x)| on the base grid.
    pub fn magnitude_samples(&self) -> Vec<f64> {
        let per: Vec<&[f64]> = self.components.iter().map(|c| c.real_samples()).collect();
        (0..self.grid().modes())
            .map(|i| per.iter().map(|s| s[i] * s[i]).sum::<f64>().sqrt())
            .collect()
    }
}
