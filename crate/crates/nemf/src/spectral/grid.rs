use std::sync::Arc;

use crate::error::{Error, Result};

/// Rational padding factor for dealiased products, `num/den >= 1`.
///
/// 3/2 is exact for quadratic products of Nyquist-free fields; 2 extends
/// exactness to cubic products and to quartic integrals (the k=0 mode).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Padding {
    pub num: u32,
    pub den: u32,
}

impl Padding {
    pub const THREE_HALVES: Padding = Padding { num: 3, den: 2 };
    pub const DOUBLE: Padding = Padding { num: 2, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Padding> {
        if den == 0 || num < den {
            return Err(Error::validation(
                "grid.padding",
                format!("padding factor {num}/{den} must be a rational >= 1"),
            ));
        }
        Ok(Padding { num, den })
    }

    pub fn ratio(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    /// Smallest even padded resolution >= n·num/den.
    pub fn padded_resolution(&self, n: usize) -> usize {
        let m = (n * self.num as usize).div_ceil(self.den as usize);
        m + (m % 2)
    }
}

impl Default for Padding {
    fn default() -> Self {
        Padding::THREE_HALVES
    }
}

impl std::fmt::Display for Padding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// The discretized periodic unit torus Q = [0,1)^dim with its integer
/// wavenumber lattice. A mode k carries the angular wavenumber 2πk.
///
/// The resolution is the same power of two (>= 8) on every axis; samples
/// live at x_i = j/n. The Nyquist plane |k_axis| = n/2 is treated as
/// unresolved: it is zeroed by spectral differentiation and by truncation
/// from padded grids (its derivative has no conjugate partner).
#[derive(Debug)]
pub struct TorusGrid {
    dim: usize,
    resolution: usize,
    padding: Padding,
    /// Integer wavenumber triple per mode (third entry 0 in 2D).
    k: Vec<[i32; 3]>,
    /// |k|² per mode.
    k_sq: Vec<f64>,
}

impl TorusGrid {
    pub fn new(dim: usize, resolution: usize, padding: Padding) -> Result<Arc<TorusGrid>> {
        if dim != 2 && dim != 3 {
            return Err(Error::validation(
                "grid.dim",
                format!("dim must be 2 or 3, got {dim}"),
            ));
        }
        if resolution < 8 {
            return Err(Error::Degenerate(resolution));
        }
        if !resolution.is_power_of_two() {
            return Err(Error::validation(
                "grid.resolution",
                format!("resolution must be a power of two, got {resolution}"),
            ));
        }
        let modes = resolution.pow(dim as u32);
        let mut k = Vec::with_capacity(modes);
        let mut k_sq = Vec::with_capacity(modes);
        for idx in 0..modes {
            let kv = decode_wavenumber(idx, dim, resolution);
            k.push(kv);
            k_sq.push(kv.iter().map(|&c| f64::from(c) * f64::from(c)).sum());
        }
        Ok(Arc::new(TorusGrid {
            dim,
            resolution,
            padding,
            k,
            k_sq,
        }))
    }

    /// Unit square/box with the default 3/2 dealiasing padding.
    pub fn square(dim: usize, resolution: usize) -> Result<Arc<TorusGrid>> {
        TorusGrid::new(dim, resolution, Padding::default())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn padding(&self) -> Padding {
        self.padding
    }

    /// Total number of modes (= number of real-space samples).
    pub fn modes(&self) -> usize {
        self.k.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.resolution; self.dim]
    }

    pub fn padded_resolution(&self) -> usize {
        self.padding.padded_resolution(self.resolution)
    }

    pub fn padded_shape(&self) -> Vec<usize> {
        vec![self.padded_resolution(); self.dim]
    }

    /// Integer wavenumber of a flat mode index.
    pub fn wavenumber(&self, idx: usize) -> [i32; 3] {
        self.k[idx]
    }

    pub fn k_sq(&self, idx: usize) -> f64 {
        self.k_sq[idx]
    }

    /// 4π²|k|², the (negated) Laplacian symbol.
    pub fn lap_sq(&self, idx: usize) -> f64 {
        4.0 * std::f64::consts::PI * std::f64::consts::PI * self.k_sq[idx]
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        let ny = (self.resolution / 2) as i32;
        self.k[idx][..self.dim].iter().any(|&c| c == -ny)
    }

    /// Real-space coordinates of flat sample index `idx`.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let n = self.resolution;
        let mut rem = idx;
        let mut x = [0.0; 3];
        for a in (0..self.dim).rev() {
            x[a] = (rem % n) as f64 / n as f64;
            rem /= n;
        }
        x
    }

    pub fn same_grid(&self, other: &TorusGrid) -> bool {
        self.dim == other.dim
            && self.resolution == other.resolution
            && self.padding == other.padding
    }
}

fn decode_wavenumber(idx: usize, dim: usize, n: usize) -> [i32; 3] {
    let mut rem = idx;
    let mut k = [0i32; 3];
    for a in (0..dim).rev() {
        let i = rem % n;
        rem /= n;
        k[a] = if i < n / 2 {
            i as i32
        } else {
            i as i32 - n as i32
        };
    }
    k
}
