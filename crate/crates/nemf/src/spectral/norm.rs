//! Sobolev and dual norms via Parseval sums on the unit torus (|Q| = 1):
//! L2² = Σ|f̂_k|², H1² = Σ(1+4π²|k|²)|f̂_k|², H2² = Σ(1+4π²|k|²)²|f̂_k|²,
//! and the (H¹)' dual norm H1dual² = Σ|f̂_k|²/(1+4π²|k|²).

use super::field::{SpectralField, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    L2,
    H1,
    H2,
    H1Dual,
}

fn weight(kind: NormKind, lap_sq: f64) -> f64 {
    let s = 1.0 + lap_sq;
    match kind {
        NormKind::L2 => 1.0,
        NormKind::H1 => s,
        NormKind::H2 => s * s,
        NormKind::H1Dual => 1.0 / s,
    }
}

pub fn norm_sq(f: &SpectralField, kind: NormKind) -> f64 {
    let grid = f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| weight(kind, grid.lap_sq(idx)) * c.norm_sqr())
        .sum()
}

pub fn norm(f: &SpectralField, kind: NormKind) -> f64 {
    norm_sq(f, kind).sqrt()
}

pub fn norm_sq_vec(v: &VectorField, kind: NormKind) -> f64 {
    v.components().iter().map(|c| norm_sq(c, kind)).sum()
}

pub fn norm_vec(v: &VectorField, kind: NormKind) -> f64 {
    norm_sq_vec(v, kind).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::TorusGrid;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_norms() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let f = SpectralField::constant(&grid, -2.0);
        for kind in [NormKind::L2, NormKind::H1, NormKind::H1Dual] {
            assert!((norm(&f, kind) - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_sine_norms() {
        let grid = TorusGrid::square(2, 16).unwrap();
        let f = SpectralField::from_fn(&grid, |x| (2.0 * PI * x[0]).sin());
        assert!((norm_sq(&f, NormKind::L2) - 0.5).abs() < 1e-13);
        let expected_h1 = 0.5 * (1.0 + 4.0 * PI * PI);
        assert!((norm_sq(&f, NormKind::H1) - expected_h1).abs() < 1e-11);
        let expected_dual = 0.5 / (1.0 + 4.0 * PI * PI);
        assert!((norm_sq(&f, NormKind::H1Dual) - expected_dual).abs() < 1e-13);
    }
}
