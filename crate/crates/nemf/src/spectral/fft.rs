//! Thin multi-dimensional wrapper around rustfft: unnormalized complex
//! transforms along each axis of a row-major array. Plans are cached in a
//! process-global planner.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().unwrap();
    match direction {
        FftDirection::Forward => p.plan_fft_forward(len),
        FftDirection::Inverse => p.plan_fft_inverse(len),
    }
}

/// In-place unnormalized forward transform along every axis.
pub(crate) fn forward_nd(data: &mut [Complex64], shape: &[usize]) {
    transform_nd(data, shape, FftDirection::Forward);
}

/// In-place unnormalized inverse transform along every axis.
/// `inverse_nd(forward_nd(x)) = N·x` with N the total sample count.
pub(crate) fn inverse_nd(data: &mut [Complex64], shape: &[usize]) {
    transform_nd(data, shape, FftDirection::Inverse);
}

fn transform_nd(data: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total, "buffer/shape mismatch");
    for axis in 0..shape.len() {
        transform_axis(data, shape, axis, direction);
    }
}

fn transform_axis(data: &mut [Complex64], shape: &[usize], axis: usize, direction: FftDirection) {
    let n = shape[axis];
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let stride: usize = shape[axis + 1..].iter().product();
    if stride == 1 {
        // contiguous lanes: rustfft handles back-to-back chunks in one call
        fft.process_with_scratch(data, &mut scratch);
        return;
    }
    let outer: usize = shape[..axis].iter().product();
    let mut lane = vec![Complex64::default(); n];
    for o in 0..outer {
        let block = o * n * stride;
        for s in 0..stride {
            let base = block + s;
            for (j, slot) in lane.iter_mut().enumerate() {
                *slot = data[base + j * stride];
            }
            fft.process_with_scratch(&mut lane, &mut scratch);
            for (j, slot) in lane.iter().enumerate() {
                data[base + j * stride] = *slot;
            }
        }
    }
}
