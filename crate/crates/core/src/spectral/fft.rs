//! Normalized discrete Fourier transforms on periodic grids.
//!
//! Forward transforms divide by the node count so that `cos(kx)` has
//! coefficient 1/2 at `±k`. Buffers may hold several fields back to back;
//! every transform acts on each `grid.len()` chunk independently.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::grid::Grid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static SCRATCH: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

fn transpose_square(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

fn run(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.n();
    let len = grid.len();
    debug_assert_eq!(data.len() % len, 0);
    let fft = plan(n, direction);
    SCRATCH.with(|s| {
        let mut scratch = s.borrow_mut();
        let need = fft.get_inplace_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, Complex64::new(0.0, 0.0));
        }
        let scratch = &mut scratch[..need];
        match grid.dim() {
            1 => fft.process_with_scratch(data, scratch),
            _ => {
                for chunk in data.chunks_mut(len) {
                    fft.process_with_scratch(chunk, scratch);
                    transpose_square(chunk, n);
                    fft.process_with_scratch(chunk, scratch);
                    transpose_square(chunk, n);
                }
            }
        }
    });
}

/// In-place forward transform with 1/N normalization.
pub fn forward_in_place(grid: &Grid, data: &mut [Complex64]) {
    run(grid, data, FftDirection::Forward);
    let scale = 1.0 / grid.len() as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
}

/// In-place inverse transform (no scaling).
pub fn inverse_in_place(grid: &Grid, data: &mut [Complex64]) {
    run(grid, data, FftDirection::Inverse);
}

pub fn forward_real(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_in_place(grid, &mut buf);
    buf
}

/// Inverse transform keeping the real part.
pub fn inverse_real(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    inverse_in_place(grid, &mut buf);
    buf.into_iter().map(|c| c.re).collect()
}
