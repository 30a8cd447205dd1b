//! Batched horizontal transforms over every vertical level of a strip array.

use ndarray::Array2;
use num_complex::Complex64;

use crate::spectral::{fft, Grid, Vec2};

/// Transforms every row. Rows are packed two at a time into one complex
/// transform and separated through conjugate symmetry.
pub(crate) fn forward(grid: &Grid, values: &Array2<f64>) -> Array2<Complex64> {
    let (rows, len) = values.dim();
    let src = values.as_slice().expect("standard layout");
    let pairs = rows.div_ceil(2);
    let mut packed = vec![Complex64::new(0.0, 0.0); pairs * len];
    for (p, chunk) in packed.chunks_mut(len).enumerate() {
        let a = &src[2 * p * len..(2 * p + 1) * len];
        if 2 * p + 1 < rows {
            let b = &src[(2 * p + 1) * len..(2 * p + 2) * len];
            for ((c, &x), &y) in chunk.iter_mut().zip(a).zip(b) {
                *c = Complex64::new(x, y);
            }
        } else {
            for (c, &x) in chunk.iter_mut().zip(a) {
                *c = Complex64::new(x, 0.0);
            }
        }
    }
    fft::forward_in_place(grid, &mut packed);
    let conj: Vec<usize> = (0..len).map(|m| grid.conjugate_index(m)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); rows * len];
    let half = Complex64::new(0.0, -0.5);
    for (p, chunk) in packed.chunks(len).enumerate() {
        let (first, rest) = out[2 * p * len..].split_at_mut(len);
        for m in 0..len {
            let z = chunk[m];
            let zc = chunk[conj[m]].conj();
            first[m] = (z + zc) * 0.5;
            if 2 * p + 1 < rows {
                rest[m] = (z - zc) * half;
            }
        }
    }
    Array2::from_shape_vec((rows, len), out).expect("shape")
}

/// Inverse of rows whose spectra are conjugate symmetric, two rows per
/// complex transform.
pub(crate) fn inverse(grid: &Grid, coeffs: Array2<Complex64>) -> Array2<f64> {
    let (rows, len) = coeffs.dim();
    let src = coeffs.as_slice().expect("standard layout");
    let pairs = rows.div_ceil(2);
    let mut packed = vec![Complex64::new(0.0, 0.0); pairs * len];
    for (p, chunk) in packed.chunks_mut(len).enumerate() {
        let a = &src[2 * p * len..(2 * p + 1) * len];
        if 2 * p + 1 < rows {
            let b = &src[(2 * p + 1) * len..(2 * p + 2) * len];
            for ((c, &x), &y) in chunk.iter_mut().zip(a).zip(b) {
                *c = Complex64::new(x.re - y.im, x.im + y.re);
            }
        } else {
            chunk.copy_from_slice(a);
        }
    }
    fft::inverse_in_place(grid, &mut packed);
    let mut out = vec![0.0; rows * len];
    for (p, chunk) in packed.chunks(len).enumerate() {
        let (first, rest) = out[2 * p * len..].split_at_mut(len);
        for (o, c) in first.iter_mut().zip(chunk) {
            *o = c.re;
        }
        if 2 * p + 1 < rows {
            for (o, c) in rest[..len].iter_mut().zip(chunk) {
                *o = c.im;
            }
        }
    }
    Array2::from_shape_vec((rows, len), out).expect("shape")
}

/// Multiplies level `i`, mode `m` by `f(i, m, ξ_m)` and transforms back.
pub(crate) fn apply(
    grid: &Grid,
    coeffs: &Array2<Complex64>,
    f: impl Fn(usize, usize, Vec2) -> Complex64,
) -> Array2<f64> {
    let wv = grid.wavevectors();
    let len = grid.len();
    let mut out = coeffs.clone();
    let data = out.as_slice_mut().expect("standard layout");
    for (i, row) in data.chunks_mut(len).enumerate() {
        for (m, c) in row.iter_mut().enumerate() {
            *c *= f(i, m, wv[m]);
        }
    }
    inverse(grid, out)
}

/// `i·ξ_axis`, zero on Nyquist modes.
pub(crate) fn ik(grid: &Grid, m: usize, xi: Vec2, axis: usize) -> Complex64 {
    if grid.is_nyquist(m) {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, xi[axis])
    }
}

/// Index into the upper-triangular list of horizontal pairs `(i ≤ j)`.
pub fn pair_index(dim: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    if dim == 1 {
        0
    } else {
        match (a, b) {
            (0, 0) => 0,
            (0, 1) => 1,
            _ => 2,
        }
    }
}

pub fn pair_count(dim: usize) -> usize {
    if dim == 1 {
        1
    } else {
        3
    }
}

pub(crate) fn pairs(dim: usize) -> Vec<(usize, usize)> {
    if dim == 1 {
        vec![(0, 0)]
    } else {
        vec![(0, 0), (0, 1), (1, 1)]
    }
}
