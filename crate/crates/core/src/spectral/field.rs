use num_complex::Complex64;

use super::fft;
use super::grid::{Grid, Vec2};
use crate::error::{Error, Result};

/// Real samples of a periodic function at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

/// Normalized Fourier coefficients of a grid field.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(Vec2) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum { grid: self.grid, coeffs: fft::forward_real(&self.grid, &self.values) }
    }

    pub fn ensure_same_grid(&self, other: &RealField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> RealField {
        debug_assert_eq!(self.grid, other.grid);
        RealField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> RealField {
        self.map(|v| c * v)
    }

    /// `self + c·other`
    pub fn axpy(&self, c: f64, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a + c * b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v < self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `∫_cell u·v dx` by the trapezoidal (spectrally exact) rule.
    pub fn inner(&self, other: &RealField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.grid.node_weight() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Applies a real, even multiplier. Infallible fast path used internally.
    pub fn filter(&self, m: impl Fn(Vec2) -> f64) -> RealField {
        let mut c = fft::forward_real(&self.grid, &self.values);
        for (i, ci) in c.iter_mut().enumerate() {
            *ci *= m(self.grid.wavevector(i));
        }
        RealField { grid: self.grid, values: fft::inverse_real(&self.grid, &c) }
    }

    /// Spectral partial derivative along `axis` (Nyquist mode dropped).
    pub fn derivative(&self, axis: usize) -> RealField {
        self.spectrum().derivative(axis).to_field()
    }

    pub fn gradient(&self) -> Vec<RealField> {
        let s = self.spectrum();
        (0..self.grid.dim()).map(|a| s.derivative(a).to_field()).collect()
    }

    pub fn laplacian(&self) -> RealField {
        self.filter(|xi| -(xi[0] * xi[0] + xi[1] * xi[1]))
    }

    /// 2/3-rule truncation.
    pub fn dealias(&self) -> RealField {
        let mut c = fft::forward_real(&self.grid, &self.values);
        for (i, ci) in c.iter_mut().enumerate() {
            if !self.grid.passes_dealias(i) {
                *ci = Complex64::new(0.0, 0.0);
            }
        }
        RealField { grid: self.grid, values: fft::inverse_real(&self.grid, &c) }
    }

    /// Reflection `x ↦ −x` on the periodic cell.
    pub fn mirrored(&self) -> RealField {
        let n = self.grid.n();
        let r = |i: usize| (n - i) % n;
        let values = (0..self.grid.len())
            .map(|idx| {
                let src = if self.grid.dim() == 1 { r(idx) } else { r(idx / n) * n + r(idx % n) };
                self.values[src]
            })
            .collect();
        RealField { grid: self.grid, values }
    }
}

/// Divergence of a vector field given by components.
pub fn divergence(components: &[RealField]) -> RealField {
    let grid = *components[0].grid();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (axis, c) in components.iter().enumerate() {
        let d = c.spectrum().derivative(axis);
        for (a, b) in acc.iter_mut().zip(&d.coeffs) {
            *a += b;
        }
    }
    RealField { grid, values: fft::inverse_real(&grid, &acc) }
}

pub fn dot_fields(a: &[RealField], b: &[RealField]) -> RealField {
    let mut acc = a[0].mul(&b[0]);
    for (x, y) in a.iter().zip(b).skip(1) {
        acc = acc.add(&x.mul(y));
    }
    acc
}

impl Spectrum {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn to_field(&self) -> RealField {
        RealField { grid: self.grid, values: fft::inverse_real(&self.grid, &self.coeffs) }
    }

    pub fn scaled_by(&self, m: impl Fn(usize, Vec2) -> Complex64) -> Spectrum {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * m(i, self.grid.wavevector(i)))
            .collect();
        Spectrum { grid: self.grid, coeffs }
    }

    pub fn derivative(&self, axis: usize) -> Spectrum {
        let g = self.grid;
        self.scaled_by(|i, xi| {
            if g.is_nyquist(i) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, xi[axis])
            }
        })
    }

    /// `Σ |c_m|²·w(ξ_m)` times the cell volume.
    pub fn weighted_energy(&self, w: impl Fn(Vec2) -> f64) -> f64 {
        self.grid.cell_volume()
            * self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.norm_sqr() * w(self.grid.wavevector(i)))
                .sum::<f64>()
    }
}
