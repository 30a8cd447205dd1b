use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use super::levels::{self, pairs};
use super::vertical::VerticalGrid;
use crate::error::{Error, Result};
use crate::spectral::{norm, Grid, RealField, Spectrum};

/// A function on the flattened strip, sampled as `(level, node)`.
///
/// Solutions are stored as the flat harmonic extension `e^{z|D|}f` of
/// their surface datum plus a remainder that vanishes at `z = 0`. The
/// first part is differentiated exactly in Fourier space.
#[derive(Debug, Clone)]
pub struct StripField {
    grid: Grid,
    vertical: Arc<VerticalGrid>,
    harmonic: Option<Spectrum>,
    remainder: Array2<f64>,
}

/// Derivatives of a strip field in the flattened coordinates `(x, z)`.
#[derive(Debug, Clone)]
pub struct StripDerivatives {
    pub v: Array2<f64>,
    pub v_z: Array2<f64>,
    pub v_zz: Array2<f64>,
    pub v_x: Vec<Array2<f64>>,
    pub v_xz: Vec<Array2<f64>>,
    /// Pairs `i ≤ j` as in [`super::pair_index`].
    pub v_xx: Vec<Array2<f64>>,
}

impl StripField {
    pub fn from_values(grid: Grid, vertical: Arc<VerticalGrid>, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (vertical.levels(), grid.len()) {
            return Err(Error::GridMismatch(format!(
                "strip array {:?} does not match {} levels × {} nodes",
                values.dim(),
                vertical.levels(),
                grid.len()
            )));
        }
        Ok(Self { grid, vertical, harmonic: None, remainder: values })
    }

    pub fn zeros(grid: Grid, vertical: Arc<VerticalGrid>) -> Self {
        let remainder = Array2::zeros((vertical.levels(), grid.len()));
        Self { grid, vertical, harmonic: None, remainder }
    }

    /// Samples `f(x, z)` at every strip node.
    pub fn from_fn(grid: Grid, vertical: Arc<VerticalGrid>, f: impl Fn([f64; 2], f64) -> f64) -> Self {
        let nodes = grid.nodes();
        let z = vertical.nodes().to_vec();
        let remainder = Array2::from_shape_fn((z.len(), grid.len()), |(i, j)| f(nodes[j], z[i]));
        Self { grid, vertical, harmonic: None, remainder }
    }

    pub(crate) fn split(grid: Grid, vertical: Arc<VerticalGrid>, harmonic: Spectrum, remainder: Array2<f64>) -> Self {
        Self { grid, vertical, harmonic: Some(harmonic), remainder }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn vertical(&self) -> &Arc<VerticalGrid> {
        &self.vertical
    }

    fn harmonic_coeffs(&self) -> Option<Array2<Complex64>> {
        let h = self.harmonic.as_ref()?;
        let z = self.vertical.nodes();
        let xi = self.grid.xi_norms();
        Some(Array2::from_shape_fn((z.len(), self.grid.len()), |(i, m)| {
            h.coeffs()[m] * (z[i] * xi[m]).exp()
        }))
    }

    pub fn values(&self) -> Array2<f64> {
        match self.harmonic_coeffs() {
            Some(h) => levels::inverse(&self.grid, h) + &self.remainder,
            None => self.remainder.clone(),
        }
    }

    /// Trace at `z = 0`.
    pub fn trace(&self) -> RealField {
        self.level(self.vertical.top())
    }

    pub fn level(&self, i: usize) -> RealField {
        RealField::new(self.grid, self.values().row(i).to_vec()).expect("row length")
    }

    pub fn is_finite(&self) -> bool {
        self.remainder.iter().all(|v| v.is_finite())
            && self.harmonic.as_ref().is_none_or(|h| h.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }

    pub fn derivatives(&self) -> StripDerivatives {
        let grid = &self.grid;
        let w = &self.remainder;
        let d1 = self.vertical.d1();
        let d2 = self.vertical.d2();
        let mut w_hat = levels::forward(grid, w);
        let mut wz_hat = levels::forward(grid, &d1.dot(w));
        let mut wzz_hat = levels::forward(grid, &d2.dot(w));
        if let Some(h) = self.harmonic_coeffs() {
            let xi = grid.xi_norms();
            for ((i, m), c) in h.indexed_iter() {
                let k = xi[m];
                w_hat[[i, m]] += c;
                wz_hat[[i, m]] += c * k;
                wzz_hat[[i, m]] += c * (k * k);
            }
        }
        let dim = grid.dim();
        let v = levels::inverse(grid, w_hat.clone());
        let v_z = levels::inverse(grid, wz_hat.clone());
        let v_zz = levels::inverse(grid, wzz_hat);
        let v_x = (0..dim)
            .map(|a| levels::apply(grid, &w_hat, |_, m, xi| levels::ik(grid, m, xi, a)))
            .collect();
        let v_xz = (0..dim)
            .map(|a| levels::apply(grid, &wz_hat, |_, m, xi| levels::ik(grid, m, xi, a)))
            .collect();
        let v_xx = pairs(dim)
            .into_iter()
            .map(|(a, b)| levels::apply(grid, &w_hat, |_, _, xi| Complex64::new(-xi[a] * xi[b], 0.0)))
            .collect();
        StripDerivatives { v, v_z, v_zz, v_x, v_xz, v_xx }
    }

    /// `∂_z v` at `z = 0`.
    pub fn dz_trace(&self) -> RealField {
        let top = self.vertical.top();
        let d1 = self.vertical.d1();
        let row: Vec<f64> = (0..self.grid.len())
            .map(|j| (0..self.vertical.levels()).map(|l| d1[[top, l]] * self.remainder[[l, j]]).sum())
            .collect();
        let mut out = RealField::new(self.grid, row).expect("row length");
        if let Some(h) = &self.harmonic {
            let flat = h.scaled_by(|_, xi| Complex64::new(norm(xi), 0.0)).to_field();
            out = out.add(&flat);
        }
        out
    }
}
