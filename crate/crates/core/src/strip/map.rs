use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use super::levels::{self, pair_index, pairs};
use super::vertical::VerticalGrid;
use crate::error::{Error, Result};
use crate::spectral::{norm, Grid, RealField};

/// Smallest flattening parameter tried before giving up.
pub const MIN_DELTA: f64 = 1e-6;

/// The regularized flattening `ρ_δ(x, z) = z + (e^{δz|D|}η)(x)` and its
/// derivatives, sampled at every strip node. Arrays are `(level, node)`.
#[derive(Debug, Clone)]
pub struct FlattenMap {
    pub(crate) grid: Grid,
    pub(crate) vertical: Arc<VerticalGrid>,
    pub(crate) delta: f64,
    pub(crate) eta: RealField,
    pub rho: Array2<f64>,
    pub rho_z: Array2<f64>,
    pub rho_zz: Array2<f64>,
    /// `∂_{x_i}ρ` per horizontal axis.
    pub rho_x: Vec<Array2<f64>>,
    /// `∂_{x_i}∂_zρ` per horizontal axis.
    pub rho_xz: Vec<Array2<f64>>,
    /// `∂_{x_i}∂_{x_j}ρ` for `i ≤ j`, see [`levels::pair_index`].
    pub rho_xx: Vec<Array2<f64>>,
}

impl FlattenMap {
    /// Builds the map, halving `δ` from `delta_hint` until `∂_zρ_δ ≥ 1/2`
    /// holds at every node.
    pub fn build(eta: &RealField, vertical: Arc<VerticalGrid>, delta_hint: f64) -> Result<Self> {
        if !(delta_hint.is_finite() && delta_hint > 0.0) {
            return Err(Error::InvalidParameter(format!("delta hint must be positive, got {delta_hint}")));
        }
        if !eta.is_finite() {
            return Err(Error::SurfaceTooRough { min_delta: MIN_DELTA, min_rho_z: f64::NAN });
        }
        let grid = *eta.grid();
        let levels = vertical.levels();
        let eta_hat = eta.spectrum();
        let xi_norm = grid.xi_norms();
        let z = vertical.nodes().to_vec();
        let mut delta = delta_hint;
        let mut worst = f64::NAN;
        let mut base = Array2::<Complex64>::zeros((levels, grid.len()));
        loop {
            if delta < MIN_DELTA {
                return Err(Error::SurfaceTooRough { min_delta: MIN_DELTA, min_rho_z: worst });
            }
            for ((i, m), c) in base.indexed_iter_mut() {
                *c = eta_hat.coeffs()[m] * (delta * z[i] * xi_norm[m]).exp();
            }
            let rho_z = levels::apply(&grid, &base, |_, _, xi| Complex64::new(delta * norm(xi), 0.0))
                .mapv(|v| v + 1.0);
            worst = rho_z.iter().cloned().fold(f64::INFINITY, f64::min);
            if worst >= 0.5 {
                let h = levels::inverse(&grid, base.clone());
                let mut rho = h;
                for (i, mut row) in rho.rows_mut().into_iter().enumerate() {
                    row.mapv_inplace(|v| v + z[i]);
                }
                let rho_zz = levels::apply(&grid, &base, |_, _, xi| {
                    Complex64::new(delta * delta * norm(xi) * norm(xi), 0.0)
                });
                let dim = grid.dim();
                let rho_x = (0..dim)
                    .map(|a| levels::apply(&grid, &base, |_, m, xi| levels::ik(&grid, m, xi, a)))
                    .collect();
                let rho_xz = (0..dim)
                    .map(|a| {
                        levels::apply(&grid, &base, |_, m, xi| levels::ik(&grid, m, xi, a) * (delta * norm(xi)))
                    })
                    .collect();
                let rho_xx = pairs(dim)
                    .into_iter()
                    .map(|(a, b)| levels::apply(&grid, &base, |_, _, xi| Complex64::new(-xi[a] * xi[b], 0.0)))
                    .collect();
                return Ok(Self {
                    grid,
                    vertical,
                    delta,
                    eta: eta.clone(),
                    rho,
                    rho_z,
                    rho_zz,
                    rho_x,
                    rho_xz,
                    rho_xx,
                });
            }
            delta *= 0.5;
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn vertical(&self) -> &Arc<VerticalGrid> {
        &self.vertical
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> &RealField {
        &self.eta
    }

    pub fn laplacian_rho(&self) -> Array2<f64> {
        let dim = self.grid.dim();
        let mut lap = self.rho_xx[pair_index(dim, 0, 0)].clone();
        if dim == 2 {
            lap += &self.rho_xx[pair_index(dim, 1, 1)];
        }
        lap
    }

    pub fn min_rho_z(&self) -> f64 {
        self.rho_z.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Surface row of a strip array as a field.
    pub fn surface(&self, a: &Array2<f64>) -> RealField {
        RealField::new(self.grid, a.row(self.vertical.top()).to_vec()).expect("row length")
    }
}

/// Variable coefficients of the flattened elliptic operator
/// `∂²_z v + αΔv + β·∇∂_z v − γ∂_z v`.
#[derive(Debug, Clone)]
pub struct EllipticCoefficients {
    pub alpha: Array2<f64>,
    pub beta: Vec<Array2<f64>>,
    pub gamma: Array2<f64>,
}

impl EllipticCoefficients {
    pub fn from_map(map: &FlattenMap) -> Self {
        let dim = map.grid.dim();
        let lap = map.laplacian_rho();
        let shape = map.rho.dim();
        let mut alpha = Array2::zeros(shape);
        let mut beta = vec![Array2::zeros(shape); dim];
        let mut gamma = Array2::zeros(shape);
        for idx in ndarray::indices(shape) {
            let r = map.rho_z[idx];
            let g2: f64 = (0..dim).map(|a| map.rho_x[a][idx].powi(2)).sum();
            let denom = 1.0 + g2;
            let al = r * r / denom;
            alpha[idx] = al;
            let mut mixed = 0.0;
            for a in 0..dim {
                let b = -2.0 * r * map.rho_x[a][idx] / denom;
                beta[a][idx] = b;
                mixed += b * map.rho_xz[a][idx];
            }
            gamma[idx] = (map.rho_zz[idx] + al * lap[idx] + mixed) / r;
        }
        Self { alpha, beta, gamma }
    }

    /// Smallest `α` over the strip.
    pub fn alpha_min(&self) -> f64 {
        self.alpha.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.iter().chain(self.gamma.iter()).all(|v| v.is_finite())
            && self.beta.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }
}
