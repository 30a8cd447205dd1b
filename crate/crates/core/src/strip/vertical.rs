use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Chebyshev–Gauss–Lobatto collocation on `[−Z_b, 0]`, either affine or
/// through the logarithmic stretch `z = −ℓ(e^τ − 1)` with `τ` affine in the
/// reference coordinate.
///
/// Nodes are ordered bottom to top: `z_0 = −Z_b`, `z_M = 0`.
#[derive(Debug, Clone)]
pub struct VerticalGrid {
    depth: f64,
    /// Stretch length `ℓ`; `None` for the affine map.
    stretch: Option<f64>,
    nodes: Vec<f64>,
    d1: Array2<f64>,
    d2: Array2<f64>,
    weights: Vec<f64>,
}

impl VerticalGrid {
    /// Affine map of the reference nodes onto `[−Z_b, 0]`.
    pub fn new(depth: f64, m: usize) -> Result<Self> {
        Self::build(depth, m, None)
    }

    /// Logarithmic stretch with length `ℓ`: layers of thickness `~ℓ` below
    /// the surface get as many nodes as the deep part. Pick `ℓ` near the
    /// inverse of the largest horizontal wavenumber.
    pub fn stretched(depth: f64, m: usize, ell: f64) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::InvalidParameter(format!("stretch length must be positive, got {ell}")));
        }
        Self::build(depth, m, Some(ell))
    }

    fn build(depth: f64, m: usize, stretch: Option<f64>) -> Result<Self> {
        if !(depth.is_finite() && depth > 0.0) {
            return Err(Error::InvalidParameter(format!("strip depth must be positive, got {depth}")));
        }
        if m < 4 {
            return Err(Error::InvalidParameter(format!("need at least 4 vertical intervals, got {m}")));
        }
        // Reference nodes s_i = −cos(πi/M) on [−1, 1], increasing.
        let s: Vec<f64> = (0..=m).map(|i| -(PI * i as f64 / m as f64).cos()).collect();
        let c: Vec<f64> = (0..=m)
            .map(|i| {
                let base = if i == 0 || i == m { 2.0 } else { 1.0 };
                if i % 2 == 0 {
                    base
                } else {
                    -base
                }
            })
            .collect();
        let mut d = Array2::<f64>::zeros((m + 1, m + 1));
        for i in 0..=m {
            for j in 0..=m {
                if i != j {
                    d[[i, j]] = (c[i] / c[j]) / (s[i] - s[j]);
                }
            }
        }
        for i in 0..=m {
            let row: f64 = (0..=m).filter(|&j| j != i).map(|j| d[[i, j]]).sum();
            d[[i, i]] = -row;
        }
        // z(s) and z'(s) at the reference nodes.
        let (mut nodes, jac): (Vec<f64>, Vec<f64>) = match stretch {
            None => s.iter().map(|&si| (depth * (si - 1.0) / 2.0, depth / 2.0)).unzip(),
            Some(ell) => {
                let tau_max = (depth / ell).ln_1p();
                s.iter()
                    .map(|&si| {
                        let tau = tau_max * (1.0 - si) / 2.0;
                        (-ell * tau.exp_m1(), 0.5 * ell * tau_max * tau.exp())
                    })
                    .unzip()
            }
        };
        nodes[0] = -depth;
        nodes[m] = 0.0;
        let mut d1 = d;
        for (i, mut row) in d1.rows_mut().into_iter().enumerate() {
            row.mapv_inplace(|v| v / jac[i]);
        }
        let d2 = d1.dot(&d1);
        let weights = clenshaw_curtis(m).into_iter().zip(&jac).map(|(w, j)| w * j).collect();
        Ok(Self { depth, stretch, nodes, d1, d2, weights })
    }

    pub fn stretch(&self) -> Option<f64> {
        self.stretch
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    /// Number of intervals `M`; there are `M + 1` nodes.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn levels(&self) -> usize {
        self.nodes.len()
    }

    pub fn top(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn d1(&self) -> &Array2<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &Array2<f64> {
        &self.d2
    }

    /// Clenshaw–Curtis quadrature weights on `[−Z_b, 0]`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn clenshaw_curtis(n: usize) -> Vec<f64> {
    // Weights for the nodes cos(πi/n); symmetric, so ordering is irrelevant.
    let mut w = vec![0.0; n + 1];
    let theta: Vec<f64> = (0..=n).map(|i| PI * i as f64 / n as f64).collect();
    let inner = 1..n;
    let mut v = vec![1.0; n - 1];
    if n.is_multiple_of(2) {
        w[0] = 1.0 / ((n * n - 1) as f64);
        w[n] = w[0];
        for k in 1..n / 2 {
            for (vi, i) in v.iter_mut().zip(inner.clone()) {
                *vi -= 2.0 * (2.0 * k as f64 * theta[i]).cos() / ((4 * k * k - 1) as f64);
            }
        }
        for (vi, i) in v.iter_mut().zip(inner.clone()) {
            *vi -= (n as f64 * theta[i]).cos() / ((n * n - 1) as f64);
        }
    } else {
        w[0] = 1.0 / ((n * n) as f64);
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            for (vi, i) in v.iter_mut().zip(inner.clone()) {
                *vi -= 2.0 * (2.0 * k as f64 * theta[i]).cos() / ((4 * k * k - 1) as f64);
            }
        }
    }
    for (vi, i) in v.iter().zip(inner) {
        w[i] = 2.0 * vi / n as f64;
    }
    w
}
