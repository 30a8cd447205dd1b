//! Periodic grids, Fourier transforms, Littlewood–Paley blocks and norms.

pub mod cutoff;
pub mod fft;
pub mod field;
pub mod grid;

use num_complex::Complex64;

pub use cutoff::CutoffFamily;
pub use field::{divergence, dot_fields, RealField, Spectrum};
pub use grid::{dot, norm, Grid, Vec2};

use crate::error::{Error, Result};

/// How well a dyadic block is represented on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockStatus {
    /// `k < 0`: identically zero by definition.
    Empty,
    /// The whole annulus lies below the Nyquist mode.
    Resolved,
    /// Part of the annulus lies beyond the grid; the block holds the tail.
    Truncated,
    /// The block lies entirely beyond the grid.
    Beyond,
}

pub fn block_status(grid: &Grid, k: i32) -> BlockStatus {
    if k < 0 {
        BlockStatus::Empty
    } else if k <= grid.k_max() {
        BlockStatus::Resolved
    } else if k <= grid.k_top() {
        BlockStatus::Truncated
    } else {
        BlockStatus::Beyond
    }
}

/// `Δ_k u`. Negative `k` and blocks beyond the grid give the zero field;
/// see [`block_status`].
pub fn lp_block(u: &RealField, k: i32) -> RealField {
    if k < 0 {
        return RealField::zeros(*u.grid());
    }
    u.filter(|xi| CutoffFamily::phi_k(k, norm(xi)))
}

/// `S_k u` for any integer `k`.
pub fn lp_lowpass(u: &RealField, k: i32) -> RealField {
    u.filter(|xi| CutoffFamily::zeta_k(k, norm(xi)))
}

/// The Littlewood–Paley decomposition `{Δ_k u}` for `0 ≤ k ≤ k_top`.
///
/// Blocks up to `k_max` are fully resolved. The remaining ones carry the
/// partially resolved tail so that the blocks always sum back to `u`.
#[derive(Debug, Clone)]
pub struct DyadicBlocks {
    pub blocks: Vec<RealField>,
    pub k_max: i32,
}

impl DyadicBlocks {
    pub fn decompose(u: &RealField) -> Self {
        let grid = *u.grid();
        let top = grid.k_top();
        let spec = u.spectrum();
        let norms = grid.xi_norms();
        // One buffer holding every block, transformed back in a single batch.
        let nb = (top + 1) as usize;
        let len = grid.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); nb * len];
        for k in 0..nb {
            for i in 0..len {
                let w = CutoffFamily::phi_k(k as i32, norms[i]);
                if w != 0.0 {
                    buf[k * len + i] = spec.coeffs()[i] * w;
                }
            }
        }
        fft::inverse_in_place(&grid, &mut buf);
        let blocks = buf
            .chunks(len)
            .map(|c| RealField::new(grid, c.iter().map(|z| z.re).collect()).expect("block length"))
            .collect();
        Self { blocks, k_max: grid.k_max() }
    }

    pub fn k_top(&self) -> i32 {
        self.blocks.len() as i32 - 1
    }

    pub fn block(&self, k: i32) -> Option<&RealField> {
        if k < 0 {
            None
        } else {
            self.blocks.get(k as usize)
        }
    }

    pub fn status(&self, k: i32) -> BlockStatus {
        block_status(self.blocks[0].grid(), k)
    }

    /// `Σ_k Δ_k u`.
    pub fn reconstruct(&self) -> RealField {
        let mut acc = RealField::zeros(*self.blocks[0].grid());
        for b in &self.blocks {
            acc = acc.add(b);
        }
        acc
    }

    /// `Σ_{j ≤ k} Δ_j u`, the partition-consistent low part.
    pub fn partial_sum(&self, k: i32) -> RealField {
        let mut acc = RealField::zeros(*self.blocks[0].grid());
        for j in 0..=k.min(self.k_top()) {
            if j >= 0 {
                acc = acc.add(&self.blocks[j as usize]);
            }
        }
        acc
    }
}

/// Lebesgue exponent in `[1, ∞]`.
pub fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("exponent must lie in [1, inf], got {p}")))
    }
}

/// Per-cell `L^p` norm by node quadrature; `p = ∞` is the nodal maximum.
pub fn lp_norm(u: &RealField, p: f64) -> f64 {
    if p.is_infinite() {
        return u.max_abs();
    }
    let w = u.grid().node_weight();
    if p == 2.0 {
        return (w * u.values().iter().map(|v| v * v).sum::<f64>()).sqrt();
    }
    (w * u.values().iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
}

/// Parseval `H^s` norm: `(|cell| Σ (1+|ξ|²)^s |û|²)^{1/2}`.
pub fn sobolev_norm(u: &RealField, s: f64) -> f64 {
    u.spectrum()
        .weighted_energy(|xi| (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(s))
        .sqrt()
}

/// Besov norm `(Σ_k 2^{ksq} ‖Δ_k u‖_{L^p}^q)^{1/q}`; `q = ∞` takes the supremum.
pub fn besov_norm(u: &RealField, s: f64, p: f64, q: f64) -> Result<f64> {
    check_exponent(p)?;
    check_exponent(q)?;
    let blocks = DyadicBlocks::decompose(u);
    let terms = blocks
        .blocks
        .iter()
        .enumerate()
        .map(|(k, b)| 2f64.powf(k as f64 * s) * lp_norm(b, p));
    Ok(if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    })
}

/// Inverse transform of `m(ξ)·û(ξ)`, real part.
pub fn fourier_multiplier(u: &RealField, m: impl Fn(Vec2) -> Complex64) -> Result<RealField> {
    let grid = *u.grid();
    let mut spec = u.spectrum();
    for (i, c) in spec.coeffs_mut().iter_mut().enumerate() {
        let xi = grid.wavevector(i);
        let v = m(xi);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::InvalidMultiplier { xi, value: format!("{v}") });
        }
        *c *= v;
    }
    Ok(spec.to_field())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cos4() -> RealField {
        RealField::from_fn(Grid::unit_1d(64).unwrap(), |x| (4.0 * x[0]).cos())
    }

    #[test]
    fn single_mode_lives_in_block_two() {
        let u = cos4();
        for k in -2..8 {
            let b = lp_block(&u, k);
            if k == 2 {
                assert!(b.sub(&u).max_abs() < 1e-14);
            } else {
                assert!(b.max_abs() < 1e-14, "k = {k}");
            }
        }
    }

    #[test]
    fn constants_live_in_block_zero() {
        let g = Grid::unit_1d(32).unwrap();
        let u = RealField::constant(g, 2.5);
        assert!(lp_block(&u, 0).sub(&u).max_abs() < 1e-14);
        for k in 1..5 {
            assert!(lp_block(&u, k).max_abs() < 1e-14);
        }
        for k in -4..5 {
            assert!(lp_lowpass(&u, k).sub(&u).max_abs() < 1e-14);
        }
    }

    #[test]
    fn lowpass_thresholds() {
        let u = cos4();
        assert!(lp_lowpass(&u, 3).sub(&u).max_abs() < 1e-14);
        assert!(lp_lowpass(&u, 0).max_abs() < 1e-14);
    }

    #[test]
    fn block_status_flags() {
        let g = Grid::unit_1d(256).unwrap();
        assert_eq!(block_status(&g, -1), BlockStatus::Empty);
        assert_eq!(block_status(&g, 6), BlockStatus::Resolved);
        assert_eq!(block_status(&g, 7), BlockStatus::Truncated);
        assert_eq!(block_status(&g, 8), BlockStatus::Beyond);
    }

    #[test]
    fn besov_of_single_block() {
        let u = cos4();
        assert!((besov_norm(&u, 1.0, f64::INFINITY, f64::INFINITY).unwrap() - 4.0).abs() < 1e-13);
        let z = RealField::zeros(*u.grid());
        assert_eq!(besov_norm(&z, 1.5, 2.0, 1.0).unwrap(), 0.0);
        assert!(besov_norm(&u, 1.0, 0.5, 2.0).is_err());
    }

    #[test]
    fn lp_norms_of_cosine() {
        let g = Grid::unit_1d(64).unwrap();
        let u = RealField::from_fn(g, |x| x[0].cos());
        assert!((lp_norm(&u, 2.0) - PI.sqrt()).abs() < 1e-13);
        assert!((lp_norm(&u, f64::INFINITY) - 1.0).abs() < 1e-15);
        assert_eq!(lp_norm(&RealField::zeros(g), 3.0), 0.0);
        assert!((sobolev_norm(&u, 0.0) - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn multipliers() {
        let g = Grid::unit_1d(32).unwrap();
        let u = RealField::from_fn(g, |x| (2.0 * x[0]).cos());
        let id = fourier_multiplier(&u, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(id.sub(&u).max_abs() < 1e-14);
        let abs_d = fourier_multiplier(&u, |xi| Complex64::new(norm(xi), 0.0)).unwrap();
        assert!(abs_d.sub(&u.scale(2.0)).max_abs() < 1e-13);
        let (delta, z) = (0.5, -1.0);
        let decay = fourier_multiplier(&u, |xi| Complex64::new((delta * z * norm(xi)).exp(), 0.0)).unwrap();
        assert!(decay.sub(&u.scale((-1.0f64).exp())).max_abs() < 1e-14);
        let bad = fourier_multiplier(&u, |xi| Complex64::new(1.0 / norm(xi), 0.0));
        assert!(matches!(bad, Err(Error::InvalidMultiplier { .. })));
    }
}
