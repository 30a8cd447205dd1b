//! Dyadic cutoff profiles.
//!
//! `zeta` is one on `|θ| ≤ 1.1`, zero on `|θ| ≥ 1.9`, with a quintic
//! blend in between whose first two derivatives vanish at both ends.
//! Everything else is built from it: `ζ_k(θ) = ζ(2^{-k}θ)`, `φ_0 = ζ`,
//! `φ_k = ζ_k − ζ_{k−1}` for `k ≥ 1`.

pub const PLATEAU: f64 = 1.1;
pub const SUPPORT: f64 = 1.9;

/// Smooth monotone step from 1 at `t ≤ 0` to 0 at `t ≥ 1`.
fn blend_down(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CutoffFamily;

impl CutoffFamily {
    pub fn zeta(theta: f64) -> f64 {
        blend_down((theta.abs() - PLATEAU) / (SUPPORT - PLATEAU))
    }

    /// `ζ_k(θ)`, defined for every integer `k`.
    pub fn zeta_k(k: i32, theta: f64) -> f64 {
        Self::zeta(theta * 2f64.powi(-k))
    }

    /// `φ_k(θ)`; zero for negative `k`.
    pub fn phi_k(k: i32, theta: f64) -> f64 {
        match k {
            k if k < 0 => 0.0,
            0 => Self::zeta(theta),
            k => Self::zeta_k(k, theta) - Self::zeta_k(k - 1, theta),
        }
    }

    /// Radial cutoff removing `|ξ| ≤ 1` and passing `|ξ| ≥ 2`.
    pub fn psi_cut(xi: f64) -> f64 {
        1.0 - blend_down(xi.abs() - 1.0)
    }

    /// Admissible cutoff `χ(θ, η) = Σ_k ζ_{k−3}(θ) φ_k(η)` over `k ≥ 0`.
    pub fn chi(theta: f64, eta: f64) -> f64 {
        let eta = eta.abs();
        // φ_k(η) ≠ 0 only for the one or two k with 1.1·2^{k−1} < η < 1.9·2^k.
        let centre = if eta <= PLATEAU { 0 } else { (eta / PLATEAU).log2().floor() as i32 };
        let mut acc = 0.0;
        for k in (centre - 1).max(0)..=centre + 1 {
            let p = Self::phi_k(k, eta);
            if p != 0.0 {
                acc += Self::zeta_k(k - 3, theta) * p;
            }
        }
        acc
    }
}
