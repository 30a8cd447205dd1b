//! Paraproducts, Bony decomposition and paradifferential quantization.
//!
//! Two quantizations live here and are kept apart on purpose:
//!
//! - [`paraproduct`] is `T_a u = Σ_k S_{k−3}a·Δ_k u` for a function `a(x)`,
//!   with no low-frequency cutoff on `u`.
//! - [`paradiff_apply`] quantizes a symbol `a(x, ξ)` through the admissible
//!   cutoff `χ` and the radial cutoff `ψ_cut`, which removes `|ξ| ≤ 1`.
//!
//! [`bony_decompose`] uses the exact index partition of block pairs, so that
//! its three parts add up to the pointwise product to round-off. Its low
//! part `T_a u` therefore starts at `k = 3` and differs from
//! [`paraproduct`] on the first three blocks.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fit;
use crate::spectral::{fft, lp_lowpass, norm, sobolev_norm, CutoffFamily, DyadicBlocks, Grid, RealField, Vec2};

/// A symbol `a(x, ξ)` sampled at grid nodes, one frequency column at a time.
pub trait Symbol {
    fn grid(&self) -> &Grid;

    fn order(&self) -> f64;

    /// Writes `a(x_j, ξ)` for every node `x_j`, where `ξ` is the wavevector
    /// of flat index `xi_idx`.
    fn column(&self, xi_idx: usize, out: &mut [Complex64]);
}

/// Dense table of symbol samples, stored frequency-major.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    grid: Grid,
    order: f64,
    samples: Vec<Complex64>,
}

impl SymbolTable {
    pub fn from_fn(grid: Grid, order: f64, f: impl Fn(usize, Vec2) -> Complex64) -> Result<Self> {
        let len = grid.len();
        let mut samples = Vec::with_capacity(len * len);
        for xi_idx in 0..len {
            let xi = grid.wavevector(xi_idx);
            for node in 0..len {
                let v = f(node, xi);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::SymbolDomain(format!(
                        "non-finite sample at node {node}, wavevector {xi:?}"
                    )));
                }
                samples.push(v);
            }
        }
        Ok(Self { grid, order, samples })
    }

    /// The order-zero symbol `a(x)` of a function.
    pub fn from_function(a: &RealField) -> Self {
        let len = a.grid().len();
        let mut samples = Vec::with_capacity(len * len);
        for _ in 0..len {
            samples.extend(a.values().iter().map(|&v| Complex64::new(v, 0.0)));
        }
        Self { grid: *a.grid(), order: 0.0, samples }
    }

    /// An `x`-independent Fourier multiplier `m(ξ)`.
    pub fn from_multiplier(grid: Grid, order: f64, m: impl Fn(Vec2) -> Complex64) -> Result<Self> {
        Self::from_fn(grid, order, |_, xi| m(xi))
    }

    pub fn get(&self, node: usize, xi_idx: usize) -> Complex64 {
        self.samples[xi_idx * self.grid.len() + node]
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn map(&self, order: f64, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { grid: self.grid, order, samples: self.samples.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise product `a·b`, of order `m + m'`.
    pub fn product(&self, other: &SymbolTable) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("symbol grids differ".into()));
        }
        Ok(Self {
            grid: self.grid,
            order: self.order + other.order,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect(),
        })
    }
}

impl Symbol for SymbolTable {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn order(&self) -> f64 {
        self.order
    }

    fn column(&self, xi_idx: usize, out: &mut [Complex64]) {
        let len = self.grid.len();
        out.copy_from_slice(&self.samples[xi_idx * len..(xi_idx + 1) * len]);
    }
}

/// Symbol evaluated on demand; avoids the `N²` table on larger grids.
pub struct FnSymbol<F> {
    grid: Grid,
    order: f64,
    f: F,
}

impl<F: Fn(usize, Vec2) -> Complex64> FnSymbol<F> {
    pub fn new(grid: Grid, order: f64, f: F) -> Self {
        Self { grid, order, f }
    }
}

impl<F: Fn(usize, Vec2) -> Complex64> Symbol for FnSymbol<F> {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn order(&self) -> f64 {
        self.order
    }

    fn column(&self, xi_idx: usize, out: &mut [Complex64]) {
        let xi = self.grid.wavevector(xi_idx);
        for (node, o) in out.iter_mut().enumerate() {
            *o = (self.f)(node, xi);
        }
    }
}

struct ProductSymbol<'a> {
    a: &'a dyn Symbol,
    b: &'a dyn Symbol,
}

impl Symbol for ProductSymbol<'_> {
    fn grid(&self) -> &Grid {
        self.a.grid()
    }

    fn order(&self) -> f64 {
        self.a.order() + self.b.order()
    }

    fn column(&self, xi_idx: usize, out: &mut [Complex64]) {
        let mut tmp = vec![Complex64::new(0.0, 0.0); out.len()];
        self.a.column(xi_idx, out);
        self.b.column(xi_idx, &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o *= t;
        }
    }
}

/// The admissible pair `(χ, ψ_cut)` used by [`paradiff_apply`].
#[derive(Debug, Clone, Copy, Default)]
pub struct AdmissibleCutoff;

impl AdmissibleCutoff {
    pub fn chi(theta: f64, eta: f64) -> f64 {
        CutoffFamily::chi(theta, eta)
    }

    pub fn psi_cut(eta: f64) -> f64 {
        CutoffFamily::psi_cut(eta)
    }
}

/// `T_a u = Σ_{k ≥ 0} S_{k−3}a · Δ_k u`, with `S_j` the `ζ_j` low-pass for every
/// integer `j` (so constants pass every filter and `T_1 u = u`).
pub fn paraproduct(a: &RealField, u: &RealField) -> Result<RealField> {
    a.ensure_same_grid(u)?;
    let blocks = DyadicBlocks::decompose(u);
    let mut acc = RealField::zeros(*u.grid());
    for (k, block) in blocks.blocks.iter().enumerate() {
        let low = lp_lowpass(a, k as i32 - 3);
        acc = acc.add(&low.mul(block));
    }
    Ok(acc)
}

/// The three parts of `a·u = T_a u + T_u a + R(u, a)`.
#[derive(Debug, Clone)]
pub struct BonyParts {
    pub t_a_u: RealField,
    pub t_u_a: RealField,
    pub remainder: RealField,
}

impl BonyParts {
    pub fn sum(&self) -> RealField {
        self.t_a_u.add(&self.t_u_a).add(&self.remainder)
    }
}

/// Bony decomposition by the partition of block pairs `(j, k)` of `(a, u)`:
/// `k ≥ j + 3` goes to `T_a u`, `j ≥ k + 3` to `T_u a`, `|j − k| ≤ 2` to `R`.
pub fn bony_decompose(a: &RealField, u: &RealField) -> Result<BonyParts> {
    a.ensure_same_grid(u)?;
    let grid = *a.grid();
    let ab = DyadicBlocks::decompose(a);
    let ub = DyadicBlocks::decompose(u);
    let top = ab.k_top();
    let mut t_a_u = RealField::zeros(grid);
    let mut t_u_a = RealField::zeros(grid);
    let mut remainder = RealField::zeros(grid);
    for k in 0..=top {
        let a_low = ab.partial_sum(k - 3);
        let u_low = ub.partial_sum(k - 3);
        let (ak, uk) = (&ab.blocks[k as usize], &ub.blocks[k as usize]);
        t_a_u = t_a_u.add(&a_low.mul(uk));
        t_u_a = t_u_a.add(&u_low.mul(ak));
        for j in (k - 2).max(0)..=(k + 2).min(top) {
            remainder = remainder.add(&ab.blocks[j as usize].mul(uk));
        }
    }
    Ok(BonyParts { t_a_u, t_u_a, remainder })
}

/// Paradifferential quantization of a symbol:
/// `(T_a u)^(ξ) = Σ_η χ(ξ−η, η) â(ξ−η, η) ψ_cut(η) û(η)`.
///
/// Each input frequency `η` costs one transform of the column `x ↦ a(x, η)`.
/// Output frequencies that fall outside the grid range are dropped rather
/// than aliased. The result is the real part of the inverse transform, which
/// is exact for Hermitian symbols `a(x, −ξ) = conj a(x, ξ)`.
pub fn paradiff_apply(a: &dyn Symbol, u: &RealField) -> Result<RealField> {
    let grid = *u.grid();
    if *a.grid() != grid {
        return Err(Error::SymbolDomain(format!(
            "symbol sampled on {:?}, argument on {:?}",
            a.grid(),
            grid
        )));
    }
    let len = grid.len();
    let spec = u.spectrum();
    let norms = grid.xi_norms();
    let modes: Vec<[i64; 2]> = (0..len).map(|i| grid.modes(i)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    let mut column = vec![Complex64::new(0.0, 0.0); len];
    for eta_idx in 0..len {
        let weight = spec.coeffs()[eta_idx] * AdmissibleCutoff::psi_cut(norms[eta_idx]);
        if weight.norm_sqr() == 0.0 {
            continue;
        }
        a.column(eta_idx, &mut column);
        fft::forward_in_place(&grid, &mut column);
        let eta_modes = modes[eta_idx];
        for theta_idx in 0..len {
            let chi = AdmissibleCutoff::chi(norms[theta_idx], norms[eta_idx]);
            if chi == 0.0 {
                continue;
            }
            let tm = modes[theta_idx];
            if let Some(xi_idx) = grid.index_of_modes([tm[0] + eta_modes[0], tm[1] + eta_modes[1]]) {
                out[xi_idx] += column[theta_idx] * weight * chi;
            }
        }
    }
    Ok(RealField::new(grid, fft::inverse_real(&grid, &out)).expect("grid length"))
}

/// Per-band measurements of `T_a T_b − T_{ab}`.
#[derive(Debug, Clone)]
pub struct CompositionDiagnostic {
    pub bands: Vec<i32>,
    /// `‖(T_aT_b − T_{ab})u_k‖_{H^{μ−m−m'+1/2}} / ‖u_k‖_{H^μ}`.
    pub defect_ratio: Vec<f64>,
    /// `‖T_aT_b u_k‖_{H^{μ−m−m'}} / ‖u_k‖_{H^μ}`.
    pub composed_ratio: Vec<f64>,
    /// Least-squares slope of `log2(defect_ratio)` against the band index.
    pub defect_slope: f64,
}

/// Sweeps the resolved dyadic blocks `u_k = Δ_k u` for `k ≥ 1` and measures
/// the composition defect on each.
pub fn symbol_compose_check(
    a: &dyn Symbol,
    b: &dyn Symbol,
    u: &RealField,
    mu: f64,
) -> Result<CompositionDiagnostic> {
    let ab = ProductSymbol { a, b };
    let m_sum = a.order() + b.order();
    let blocks = DyadicBlocks::decompose(u);
    let mut out = CompositionDiagnostic {
        bands: Vec::new(),
        defect_ratio: Vec::new(),
        composed_ratio: Vec::new(),
        defect_slope: f64::NAN,
    };
    for k in 1..=blocks.k_max {
        let uk = &blocks.blocks[k as usize];
        let base = sobolev_norm(uk, mu);
        if base == 0.0 {
            continue;
        }
        let composed = paradiff_apply(a, &paradiff_apply(b, uk)?)?;
        let direct = paradiff_apply(&ab, uk)?;
        out.bands.push(k);
        out.defect_ratio.push(sobolev_norm(&composed.sub(&direct), mu - m_sum + 0.5) / base);
        out.composed_ratio.push(sobolev_norm(&composed, mu - m_sum) / base);
    }
    if out.bands.len() >= 2 {
        let xs: Vec<f64> = out.bands.iter().map(|&k| k as f64).collect();
        out.defect_slope = fit::log2_slope(&xs, &out.defect_ratio);
    }
    Ok(out)
}

/// Dense matrix of a linear grid operator, built column by column.
pub fn operator_matrix(grid: &Grid, op: impl Fn(&RealField) -> RealField) -> Array2<f64> {
    let len = grid.len();
    let mut m = Array2::zeros((len, len));
    for j in 0..len {
        let mut e = RealField::zeros(*grid);
        e.values_mut()[j] = 1.0;
        let col = op(&e);
        for (i, v) in col.values().iter().enumerate() {
            m[[i, j]] = *v;
        }
    }
    m
}

/// `‖T_a − T_a^T‖_F / ‖T_a‖_F` for the paraproduct matrix of `a`.
pub fn adjoint_defect(a: &RealField) -> f64 {
    let m = operator_matrix(a.grid(), |e| paraproduct(a, e).expect("same grid"));
    let asym = &m - &m.t();
    let fro = |x: &Array2<f64>| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    fro(&asym) / fro(&m)
}

/// `ψ_cut(D)` as a field operator; the diagonal of every quantization.
pub fn psi_cut_multiplier(u: &RealField) -> RealField {
    u.filter(|xi| CutoffFamily::psi_cut(norm(xi)))
}
