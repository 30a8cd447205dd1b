use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use ndarray::{Array2, Axis};
use num_complex::Complex64;

use super::field::StripField;
use super::krylov::{gmres, GmresSettings};
use super::levels;
use super::map::{EllipticCoefficients, FlattenMap};
use super::vertical::VerticalGrid;
use crate::error::{Error, Result};
use crate::spectral::{norm, Grid, RealField};

/// Default number of vertical intervals.
pub const DEFAULT_LEVELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub gmres: GmresSettings,
    /// Largest relative residual accepted when the iteration stalls.
    pub accept: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { gmres: GmresSettings::default(), accept: 1e-10 }
    }
}

impl SolverSettings {
    pub fn with_tol(tol: f64) -> Self {
        let mut s = Self::default();
        s.gmres.tol = tol;
        s.accept = s.accept.max(tol);
        s
    }
}

/// Depth `10/k_min`, stretched with `ℓ = 8/ξ_max` so that the surface
/// layer of the highest modes stays resolved.
pub fn default_vertical(grid: &Grid, levels: usize) -> Result<Arc<VerticalGrid>> {
    Ok(Arc::new(VerticalGrid::stretched(10.0 / grid.k_min(), levels, 8.0 / grid.xi_max())?))
}

/// Everything about the strip discretization that does not depend on the
/// surface: vertical grid and the flat-surface preconditioner. Built once
/// and shared between solves.
#[derive(Debug)]
pub struct StripDiscretization {
    grid: Grid,
    vertical: Arc<VerticalGrid>,
    settings: SolverSettings,
    inverses: Vec<Array2<f64>>,
    slot: Vec<usize>,
    conj: Vec<usize>,
}

impl StripDiscretization {
    pub fn new(grid: Grid, vertical: Arc<VerticalGrid>, settings: SolverSettings) -> Result<Self> {
        let levels = vertical.levels();
        let m = vertical.intervals();
        let mut keys: HashMap<i64, usize> = HashMap::new();
        let mut inverses = Vec::new();
        let mut slots = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let [m1, m2] = grid.modes(idx);
            let key = m1 * m1 + m2 * m2;
            let slot = match keys.get(&key) {
                Some(&s) => s,
                None => {
                    let k = norm(grid.wavevector(idx));
                    let mut a = DMatrix::<f64>::zeros(levels, levels);
                    for j in 0..levels {
                        a[(0, j)] = vertical.d1()[[0, j]];
                    }
                    a[(0, 0)] -= k;
                    for i in 1..m {
                        for j in 0..levels {
                            a[(i, j)] = vertical.d2()[[i, j]];
                        }
                        a[(i, i)] -= k * k;
                    }
                    a[(m, m)] = 1.0;
                    let inv = a.try_inverse().ok_or(Error::IllConditioned {
                        residual: f64::INFINITY,
                        iterations: 0,
                        condition: f64::INFINITY,
                    })?;
                    inverses.push(Array2::from_shape_fn((levels, levels), |(i, j)| inv[(i, j)]));
                    keys.insert(key, inverses.len() - 1);
                    inverses.len() - 1
                }
            };
            slots.push(slot);
        }
        let conj = (0..grid.len()).map(|m| grid.conjugate_index(m)).collect();
        Ok(Self { grid, vertical, settings, inverses, slot: slots, conj })
    }

    /// Strip of depth `10/k_min` with [`DEFAULT_LEVELS`] intervals.
    pub fn with_defaults(grid: Grid) -> Result<Self> {
        Self::new(grid, default_vertical(&grid, DEFAULT_LEVELS)?, SolverSettings::default())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn vertical(&self) -> &Arc<VerticalGrid> {
        &self.vertical
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    /// Same discretization with different solver tolerances.
    pub fn with_settings(&self, settings: SolverSettings) -> Self {
        Self {
            grid: self.grid,
            vertical: self.vertical.clone(),
            settings,
            inverses: self.inverses.clone(),
            slot: self.slot.clone(),
            conj: self.conj.clone(),
        }
    }

    /// Solves the flat-surface problem mode by mode.
    fn precondition(&self, r: &Array2<f64>) -> Array2<f64> {
        let r_hat = levels::forward(&self.grid, r);
        let (rows, len) = r_hat.dim();
        let src = r_hat.as_slice().expect("standard layout");
        let mut out = vec![Complex64::new(0.0, 0.0); rows * len];
        let mut re = vec![0.0; rows];
        let mut im = vec![0.0; rows];
        for m in 0..len {
            let mc = self.conj[m];
            if mc < m {
                continue;
            }
            for l in 0..rows {
                let c = src[l * len + m];
                re[l] = c.re;
                im[l] = c.im;
            }
            let inv = self.inverses[self.slot[m]].as_slice().expect("standard layout");
            for (l, row) in inv.chunks_exact(rows).enumerate() {
                let mut sr = 0.0;
                let mut si = 0.0;
                for ((a, x), y) in row.iter().zip(&re).zip(&im) {
                    sr += a * x;
                    si += a * y;
                }
                out[l * len + m] = Complex64::new(sr, si);
                out[l * len + mc] = Complex64::new(sr, -si);
            }
        }
        levels::inverse(&self.grid, Array2::from_shape_vec((rows, len), out).expect("shape"))
    }
}

/// Flattening map, coefficients and discretization for one surface.
#[derive(Debug, Clone)]
pub struct StripSolver {
    disc: Arc<StripDiscretization>,
    map: FlattenMap,
    coeffs: EllipticCoefficients,
}

impl StripSolver {
    pub fn new(disc: Arc<StripDiscretization>, eta: &RealField, delta_hint: f64) -> Result<Self> {
        if eta.grid() != disc.grid() {
            return Err(Error::GridMismatch("surface and strip discretization differ".into()));
        }
        let map = FlattenMap::build(eta, disc.vertical.clone(), delta_hint)?;
        let coeffs = EllipticCoefficients::from_map(&map);
        if !coeffs.is_finite() {
            return Err(Error::SurfaceTooRough { min_delta: map.delta(), min_rho_z: map.min_rho_z() });
        }
        Ok(Self { disc, map, coeffs })
    }

    pub fn discretization(&self) -> &Arc<StripDiscretization> {
        &self.disc
    }

    pub fn map(&self) -> &FlattenMap {
        &self.map
    }

    pub fn coefficients(&self) -> &EllipticCoefficients {
        &self.coeffs
    }

    /// Applies the discrete operator with the boundary rows: transparent
    /// condition at the bottom, identity at the top.
    pub fn apply_operator(&self, w: &Array2<f64>) -> Array2<f64> {
        let grid = &self.disc.grid;
        let vg = &self.disc.vertical;
        let c = &self.coeffs;
        let wz = vg.d1().dot(w);
        let mut out = vg.d2().dot(w);
        let w_hat = levels::forward(grid, w);
        let lap = levels::apply(grid, &w_hat, |_, _, xi| Complex64::new(-xi[0] * xi[0] - xi[1] * xi[1], 0.0));
        out += &(&c.alpha * &lap);
        out -= &(&c.gamma * &wz);
        let wz_hat = levels::forward(grid, &wz);
        for (a, beta) in c.beta.iter().enumerate() {
            let d = levels::apply(grid, &wz_hat, |_, m, xi| levels::ik(grid, m, xi, a));
            out += &(beta * &d);
        }
        let bottom = RealField::new(*grid, w.row(0).to_vec()).expect("row length");
        let abs_d = bottom.filter(norm);
        for j in 0..grid.len() {
            out[[0, j]] = wz[[0, j]] - abs_d.values()[j];
        }
        let top = vg.top();
        out.row_mut(top).assign(&w.row(top));
        out
    }

    /// Solves `∂²_z v + αΔv + β·∇∂_z v − γ∂_z v = α·g` with `v = f` at the
    /// surface and the transparent condition at the bottom. `source` is the
    /// physical `g`; `None` means zero.
    pub fn solve_dirichlet(&self, f: &RealField, source: Option<&Array2<f64>>) -> Result<StripField> {
        let grid = *self.disc.grid();
        f.ensure_same_grid(&RealField::zeros(grid))?;
        if !f.is_finite() {
            return Err(Error::InvalidParameter("surface datum is not finite".into()));
        }
        let vg = self.disc.vertical.clone();
        let shape = (vg.levels(), grid.len());
        if let Some(g) = source {
            if g.dim() != shape {
                return Err(Error::GridMismatch(format!("source shape {:?}, expected {:?}", g.dim(), shape)));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("strip source is not finite".into()));
            }
        }
        let c = &self.coeffs;
        let f_hat = f.spectrum();
        let z = vg.nodes();
        let xi_norm = grid.xi_norms();
        let h_hat = Array2::from_shape_fn(shape, |(i, m)| f_hat.coeffs()[m] * (z[i] * xi_norm[m]).exp());
        let lap_h = levels::apply(&grid, &h_hat, |_, _, xi| Complex64::new(-xi[0] * xi[0] - xi[1] * xi[1], 0.0));
        let h_z = levels::apply(&grid, &h_hat, |_, _, xi| Complex64::new(norm(xi), 0.0));
        let mut rhs = -((&c.alpha - 1.0) * &lap_h) + &(&c.gamma * &h_z);
        for (a, beta) in c.beta.iter().enumerate() {
            let d = levels::apply(&grid, &h_hat, |_, m, xi| levels::ik(&grid, m, xi, a) * norm(xi));
            rhs -= &(beta * &d);
        }
        if let Some(g) = source {
            rhs += &(&c.alpha * g);
        }
        rhs.row_mut(0).fill(0.0);
        rhs.row_mut(vg.top()).fill(0.0);

        let settings = self.disc.settings;
        let to_array = |v: &[f64]| Array2::from_shape_vec(shape, v.to_vec()).expect("shape");
        let outcome = gmres(
            |v| self.apply_operator(&to_array(v)).into_raw_vec_and_offset().0,
            |v| self.disc.precondition(&to_array(v)).into_raw_vec_and_offset().0,
            rhs.as_slice().expect("standard layout"),
            settings.gmres,
        );
        let ok = outcome.residual <= settings.accept && outcome.x.iter().all(|v| v.is_finite());
        if !ok {
            return Err(Error::IllConditioned {
                residual: outcome.residual,
                iterations: outcome.iterations,
                condition: outcome.condition,
            });
        }
        let w = to_array(&outcome.x);
        Ok(StripField::split(grid, vg, f_hat, w))
    }

    /// The symbols `a`, `A` of the factorization at level `level`.
    pub fn decoupling_symbols(&self, level: usize) -> Result<DecouplingSymbols> {
        DecouplingSymbols::new(&self.disc.grid, &self.coeffs, level)
    }
}

/// Free-function form of [`StripSolver::solve_dirichlet`].
pub fn solve_dirichlet(solver: &StripSolver, f: &RealField, source: Option<&Array2<f64>>) -> Result<StripField> {
    solver.solve_dirichlet(f, source)
}

/// `a = ½(−iβ·ξ − √(4α|ξ|² − (β·ξ)²))` and its partner `A` (plus sign),
/// evaluated lazily from the coefficients at one level.
#[derive(Debug, Clone)]
pub struct DecouplingSymbols {
    grid: Grid,
    alpha: Vec<f64>,
    beta: Vec<[f64; 2]>,
    c2: f64,
}

impl DecouplingSymbols {
    pub fn new(grid: &Grid, coeffs: &EllipticCoefficients, level: usize) -> Result<Self> {
        let alpha = coeffs.alpha.index_axis(Axis(0), level).to_vec();
        let beta: Vec<[f64; 2]> = (0..grid.len())
            .map(|j| {
                let mut b = [0.0; 2];
                for (a, arr) in coeffs.beta.iter().enumerate() {
                    b[a] = arr[[level, j]];
                }
                b
            })
            .collect();
        Self::from_parts(*grid, alpha, beta)
    }

    pub fn from_parts(grid: Grid, alpha: Vec<f64>, beta: Vec<[f64; 2]>) -> Result<Self> {
        // Worst direction: ξ parallel to β, giving 4α − |β|².
        let mut c2 = f64::INFINITY;
        for (node, (al, b)) in alpha.iter().zip(&beta).enumerate() {
            let bn = norm(*b);
            let r = 4.0 * al - bn * bn;
            if !(r > 0.0) {
                let dir = if bn > 0.0 { [b[0] / bn, b[1] / bn] } else { [1.0, 0.0] };
                return Err(Error::DegenerateSymbol { node, xi: dir, radicand: r });
            }
            c2 = c2.min(r);
        }
        Ok(Self { grid, alpha, beta, c2 })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Ellipticity constant `c₂` with `4α|ξ|² − (β·ξ)² ≥ c₂|ξ|²`.
    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn alpha(&self, node: usize) -> f64 {
        self.alpha[node]
    }

    pub fn radicand(&self, node: usize, xi: [f64; 2]) -> f64 {
        let bx = self.beta[node][0] * xi[0] + self.beta[node][1] * xi[1];
        4.0 * self.alpha[node] * (xi[0] * xi[0] + xi[1] * xi[1]) - bx * bx
    }

    pub fn a(&self, node: usize, xi: [f64; 2]) -> Complex64 {
        let bx = self.beta[node][0] * xi[0] + self.beta[node][1] * xi[1];
        Complex64::new(-0.5 * self.radicand(node, xi).max(0.0).sqrt(), -0.5 * bx)
    }

    pub fn big_a(&self, node: usize, xi: [f64; 2]) -> Complex64 {
        let bx = self.beta[node][0] * xi[0] + self.beta[node][1] * xi[1];
        Complex64::new(0.5 * self.radicand(node, xi).max(0.0).sqrt(), -0.5 * bx)
    }

    pub fn tables(&self) -> Result<(crate::paradiff::SymbolTable, crate::paradiff::SymbolTable)> {
        use crate::paradiff::SymbolTable;
        let a = SymbolTable::from_fn(self.grid, 1.0, |j, xi| self.a(j, xi))?;
        let big_a = SymbolTable::from_fn(self.grid, 1.0, |j, xi| self.big_a(j, xi))?;
        Ok((a, big_a))
    }
}

/// Cartesian derivatives of `φ(x, y)` recovered from `v(x, z) = φ(x, ρ(x, z))`.
#[derive(Debug, Clone)]
pub struct CartesianDerivatives {
    pub phi: Array2<f64>,
    pub grad: Vec<Array2<f64>>,
    pub dy: Array2<f64>,
    /// `∂_i∂_jφ` for pairs `i ≤ j`.
    pub hess_xx: Vec<Array2<f64>>,
    pub hess_xy: Vec<Array2<f64>>,
    pub hess_yy: Array2<f64>,
}

impl CartesianDerivatives {
    /// `|∇²_{x,y}φ|²`, the squared Frobenius norm of the full Hessian.
    pub fn hessian_norm_sq(&self) -> Array2<f64> {
        let dim = self.grad.len();
        let mut out = self.hess_yy.mapv(|v| v * v);
        for hxy in &self.hess_xy {
            out += &hxy.mapv(|v| 2.0 * v * v);
        }
        for (p, (i, j)) in levels::pairs(dim).into_iter().enumerate() {
            let w = if i == j { 1.0 } else { 2.0 };
            out += &self.hess_xx[p].mapv(|v| w * v * v);
        }
        out
    }
}

pub fn pushforward_derivatives(v: &StripField, map: &FlattenMap) -> CartesianDerivatives {
    let d = v.derivatives();
    let dim = map.grid().dim();
    let r = &map.rho_z;
    let rz = &map.rho_zz;
    let dy = &d.v_z / r;
    // q = v_zz/r − v_z r_z/r², so ∂_yφ_y = q / r.
    let q = &d.v_zz / r - &(&d.v_z * rz / &(r * r));
    let hess_yy = &q / r;
    let grad: Vec<Array2<f64>> = (0..dim).map(|i| &d.v_x[i] - &(&map.rho_x[i] * &dy)).collect();
    // F_z for F = φ_i: v_iz − r_i v_z/r − p_i q.
    let fz: Vec<Array2<f64>> = (0..dim)
        .map(|i| &d.v_xz[i] - &(&map.rho_xz[i] * &dy) - &(&map.rho_x[i] * &q))
        .collect();
    let hess_xy: Vec<Array2<f64>> = fz.iter().map(|f| f / r).collect();
    let hess_xx = levels::pairs(dim)
        .into_iter()
        .enumerate()
        .map(|(p, (i, j))| {
            // F_j − p_j F_z / r with F_j = v_ij − p_ij v_z/r − p_i(v_jz − r_j v_z/r)/r.
            let fj = &d.v_xx[p] - &(&map.rho_xx[p] * &dy)
                - &(&map.rho_x[i] * &((&d.v_xz[j] - &(&map.rho_xz[j] * &dy)) / r));
            fj - &(&map.rho_x[j] * &hess_xy[i])
        })
        .collect();
    CartesianDerivatives { phi: d.v, grad, dy, hess_xx, hess_xy, hess_yy }
}

/// `∂_yF` and `∇_xF` of a plain strip array through the chain rule.
pub fn cartesian_gradient(values: &Array2<f64>, map: &FlattenMap) -> (Vec<Array2<f64>>, Array2<f64>) {
    let field = StripField::from_values(*map.grid(), map.vertical().clone(), values.clone()).expect("strip shape");
    let c = pushforward_derivatives(&field, map);
    (c.grad, c.dy)
}

/// `∫_Ω |∇_{x,y}φ|²`, including the flat tail below the strip.
pub fn dirichlet_energy(v: &StripField, map: &FlattenMap) -> f64 {
    let c = pushforward_derivatives(v, map);
    let grid = map.grid();
    let w = map.vertical().weights();
    let mut integrand = c.dy.mapv(|x| x * x);
    for g in &c.grad {
        integrand += &g.mapv(|x| x * x);
    }
    integrand *= &map.rho_z;
    let mut total = 0.0;
    for (i, row) in integrand.rows().into_iter().enumerate() {
        total += w[i] * row.sum();
    }
    total *= grid.node_weight();
    let bottom = RealField::new(*grid, c.phi.row(0).to_vec()).expect("row length");
    total + bottom.spectrum().weighted_energy(norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solver(grid: Grid, eta: &RealField, m: usize) -> StripSolver {
        let vg = Arc::new(VerticalGrid::new(10.0 / grid.k_min(), m).unwrap());
        let disc = Arc::new(StripDiscretization::new(grid, vg, SolverSettings::default()).unwrap());
        StripSolver::new(disc, eta, 1.0).unwrap()
    }

    #[test]
    fn flat_extension_is_exact() {
        let g = Grid::unit_1d(32).unwrap();
        let s = solver(g, &RealField::zeros(g), 64);
        let f = RealField::from_fn(g, |x| (2.0 * x[0]).cos());
        let v = s.solve_dirichlet(&f, None).unwrap();
        let vals = v.values();
        for (i, &z) in s.map().vertical().nodes().iter().enumerate() {
            for j in 0..g.len() {
                let e = (2.0 * z).exp() * (2.0 * g.node(j)[0]).cos();
                assert!((vals[[i, j]] - e).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let g = Grid::unit_1d(16).unwrap();
        let eta = RealField::from_fn(g, |x| 0.1 * x[0].sin());
        let s = solver(g, &eta, 32);
        let v = s.solve_dirichlet(&RealField::zeros(g), None).unwrap();
        assert!(v.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn source_problem_matches_polynomial() {
        // Flat strip: v'' − k²v = g with v = (1 − e^{z})... use the zero mode:
        // v_zz = 1, v(0) = 0, v_z(−Z_b) = 0 → v = z²/2 + Z_b z.
        let g = Grid::unit_1d(8).unwrap();
        let s = solver(g, &RealField::zeros(g), 16);
        let vg = s.map().vertical().clone();
        let src = Array2::from_elem((vg.levels(), 8), 1.0);
        let v = s.solve_dirichlet(&RealField::zeros(g), Some(&src)).unwrap().values();
        let zb = vg.depth();
        for (i, &z) in vg.nodes().iter().enumerate() {
            assert!((v[[i, 3]] - (z * z / 2.0 + zb * z)).abs() < 1e-9);
        }
    }

    #[test]
    fn y_coordinate_pushes_forward_to_unit_gradient() {
        let g = Grid::unit_1d(32).unwrap();
        let eta = RealField::from_fn(g, |x| 0.1 * x[0].cos() + 0.03 * (2.0 * x[0]).sin());
        let s = solver(g, &eta, 32);
        let field = StripField::from_values(g, s.map().vertical().clone(), s.map().rho.clone()).unwrap();
        let c = pushforward_derivatives(&field, s.map());
        assert!(c.dy.iter().all(|v| (v - 1.0).abs() < 1e-11));
        assert!(c.grad[0].iter().all(|v| v.abs() < 1e-11));
        assert!(c.hess_yy.iter().all(|v| v.abs() < 1e-9));
        assert!(c.hess_xy[0].iter().all(|v| v.abs() < 1e-9));
        assert!(c.hess_xx[0].iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn flat_dirichlet_energy_is_k_pi() {
        let g = Grid::unit_1d(32).unwrap();
        let s = solver(g, &RealField::zeros(g), 64);
        for k in [1.0, 3.0] {
            let f = RealField::from_fn(g, |x| (k * x[0]).cos());
            let v = s.solve_dirichlet(&f, None).unwrap();
            let e = dirichlet_energy(&v, s.map());
            assert!((e - k * std::f64::consts::PI).abs() < 1e-10 * k, "{k}: {e}");
        }
    }

    #[test]
    fn decoupling_symbols_flat() {
        let g = Grid::unit_1d(16).unwrap();
        let s = solver(g, &RealField::zeros(g), 16);
        let d = s.decoupling_symbols(s.map().vertical().top()).unwrap();
        for m in 0..g.len() {
            let xi = g.wavevector(m);
            assert_eq!(d.a(3, xi), Complex64::new(-norm(xi), -0.0));
            assert_eq!(d.big_a(3, xi).re, norm(xi));
        }
    }
}
