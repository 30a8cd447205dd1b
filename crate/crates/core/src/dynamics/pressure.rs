use ndarray::Array2;

use super::SurfaceState;
use crate::dno::{DnoContext, Traces};
use crate::error::Result;
use crate::spectral::{dot_fields, RealField};
use crate::strip::{cartesian_gradient, pair_index, pushforward_derivatives, CartesianDerivatives, StripField};

/// Pressure and the quantities derived from it at the surface.
#[derive(Debug, Clone)]
pub struct PressureBundle {
    /// Hydrostatic deviation `Q = P + gy` in flattened coordinates.
    pub q: StripField,
    /// `P` sampled at the strip nodes.
    pub p: Array2<f64>,
    /// Cartesian derivatives of the velocity potential.
    pub phi: CartesianDerivatives,
    /// Cartesian derivatives of `Q`; those of `P` differ only in `∂_y` by `g`.
    pub q_derivs: CartesianDerivatives,
    pub traces: Traces,
    /// Taylor coefficient `a = −∂_yP` at `y = η`.
    pub a: RealField,
    /// `−∂P/∂n = a√(1+|∇η|²)`.
    pub dpdn: RealField,
}

impl PressureBundle {
    /// Cartesian gradient of `P`, horizontal components first.
    pub fn grad_p(&self, g: f64) -> Vec<Array2<f64>> {
        let mut out = self.q_derivs.grad.clone();
        out.push(self.q_derivs.dy.mapv(|v| v - g));
        out
    }
}

/// Full `(d+1)×(d+1)` Hessian, vertical index last.
fn hessian(c: &CartesianDerivatives) -> Vec<Vec<Array2<f64>>> {
    let dim = c.grad.len();
    let n = dim + 1;
    let mut h = vec![vec![c.hess_yy.clone(); n]; n];
    for i in 0..dim {
        for j in 0..dim {
            h[i][j] = c.hess_xx[pair_index(dim, i, j)].clone();
        }
        h[i][dim] = c.hess_xy[i].clone();
        h[dim][i] = c.hess_xy[i].clone();
    }
    h
}

fn full_gradient(c: &CartesianDerivatives) -> Vec<Array2<f64>> {
    let mut g = c.grad.clone();
    g.push(c.dy.clone());
    g
}

/// Solves `Δ_{x,y}Q = −|∇²φ|²` with `Q = gη` on the surface.
pub fn pressure_solve(state: &SurfaceState, ctx: &DnoContext) -> Result<PressureBundle> {
    let solver = ctx.solver();
    let map = solver.map();
    let v = ctx.extend(&state.psi)?;
    let g_psi = ctx.dn_from_extension(&state.psi, &v);
    let traces = ctx.traces_from(&state.psi, g_psi);
    let phi = pushforward_derivatives(&v, map);
    let source = phi.hessian_norm_sq().mapv(|x| -x);
    let q = solver.solve_dirichlet(&state.eta.scale(state.g), Some(&source))?;
    let q_derivs = pushforward_derivatives(&q, map);
    let p = &q_derivs.phi - &map.rho.mapv(|y| state.g * y);
    let a = map.surface(&q_derivs.dy).map(|qy| state.g - qy);
    let g2 = dot_fields(ctx.grad_eta(), ctx.grad_eta());
    let dpdn = a.zip_map(&g2, |a, g| a * (1.0 + g).sqrt());
    Ok(PressureBundle { q, p, phi, q_derivs, traces, a, dpdn })
}

/// Assembly of the cubic term `Σ φ_ij φ_ik φ_jk` in the source of `Ṗ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceAssembly {
    /// Pointwise products of stored second derivatives.
    #[default]
    Direct,
    /// `Σ_i ∂_i(Σ_jk φ_j φ_ik φ_jk) − ½∇·(|∇²φ|²∇φ)`, differentiated numerically.
    Divergence,
}

#[derive(Debug, Clone)]
pub struct MaterialRate {
    /// `Ṗ = (∂_t + ∇φ·∇)P` in flattened coordinates.
    pub pdot: StripField,
    /// `(∂_t + V·∇)a` on the surface.
    pub da: RealField,
}

/// Solves `ΔṖ = 4∇²φ:∇²P + 2Σφ_ijφ_ikφ_jk` with `Ṗ = 0` on the surface and
/// returns `(∂_t + V·∇)a = −∂_yṖ + ∂_y∇φ·∇P` there.
pub fn material_pressure_rate(
    state: &SurfaceState,
    ctx: &DnoContext,
    bundle: &PressureBundle,
    assembly: SourceAssembly,
) -> Result<MaterialRate> {
    let solver = ctx.solver();
    let map = solver.map();
    let hp = hessian(&bundle.phi);
    let hq = hessian(&bundle.q_derivs);
    let n = hp.len();
    let shape = bundle.p.dim();
    let mut source = Array2::<f64>::zeros(shape);
    for i in 0..n {
        for j in 0..n {
            source += &(&hp[i][j] * &hq[i][j] * 4.0);
        }
    }
    match assembly {
        SourceAssembly::Direct => {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        source += &(&hp[i][j] * &hp[i][k] * &hp[j][k] * 2.0);
                    }
                }
            }
        }
        SourceAssembly::Divergence => {
            let grad = full_gradient(&bundle.phi);
            let hn = bundle.phi.hessian_norm_sq();
            for i in 0..n {
                let mut w = Array2::<f64>::zeros(shape);
                for j in 0..n {
                    for k in 0..n {
                        w += &(&grad[j] * &hp[i][k] * &hp[j][k]);
                    }
                }
                w -= &(&hn * &grad[i] * 0.5);
                let (gx, gy) = cartesian_gradient(&w, map);
                let di = if i + 1 == n { gy } else { gx[i].clone() };
                source += &(di * 2.0);
            }
        }
    }
    let zero = RealField::zeros(*state.grid());
    let pdot = solver.solve_dirichlet(&zero, Some(&source))?;
    let pdot_d = pushforward_derivatives(&pdot, map);
    let grad_p = bundle.grad_p(state.g);
    let mut coupling = Array2::<f64>::zeros(shape);
    for (k, gp) in grad_p.iter().enumerate() {
        coupling += &(&hp[n - 1][k] * gp);
    }
    let da = map.surface(&coupling).sub(&map.surface(&pdot_d.dy));
    Ok(MaterialRate { pdot, da })
}
