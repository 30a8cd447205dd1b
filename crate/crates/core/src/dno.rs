//! Dirichlet–Neumann operator, surface traces, shape derivative and the
//! principal symbol `λ`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::paradiff::{paradiff_apply, Symbol, SymbolTable};
use crate::spectral::{divergence, dot_fields, Grid, RealField, Vec2};
use crate::strip::{DecouplingSymbols, StripDiscretization, StripField, StripSolver};

/// Initial flattening parameter; halved as needed by the map builder.
pub const DEFAULT_DELTA_HINT: f64 = 1.0;

/// Surface `η` together with its strip solver and the symbols at `z = 0`.
#[derive(Debug, Clone)]
pub struct DnoContext {
    eta: RealField,
    grad_eta: Vec<RealField>,
    solver: StripSolver,
    zeta1: RealField,
    symbols: DecouplingSymbols,
}

/// Velocity traces at the surface: horizontal `V` and vertical `B`.
#[derive(Debug, Clone)]
pub struct Traces {
    pub v: Vec<RealField>,
    pub b: RealField,
    /// `G(η)ψ`, kept because callers usually need it as well.
    pub g_psi: RealField,
}

impl DnoContext {
    pub fn new(disc: Arc<StripDiscretization>, eta: &RealField, delta_hint: f64) -> Result<Self> {
        let solver = StripSolver::new(disc, eta, delta_hint)?;
        let map = solver.map();
        let grad_eta = eta.gradient();
        let rho_z0 = map.surface(&map.rho_z);
        let g2 = dot_fields(&grad_eta, &grad_eta);
        let zeta1 = g2.map(|v| 1.0 + v).zip_map(&rho_z0, |a, b| a / b);
        let top = map.vertical().top();
        let symbols = solver.decoupling_symbols(top)?;
        Ok(Self { eta: eta.clone(), grad_eta, solver, zeta1, symbols })
    }

    /// Context with the default strip for `eta`'s grid.
    pub fn with_defaults(eta: &RealField) -> Result<Self> {
        let disc = Arc::new(StripDiscretization::with_defaults(*eta.grid())?);
        Self::new(disc, eta, DEFAULT_DELTA_HINT)
    }

    pub fn grid(&self) -> &Grid {
        self.eta.grid()
    }

    pub fn eta(&self) -> &RealField {
        &self.eta
    }

    pub fn grad_eta(&self) -> &[RealField] {
        &self.grad_eta
    }

    pub fn solver(&self) -> &StripSolver {
        &self.solver
    }

    /// `ζ₁ = (1 + |∇ρ_δ|²)/∂_zρ_δ` at `z = 0`.
    pub fn zeta1(&self) -> &RealField {
        &self.zeta1
    }

    /// `ζ₂ = ∇ρ_δ` at `z = 0`, which is `∇η`.
    pub fn zeta2(&self) -> &[RealField] {
        &self.grad_eta
    }

    /// Harmonic extension of `f` into the flattened strip.
    pub fn extend(&self, f: &RealField) -> Result<StripField> {
        self.solver.solve_dirichlet(f, None)
    }

    pub fn dn_apply(&self, f: &RealField) -> Result<RealField> {
        f.ensure_same_grid(&self.eta)?;
        let v = self.extend(f)?;
        Ok(self.dn_from_extension(f, &v))
    }

    pub(crate) fn dn_from_extension(&self, f: &RealField, v: &StripField) -> RealField {
        let vz = v.dz_trace();
        let tangential = dot_fields(&self.grad_eta, &f.gradient());
        self.zeta1.mul(&vz).sub(&tangential)
    }

    pub fn traces(&self, psi: &RealField) -> Result<Traces> {
        let g_psi = self.dn_apply(psi)?;
        Ok(self.traces_from(psi, g_psi))
    }

    pub(crate) fn traces_from(&self, psi: &RealField, g_psi: RealField) -> Traces {
        let grad_psi = psi.gradient();
        let g2 = dot_fields(&self.grad_eta, &self.grad_eta);
        let b = dot_fields(&self.grad_eta, &grad_psi)
            .add(&g_psi)
            .zip_map(&g2, |num, g| num / (1.0 + g));
        let v = grad_psi
            .iter()
            .zip(&self.grad_eta)
            .map(|(gp, ge)| gp.sub(&b.mul(ge)))
            .collect();
        Traces { v, b, g_psi }
    }

    /// `d_ηG(η)ψ·h = −G(η)(hB) − div(hV)`.
    pub fn shape_derivative(&self, psi: &RealField, h: &RealField) -> Result<RealField> {
        h.ensure_same_grid(&self.eta)?;
        let t = self.traces(psi)?;
        self.shape_derivative_from(&t, h)
    }

    pub fn shape_derivative_from(&self, t: &Traces, h: &RealField) -> Result<RealField> {
        let hb = h.mul(&t.b);
        let hv: Vec<RealField> = t.v.iter().map(|v| h.mul(v)).collect();
        Ok(self.dn_apply(&hb)?.scale(-1.0).sub(&divergence(&hv)))
    }

    /// `λ = ζ₁A − iζ₂·ξ` at `z = 0`.
    pub fn dn_symbol(&self) -> DnSymbol<'_> {
        DnSymbol { ctx: self }
    }

    /// `R(η)f = G(η)f − T_λ f`.
    pub fn dn_paralinear_remainder(&self, f: &RealField) -> Result<RealField> {
        let g = self.dn_apply(f)?;
        Ok(g.sub(&paradiff_apply(&self.dn_symbol(), f)?))
    }

    /// Smallest `Re λ(x, ξ)/|ξ|` over all nodes and directions.
    pub fn lambda_ellipticity(&self) -> f64 {
        let grid = self.grid();
        let sym = self.dn_symbol();
        let mut worst = f64::INFINITY;
        for node in 0..grid.len() {
            for dir in directions(grid.dim()) {
                worst = worst.min(sym.eval(node, dir).re);
            }
        }
        worst
    }
}

fn directions(dim: usize) -> Vec<Vec2> {
    if dim == 1 {
        vec![[1.0, 0.0], [-1.0, 0.0]]
    } else {
        (0..64)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 32.0;
                [t.cos(), t.sin()]
            })
            .collect()
    }
}

/// Lazily evaluated principal symbol of `G(η)`.
#[derive(Debug, Clone, Copy)]
pub struct DnSymbol<'a> {
    ctx: &'a DnoContext,
}

impl DnSymbol<'_> {
    pub fn eval(&self, node: usize, xi: Vec2) -> Complex64 {
        let z1 = self.ctx.zeta1.values()[node];
        let mut z2xi = 0.0;
        for (a, g) in self.ctx.grad_eta.iter().enumerate() {
            z2xi += g.values()[node] * xi[a];
        }
        self.ctx.symbols.big_a(node, xi) * z1 - Complex64::new(0.0, z2xi)
    }

    pub fn table(&self) -> Result<SymbolTable> {
        SymbolTable::from_fn(*self.ctx.grid(), 1.0, |j, xi| self.eval(j, xi))
    }
}

impl Symbol for DnSymbol<'_> {
    fn grid(&self) -> &Grid {
        self.ctx.grid()
    }

    fn order(&self) -> f64 {
        1.0
    }

    fn column(&self, xi_idx: usize, out: &mut [Complex64]) {
        let xi = self.ctx.grid().wavevector(xi_idx);
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.eval(j, xi);
        }
    }
}

/// Convenience wrapper: `G(η)f` with a fresh default context.
pub fn dn_apply(eta: &RealField, f: &RealField) -> Result<RealField> {
    DnoContext::with_defaults(eta)?.dn_apply(f)
}
