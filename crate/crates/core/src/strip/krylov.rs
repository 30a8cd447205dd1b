//! Restarted GMRES with right preconditioning, for real vectors.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresSettings {
    /// Target relative residual `‖b − Ax‖ / ‖b‖`.
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
}

impl Default for GmresSettings {
    fn default() -> Self {
        Self { tol: 1e-13, restart: 40, max_iter: 400 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    /// Relative residual of the returned iterate: the Arnoldi estimate on
    /// convergence, otherwise recomputed from scratch.
    pub residual: f64,
    pub iterations: usize,
    /// Ratio of extreme diagonal entries of the last triangular factor.
    pub condition: f64,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` with the iterate `x = M⁻¹ y`.
pub fn gmres(
    a: impl Fn(&[f64]) -> Vec<f64>,
    m_inv: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    settings: GmresSettings,
) -> GmresOutcome {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return GmresOutcome { x, residual: 0.0, iterations: 0, condition: 1.0 };
    }
    let mut iterations = 0;
    let mut condition: f64 = 1.0;
    let mut r = b.to_vec();
    let mut rnorm = bnorm;
    while iterations < settings.max_iter && rnorm > settings.tol * bnorm {
        let m = settings.restart.min(settings.max_iter - iterations).max(1);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / rnorm).collect());
        // Hessenberg columns, already rotated into upper-triangular form.
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<(f64, f64)> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = rnorm;
        let mut k = 0;
        while k < m {
            let z = m_inv(&basis[k]);
            let mut w = a(&z);
            let mut col = vec![0.0; k + 2];
            // Modified Gram-Schmidt, run twice for robustness near convergence.
            for _ in 0..2 {
                for (j, q) in basis.iter().enumerate() {
                    let c = dot(&w, q);
                    col[j] += c;
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                }
            }
            let wn = norm2(&w);
            col[k + 1] = wn;
            for (j, &(c, s)) in cs.iter().enumerate() {
                let (p, q) = (col[j], col[j + 1]);
                col[j] = c * p + s * q;
                col[j + 1] = -s * p + c * q;
            }
            let (p, q) = (col[k], col[k + 1]);
            let den = p.hypot(q);
            let (c, s) = if den == 0.0 { (1.0, 0.0) } else { (p / den, q / den) };
            col[k] = den;
            col[k + 1] = 0.0;
            cs.push((c, s));
            g[k + 1] = -s * g[k];
            g[k] *= c;
            h.push(col);
            k += 1;
            iterations += 1;
            let breakdown = wn <= 1e-300;
            if !breakdown {
                basis.push(w.into_iter().map(|v| v / wn).collect());
            }
            if g[k].abs() <= settings.tol * bnorm || breakdown {
                break;
            }
        }
        // Back substitution for the correction coefficients.
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= h[j][i] * y[j];
            }
            y[i] = if h[i][i] != 0.0 { acc / h[i][i] } else { 0.0 };
        }
        let diag: Vec<f64> = (0..k).map(|i| h[i][i].abs()).collect();
        let dmax = diag.iter().cloned().fold(0.0, f64::max);
        let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        condition = condition.max(if dmin > 0.0 { dmax / dmin } else { f64::INFINITY });
        let mut u = vec![0.0; n];
        for (yj, q) in y.iter().zip(&basis) {
            for (ui, qi) in u.iter_mut().zip(q) {
                *ui += yj * qi;
            }
        }
        let dx = m_inv(&u);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        if g[k].abs() <= settings.tol * bnorm {
            // The Arnoldi estimate is exact in exact arithmetic; skip the
            // extra operator application once converged.
            rnorm = g[k].abs();
            break;
        }
        let ax = a(&x);
        for ((ri, bi), ai) in r.iter_mut().zip(b).zip(&ax) {
            *ri = bi - ai;
        }
        let new_norm = norm2(&r);
        let stalled = new_norm >= rnorm * 0.999;
        rnorm = new_norm;
        if stalled {
            break;
        }
    }
    GmresOutcome { x, residual: rnorm / bnorm, iterations, condition }
}
