//! Least-squares helpers for convergence-order and decay-rate fits.

/// Slope of the least-squares line through `(x, y)`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `log2 y` against `x`, skipping non-positive samples.
pub fn log2_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let (x, y): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y > 0.0)
        .map(|(x, y)| (*x, y.log2()))
        .unzip();
    slope(&x, &y)
}

/// Observed order from errors at two step sizes `h1 > h2`.
pub fn order(h1: f64, e1: f64, h2: f64, e2: f64) -> f64 {
    (e1 / e2).ln() / (h1 / h2).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        assert!((slope(&xs, &ys) + 0.5).abs() < 1e-14);
        let p: Vec<f64> = xs.iter().map(|x| 2f64.powf(-1.5 * x)).collect();
        assert!((log2_slope(&xs, &p) + 1.5).abs() < 1e-12);
        assert!((order(1e-3, 1e-6, 1e-4, 1e-8) - 2.0).abs() < 1e-12);
    }
}
