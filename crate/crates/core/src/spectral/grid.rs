use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wavevector or node coordinate. The second component is zero on 1-D grids.
pub type Vec2 = [f64; 2];

/// Periodic horizontal grid: `n` points per dimension over a cell of side `length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be a power of two >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {length}")));
        }
        Ok(Self { dim, n, length })
    }

    /// One-dimensional grid on [0, 2π).
    pub fn unit_1d(n: usize) -> Result<Self> {
        Self::new(1, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of nodes, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Quadrature weight of a single node.
    pub fn node_weight(&self) -> f64 {
        self.cell_volume() / self.len() as f64
    }

    /// Lowest nonzero wavenumber, 2π/L.
    pub fn k_min(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest wavenumber along one axis (the Nyquist mode).
    pub fn k_nyquist(&self) -> f64 {
        self.k_min() * (self.n / 2) as f64
    }

    /// Largest |ξ| present on the grid (corner mode in 2-D).
    pub fn xi_max(&self) -> f64 {
        self.k_nyquist() * (self.dim as f64).sqrt()
    }

    pub fn signed_mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Integer mode numbers of a flat index.
    pub fn modes(&self, idx: usize) -> [i64; 2] {
        if self.dim == 1 {
            [self.signed_mode(idx), 0]
        } else {
            [self.signed_mode(idx / self.n), self.signed_mode(idx % self.n)]
        }
    }

    pub fn wavevector(&self, idx: usize) -> Vec2 {
        let [a, b] = self.modes(idx);
        [a as f64 * self.k_min(), b as f64 * self.k_min()]
    }

    pub fn wavevectors(&self) -> Vec<Vec2> {
        (0..self.len()).map(|i| self.wavevector(i)).collect()
    }

    pub fn xi_norms(&self) -> Vec<f64> {
        (0..self.len()).map(|i| norm(self.wavevector(i))).collect()
    }

    /// True when any axis of the mode sits on the Nyquist frequency.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = (self.n / 2) as i64;
        let [a, b] = self.modes(idx);
        a == -half || (self.dim == 2 && b == -half)
    }

    /// Flat index of the mode `-m` (conjugate partner for real fields).
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let neg = |i: usize| (n - i) % n;
        if self.dim == 1 {
            neg(idx)
        } else {
            neg(idx / n) * n + neg(idx % n)
        }
    }

    /// Flat index of the integer mode pair, or `None` outside the grid range.
    pub fn index_of_modes(&self, modes: [i64; 2]) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let wrap = |m: i64| -> Option<usize> {
            if m < -half || m >= half {
                None
            } else if m < 0 {
                Some((m + self.n as i64) as usize)
            } else {
                Some(m as usize)
            }
        };
        if self.dim == 1 {
            if modes[1] != 0 {
                return None;
            }
            wrap(modes[0])
        } else {
            Some(wrap(modes[0])? * self.n + wrap(modes[1])?)
        }
    }

    pub fn node(&self, idx: usize) -> Vec2 {
        let h = self.spacing();
        if self.dim == 1 {
            [idx as f64 * h, 0.0]
        } else {
            [(idx / self.n) as f64 * h, (idx % self.n) as f64 * h]
        }
    }

    pub fn nodes(&self) -> Vec<Vec2> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Largest dyadic index whose annulus `|ξ| ≤ 1.9·2^k` fits below the Nyquist mode.
    pub fn k_max(&self) -> i32 {
        let mut k = 0;
        while 1.9 * 2f64.powi(k + 1) <= self.k_nyquist() * (1.0 + 1e-12) {
            k += 1;
        }
        k
    }

    /// Smallest dyadic index whose low-pass profile is identically one on the grid.
    /// Blocks above `k_max` up to this index hold the partially resolved tail.
    pub fn k_top(&self) -> i32 {
        let mut k = 0;
        while 1.1 * 2f64.powi(k) < self.xi_max() {
            k += 1;
        }
        k.max(self.k_max())
    }

    /// Whether the 2/3 rule keeps this mode.
    pub fn passes_dealias(&self, idx: usize) -> bool {
        let cut = (self.n / 3) as i64;
        let [a, b] = self.modes(idx);
        a.abs() <= cut && b.abs() <= cut
    }
}

pub fn norm(v: Vec2) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(1, 12, 1.0).is_err());
        assert!(Grid::new(1, 4, 1.0).is_err());
        assert!(Grid::new(3, 16, 1.0).is_err());
        assert!(Grid::new(1, 16, 0.0).is_err());
    }

    #[test]
    fn dyadic_ceiling_matches_log2_rule() {
        for n in [8usize, 16, 64, 256, 1024] {
            let g = Grid::unit_1d(n).unwrap();
            let expected = (n as f64 / 2.0).log2() as i32 - 1;
            assert_eq!(g.k_max(), expected, "n = {n}");
            assert!(g.k_top() >= g.k_max());
            assert!(1.1 * 2f64.powi(g.k_top()) >= g.xi_max());
        }
    }

    #[test]
    fn conjugate_and_mode_lookup() {
        let g = Grid::new(2, 8, 2.0 * PI).unwrap();
        for idx in 0..g.len() {
            let m = g.modes(idx);
            let c = g.conjugate_index(idx);
            if !g.is_nyquist(idx) {
                assert_eq!(g.modes(c), [-m[0], -m[1]]);
            }
            assert_eq!(g.index_of_modes(m), Some(idx));
        }
        assert_eq!(g.index_of_modes([4, 0]), None);
    }
}
