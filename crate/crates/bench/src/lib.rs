//! Fixtures shared by the criterion benches in `benches/`.

use zakharov_core::dynamics::SurfaceState;
use zakharov_core::{Grid, RealField};

/// Smooth multi-mode profile with algebraically decaying amplitudes.
pub fn profile(grid: Grid, amp: f64) -> RealField {
    let modes = (grid.n() / 3).max(1);
    RealField::from_fn(grid, |x| {
        (1..=modes)
            .map(|m| {
                let m = m as f64;
                let ph = m * x[0] + 0.7 * m * x[1] + 0.3 * m;
                amp * ph.cos() / (m * m)
            })
            .sum()
    })
}

/// Moderately steep travelling-wave-like state.
pub fn wave_state(grid: Grid) -> SurfaceState {
    let eta = profile(grid, 0.05);
    let psi = eta.derivative(0).scale(-0.5);
    SurfaceState::new(0.0, eta, psi, 1.0).expect("finite state")
}
