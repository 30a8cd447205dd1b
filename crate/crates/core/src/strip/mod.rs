//! Flattening of the fluid domain and the variable-coefficient elliptic
//! problem on the truncated strip `[−Z_b, 0]`.

pub mod field;
pub mod krylov;
mod levels;
pub mod map;
pub mod solver;
pub mod vertical;

pub use field::{StripDerivatives, StripField};
pub use krylov::GmresSettings;
pub use levels::{pair_count, pair_index};
pub use map::{EllipticCoefficients, FlattenMap};
pub use solver::{
    default_vertical,
    cartesian_gradient, dirichlet_energy, pushforward_derivatives, solve_dirichlet, CartesianDerivatives,
    DecouplingSymbols, SolverSettings, StripDiscretization, StripSolver, DEFAULT_LEVELS,
};
pub use vertical::VerticalGrid;
