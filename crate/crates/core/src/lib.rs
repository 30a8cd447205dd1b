//! Spectral simulator for gravity water waves in the Zakharov surface
//! formulation, with a paradifferential toolbox and a break-down monitor.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectral`]: periodic grids, transforms, Littlewood–Paley blocks, norms
//! - [`paradiff`]: paraproducts, Bony decomposition, paradifferential quantization
//! - [`strip`]: flattening map, variable-coefficient elliptic solver on the strip
//! - [`dno`]: Dirichlet–Neumann operator, traces, shape derivative, principal symbol
//! - [`dynamics`]: Zakharov right-hand side, RK4, pressure and Taylor coefficient
//! - [`breakdown`]: curvature, monitor samples, accumulated report

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod breakdown;
pub mod dno;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod paradiff;
pub mod presets;
pub mod spectral;
pub mod strip;
pub mod suites;

pub use error::{Error, Result};
pub use spectral::{Grid, RealField, Spectrum};
