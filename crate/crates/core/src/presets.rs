//! Named initial states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::SurfaceState;
use crate::error::{Error, Result};
use crate::spectral::{Grid, RealField};

/// Image cells summed on each side when periodizing the Gaussian hump.
pub const GAUSSIAN_IMAGES: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Preset {
    Rest,
    /// `η = amp·cos(k·x₁)`, `ψ = 0`.
    LinearWave { k: f64, amp: f64 },
    /// `η = amp·cos(k·x₁)`, `ψ = amp·√(g/k)·cos(k·x₁)`.
    SteepCosine { k: f64, amp: f64 },
    /// Gaussian of the given width centred in the cell, `ψ = 0`.
    GaussianHump { width: f64, amp: f64 },
}

impl Preset {
    pub fn state(&self, grid: Grid, g: f64) -> Result<SurfaceState> {
        let zero = RealField::zeros(grid);
        let (eta, psi) = match *self {
            Preset::Rest => (zero.clone(), zero),
            Preset::LinearWave { k, amp } => (RealField::from_fn(grid, |x| amp * (k * x[0]).cos()), zero),
            Preset::SteepCosine { k, amp } => {
                if !(k > 0.0) {
                    return Err(Error::InvalidParameter(format!("steep_cosine needs k > 0, got {k}")));
                }
                let c = (g / k).sqrt();
                (
                    RealField::from_fn(grid, |x| amp * (k * x[0]).cos()),
                    RealField::from_fn(grid, |x| amp * c * (k * x[0]).cos()),
                )
            }
            Preset::GaussianHump { width, amp } => {
                if !(width > 0.0) {
                    return Err(Error::InvalidParameter(format!("gaussian_hump needs width > 0, got {width}")));
                }
                (gaussian(grid, width, amp), zero)
            }
        };
        SurfaceState::new(0.0, eta, psi, g)
    }
}

fn gaussian(grid: Grid, width: f64, amp: f64) -> RealField {
    let l = grid.length();
    let c = 0.5 * l;
    let bump = move |x: f64| {
        (-GAUSSIAN_IMAGES..=GAUSSIAN_IMAGES)
            .map(|j| {
                let r = x - c - j as f64 * l;
                (-r * r / (2.0 * width * width)).exp()
            })
            .sum::<f64>()
    };
    if grid.dim() == 1 {
        RealField::from_fn(grid, |x| amp * bump(x[0]))
    } else {
        RealField::from_fn(grid, |x| amp * bump(x[0]) * bump(x[1]))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Rest => write!(f, "rest"),
            Preset::LinearWave { k, amp } => write!(f, "linear_wave({k:e},{amp:e})"),
            Preset::SteepCosine { k, amp } => write!(f, "steep_cosine({k:e},{amp:e})"),
            Preset::GaussianHump { width, amp } => write!(f, "gaussian_hump({width:e},{amp:e})"),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    /// Accepts `rest`, `linear_wave(k, amp)`, `steep_cosine(k, amp)` and
    /// `gaussian_hump(width, amp)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::UnknownPreset(s.to_string());
        let (name, args) = match s.find('(') {
            None => (s, Vec::new()),
            Some(open) => {
                let inner = s[open + 1..].strip_suffix(')').ok_or_else(unknown)?;
                let args = inner
                    .split(',')
                    .map(|a| a.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| unknown())?;
                (s[..open].trim(), args)
            }
        };
        match (name, args.as_slice()) {
            ("rest", []) => Ok(Preset::Rest),
            ("linear_wave", &[k, amp]) => Ok(Preset::LinearWave { k, amp }),
            ("steep_cosine", &[k, amp]) => Ok(Preset::SteepCosine { k, amp }),
            ("gaussian_hump", &[width, amp]) => Ok(Preset::GaussianHump { width, amp }),
            _ => Err(unknown()),
        }
    }
}

pub fn preset(name: &str, grid: Grid, g: f64) -> Result<SurfaceState> {
    name.parse::<Preset>()?.state(grid, g)
}
