use num_complex::Complex64 as C64;
use serde::Serialize;

/// Non-fatal conditions attached to a result.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum Warning {
    /// The Fock truncation discards more probability than the configured bound.
    Truncation { leakage: f64, bound: f64 },
    /// A power-series argument lies outside the unit disk while the state has
    /// truncated tails, so the untruncated series may diverge.
    BeyondExistenceRegion { z_a: [f64; 2], z_b: [f64; 2], leakage: f64 },
    /// Significant mass on the boundary of a periodic grid.
    Aliasing { boundary_mass: f64 },
    /// The reconstructed object is a smoothed stand-in for a singular distribution.
    BandLimited,
}

impl Warning {
    pub(crate) fn beyond_existence(z_a: C64, z_b: C64, leakage: f64) -> Self {
        Warning::BeyondExistenceRegion {
            z_a: [z_a.re, z_a.im],
            z_b: [z_b.re, z_b.im],
            leakage,
        }
    }
}

/// A value together with the warnings raised while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosed<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Diagnosed<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }
}
