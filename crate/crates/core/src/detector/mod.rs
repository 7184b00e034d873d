//! Click counting with arrays of on-off avalanche photodiodes behind the two
//! output ports of the interferometer.

mod sampling;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{joint_photon_distribution, JointPhotonDistribution, MeasurementDirection, TwoModeState};
use crate::special::{binomial, compensated_sum};
use crate::tolerance::{Tolerances, MAX_APDS};

pub use sampling::{estimate_mgf_from_samples, sample_clicks, ClickSampleSet, MomentEstimate};

/// One detection arm: `d` APDs with efficiency `eta`, dark-count exponent
/// `nu` per APD and exposure, behind a neutral-density filter of
/// transmission `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickDetectorConfig {
    #[serde(rename = "D")]
    pub d: usize,
    pub eta: f64,
    #[serde(default)]
    pub nu: f64,
    #[serde(default = "one")]
    pub eps: f64,
}

fn one() -> f64 {
    1.0
}

impl ClickDetectorConfig {
    pub fn new(d: usize, eta: f64, nu: f64, eps: f64) -> Result<Self> {
        let c = Self { d, eta, nu, eps };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Domain("at least one APD per arm".into()));
        }
        if self.d > MAX_APDS {
            return Err(Error::TooManyDetectors(self.d));
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.eta) || !unit(self.eps) {
            return Err(Error::Domain(format!(
                "eta = {} and eps = {} must lie in [0, 1]",
                self.eta, self.eps
            )));
        }
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(Error::Domain(format!("nu = {} must be >= 0", self.nu)));
        }
        Ok(())
    }

    /// `eps * eta / D`, the per-APD share of the detected intensity.
    pub fn unit_attenuation(&self) -> f64 {
        self.eps * self.eta / self.d as f64
    }
}

/// Joint click statistics `c(i, j; e)`, `i` clicks in arm a and `j` in arm b.
#[derive(Debug, Clone, Serialize)]
pub struct ClickDistribution {
    #[serde(serialize_with = "serialize_rows")]
    c: DMatrix<f64>,
    direction: MeasurementDirection,
    configs: (ClickDetectorConfig, ClickDetectorConfig),
}

pub(crate) fn serialize_rows<S: serde::Serializer, T: Serialize + Copy + nalgebra::Scalar>(
    m: &DMatrix<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<T>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

impl ClickDistribution {
    /// Wraps explicit probabilities; the shape must be `(D_a + 1) x (D_b + 1)`.
    pub fn from_matrix(
        c: DMatrix<f64>,
        direction: MeasurementDirection,
        configs: (ClickDetectorConfig, ClickDetectorConfig),
    ) -> Result<Self> {
        configs.0.validate()?;
        configs.1.validate()?;
        if c.nrows() != configs.0.d + 1 || c.ncols() != configs.1.d + 1 {
            return Err(Error::Domain(format!(
                "click matrix is {}x{}, detectors need {}x{}",
                c.nrows(),
                c.ncols(),
                configs.0.d + 1,
                configs.1.d + 1
            )));
        }
        Ok(Self {
            c,
            direction,
            configs,
        })
    }

    pub fn probabilities(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[(i, j)]
    }

    pub fn direction(&self) -> &MeasurementDirection {
        &self.direction
    }

    pub fn configs(&self) -> (ClickDetectorConfig, ClickDetectorConfig) {
        self.configs
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.c.iter().copied())
    }
}

/// `<: m_a^k m_b^l :>` with `m = exp(-eps eta n / D - nu)`.
fn no_click_moment(
    dist: &JointPhotonDistribution,
    a: &ClickDetectorConfig,
    b: &ClickDetectorConfig,
    k: usize,
    l: usize,
) -> f64 {
    let za = 1.0 - k as f64 * a.unit_attenuation();
    let zb = 1.0 - l as f64 * b.unit_attenuation();
    let dark = (-(k as f64) * a.nu - l as f64 * b.nu).exp();
    dark * dist.power_expectation(C64::new(za, 0.0), C64::new(zb, 0.0)).re
}

/// Click statistics from precomputed photon statistics.
pub fn click_distribution_from_photons(
    dist: &JointPhotonDistribution,
    cfg_a: &ClickDetectorConfig,
    cfg_b: &ClickDetectorConfig,
) -> Result<ClickDistribution> {
    cfg_a.validate()?;
    cfg_b.validate()?;
    let (da, db) = (cfg_a.d, cfg_b.d);
    let mut mu = DMatrix::<f64>::zeros(da + 1, db + 1);
    for k in 0..=da {
        for l in 0..=db {
            mu[(k, l)] = no_click_moment(dist, cfg_a, cfg_b, k, l);
        }
    }
    let mut c = DMatrix::<f64>::zeros(da + 1, db + 1);
    for i in 0..=da {
        for j in 0..=db {
            let mut terms = Vec::with_capacity((i + 1) * (j + 1));
            for r in 0..=i {
                for s in 0..=j {
                    let sign = if (r + s) % 2 == 0 { 1.0 } else { -1.0 };
                    terms.push(
                        sign * binomial(i, r) * binomial(j, s) * mu[(da - i + r, db - j + s)],
                    );
                }
            }
            let value = binomial(da, i) * binomial(db, j) * compensated_sum(terms);
            if value < -Tolerances::DEFAULT.click_negative {
                return Err(Error::NegativeProbability { i, j, value });
            }
            c[(i, j)] = value;
        }
    }
    Ok(ClickDistribution {
        c,
        direction: *dist.direction(),
        configs: (*cfg_a, *cfg_b),
    })
}

/// Exact joint click statistics for the state measured along `dir`.
///
/// Each probability is an alternating binomial sum of no-click moments
/// `<: m_a^k m_b^l :>`, accumulated with compensated summation.
pub fn click_distribution(
    state: &TwoModeState,
    dir: &MeasurementDirection,
    cfg_a: &ClickDetectorConfig,
    cfg_b: &ClickDetectorConfig,
) -> Result<ClickDistribution> {
    cfg_a.validate()?;
    cfg_b.validate()?;
    click_distribution_from_photons(&joint_photon_distribution(state, dir)?, cfg_a, cfg_b)
}

pub(crate) fn check_moment_order(k: usize, l: usize, da: usize, db: usize) -> Result<()> {
    if k > da || l > db {
        return Err(Error::OutOfRange(format!(
            "moment order ({k}, {l}) outside 0..={da} x 0..={db}"
        )));
    }
    Ok(())
}

/// Per-outcome weight `C(D_a - i, k) C(D_b - j, l) / (C(D_a, k) C(D_b, l))`.
pub(crate) fn moment_weight(i: usize, j: usize, k: usize, l: usize, da: usize, db: usize) -> f64 {
    binomial(da - i, k) * binomial(db - j, l) / (binomial(da, k) * binomial(db, l))
}

pub(crate) fn dark_factor(k: usize, l: usize, a: &ClickDetectorConfig, b: &ClickDetectorConfig) -> f64 {
    (-(k as f64) * a.nu - l as f64 * b.nu).exp()
}

/// The normally ordered moment `mu_{k,l}` recovered from click statistics.
/// With `correct_dark` the dark-count factor `exp(-k nu_a - l nu_b)` is
/// divided out.
pub fn moments_from_clicks(clicks: &ClickDistribution, k: usize, l: usize, correct_dark: bool) -> Result<f64> {
    let (a, b) = clicks.configs;
    check_moment_order(k, l, a.d, b.d)?;
    let terms = (0..=a.d).flat_map(|i| {
        (0..=b.d).map(move |j| moment_weight(i, j, k, l, a.d, b.d) * clicks.c[(i, j)])
    });
    let mu = compensated_sum(terms);
    Ok(if correct_dark {
        mu / dark_factor(k, l, &a, &b)
    } else {
        mu
    })
}

/// The MGF argument probed by the moment `mu_{k,l}`:
/// `tau = k x_a / 2 + l x_b / 2`, `t = l x_b / 2 - k x_a / 2` with
/// `x = eps eta / D`.
pub fn click_moment_to_mgf_point(
    k: usize,
    l: usize,
    cfg_a: &ClickDetectorConfig,
    cfg_b: &ClickDetectorConfig,
) -> Result<(f64, f64)> {
    check_moment_order(k, l, cfg_a.d, cfg_b.d)?;
    let xa = k as f64 * cfg_a.unit_attenuation();
    let xb = l as f64 * cfg_b.unit_attenuation();
    Ok((0.5 * (xb - xa), 0.5 * (xa + xb)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticePoint {
    pub k: usize,
    pub l: usize,
    pub t: f64,
    pub tau: f64,
}

/// The part of the `(t, tau)` plane reachable with given detectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AccessibleRegion {
    /// Fixed filters: one point per moment order.
    Lattice { points: Vec<LatticePoint> },
    /// Swept filters: `tau - t` ranges over `[0, eta_a]` and `tau + t` over
    /// `[0, eta_b]`.
    Parallelogram { eta_a: f64, eta_b: f64 },
}

impl AccessibleRegion {
    pub fn contains(&self, t: f64, tau: f64) -> bool {
        const EPS: f64 = 1e-12;
        match self {
            AccessibleRegion::Lattice { points } => points
                .iter()
                .any(|p| (p.t - t).abs() <= EPS && (p.tau - tau).abs() <= EPS),
            AccessibleRegion::Parallelogram { eta_a, eta_b } => {
                let (xa, xb) = (tau - t, tau + t);
                xa >= -EPS && xa <= eta_a + EPS && xb >= -EPS && xb <= eta_b + EPS
            }
        }
    }

    /// Corners `(t, tau)` of the swept region, or the lattice points.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        match self {
            AccessibleRegion::Lattice { points } => points.iter().map(|p| (p.t, p.tau)).collect(),
            AccessibleRegion::Parallelogram { eta_a, eta_b } => vec![
                (0.0, 0.0),
                (-eta_a / 2.0, eta_a / 2.0),
                ((eta_b - eta_a) / 2.0, (eta_a + eta_b) / 2.0),
                (eta_b / 2.0, eta_b / 2.0),
            ],
        }
    }
}

pub fn accessible_region(
    cfg_a: &ClickDetectorConfig,
    cfg_b: &ClickDetectorConfig,
    eps_sweep: bool,
) -> Result<AccessibleRegion> {
    cfg_a.validate()?;
    cfg_b.validate()?;
    if eps_sweep {
        return Ok(AccessibleRegion::Parallelogram {
            eta_a: cfg_a.eta,
            eta_b: cfg_b.eta,
        });
    }
    let mut points: Vec<LatticePoint> = Vec::new();
    for k in 0..=cfg_a.d {
        for l in 0..=cfg_b.d {
            let (t, tau) = click_moment_to_mgf_point(k, l, cfg_a, cfg_b)?;
            points.push(LatticePoint { k, l, t, tau });
        }
    }
    Ok(AccessibleRegion::Lattice { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_state, StateSpec};

    fn cfg(d: usize, eta: f64, nu: f64) -> ClickDetectorConfig {
        ClickDetectorConfig::new(d, eta, nu, 1.0).unwrap()
    }

    #[test]
    fn vacuum_dark_counts() {
        let vac = make_state(&StateSpec::Vacuum, 2).unwrap();
        let z = MeasurementDirection::z();
        let (a, b) = (cfg(2, 0.7, 0.1), cfg(1, 0.5, 0.3));
        let c = click_distribution(&vac, &z, &a, &b).unwrap();
        let (pa, pb) = ((-0.1f64).exp(), (-0.3f64).exp());
        for i in 0..=2 {
            for j in 0..=1 {
                let expected = binomial(2, i) * pa.powi(2 - i as i32) * (1.0 - pa).powi(i as i32)
                    * pb.powi(1 - j as i32)
                    * (1.0 - pb).powi(j as i32);
                assert!((c.get(i, j) - expected).abs() < 1e-14);
            }
        }
        assert!((moments_from_clicks(&c, 1, 0, false).unwrap() - pa).abs() < 1e-14);
        assert!((moments_from_clicks(&c, 1, 0, true).unwrap() - 1.0).abs() < 1e-14);
        assert!((moments_from_clicks(&c, 0, 0, false).unwrap() - 1.0).abs() < 1e-14);
        assert!(moments_from_clicks(&c, 3, 0, true).is_err());
    }

    #[test]
    fn coherent_arm_is_binomial() {
        let alpha = C64::new(1.3, 0.0);
        let s = make_state(&StateSpec::coherent(alpha, C64::default()), 40).unwrap();
        let (a, b) = (ClickDetectorConfig::new(4, 0.8, 0.0, 0.5).unwrap(), cfg(2, 1.0, 0.0));
        let c = click_distribution(&s, &MeasurementDirection::z(), &a, &b).unwrap();
        let q = 1.0 - (-0.5 * 0.8 * alpha.norm_sqr() / 4.0).exp();
        for i in 0..=4 {
            let expected = binomial(4, i) * q.powi(i as i32) * (1.0 - q).powi(4 - i as i32);
            assert!((c.get(i, 0) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn mgf_points() {
        let (a, b) = (cfg(4, 0.6, 0.0), cfg(3, 0.9, 0.0));
        assert_eq!(click_moment_to_mgf_point(0, 0, &a, &b).unwrap(), (0.0, 0.0));
        let (t, tau) = click_moment_to_mgf_point(4, 3, &a, &b).unwrap();
        assert!((tau - 0.75).abs() < 1e-15 && (t - 0.15).abs() < 1e-15);
        let (t, tau) = click_moment_to_mgf_point(4, 0, &a, &b).unwrap();
        assert!((t + 0.3).abs() < 1e-15 && (tau - 0.3).abs() < 1e-15);
    }

    #[test]
    fn regions() {
        let r = accessible_region(&cfg(4, 1.0, 0.0), &cfg(4, 1.0, 0.0), false).unwrap();
        let AccessibleRegion::Lattice { points } = &r else { panic!() };
        assert_eq!(points.len(), 25);
        for p in points {
            assert!((p.t - (p.l as f64 - p.k as f64) / 8.0).abs() < 1e-15);
            assert!((p.tau - (p.l + p.k) as f64 / 8.0).abs() < 1e-15);
            assert!(p.t.abs() <= p.tau);
        }
        let r = accessible_region(&cfg(2, 0.0, 0.0), &cfg(3, 0.0, 0.0), false).unwrap();
        let AccessibleRegion::Lattice { points } = &r else { panic!() };
        assert!(points.iter().all(|p| p.t == 0.0 && p.tau == 0.0));
        let r = accessible_region(&cfg(2, 0.6, 0.0), &cfg(3, 0.8, 0.0), true).unwrap();
        assert!(r.contains(0.1, 0.5) && !r.contains(0.3, 0.2) && !r.contains(0.0, 0.75));
    }

    #[test]
    fn rejects_large_arrays() {
        assert!(matches!(
            ClickDetectorConfig::new(9, 0.5, 0.0, 1.0),
            Err(Error::TooManyDetectors(9))
        ));
    }
}
