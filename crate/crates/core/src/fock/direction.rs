use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Interferometer setting: a real unit vector `e` together with beam-splitter
/// coefficients `(T, R)` that realize it through
/// `e = (2 Re(T R*), 2 Im(T R*), |T|^2 - |R|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDirection {
    e: [f64; 3],
    #[serde(rename = "T", with = "crate::complex_json")]
    t: C64,
    #[serde(rename = "R", with = "crate::complex_json")]
    r: C64,
}

/// `e` as realized by the coefficients `(T, R)`.
pub fn direction_from_coefficients(t: C64, r: C64) -> [f64; 3] {
    let tr = t * r.conj();
    [2.0 * tr.re, 2.0 * tr.im, t.norm_sqr() - r.norm_sqr()]
}

/// Beam-splitter realization of the direction `e` with
/// `T = cos(theta/2)`, `R = sin(theta/2) exp(-i phi)`.
///
/// The input is renormalized. On the z axis the azimuth is undefined and
/// `phi = 0` is used, so `(0,0,-1)` maps to `T = 0, R = 1`.
pub fn direction_to_beamsplitter(e: [f64; 3]) -> Result<MeasurementDirection> {
    MeasurementDirection::from_vector(e)
}

impl MeasurementDirection {
    pub fn from_vector(e: [f64; 3]) -> Result<Self> {
        let norm = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let u = [e[0] / norm, e[1] / norm, e[2] / norm];
        let z = u[2].clamp(-1.0, 1.0);
        let phi = if u[0] == 0.0 && u[1] == 0.0 {
            0.0
        } else {
            u[1].atan2(u[0])
        };
        let c = ((1.0 + z) / 2.0).sqrt();
        let s = ((1.0 - z) / 2.0).sqrt();
        let t = C64::new(c, 0.0);
        let r = C64::from_polar(s, -phi);
        Ok(Self {
            e: direction_from_coefficients(t, r),
            t,
            r,
        })
    }

    /// Polar angle `theta` from the z axis and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::Domain("angles must be finite".into()));
        }
        let t = C64::new((theta / 2.0).cos(), 0.0);
        let r = C64::from_polar((theta / 2.0).sin(), -phi);
        Self::from_coefficients(t, r)
    }

    /// Any unitary pair `(T, R)`; `|T|^2 + |R|^2` must be one within `1e-10`.
    pub fn from_coefficients(t: C64, r: C64) -> Result<Self> {
        let (t, r) = normalize_coefficients(t, r)?;
        Ok(Self {
            e: direction_from_coefficients(t, r),
            t,
            r,
        })
    }

    /// Real splitter with transmissivity `|T|^2`.
    pub fn from_transmissivity(t2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t2) {
            return Err(Error::Domain(format!("transmissivity {t2} outside [0, 1]")));
        }
        Self::from_coefficients(C64::new(t2.sqrt(), 0.0), C64::new((1.0 - t2).sqrt(), 0.0))
    }

    /// The z axis, realized by the identity splitter.
    pub fn z() -> Self {
        Self {
            e: [0.0, 0.0, 1.0],
            t: C64::new(1.0, 0.0),
            r: C64::new(0.0, 0.0),
        }
    }

    pub fn e(&self) -> [f64; 3] {
        self.e
    }

    #[allow(non_snake_case)]
    pub fn T(&self) -> C64 {
        self.t
    }

    #[allow(non_snake_case)]
    pub fn R(&self) -> C64 {
        self.r
    }

    pub fn dot(&self, v: [f64; 3]) -> f64 {
        self.e[0] * v[0] + self.e[1] * v[1] + self.e[2] * v[2]
    }

    /// Checks unit norm, unitarity and consistency of `e` with `(T, R)`.
    pub fn validate(&self) -> Result<()> {
        let tol = Tolerances::DEFAULT.direction;
        let n = self.dot(self.e).sqrt();
        if (n - 1.0).abs() > tol {
            return Err(Error::Domain(format!("|e| = {n}")));
        }
        let u = self.t.norm_sqr() + self.r.norm_sqr();
        if (u - 1.0).abs() > tol {
            return Err(Error::NonUnitary(u));
        }
        let back = direction_from_coefficients(self.t, self.r);
        if (0..3).any(|i| (back[i] - self.e[i]).abs() > tol) {
            return Err(Error::Domain("e does not match (T, R)".into()));
        }
        Ok(())
    }
}

pub(crate) fn normalize_coefficients(t: C64, r: C64) -> Result<(C64, C64)> {
    let u = t.norm_sqr() + r.norm_sqr();
    if !u.is_finite() || (u - 1.0).abs() > Tolerances::DEFAULT.unitarity {
        return Err(Error::NonUnitary(u));
    }
    let s = u.sqrt();
    Ok((t / s, r / s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poles_and_equator() {
        let d = direction_to_beamsplitter([0.0, 0.0, 1.0]).unwrap();
        assert_eq!((d.T(), d.R()), (C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
        let d = direction_to_beamsplitter([0.0, 0.0, -1.0]).unwrap();
        assert!(d.T().norm() < 1e-15 && (d.R() - C64::new(1.0, 0.0)).norm() < 1e-15);
        let d = direction_to_beamsplitter([1.0, 0.0, 0.0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d.T() - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((d.R() - C64::new(h, 0.0)).norm() < 1e-15);
        d.validate().unwrap();
    }

    #[test]
    fn renormalizes_and_rejects_zero() {
        let d = direction_to_beamsplitter([0.0, 3.0, 4.0]).unwrap();
        let e = d.e();
        assert!((e[1] - 0.6).abs() < 1e-15 && (e[2] - 0.8).abs() < 1e-15);
        assert!(matches!(
            direction_to_beamsplitter([0.0; 3]),
            Err(Error::ZeroVector)
        ));
        assert!(direction_to_beamsplitter([f64::NAN, 0.0, 1.0]).is_err());
    }

    #[test]
    fn coefficients_must_be_unitary() {
        assert!(matches!(
            MeasurementDirection::from_coefficients(C64::new(1.0, 0.0), C64::new(0.1, 0.0)),
            Err(Error::NonUnitary(_))
        ));
        let d = MeasurementDirection::from_transmissivity(0.25).unwrap();
        assert!((d.e()[2] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let d = MeasurementDirection::from_angles(1.1, -0.4).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        let back: MeasurementDirection = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
