use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{MeasurementDirection, StateSpec};

fn stokes_of(alpha: C64, beta: C64) -> [f64; 3] {
    let ab = alpha.conj() * beta;
    [2.0 * ab.re, 2.0 * ab.im, alpha.norm_sqr() - beta.norm_sqr()]
}

fn coherent_form(alpha: C64, beta: C64, dir: &MeasurementDirection, t: C64, tau: f64) -> C64 {
    let s = stokes_of(alpha, beta);
    let norm = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
    (t * dir.dot(s) - tau * norm).exp()
}

/// True when `0 <= tau -/+ t <= 1`, the region where the two-mode squeezed
/// vacuum form holds.
pub fn tmsv_in_domain(t: f64, tau: f64) -> bool {
    let (la, lb) = (tau - t, tau + t);
    (0.0..=1.0).contains(&la) && (0.0..=1.0).contains(&lb)
}

/// Analytic MGF of the reference states.
///
/// * coherent and mixtures: `exp(t e.S - tau |S|)` averaged over components;
/// * `HomInput`: `(1 - tau)^2 + (1 - 2 e_z^2) t^2`;
/// * two-mode squeezed vacuum: real `t` with `0 <= tau -/+ t <= 1` only.
pub fn mgf_closed_form(spec: &StateSpec, dir: &MeasurementDirection, t: C64, tau: f64) -> Result<C64> {
    spec.validate()?;
    Ok(match spec {
        StateSpec::Vacuum => C64::new(1.0, 0.0),
        StateSpec::Coherent { alpha, beta } => coherent_form(*alpha, *beta, dir, t, tau),
        StateSpec::Mixture { components } => components
            .iter()
            .map(|c| c.weight * coherent_form(c.alpha, c.beta, dir, t, tau))
            .sum(),
        StateSpec::HomInput => {
            let ez = dir.e()[2];
            (1.0 - tau) * (1.0 - tau) + (1.0 - 2.0 * ez * ez) * t * t
        }
        StateSpec::Tmsv { xi } => {
            if t.im != 0.0 || !tmsv_in_domain(t.re, tau) {
                return Err(Error::Domain(format!(
                    "squeezed-vacuum form needs real t with 0 <= tau -/+ t <= 1 (t = {t}, tau = {tau})"
                )));
            }
            let t = t.re;
            let (c2, s2) = (xi.cosh().powi(2), xi.sinh().powi(2));
            let za = 1.0 + t - tau;
            let zb = 1.0 - t - tau;
            let sin2 = 1.0 - dir.e()[2].powi(2);
            let first = c2 - za * zb * s2;
            let d = first * first - sin2 * s2 * c2 * 4.0 * t * t;
            C64::new(d.powf(-0.5), 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hom_value() {
        let d = MeasurementDirection::from_vector([1.0, 0.0, 0.0]).unwrap();
        let v = mgf_closed_form(&StateSpec::HomInput, &d, C64::new(3f64.sqrt(), 0.0), 0.0).unwrap();
        assert!((v.re - 4.0).abs() < 1e-14);
    }

    #[test]
    fn tmsv_on_axis() {
        let spec = StateSpec::tmsv_from_tanh(0.4);
        let xi = 0.4f64.atanh();
        let z = MeasurementDirection::z();
        for tau in [0.0, 0.3, 0.9] {
            let v = mgf_closed_form(&spec, &z, C64::new(0.0, 0.0), tau).unwrap();
            let expected = 1.0 / (xi.cosh().powi(2) - (1.0 - tau).powi(2) * xi.sinh().powi(2));
            assert!((v.re - expected).abs() < 1e-14);
        }
        assert!(mgf_closed_form(&spec, &z, C64::new(0.5, 0.0), 0.2).is_err());
        assert!(mgf_closed_form(&spec, &z, C64::new(0.0, 0.1), 0.2).is_err());
    }

    #[test]
    fn coherent_angle_form() {
        let (a, b) = (C64::new(0.7, 0.1), C64::new(0.2, -0.4));
        let d = MeasurementDirection::from_vector([0.3, 0.3, -0.9]).unwrap();
        let s = stokes_of(a, b);
        let ns = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
        let cos = d.dot(s) / ns;
        let (t, tau) = (0.6, 0.2);
        let v = mgf_closed_form(&StateSpec::coherent(a, b), &d, C64::new(t, 0.0), tau).unwrap();
        assert!((v.re - ((-tau + t * cos) * ns).exp()).abs() < 1e-14);
    }
}
