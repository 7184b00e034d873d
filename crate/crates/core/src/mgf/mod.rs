//! The essential moment-generating function
//! `M(t e; tau) = sum p(na, nb; e) (1 + t - tau)^na (1 - t - tau)^nb`.

mod closed_form;
mod husimi;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::Diagnosed;
use crate::error::{Error, Result};
use crate::fock::{joint_photon_distribution, JointPhotonDistribution, MeasurementDirection, TwoModeState};
use crate::tolerance::Tolerances;

pub use closed_form::{mgf_closed_form, tmsv_in_domain};
pub use husimi::{gauss_laguerre, husimi_q, mgf_via_husimi_quadrature, QuadratureConfig};

/// A point `t e` with converging factor `tau` in the Laplace domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfQuery {
    pub e: MeasurementDirection,
    #[serde(with = "crate::complex_json")]
    pub t: C64,
    pub tau: f64,
}

impl MgfQuery {
    pub fn new(e: MeasurementDirection, t: C64, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::Domain(format!("tau must be finite and >= 0, got {tau}")));
        }
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::Domain("t must be finite".into()));
        }
        Ok(Self { e, t, tau })
    }

    pub fn real(e: MeasurementDirection, t: f64, tau: f64) -> Result<Self> {
        Self::new(e, C64::new(t, 0.0), tau)
    }

    /// `tau - t`, the attenuation of the first output port.
    pub fn lambda_a(&self) -> C64 {
        self.tau - self.t
    }

    /// `tau + t`, the attenuation of the second output port.
    pub fn lambda_b(&self) -> C64 {
        self.tau + self.t
    }

    /// The Laplace vector `t e`.
    pub fn vector(&self) -> [C64; 3] {
        self.e.e().map(|x| self.t * x)
    }

    /// True when `|Re t| <= tau`, where the MGF exists for every state.
    pub fn in_existence_region(&self) -> bool {
        self.t.re.abs() <= self.tau
    }
}

/// `M` from precomputed photon statistics.
pub fn mgf_from_distribution(dist: &JointPhotonDistribution, t: C64, tau: f64) -> Diagnosed<C64> {
    let one = C64::new(1.0, 0.0);
    dist.power_expectation_diagnosed(one + t - tau, one - t - tau)
}

/// `M(t e; tau)` by the photon-statistics route.
pub fn mgf(state: &TwoModeState, q: &MgfQuery) -> Result<Diagnosed<C64>> {
    let dist = joint_photon_distribution(state, &q.e)?;
    Ok(mgf_from_distribution(&dist, q.t, q.tau))
}

/// `Phi(k) = M(i k; 0)`.
pub fn char_fn(state: &TwoModeState, k: [f64; 3]) -> Result<C64> {
    let norm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    if norm == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let e = MeasurementDirection::from_vector(k)?;
    let q = MgfQuery::new(e, C64::new(0.0, norm), 0.0)?;
    Ok(mgf(state, &q)?.value)
}

/// `M(i k; tau)`: the characteristic function with converging factor.
pub fn char_fn_damped(state: &TwoModeState, k: [f64; 3], tau: f64) -> Result<C64> {
    let norm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let (e, t) = if norm == 0.0 {
        (MeasurementDirection::z(), C64::new(0.0, 0.0))
    } else {
        (MeasurementDirection::from_vector(k)?, C64::new(0.0, norm))
    };
    Ok(mgf(state, &MgfQuery::new(e, t, tau)?)?.value)
}

/// One point of the map `e -> M(t e; tau) e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceSample {
    pub e: [f64; 3],
    #[serde(with = "crate::complex_json")]
    pub value: C64,
    /// `Re(value) * e`.
    pub mapped: [f64; 3],
}

/// Evaluates `e -> M(t e; tau) e` over a list of unit vectors.
pub fn surface_map(
    state: &TwoModeState,
    t: C64,
    tau: f64,
    grid: &[[f64; 3]],
) -> Result<Vec<SurfaceSample>> {
    grid.par_iter()
        .map(|&v| {
            let dir = MeasurementDirection::from_vector(v)?;
            let q = MgfQuery::new(dir, t, tau)?;
            let value = mgf(state, &q)?.value;
            let e = dir.e();
            Ok(SurfaceSample {
                e,
                value,
                mapped: e.map(|x| value.re * x),
            })
        })
        .collect()
}

/// Latitude-longitude grid with `n_theta` polar rows (both poles included) and
/// `n_phi` azimuths per row. Pole rows repeat the pole `n_phi` times.
pub fn sphere_grid(n_theta: usize, n_phi: usize) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = if n_theta > 1 {
            std::f64::consts::PI * i as f64 / (n_theta - 1) as f64
        } else {
            0.0
        };
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            let (st, ct) = theta.sin_cos();
            let v = if i == 0 {
                [0.0, 0.0, 1.0]
            } else if i + 1 == n_theta {
                [0.0, 0.0, -1.0]
            } else {
                [st * phi.cos(), st * phi.sin(), ct]
            };
            out.push(v);
        }
    }
    out
}

/// Locates a sign change of the real-valued `t -> M(t e; tau)` on the
/// interval by a uniform pre-scan followed by bisection.
///
/// Roots where the function touches zero without changing sign are only
/// reported if a scan point hits them exactly.
pub fn find_node(
    state: &TwoModeState,
    dir: &MeasurementDirection,
    tau: f64,
    interval: [f64; 2],
) -> Result<Option<f64>> {
    let tol = Tolerances::DEFAULT;
    let [lo, hi] = interval;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
    }
    let dist = joint_photon_distribution(state, dir)?;
    let f = |t: f64| mgf_from_distribution(&dist, C64::new(t, 0.0), tau).value.re;
    let n = tol.root_prescan;
    let mut prev_t = lo;
    let mut prev_f = f(lo);
    if prev_f == 0.0 {
        return Ok(Some(lo));
    }
    for i in 1..=n {
        let t = lo + (hi - lo) * i as f64 / n as f64;
        let ft = f(t);
        if ft == 0.0 {
            return Ok(Some(t));
        }
        if ft.signum() != prev_f.signum() {
            let (mut a, mut b, mut fa) = (prev_t, t, prev_f);
            while b - a > tol.root {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 {
                    return Ok(Some(m));
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return Ok(Some(0.5 * (a + b)));
        }
        prev_t = t;
        prev_f = ft;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_state, StateSpec};

    #[test]
    fn normalization_and_hom_node() {
        let hom = make_state(&StateSpec::HomInput, 1).unwrap();
        let z = MeasurementDirection::z();
        let m = mgf(&hom, &MgfQuery::real(z, 0.0, 0.0).unwrap()).unwrap();
        assert!((m.value.re - 1.0).abs() < 1e-15);
        let m = mgf(&hom, &MgfQuery::real(z, 1.0, 0.0).unwrap()).unwrap();
        assert!(m.value.norm() < 1e-15);
        let node = find_node(&hom, &z, 0.0, [0.0, 2.0]).unwrap().unwrap();
        assert!((node - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tmsv_spot_value() {
        let s = make_state(&StateSpec::tmsv_from_tanh(0.5), 40).unwrap();
        let q = MgfQuery::real(MeasurementDirection::z(), -0.5, 0.5).unwrap();
        assert!((mgf(&s, &q).unwrap().value.re - 0.75).abs() < 1e-12);
    }

    #[test]
    fn char_fn_examples() {
        let hom = make_state(&StateSpec::HomInput, 1).unwrap();
        assert_eq!(char_fn(&hom, [0.0; 3]).unwrap(), C64::new(1.0, 0.0));
        let v = char_fn(&hom, [0.0, 0.0, 1.0]).unwrap();
        assert!((v - C64::new(2.0, 0.0)).norm() < 1e-14);
        let (a, b) = (C64::new(0.4, 0.2), C64::new(-0.3, 0.5));
        let coh = make_state(&StateSpec::coherent(a, b), 25).unwrap();
        let k = [0.3, -0.7, 0.2];
        let s = [
            2.0 * (a.conj() * b).re,
            2.0 * (a.conj() * b).im,
            a.norm_sqr() - b.norm_sqr(),
        ];
        let ks: f64 = (0..3).map(|i| k[i] * s[i]).sum();
        let v = char_fn(&coh, k).unwrap();
        assert!((v - C64::from_polar(1.0, ks)).norm() < 1e-10);
        let w = char_fn(&coh, k.map(|x| -x)).unwrap();
        assert!((w - v.conj()).norm() < 1e-12);
    }

    #[test]
    fn vacuum_has_no_node_and_unit_surface() {
        let vac = make_state(&StateSpec::Vacuum, 2).unwrap();
        let z = MeasurementDirection::z();
        assert_eq!(find_node(&vac, &z, 0.0, [-3.0, 3.0]).unwrap(), None);
        let grid = sphere_grid(5, 8);
        assert_eq!(grid.len(), 40);
        for s in surface_map(&vac, C64::new(1.0, 0.0), 0.0, &grid).unwrap() {
            assert!((s.value.re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn coherent_has_no_node() {
        let spec = StateSpec::coherent(C64::new(1.2, 0.3), C64::new(-0.4, 0.9));
        let s = make_state(&spec, 30).unwrap();
        let d = MeasurementDirection::from_vector([0.2, -0.5, 0.7]).unwrap();
        assert_eq!(find_node(&s, &d, 0.3, [-2.0, 2.0]).unwrap(), None);
    }
}
