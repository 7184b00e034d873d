//! Nonclassicality criteria built from the essential MGF and from normally
//! ordered photon-number moments.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::Diagnosed;
use crate::error::{Error, Result};
use crate::fock::{joint_photon_distribution, JointPhotonDistribution, MeasurementDirection, TwoModeState};
use crate::mgf::{char_fn, mgf_from_distribution};
use crate::tolerance::Tolerances;

/// Points `(t_p, tau_p)` sharing one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgfMatrixSpec {
    pub e: MeasurementDirection,
    pub points: Vec<MgfPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgfPoint {
    #[serde(with = "crate::complex_json")]
    pub t: C64,
    pub tau: f64,
}

impl MgfPoint {
    pub fn new(t: C64, tau: f64) -> Self {
        Self { t, tau }
    }

    pub fn real(t: f64, tau: f64) -> Self {
        Self::new(C64::new(t, 0.0), tau)
    }
}

impl MgfMatrixSpec {
    pub fn new(e: MeasurementDirection, points: Vec<MgfPoint>) -> Result<Self> {
        let spec = Self { e, points };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Domain("matrix criterion needs at least one point".into()));
        }
        if let Some(p) = self.points.iter().find(|p| !(p.tau.is_finite() && p.tau >= 0.0)) {
            return Err(Error::Domain(format!("tau must be >= 0, got {}", p.tau)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Nonclassical,
    Inconclusive,
}

impl Verdict {
    /// Nonclassical iff `value < -tolerance`.
    pub fn from_value(value: f64, tolerance: f64) -> Self {
        if value < -tolerance {
            Verdict::Nonclassical
        } else {
            Verdict::Inconclusive
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Nonclassical => "nonclassical",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub value: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    /// Eigenvector of the smallest eigenvalue for matrix tests.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_witness")]
    pub witness: Option<Vec<C64>>,
}

fn serialize_witness<S: serde::Serializer>(
    w: &Option<Vec<C64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Option<Vec<[f64; 2]>> = w.as_ref().map(|v| v.iter().map(|c| [c.re, c.im]).collect());
    pairs.serialize(s)
}

impl CriterionReport {
    fn scalar(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            verdict: Verdict::from_value(value, tolerance),
            tolerance,
            witness: None,
        }
    }
}

/// Matrix with entries `M(conj(t_p) + t_q; tau_p + tau_q)` from precomputed
/// photon statistics.
pub fn mgf_matrix_from_distribution(
    dist: &JointPhotonDistribution,
    spec: &MgfMatrixSpec,
) -> Result<Diagnosed<DMatrix<C64>>> {
    spec.validate()?;
    let n = spec.points.len();
    let mut warnings = Vec::new();
    let mut m = DMatrix::zeros(n, n);
    for (p, a) in spec.points.iter().enumerate() {
        for (q, b) in spec.points.iter().enumerate() {
            let d = mgf_from_distribution(dist, a.t.conj() + b.t, a.tau + b.tau);
            for w in d.warnings {
                if !warnings.contains(&w) {
                    warnings.push(w);
                }
            }
            m[(p, q)] = d.value;
        }
    }
    Ok(Diagnosed { value: m, warnings })
}

pub fn mgf_matrix(state: &TwoModeState, spec: &MgfMatrixSpec) -> Result<Diagnosed<DMatrix<C64>>> {
    let dist = joint_photon_distribution(state, &spec.e)?;
    mgf_matrix_from_distribution(&dist, spec)
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Positive-semidefiniteness test through the smallest eigenvalue.
pub fn matrix_verdict(m: &DMatrix<C64>, tolerance: f64) -> Result<CriterionReport> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::Domain("matrix must be square and non-empty".into()));
    }
    let dev = hermitian_deviation(m);
    if dev > Tolerances::DEFAULT.matrix_hermiticity {
        return Err(Error::NotHermitian(dev));
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let (k, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    Ok(CriterionReport {
        value,
        verdict: Verdict::from_value(value, tolerance),
        tolerance,
        witness: Some(eig.eigenvectors.column(k).iter().copied().collect()),
    })
}

/// Leading principal minors `det M[..k, ..k]` for `k = 1..=n`.
pub fn sylvester_minors(m: &DMatrix<C64>) -> Vec<f64> {
    (1..=m.nrows().min(m.ncols()))
        .map(|k| m.view((0, 0), (k, k)).into_owned().determinant().re)
        .collect()
}

fn second_order_from_distribution(
    dist: &JointPhotonDistribution,
    t: C64,
    tau: f64,
    t2: C64,
    tau2: f64,
) -> f64 {
    let m = |t: C64, tau: f64| mgf_from_distribution(dist, t, tau).value;
    let m11 = m(C64::new(2.0 * t.re, 0.0), 2.0 * tau).re;
    let m22 = m(C64::new(2.0 * t2.re, 0.0), 2.0 * tau2).re;
    let m12 = m(t.conj() + t2, tau + tau2);
    m11 * m22 - m12.norm_sqr()
}

/// Determinant of the 2x2 matrix criterion for the points `(t, tau)` and
/// `(t2, tau2)`. Negative values certify nonclassicality.
pub fn second_order_det(
    state: &TwoModeState,
    e: &MeasurementDirection,
    t: C64,
    tau: f64,
    t2: C64,
    tau2: f64,
) -> Result<f64> {
    if !(tau >= 0.0 && tau2 >= 0.0) {
        return Err(Error::Domain("tau must be >= 0".into()));
    }
    let dist = joint_photon_distribution(state, e)?;
    Ok(second_order_from_distribution(&dist, t, tau, t2, tau2))
}

/// `|<:A+ B:>|^2 - <:A+ A:><:B+ B:>` for the MGF kernels `A`, `B`; equal to
/// minus [`second_order_det`]. Positive values certify nonclassicality.
pub fn cauchy_schwarz_violation(
    state: &TwoModeState,
    e: &MeasurementDirection,
    first: (C64, f64),
    second: (C64, f64),
) -> Result<f64> {
    if second.0 == C64::new(0.0, 0.0) && second.1 == 0.0 {
        return Err(Error::Domain(
            "the second point must differ from (t, tau) = (0, 0)".into(),
        ));
    }
    Ok(-second_order_det(state, e, first.0, first.1, second.0, second.1)?)
}

/// `1 - |Phi(k)|`; nonclassical when the characteristic function exceeds one
/// in modulus.
pub fn char_fn_criterion(state: &TwoModeState, k: [f64; 3], tolerance: f64) -> Result<CriterionReport> {
    let phi = char_fn(state, k)?;
    Ok(CriterionReport::scalar(1.0 - phi.norm(), tolerance))
}

/// Normally ordered moments of the two output ports needed by the
/// low-intensity criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorialMoments {
    pub f10: f64,
    pub f01: f64,
    pub f20: f64,
    pub f11: f64,
    pub f02: f64,
}

impl FactorialMoments {
    pub fn from_distribution(d: &JointPhotonDistribution) -> Self {
        Self {
            f10: d.factorial_moment(1, 0),
            f01: d.factorial_moment(0, 1),
            f20: d.factorial_moment(2, 0),
            f11: d.factorial_moment(1, 1),
            f02: d.factorial_moment(0, 2),
        }
    }

    /// `<:(Delta N)^2:>` with `N = na + nb`.
    pub fn var_n(&self) -> f64 {
        self.f20 + 2.0 * self.f11 + self.f02 - (self.f10 + self.f01).powi(2)
    }

    /// `<:(Delta e.S)^2:>` with `e.S = na - nb`.
    pub fn var_s(&self) -> f64 {
        self.f20 - 2.0 * self.f11 + self.f02 - (self.f10 - self.f01).powi(2)
    }

    /// `<:(Delta N)(Delta e.S):>`.
    pub fn cov_ns(&self) -> f64 {
        self.f20 - self.f02 - (self.f10 + self.f01) * (self.f10 - self.f01)
    }

    pub fn var_a(&self) -> f64 {
        self.f20 - self.f10 * self.f10
    }

    pub fn var_b(&self) -> f64 {
        self.f02 - self.f01 * self.f01
    }

    pub fn cov_ab(&self) -> f64 {
        self.f11 - self.f10 * self.f01
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Variances {
    /// `<:(Delta e.S)^2:>`.
    pub var_s: f64,
    /// `<:(Delta N)^2:>`; its sign is that of the Mandel parameter.
    pub var_n: f64,
}

pub fn variance_criteria(state: &TwoModeState, e: &MeasurementDirection) -> Result<Variances> {
    let f = FactorialMoments::from_distribution(&joint_photon_distribution(state, e)?);
    Ok(Variances {
        var_s: f.var_s(),
        var_n: f.var_n(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCorrelation {
    /// `<:(Delta N)^2:><:(Delta e.S)^2:> - <:(Delta N)(Delta e.S):>^2`.
    pub stokes: f64,
    /// `<:(Delta na)^2:><:(Delta nb)^2:> - <:(Delta na)(Delta nb):>^2`.
    pub photon_number: f64,
}

pub fn cross_correlation_det(state: &TwoModeState, e: &MeasurementDirection) -> Result<CrossCorrelation> {
    let f = FactorialMoments::from_distribution(&joint_photon_distribution(state, e)?);
    Ok(CrossCorrelation {
        stokes: f.var_n() * f.var_s() - f.cov_ns().powi(2),
        photon_number: f.var_a() * f.var_b() - f.cov_ab().powi(2),
    })
}
