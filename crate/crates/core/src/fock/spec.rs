use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::state::{Component, TwoModeState};
use crate::error::{Error, Result};
use crate::special::ln_factorial;
use crate::tolerance::Tolerances;

/// Weighted coherent component `|alpha, beta>` of a classical mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentComponent {
    pub weight: f64,
    #[serde(with = "crate::complex_json")]
    pub alpha: C64,
    #[serde(with = "crate::complex_json")]
    pub beta: C64,
}

/// Recipe for a reference state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Vacuum,
    Coherent {
        #[serde(with = "crate::complex_json")]
        alpha: C64,
        #[serde(with = "crate::complex_json")]
        beta: C64,
    },
    /// One photon in each input port, `|1,1>`.
    HomInput,
    /// Two-mode squeezed vacuum with squeezing parameter `xi >= 0`.
    Tmsv { xi: f64 },
    Mixture { components: Vec<CoherentComponent> },
}

impl StateSpec {
    pub fn coherent(alpha: C64, beta: C64) -> Self {
        StateSpec::Coherent { alpha, beta }
    }

    /// Two-mode squeezed vacuum specified through `tanh(xi)`.
    pub fn tmsv_from_tanh(tanh_xi: f64) -> Self {
        StateSpec::Tmsv {
            xi: tanh_xi.atanh(),
        }
    }

    /// Vacuum, coherent states and their mixtures.
    pub fn is_classical(&self) -> bool {
        matches!(
            self,
            StateSpec::Vacuum | StateSpec::Coherent { .. } | StateSpec::Mixture { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let tol = Tolerances::DEFAULT;
        let finite = |c: &C64| c.re.is_finite() && c.im.is_finite();
        match self {
            StateSpec::Vacuum | StateSpec::HomInput => Ok(()),
            StateSpec::Coherent { alpha, beta } => {
                if finite(alpha) && finite(beta) {
                    Ok(())
                } else {
                    Err(Error::InvalidState("non-finite coherent amplitude".into()))
                }
            }
            StateSpec::Tmsv { xi } => {
                if xi.is_finite() && *xi >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidState(format!("squeezing must be finite and >= 0, got {xi}")))
                }
            }
            StateSpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidMixture("no components".into()));
                }
                if components
                    .iter()
                    .any(|c| !(c.weight.is_finite() && c.weight >= 0.0))
                {
                    return Err(Error::InvalidMixture("weights must be finite and >= 0".into()));
                }
                if components.iter().any(|c| !(finite(&c.alpha) && finite(&c.beta))) {
                    return Err(Error::InvalidState("non-finite coherent amplitude".into()));
                }
                let sum: f64 = components.iter().map(|c| c.weight).sum();
                if (sum - 1.0).abs() > tol.mixture_weights {
                    return Err(Error::InvalidMixture(format!("weights sum to {sum}")));
                }
                Ok(())
            }
        }
    }

    /// Analytic probability mass lost by truncating at `cutoff`.
    pub fn leakage(&self, cutoff: usize) -> f64 {
        match self {
            StateSpec::Vacuum => 0.0,
            StateSpec::HomInput => {
                if cutoff >= 1 {
                    0.0
                } else {
                    1.0
                }
            }
            StateSpec::Coherent { alpha, beta } => coherent_leakage(*alpha, *beta, cutoff),
            StateSpec::Tmsv { xi } => {
                let x2 = xi.tanh().powi(2);
                x2.powi(cutoff as i32 + 1)
            }
            StateSpec::Mixture { components } => components
                .iter()
                .map(|c| c.weight * coherent_leakage(c.alpha, c.beta, cutoff))
                .sum(),
        }
    }

    /// Smallest cutoff whose leakage is below `bound` (capped at 400).
    pub fn suggested_cutoff(&self, bound: f64) -> usize {
        let floor = if matches!(self, StateSpec::HomInput) { 1 } else { 0 };
        (floor..=400)
            .find(|&c| self.leakage(c) < bound)
            .unwrap_or(400)
    }
}

fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut tail = 0.0;
    let mut n = cutoff + 1;
    let mut ln_term = -mean + n as f64 * ln_mean - ln_factorial(n);
    loop {
        let term = ln_term.exp();
        tail += term;
        if (n as f64 > mean && term <= tail * 1e-17) || term == 0.0 && n as f64 > mean {
            break;
        }
        n += 1;
        ln_term += ln_mean - (n as f64).ln();
    }
    tail
}

fn coherent_leakage(alpha: C64, beta: C64, cutoff: usize) -> f64 {
    let ta = poisson_tail(alpha.norm_sqr(), cutoff);
    let tb = poisson_tail(beta.norm_sqr(), cutoff);
    ta + tb - ta * tb
}

/// Fock amplitudes `exp(-|a|^2/2) a^n / sqrt(n!)` for `n = 0..=cutoff`.
pub fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Vec<C64> {
    let r = alpha.norm();
    if r == 0.0 {
        let mut v = vec![C64::new(0.0, 0.0); cutoff + 1];
        v[0] = C64::new(1.0, 0.0);
        return v;
    }
    let (ln_r, phase) = (r.ln(), alpha.arg());
    (0..=cutoff)
        .map(|n| {
            let ln_mag = -0.5 * r * r + n as f64 * ln_r - 0.5 * ln_factorial(n);
            C64::from_polar(ln_mag.exp(), n as f64 * phase)
        })
        .collect()
}

fn coherent_component(alpha: C64, beta: C64, cutoff: usize, weight: f64) -> Component {
    let a = coherent_amplitudes(alpha, cutoff);
    let b = coherent_amplitudes(beta, cutoff);
    let mut comp = Component::zeros(2 * cutoff);
    comp.weight = weight;
    for (na, ca) in a.iter().enumerate() {
        for (nb, cb) in b.iter().enumerate() {
            comp.blocks[na + nb][na] = ca * cb;
        }
    }
    comp
}

/// Prepares the state described by `spec` on a Fock box of size `cutoff`.
///
/// Truncated tails are not renormalized: the trace equals `1 - leakage`, and
/// a [`crate::Warning::Truncation`] is attached when the leakage exceeds the
/// default bound.
pub fn make_state(spec: &StateSpec, cutoff: usize) -> Result<TwoModeState> {
    spec.validate()?;
    let leakage = spec.leakage(cutoff);
    let max_total = 2 * cutoff;
    let components = match spec {
        StateSpec::Vacuum => vec![coherent_component(C64::default(), C64::default(), cutoff, 1.0)],
        StateSpec::Coherent { alpha, beta } => {
            vec![coherent_component(*alpha, *beta, cutoff, 1.0)]
        }
        StateSpec::HomInput => {
            if cutoff < 1 {
                return Err(Error::InvalidCutoff("|1,1> needs cutoff >= 1".into()));
            }
            let mut comp = Component::zeros(max_total);
            comp.blocks[2][1] = C64::new(1.0, 0.0);
            vec![comp]
        }
        StateSpec::Tmsv { xi } => {
            let x = xi.tanh();
            let norm = 1.0 / xi.cosh();
            let mut comp = Component::zeros(max_total);
            let mut amp = norm;
            for n in 0..=cutoff {
                comp.blocks[2 * n][n] = C64::new(amp, 0.0);
                amp *= -x;
            }
            vec![comp]
        }
        StateSpec::Mixture { components } => components
            .iter()
            .map(|c| coherent_component(c.alpha, c.beta, cutoff, c.weight))
            .collect(),
    };
    Ok(TwoModeState::from_parts(cutoff, max_total, components, leakage))
}

/// JSON request for a state: a [`StateSpec`] plus an optional cutoff, e.g.
/// `{"kind":"tmsv","xi":0.55,"cutoff":40}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRequest {
    #[serde(flatten)]
    pub spec: StateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<i64>,
}

impl StateRequest {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Resolves the cutoff: the request's own value, else `fallback`, else the
    /// smallest cutoff meeting the default leakage bound.
    pub fn resolve_cutoff(&self, fallback: Option<usize>) -> Result<usize> {
        match (self.cutoff, fallback) {
            (Some(c), _) if c < 0 => Err(Error::InvalidCutoff(format!("negative cutoff {c}"))),
            (Some(c), _) => Ok(c as usize),
            (None, Some(c)) => Ok(c),
            (None, None) => Ok(self
                .spec
                .suggested_cutoff(Tolerances::DEFAULT.leakage_bound)),
        }
    }

    pub fn build(&self, fallback_cutoff: Option<usize>) -> Result<TwoModeState> {
        make_state(&self.spec, self.resolve_cutoff(fallback_cutoff)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Warning;

    #[test]
    fn vacuum_has_single_entry() {
        let s = make_state(&StateSpec::Vacuum, 4).unwrap();
        let rho = s.density_matrix();
        assert_eq!(rho[(0, 0)], C64::new(1.0, 0.0));
        assert!((rho.iter().map(|c| c.norm()).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hom_input_is_one_one() {
        let s = make_state(&StateSpec::HomInput, 2).unwrap();
        assert_eq!(s.element((1, 1), (1, 1)), C64::new(1.0, 0.0));
        assert!(make_state(&StateSpec::HomInput, 0).is_err());
    }

    #[test]
    fn tmsv_population_is_geometric() {
        let s = make_state(&StateSpec::tmsv_from_tanh(0.5), 40).unwrap();
        assert!((s.element((1, 1), (1, 1)).re - 0.1875).abs() < 1e-15);
        for n in 0..10 {
            let expected = 0.75 * 0.25f64.powi(n as i32);
            assert!((s.element((n, n), (n, n)).re - expected).abs() < 1e-15);
        }
        // amplitude sign (-tanh xi)^n
        assert!(s.element((1, 1), (0, 0)).re < 0.0);
        assert!(s.leakage() < 1e-10);
        s.validate().unwrap();
    }

    #[test]
    fn coherent_amplitudes_match_formula() {
        let alpha = C64::new(0.6, -0.8);
        let amps = coherent_amplitudes(alpha, 6);
        let mut fact = 1.0;
        for (n, a) in amps.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = (-0.5f64).exp() * alpha.powu(n as u32) / fact.sqrt();
            assert!((a - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_leakage_is_the_dropped_mass() {
        let spec = StateSpec::coherent(C64::new(1.5, 0.0), C64::new(0.0, 1.0));
        let s = make_state(&spec, 6).unwrap();
        assert!((s.trace() + s.leakage() - 1.0).abs() < 1e-14);
        assert!(s
            .warnings()
            .iter()
            .any(|w| matches!(w, Warning::Truncation { .. })));
        let c = spec.suggested_cutoff(1e-10);
        let s = make_state(&spec, c).unwrap();
        assert!(s.leakage() < 1e-10 && s.warnings().is_empty());
    }

    #[test]
    fn mixture_weights_validated() {
        let bad = StateSpec::Mixture {
            components: vec![CoherentComponent {
                weight: 0.9,
                alpha: C64::new(1.0, 0.0),
                beta: C64::default(),
            }],
        };
        assert!(matches!(make_state(&bad, 5), Err(Error::InvalidMixture(_))));
    }

    #[test]
    fn request_json() {
        let r = StateRequest::from_json(r#"{"kind":"tmsv","xi":0.55,"cutoff":40}"#).unwrap();
        assert_eq!(r.spec, StateSpec::Tmsv { xi: 0.55 });
        assert_eq!(r.resolve_cutoff(None).unwrap(), 40);
        let r = StateRequest::from_json(
            r#"{"kind":"coherent","alpha":{"re":1.0,"im":0.5},"beta":{"re":0.0,"im":-1.0}}"#,
        )
        .unwrap();
        assert_eq!(
            r.spec,
            StateSpec::coherent(C64::new(1.0, 0.5), C64::new(0.0, -1.0))
        );
        let back = StateRequest::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        let neg = StateRequest::from_json(r#"{"kind":"vacuum","cutoff":-3}"#).unwrap();
        assert!(matches!(neg.build(None), Err(Error::InvalidCutoff(_))));
    }
}
