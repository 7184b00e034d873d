use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::diagnostics::Warning;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Pure component of the ensemble decomposition. Amplitudes are grouped by
/// total photon number: `blocks[n][na]` is the amplitude of `|na, n - na>`.
#[derive(Debug, Clone)]
pub(crate) struct Component {
    pub weight: f64,
    pub blocks: Vec<DVector<C64>>,
}

impl Component {
    pub fn zeros(max_total: usize) -> Self {
        Self {
            weight: 1.0,
            blocks: (0..=max_total).map(|n| DVector::zeros(n + 1)).collect(),
        }
    }

    pub fn amplitude(&self, na: usize, nb: usize) -> C64 {
        self.blocks
            .get(na + nb)
            .map_or(C64::new(0.0, 0.0), |b| b[na])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }

    fn pad_to(&mut self, max_total: usize) {
        while self.blocks.len() <= max_total {
            let n = self.blocks.len();
            self.blocks.push(DVector::zeros(n + 1));
        }
    }
}

/// Density operator of a two-mode field on a truncated Fock basis.
///
/// The operator is held as a positive ensemble `rho = sum_k w_k |psi_k><psi_k|`
/// with every ket stored block-wise by total photon number `N = na + nb`.
/// This keeps beam-splitter transforms block-diagonal and makes Hermiticity
/// and positivity hold by construction. Dense matrix elements are available
/// through [`TwoModeState::element`] and [`TwoModeState::density_matrix`].
///
/// `cutoff` is the largest photon number per mode; `max_total` the largest
/// total photon number carried. Freshly prepared states have
/// `max_total = 2 * cutoff`; a beam splitter redistributes photons up to
/// `max_total` in either mode, so its output has `cutoff = max_total`.
#[derive(Debug, Clone)]
pub struct TwoModeState {
    cutoff: usize,
    max_total: usize,
    components: Vec<Component>,
    leakage: f64,
    warnings: Vec<Warning>,
}

/// Position of the label `(na, nb)` in the dense `(cutoff+1)^2` basis.
pub fn label_index(cutoff: usize, na: usize, nb: usize) -> usize {
    na * (cutoff + 1) + nb
}

impl TwoModeState {
    pub(crate) fn from_parts(
        cutoff: usize,
        max_total: usize,
        mut components: Vec<Component>,
        leakage: f64,
    ) -> Self {
        for c in &mut components {
            c.pad_to(max_total);
        }
        components.retain(|c| c.weight > 0.0);
        let bound = Tolerances::DEFAULT.leakage_bound;
        let warnings = if leakage > bound {
            vec![Warning::Truncation { leakage, bound }]
        } else {
            Vec::new()
        };
        Self {
            cutoff,
            max_total,
            components,
            leakage,
            warnings,
        }
    }

    pub(crate) fn with_components(&self, cutoff: usize, components: Vec<Component>) -> Self {
        Self {
            cutoff,
            max_total: self.max_total,
            components,
            leakage: self.leakage,
            warnings: self.warnings.clone(),
        }
    }

    /// Pure state with the given amplitudes on the `(cutoff+1)^2` box.
    /// No leakage is recorded; the amplitudes are taken as given.
    pub fn from_amplitudes<F>(cutoff: usize, amplitude: F) -> Self
    where
        F: Fn(usize, usize) -> C64,
    {
        let max_total = 2 * cutoff;
        let mut comp = Component::zeros(max_total);
        for na in 0..=cutoff {
            for nb in 0..=cutoff {
                comp.blocks[na + nb][na] = amplitude(na, nb);
            }
        }
        Self::from_parts(cutoff, max_total, vec![comp], 0.0)
    }

    /// The Fock state `|na, nb>`.
    pub fn fock(cutoff: usize, na: usize, nb: usize) -> Result<Self> {
        if na > cutoff || nb > cutoff {
            return Err(Error::InvalidCutoff(format!(
                "|{na},{nb}> does not fit under cutoff {cutoff}"
            )));
        }
        Ok(Self::from_amplitudes(cutoff, |a, b| {
            if (a, b) == (na, nb) {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    /// Builds a state from a dense Hermitian, positive semidefinite matrix
    /// indexed by [`label_index`].
    pub fn from_density_matrix(cutoff: usize, rho: &DMatrix<C64>) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let dim = (cutoff + 1) * (cutoff + 1);
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "expected a {dim}x{dim} matrix for cutoff {cutoff}, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let dev = (rho - rho.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if dev > tol.hermiticity {
            return Err(Error::NotHermitian(dev));
        }
        let trace: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
        if trace > 1.0 + tol.trace {
            return Err(Error::InvalidState(format!("trace {trace} exceeds one")));
        }
        let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        let mut components = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < tol.eigenvalue_floor {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {lambda:e}"
                )));
            }
            if lambda <= 0.0 {
                continue;
            }
            let v = eig.eigenvectors.column(k);
            let mut comp = Component::zeros(2 * cutoff);
            comp.weight = lambda;
            for na in 0..=cutoff {
                for nb in 0..=cutoff {
                    comp.blocks[na + nb][na] = v[label_index(cutoff, na, nb)];
                }
            }
            components.push(comp);
        }
        Ok(Self::from_parts(cutoff, 2 * cutoff, components, 0.0))
    }

    /// Random mixed state of the given rank with unit trace, for tests and
    /// benchmarks.
    pub fn random<R: Rng + ?Sized>(cutoff: usize, rank: usize, rng: &mut R) -> Self {
        let rank = rank.max(1);
        let mut comps = Vec::with_capacity(rank);
        let mut total = 0.0;
        for _ in 0..rank {
            let mut comp = Component::zeros(2 * cutoff);
            for na in 0..=cutoff {
                for nb in 0..=cutoff {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    comp.blocks[na + nb][na] = C64::new(re, im);
                }
            }
            let norm = comp.norm_sqr().sqrt();
            for b in &mut comp.blocks {
                *b /= C64::new(norm, 0.0);
            }
            comp.weight = rng.random::<f64>() + 1e-3;
            total += comp.weight;
            comps.push(comp);
        }
        for c in &mut comps {
            c.weight /= total;
        }
        Self::from_parts(cutoff, 2 * cutoff, comps, 0.0)
    }

    /// Convex combination of states. Weights must be nonnegative and sum to one.
    pub fn mix(parts: &[(f64, TwoModeState)]) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        if parts.is_empty() {
            return Err(Error::InvalidMixture("no components".into()));
        }
        if parts.iter().any(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidMixture("weights must be finite and >= 0".into()));
        }
        let sum: f64 = parts.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > tol.mixture_weights {
            return Err(Error::InvalidMixture(format!("weights sum to {sum}")));
        }
        let cutoff = parts.iter().map(|(_, s)| s.cutoff).max().unwrap_or(0);
        let max_total = parts.iter().map(|(_, s)| s.max_total).max().unwrap_or(0);
        let mut comps = Vec::new();
        let mut leakage = 0.0;
        for (w, s) in parts {
            leakage += w * s.leakage;
            for c in &s.components {
                let mut c = c.clone();
                c.weight *= w;
                comps.push(c);
            }
        }
        Ok(Self::from_parts(cutoff, max_total, comps, leakage))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    /// Probability mass removed by the truncation.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub(crate) fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn rank_bound(&self) -> usize {
        self.components.len()
    }

    pub fn trace(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.norm_sqr()).sum()
    }

    /// `<na, nb| rho |ma, mb>`.
    pub fn element(&self, bra: (usize, usize), ket: (usize, usize)) -> C64 {
        self.components
            .iter()
            .map(|c| c.amplitude(bra.0, bra.1) * c.amplitude(ket.0, ket.1).conj() * c.weight)
            .sum()
    }

    /// Block of rho inside the `N`-photon subspace, indexed by `na`.
    pub fn block_density(&self, n: usize) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(n + 1, n + 1);
        if n > self.max_total {
            return out;
        }
        for c in &self.components {
            let v = &c.blocks[n];
            out += v * v.adjoint() * C64::new(c.weight, 0.0);
        }
        out
    }

    /// Dense `(cutoff+1)^2` density matrix in [`label_index`] order.
    /// Memory grows as `cutoff^4`; intended for small cutoffs.
    pub fn density_matrix(&self) -> DMatrix<C64> {
        let c = self.cutoff;
        let dim = (c + 1) * (c + 1);
        let mut rho = DMatrix::zeros(dim, dim);
        for comp in &self.components {
            let mut v = DVector::<C64>::zeros(dim);
            for na in 0..=c {
                for nb in 0..=c {
                    v[label_index(c, na, nb)] = comp.amplitude(na, nb);
                }
            }
            rho += &v * v.adjoint() * C64::new(comp.weight, 0.0);
        }
        rho
    }

    /// Probability of finding `N` photons in total.
    pub fn total_number_distribution(&self) -> Vec<f64> {
        (0..=self.max_total)
            .map(|n| {
                self.components
                    .iter()
                    .map(|c| c.weight * c.blocks[n].norm_squared())
                    .sum()
            })
            .collect()
    }

    /// Checks the trace window `[1 - leakage - tol, 1 + tol]`.
    pub fn validate(&self) -> Result<()> {
        let tol = Tolerances::DEFAULT.trace;
        let tr = self.trace();
        if tr > 1.0 + tol || tr < 1.0 - self.leakage - tol {
            return Err(Error::InvalidState(format!(
                "trace {tr} outside [1 - {} - {tol}, 1 + {tol}]",
                self.leakage
            )));
        }
        Ok(())
    }
}
