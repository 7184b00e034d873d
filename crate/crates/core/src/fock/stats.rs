use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::beam_splitter::BlockTransform;
use super::direction::MeasurementDirection;
use super::state::TwoModeState;
use crate::diagnostics::{Diagnosed, Warning};
use crate::error::Result;
use crate::special::falling_factorial;
use crate::tolerance::Tolerances;

/// Photon-number statistics `p(na, nb; e)` behind the interferometer set to `e`.
///
/// Rows are indexed by `na`, columns by `nb`; the matrix is square with side
/// `max_total + 1` of the source state.
#[derive(Debug, Clone, Serialize)]
pub struct JointPhotonDistribution {
    #[serde(serialize_with = "serialize_rows")]
    p: DMatrix<f64>,
    direction: MeasurementDirection,
    leakage: f64,
}

fn serialize_rows<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

/// Diagonal of the beam-splitter output for the direction `dir`. Only the
/// populations are formed; the output density matrix is never built.
pub fn joint_photon_distribution(
    state: &TwoModeState,
    dir: &MeasurementDirection,
) -> Result<JointPhotonDistribution> {
    let bt = BlockTransform::new(dir.T(), dir.R())?;
    let side = state.max_total() + 1;
    let mut p = DMatrix::<f64>::zeros(side, side);
    for comp in state.components() {
        let out = bt.apply_component(comp);
        for (n, block) in out.blocks.iter().enumerate() {
            for (na, amp) in block.iter().enumerate() {
                p[(na, n - na)] += comp.weight * amp.norm_sqr();
            }
        }
    }
    Ok(JointPhotonDistribution {
        p,
        direction: *dir,
        leakage: state.leakage(),
    })
}

impl JointPhotonDistribution {
    /// Builds a distribution from explicit probabilities, mainly for tests.
    pub fn from_matrix(p: DMatrix<f64>, direction: MeasurementDirection, leakage: f64) -> Self {
        Self {
            p,
            direction,
            leakage,
        }
    }

    pub fn probabilities(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn get(&self, na: usize, nb: usize) -> f64 {
        if na < self.p.nrows() && nb < self.p.ncols() {
            self.p[(na, nb)]
        } else {
            0.0
        }
    }

    pub fn direction(&self) -> &MeasurementDirection {
        &self.direction
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn total(&self) -> f64 {
        self.p.sum()
    }

    /// Largest photon number with a nonzero entry in either port.
    pub fn max_index(&self) -> usize {
        self.p.nrows() - 1
    }

    /// `sum p(na, nb) z_a^na z_b^nb`.
    pub fn power_expectation(&self, z_a: C64, z_b: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for na in (0..self.p.nrows()).rev() {
            let mut row = C64::new(0.0, 0.0);
            for nb in (0..self.p.ncols()).rev() {
                row = row * z_b + self.p[(na, nb)];
            }
            acc = acc * z_a + row;
        }
        acc
    }

    /// As [`Self::power_expectation`], warning when an argument leaves the
    /// unit disk while the state has truncated tails.
    pub fn power_expectation_diagnosed(&self, z_a: C64, z_b: C64) -> Diagnosed<C64> {
        let value = self.power_expectation(z_a, z_b);
        let mut warnings = Vec::new();
        if (z_a.norm() > 1.0 || z_b.norm() > 1.0)
            && self.leakage > Tolerances::DEFAULT.convergence_leakage
        {
            warnings.push(Warning::beyond_existence(z_a, z_b, self.leakage));
        }
        Diagnosed { value, warnings }
    }

    /// Normally ordered moment `<: na^p nb^q :>` as a factorial-moment sum.
    pub fn factorial_moment(&self, p: usize, q: usize) -> f64 {
        let mut acc = 0.0;
        for na in p..self.p.nrows() {
            let fa = falling_factorial(na, p);
            for nb in q..self.p.ncols() {
                acc += self.p[(na, nb)] * fa * falling_factorial(nb, q);
            }
        }
        acc
    }
}

/// `<z_a^{na} z_b^{nb}>` behind the interferometer set to `dir`.
pub fn power_expectation(
    state: &TwoModeState,
    dir: &MeasurementDirection,
    z_a: C64,
    z_b: C64,
) -> Result<Diagnosed<C64>> {
    Ok(joint_photon_distribution(state, dir)?.power_expectation_diagnosed(z_a, z_b))
}

/// `<: na^p nb^q :>` for the output ports of the interferometer set to `dir`.
pub fn factorial_moment(
    state: &TwoModeState,
    dir: &MeasurementDirection,
    p: usize,
    q: usize,
) -> Result<f64> {
    Ok(joint_photon_distribution(state, dir)?.factorial_moment(p, q))
}

/// Expectation of the Stokes operators and of the total photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StokesVector {
    pub s: [f64; 3],
    pub s0: f64,
}

impl StokesVector {
    pub fn norm(&self) -> f64 {
        (self.s[0].powi(2) + self.s[1].powi(2) + self.s[2].powi(2)).sqrt()
    }
}

/// `(<a+b + b+a>, <-i a+b + i b+a>, <a+a - b+b>)` and `<a+a + b+b>`.
pub fn stokes_mean(state: &TwoModeState) -> StokesVector {
    let mut ab = C64::new(0.0, 0.0);
    let (mut sz, mut n_tot) = (0.0, 0.0);
    for comp in state.components() {
        for (n, v) in comp.blocks.iter().enumerate() {
            for m in 0..=n {
                let pop = comp.weight * v[m].norm_sqr();
                sz += pop * (2.0 * m as f64 - n as f64);
                n_tot += pop * n as f64;
                if m < n {
                    let x = (((m + 1) * (n - m)) as f64).sqrt();
                    ab += v[m + 1].conj() * v[m] * (x * comp.weight);
                }
            }
        }
    }
    StokesVector {
        s: [2.0 * ab.re, 2.0 * ab.im, sz],
        s0: n_tot,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::beam_splitter::beam_splitter;
    use crate::fock::direction::direction_to_beamsplitter;
    use crate::fock::spec::{make_state, StateSpec};

    fn z() -> MeasurementDirection {
        MeasurementDirection::z()
    }

    #[test]
    fn hom_statistics() {
        let s = make_state(&StateSpec::HomInput, 1).unwrap();
        let p = joint_photon_distribution(&s, &z()).unwrap();
        assert_eq!(p.get(1, 1), 1.0);
        let x = direction_to_beamsplitter([1.0, 0.0, 0.0]).unwrap();
        let p = joint_photon_distribution(&s, &x).unwrap();
        assert!((p.get(2, 0) - 0.5).abs() < 1e-15);
        assert!((p.get(0, 2) - 0.5).abs() < 1e-15);
        assert!(p.get(1, 1).abs() < 1e-15);
    }

    #[test]
    fn power_expectation_examples() {
        let vac = make_state(&StateSpec::Vacuum, 3).unwrap();
        let v = power_expectation(&vac, &z(), C64::new(0.3, 2.0), C64::new(-5.0, 0.0)).unwrap();
        assert_eq!(v.value, C64::new(1.0, 0.0));
        let hom = make_state(&StateSpec::HomInput, 2).unwrap();
        let v = power_expectation(&hom, &z(), C64::new(0.3, 0.0), C64::new(0.7, 0.0)).unwrap();
        assert!((v.value.re - 0.21).abs() < 1e-15);
        let coh = make_state(&StateSpec::coherent(C64::new(1.0, 0.0), C64::default()), 30).unwrap();
        let v = power_expectation(&coh, &z(), C64::new(0.5, 0.0), C64::new(1.0, 0.0)).unwrap();
        assert!((v.value.re - (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn divergence_warning() {
        let coh = make_state(&StateSpec::coherent(C64::new(3.0, 0.0), C64::default()), 20).unwrap();
        let v = power_expectation(&coh, &z(), C64::new(1.5, 0.0), C64::new(1.0, 0.0)).unwrap();
        assert!(matches!(v.warnings[0], Warning::BeyondExistenceRegion { .. }));
        let hom = make_state(&StateSpec::HomInput, 2).unwrap();
        let v = power_expectation(&hom, &z(), C64::new(3.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn factorial_moment_examples() {
        let vac = make_state(&StateSpec::Vacuum, 3).unwrap();
        assert_eq!(factorial_moment(&vac, &z(), 1, 0).unwrap(), 0.0);
        let coh = make_state(&StateSpec::coherent(C64::new(2.0, 0.0), C64::default()), 50).unwrap();
        assert!((factorial_moment(&coh, &z(), 2, 0).unwrap() - 16.0).abs() < 1e-9);
        let hom = make_state(&StateSpec::HomInput, 2).unwrap();
        assert!((factorial_moment(&hom, &z(), 1, 1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(factorial_moment(&hom, &z(), 2, 0).unwrap(), 0.0);
    }

    #[test]
    fn stokes_examples() {
        let vac = make_state(&StateSpec::Vacuum, 3).unwrap();
        assert_eq!(stokes_mean(&vac).s0, 0.0);
        let coh = make_state(&StateSpec::coherent(C64::new(1.0, 0.0), C64::new(1.0, 0.0)), 40).unwrap();
        let s = stokes_mean(&coh);
        assert!((s.s[0] - 2.0).abs() < 1e-12 && s.s[1].abs() < 1e-12 && s.s[2].abs() < 1e-12);
        assert!((s.s0 - 2.0).abs() < 1e-12);
        let hom = make_state(&StateSpec::HomInput, 2).unwrap();
        let s = stokes_mean(&hom);
        assert_eq!(s.s, [0.0; 3]);
        assert_eq!(s.s0, 2.0);
    }

    #[test]
    fn stokes_matches_dense_trace() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = TwoModeState::random(3, 2, &mut rng);
        let c = 3;
        let rho = s.density_matrix();
        let idx = |a, b| crate::fock::state::label_index(c, a, b);
        // <a+ b> = sum <na+1, nb-1| rho |na, nb> sqrt((na+1) nb)
        let mut ab = C64::new(0.0, 0.0);
        for na in 0..c {
            for nb in 1..=c {
                let x = (((na + 1) * nb) as f64).sqrt();
                ab += rho[(idx(na, nb), idx(na + 1, nb - 1))] * x;
            }
        }
        let st = stokes_mean(&s);
        assert!((st.s[0] - 2.0 * ab.re).abs() < 1e-12);
        assert!((st.s[1] - 2.0 * ab.im).abs() < 1e-12);
        // direction z splits the state trivially
        let out = beam_splitter(&s, C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!((out.trace() - s.trace()).abs() < 1e-14);
    }
}
