use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid3;
use super::PessGrid;
use crate::error::{Error, Result};
use crate::fock::{CoherentComponent, StateSpec};

/// Classical mixture of two-mode coherent states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoherentEnsemble {
    /// Finitely many weighted points `(alpha, beta)`.
    Finite { components: Vec<CoherentComponent> },
    /// `(alpha, beta)` complex Gaussian around the mean with
    /// `E|alpha - alpha0|^2 = E|beta - beta0|^2 = variance`.
    Gaussian {
        #[serde(with = "crate::complex_json")]
        alpha: C64,
        #[serde(with = "crate::complex_json")]
        beta: C64,
        variance: f64,
    },
}

/// Stokes vector `(2 Re a*b, 2 Im a*b, |a|^2 - |b|^2)` of `|a, b>`.
pub fn stokes_of(alpha: C64, beta: C64) -> [f64; 3] {
    let ab = alpha.conj() * beta;
    [2.0 * ab.re, 2.0 * ab.im, alpha.norm_sqr() - beta.norm_sqr()]
}

fn norm3(s: [f64; 3]) -> f64 {
    (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt()
}

impl CoherentEnsemble {
    /// The classical state specs as finite ensembles.
    pub fn from_spec(spec: &StateSpec) -> Result<Self> {
        spec.validate()?;
        let point = |alpha, beta| CoherentComponent {
            weight: 1.0,
            alpha,
            beta,
        };
        match spec {
            StateSpec::Vacuum => Ok(Self::Finite {
                components: vec![point(C64::default(), C64::default())],
            }),
            StateSpec::Coherent { alpha, beta } => Ok(Self::Finite {
                components: vec![point(*alpha, *beta)],
            }),
            StateSpec::Mixture { components } => Ok(Self::Finite {
                components: components.clone(),
            }),
            _ => Err(Error::InvalidState(
                "only vacuum, coherent states and their mixtures are coherent ensembles".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Finite { components } => StateSpec::Mixture {
                components: components.clone(),
            }
            .validate(),
            Self::Gaussian {
                alpha,
                beta,
                variance,
            } => {
                let finite = |c: &C64| c.re.is_finite() && c.im.is_finite();
                if !(finite(alpha) && finite(beta)) {
                    return Err(Error::InvalidState("non-finite mean".into()));
                }
                if !(variance.is_finite() && *variance >= 0.0) {
                    return Err(Error::InvalidState(format!("variance {variance} must be >= 0")));
                }
                Ok(())
            }
        }
    }

    /// True when `|S|` is unbounded over the ensemble.
    pub fn unbounded(&self) -> bool {
        matches!(self, Self::Gaussian { variance, .. } if *variance > 0.0)
    }

    /// True when the distribution of `S` has no density (point masses).
    pub fn singular(&self) -> bool {
        !self.unbounded()
    }

    /// `E[exp(i k.S - tau |S|)]`.
    pub fn mgf_imaginary(&self, k: [f64; 3], tau: f64) -> C64 {
        match self {
            Self::Finite { components } => components
                .iter()
                .map(|c| {
                    let s = stokes_of(c.alpha, c.beta);
                    let ks = k[0] * s[0] + k[1] * s[1] + k[2] * s[2];
                    c.weight * C64::new(-tau * norm3(s), ks).exp()
                })
                .sum(),
            Self::Gaussian {
                alpha,
                beta,
                variance,
            } => gaussian_mgf(*alpha, *beta, *variance, k, tau),
        }
    }

    /// Draws one Stokes vector.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        match self {
            Self::Finite { components } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for c in components {
                    acc += c.weight;
                    if u < acc {
                        return stokes_of(c.alpha, c.beta);
                    }
                }
                let last = components.last().expect("validated non-empty");
                stokes_of(last.alpha, last.beta)
            }
            Self::Gaussian {
                alpha,
                beta,
                variance,
            } => {
                let s = (0.5 * variance).sqrt();
                let mut draw = || {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C64::new(re, im) * s
                };
                let a = alpha + draw();
                let b = beta + draw();
                stokes_of(a, b)
            }
        }
    }
}

/// For `v ~ CN(mu, s2 I)` and `A = i k.sigma - tau I`,
/// `E[exp(v+ A v)] = exp(mu+ A (I - s2 A)^-1 mu) / det(I - s2 A)`.
fn gaussian_mgf(alpha: C64, beta: C64, s2: f64, k: [f64; 3], tau: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let a = Matrix2::new(
        i * k[2] - tau,
        i * C64::new(k[0], -k[1]),
        i * C64::new(k[0], k[1]),
        -i * k[2] - tau,
    );
    let m = Matrix2::identity() - a * C64::new(s2, 0.0);
    let det = m.determinant();
    let inv = m.try_inverse().expect("I - s2 A is invertible for tau >= 0");
    let mu = nalgebra::Vector2::new(alpha, beta);
    let q = (mu.adjoint() * a * inv * mu)[(0, 0)];
    q.exp() / det
}

/// `M(i k; tau)` sampled on the wave numbers paired with `grid`.
#[derive(Debug, Clone)]
pub struct MgfGrid {
    pub grid: Grid3,
    pub tau: f64,
    /// Values in the order of [`Grid3::index`], wave-number index `j`
    /// standing for `k = (j - n/2) dk`.
    pub values: Vec<C64>,
    /// The source distribution has no density; its reconstruction is only a
    /// band-limited stand-in.
    pub singular: bool,
}

pub(crate) fn evaluate_grid<F>(grid: &Grid3, f: F) -> Vec<C64>
where
    F: Fn([f64; 3]) -> C64 + Sync,
{
    (0..grid.len())
        .into_par_iter()
        .map(|flat| f(grid.wave_vector(grid.unravel(flat))))
        .collect()
}

/// Characteristic function with converging factor for a coherent ensemble.
pub fn mgf_imaginary_grid(ensemble: &CoherentEnsemble, grid: &Grid3, tau: f64) -> Result<MgfGrid> {
    ensemble.validate()?;
    grid.validate()?;
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::Domain(format!("tau = {tau} must be >= 0")));
    }
    if tau == 0.0 && ensemble.unbounded() {
        return Err(Error::Domain(
            "tau > 0 is required for ensembles with unbounded |S|".into(),
        ));
    }
    Ok(MgfGrid {
        grid: *grid,
        tau,
        values: evaluate_grid(grid, |k| ensemble.mgf_imaginary(k, tau)),
        singular: ensemble.singular(),
    })
}

const CHUNK: u64 = 65_536;

/// Normalized histogram of `n` Stokes vectors drawn from the ensemble, binned
/// to the nearest grid point.
///
/// Samples are drawn in chunks of 65536; chunk `c` uses ChaCha8 seeded with
/// `seed` on stream `c`, so the result does not depend on the thread count.
/// Samples outside the grid are dropped and their fraction reported.
pub fn pess_mc_oracle(ensemble: &CoherentEnsemble, grid: &Grid3, n: u64, seed: u64) -> Result<PessGrid> {
    ensemble.validate()?;
    grid.validate()?;
    if n < 10_000 {
        return Err(Error::Domain(format!("at least 10^4 samples required, got {n}")));
    }
    let chunks = n.div_ceil(CHUNK);
    let len = grid.len();
    let (counts, inside) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let m = CHUNK.min(n - c * CHUNK);
            let mut local = vec![0u64; len];
            let mut inside = 0u64;
            for _ in 0..m {
                if let Some(i) = grid.nearest(ensemble.sample(&mut rng)) {
                    local[grid.index(i)] += 1;
                    inside += 1;
                }
            }
            (local, inside)
        })
        .reduce(
            || (vec![0u64; len], 0u64),
            |(mut a, ia), (b, ib)| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                (a, ia + ib)
            },
        );
    if inside == 0 {
        return Err(Error::InvalidGrid("no sample fell inside the grid".into()));
    }
    let dv = grid.cell_volume();
    let values = counts
        .iter()
        .map(|&c| c as f64 / (inside as f64 * dv))
        .collect();
    Ok(PessGrid::from_histogram(
        *grid,
        values,
        1.0 - inside as f64 / n as f64,
        n,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_closed_form_matches_sampling() {
        let ens = CoherentEnsemble::Gaussian {
            alpha: C64::new(0.6, -0.2),
            beta: C64::new(0.1, 0.4),
            variance: 0.3,
        };
        let k = [0.4, -0.3, 0.7];
        let tau = 0.2;
        let exact = ens.mgf_imaginary(k, tau);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 400_000;
        let mut acc = C64::new(0.0, 0.0);
        for _ in 0..n {
            let s = ens.sample(&mut rng);
            let ks = k[0] * s[0] + k[1] * s[1] + k[2] * s[2];
            acc += C64::new(-tau * norm3(s), ks).exp();
        }
        acc /= n as f64;
        // each summand has modulus <= 1
        assert!((acc - exact).norm() < 5.0 / (n as f64).sqrt(), "{acc} vs {exact}");
    }

    #[test]
    fn zero_variance_gaussian_is_a_point() {
        let (a, b) = (C64::new(0.5, 0.3), C64::new(-0.7, 0.1));
        let g = CoherentEnsemble::Gaussian {
            alpha: a,
            beta: b,
            variance: 0.0,
        };
        let p = CoherentEnsemble::from_spec(&StateSpec::coherent(a, b)).unwrap();
        let k = [1.1, 0.2, -0.8];
        assert!((g.mgf_imaginary(k, 0.3) - p.mgf_imaginary(k, 0.3)).norm() < 1e-14);
    }

    #[test]
    fn grid_is_hermitian() {
        let ens = CoherentEnsemble::Gaussian {
            alpha: C64::new(1.0, 0.0),
            beta: C64::new(0.0, 0.5),
            variance: 0.4,
        };
        let grid = Grid3::cube([0.0; 3], 6.0, 8).unwrap();
        let m = mgf_imaginary_grid(&ens, &grid, 0.05).unwrap();
        for flat in 0..grid.len() {
            let j = grid.unravel(flat);
            if j.iter().any(|&x| x == 0) {
                continue;
            }
            let neg = grid.index(j.map(|x| 8 - x));
            assert!((m.values[flat] - m.values[neg].conj()).norm() < 1e-12);
        }
        assert!(mgf_imaginary_grid(&ens, &grid, 0.0).is_err());
    }

    #[test]
    fn oracle_point_masses() {
        let grid = Grid3::cube([0.0; 3], 4.0, 8).unwrap();
        let ens = CoherentEnsemble::from_spec(&StateSpec::coherent(C64::new(1.0, 0.0), C64::new(1.0, 0.0))).unwrap();
        let p = pess_mc_oracle(&ens, &grid, 10_000, 1).unwrap();
        let i = grid.index(grid.nearest([2.0, 0.0, 0.0]).unwrap());
        assert!((p.values()[i] * grid.cell_volume() - 1.0).abs() < 1e-15);
        // random phase, beta = 0: S = (0, 0, |alpha|^2) for every member
        let components = (0..16)
            .map(|j| CoherentComponent {
                weight: 1.0 / 16.0,
                alpha: C64::from_polar(1.5, j as f64 * 0.39),
                beta: C64::default(),
            })
            .collect();
        let ens = CoherentEnsemble::Finite { components };
        let p = pess_mc_oracle(&ens, &grid, 20_000, 2).unwrap();
        let i = grid.index(grid.nearest([0.0, 0.0, 2.25]).unwrap());
        assert!((p.values()[i] * grid.cell_volume() - 1.0).abs() < 1e-15);
        assert!(pess_mc_oracle(&ens, &grid, 10, 2).is_err());
    }

    #[test]
    fn oracle_is_seed_reproducible() {
        let ens = CoherentEnsemble::Gaussian {
            alpha: C64::new(1.0, 0.0),
            beta: C64::new(0.5, 0.0),
            variance: 0.5,
        };
        let grid = Grid3::cube([1.0, 0.0, 0.5], 5.0, 16).unwrap();
        let a = pess_mc_oracle(&ens, &grid, 200_000, 5).unwrap();
        let b = pess_mc_oracle(&ens, &grid, 200_000, 5).unwrap();
        assert_eq!(a.values(), b.values());
        assert!((a.riemann_sum() - 1.0).abs() < 1e-12);
    }
}
