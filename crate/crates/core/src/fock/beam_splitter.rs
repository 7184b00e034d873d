use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::direction::normalize_coefficients;
use super::state::{Component, TwoModeState};
use crate::error::Result;

/// Eigenvectors and (exact, integer) eigenvalues of the real tridiagonal
/// generator of mode rotations inside the `N`-photon block.
struct RotationBasis {
    vectors: DMatrix<f64>,
    values: Vec<f64>,
}

fn rotation_basis(n: usize) -> Arc<RotationBasis> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<RotationBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.read().unwrap().get(&n) {
        return b.clone();
    }
    let mut gen = DMatrix::<f64>::zeros(n + 1, n + 1);
    for m in 0..n {
        let x = (((m + 1) * (n - m)) as f64).sqrt();
        gen[(m + 1, m)] = x;
        gen[(m, m + 1)] = x;
    }
    let eig = gen.symmetric_eigen();
    // spectrum is {-N, -N+2, ..., N}
    let values = eig
        .eigenvalues
        .iter()
        .map(|&l| 2.0 * ((l + n as f64) / 2.0).round() - n as f64)
        .collect();
    let basis = Arc::new(RotationBasis {
        vectors: eig.eigenvectors,
        values,
    });
    cache.write().unwrap().insert(n, basis.clone());
    basis
}

/// Action of the splitter `(T, R)` on each fixed-`N` block.
///
/// Creation operators map as `a+ -> T a+ - R* b+`, `b+ -> R a+ + T* b+`. The
/// mode matrix is factored as `diag(e^{ia}, e^{-ia}) rot(theta/2)
/// diag(e^{ib}, e^{-ib})`, and the rotation is applied in the eigenbasis of its
/// generator, which avoids the cancellation of alternating binomial sums at
/// large `N`.
pub(crate) struct BlockTransform {
    t: C64,
    r: C64,
    half_theta: f64,
    alpha: f64,
    beta: f64,
}

impl BlockTransform {
    pub fn new(t: C64, r: C64) -> Result<Self> {
        let (t, r) = normalize_coefficients(t, r)?;
        let (c, s) = (t.norm(), r.norm());
        let (pt, pr) = (t.arg(), r.arg());
        Ok(Self {
            t,
            r,
            half_theta: s.atan2(c),
            alpha: 0.5 * (pt + pr),
            beta: 0.5 * (pt - pr),
        })
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let n = v.len() - 1;
        if v.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
            return v.clone();
        }
        if self.r == C64::new(0.0, 0.0) {
            let tc = self.t.conj();
            return DVector::from_fn(n + 1, |m, _| {
                self.t.powu(m as u32) * tc.powu((n - m) as u32) * v[m]
            });
        }
        if self.t == C64::new(0.0, 0.0) {
            let mrc = -self.r.conj();
            let mut out = DVector::zeros(n + 1);
            for m in 0..=n {
                out[n - m] = mrc.powu(m as u32) * self.r.powu((n - m) as u32) * v[m];
            }
            return out;
        }
        let basis = rotation_basis(n);
        let i_pow = |m: usize| match m % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        let phase = |x: f64, m: usize| C64::from_polar(1.0, x * (2.0 * m as f64 - n as f64));
        // right diagonal: i^m e^{i beta (2m - N)}
        let w = DVector::from_fn(n + 1, |m, _| i_pow(m) * phase(self.beta, m) * v[m]);
        let vt = &basis.vectors;
        let mut coef = DVector::<C64>::zeros(n + 1);
        for k in 0..=n {
            let col = vt.column(k);
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..=n {
                acc += w[m] * col[m];
            }
            coef[k] = acc * C64::from_polar(1.0, self.half_theta * basis.values[k]);
        }
        let mut out = DVector::<C64>::zeros(n + 1);
        for k in 0..=n {
            let col = vt.column(k);
            let ck = coef[k];
            for m in 0..=n {
                out[m] += ck * col[m];
            }
        }
        // left diagonal: (-i)^m e^{i alpha (2m - N)}
        for m in 0..=n {
            out[m] *= i_pow(m).conj() * phase(self.alpha, m);
        }
        out
    }

    pub fn apply_component(&self, c: &Component) -> Component {
        let blocks = c
            .blocks
            .par_iter()
            .map(|b| self.apply(b))
            .collect();
        Component {
            weight: c.weight,
            blocks,
        }
    }
}

/// Output state of the beam splitter with coefficients `(T, R)`.
///
/// The transform is unitary on every total-photon-number block, so the trace
/// and the distribution of `na + nb` are preserved exactly up to rounding.
/// The output carries `cutoff = max_total` because all photons of a block may
/// leave through the same port.
pub fn beam_splitter(state: &TwoModeState, t: C64, r: C64) -> Result<TwoModeState> {
    let bt = BlockTransform::new(t, r)?;
    let comps = state
        .components()
        .iter()
        .map(|c| bt.apply_component(c))
        .collect();
    Ok(state.with_components(state.max_total(), comps))
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;
    use crate::special::binomial;

    /// Direct expansion of `(T a+ - R* b+)^m (R a+ + T* b+)^(N-m)`.
    pub fn binomial_block(t: C64, r: C64, v: &DVector<C64>) -> DVector<C64> {
        let n = v.len() - 1;
        let fact = |k: usize| (1..=k).map(|x| x as f64).product::<f64>();
        let mut out = DVector::<C64>::zeros(n + 1);
        for m in 0..=n {
            let nb = n - m;
            for j in 0..=m {
                for k in 0..=nb {
                    let p = j + k;
                    let coef = t.powu(j as u32)
                        * (-r.conj()).powu((m - j) as u32)
                        * r.powu(k as u32)
                        * t.conj().powu((nb - k) as u32)
                        * binomial(m, j)
                        * binomial(nb, k);
                    let norm = (fact(p) * fact(n - p) / (fact(m) * fact(nb))).sqrt();
                    out[p] += coef * norm * v[m];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::binomial_block;
    use super::*;
    use crate::fock::spec::{coherent_amplitudes, make_state, StateSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unitary(rng: &mut ChaCha8Rng) -> (C64, C64) {
        let th: f64 = rng.random::<f64>() * std::f64::consts::PI;
        let p1: f64 = rng.random::<f64>() * 6.3;
        let p2: f64 = rng.random::<f64>() * 6.3;
        (
            C64::from_polar((th / 2.0).cos(), p1),
            C64::from_polar((th / 2.0).sin(), p2),
        )
    }

    #[test]
    fn matches_binomial_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (t, r) = random_unitary(&mut rng);
            let bt = BlockTransform::new(t, r).unwrap();
            for n in 0..12 {
                let v = DVector::from_fn(n + 1, |_, _| {
                    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                let a = bt.apply(&v);
                let b = binomial_block(t, r, &v);
                assert!((a - b).norm() < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn fast_paths_match_binomial_expansion() {
        let v = DVector::from_fn(6, |m, _| C64::new(m as f64 + 1.0, 0.5));
        for (t, r) in [
            (C64::from_polar(1.0, 0.3), C64::new(0.0, 0.0)),
            (C64::new(0.0, 0.0), C64::from_polar(1.0, -1.2)),
        ] {
            let a = BlockTransform::new(t, r).unwrap().apply(&v);
            assert!((a - binomial_block(t, r, &v)).norm() < 1e-12);
        }
    }

    #[test]
    fn hom_output() {
        let s = make_state(&StateSpec::HomInput, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let out = beam_splitter(&s, C64::new(h, 0.0), C64::new(h, 0.0)).unwrap();
        let c = &out.components()[0];
        assert!((c.amplitude(2, 0) - C64::new(h, 0.0)).norm() < 1e-14);
        assert!(c.amplitude(1, 1).norm() < 1e-14);
        assert!((c.amplitude(0, 2) + C64::new(h, 0.0)).norm() < 1e-14);
        let id = beam_splitter(&s, C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert_eq!(id.components()[0].amplitude(1, 1), C64::new(1.0, 0.0));
    }

    #[test]
    fn coherent_maps_to_coherent() {
        let (a, b) = (C64::new(0.8, -0.3), C64::new(-0.2, 0.6));
        let t = C64::from_polar(0.6, 0.4);
        let r = C64::from_polar(0.8, -1.0);
        let s = make_state(&StateSpec::coherent(a, b), 30).unwrap();
        let out = beam_splitter(&s, t, r).unwrap();
        let (ae, be) = (t * a + r * b, t.conj() * b - r.conj() * a);
        let ea = coherent_amplitudes(ae, 20);
        let eb = coherent_amplitudes(be, 20);
        let c = &out.components()[0];
        for na in 0..20 {
            for nb in 0..20 {
                assert!((c.amplitude(na, nb) - ea[na] * eb[nb]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn large_blocks_stay_unitary() {
        let bt = BlockTransform::new(C64::from_polar(0.6, 1.0), C64::from_polar(0.8, 2.0)).unwrap();
        let n = 120;
        let v = DVector::from_fn(n + 1, |m, _| C64::new(((m * 7) % 11) as f64, 1.0));
        let out = bt.apply(&v);
        assert!((out.norm() - v.norm()).abs() < 1e-11 * v.norm());
        let back = BlockTransform::new(C64::from_polar(0.6, -1.0), -C64::from_polar(0.8, 2.0))
            .unwrap()
            .apply(&out);
        assert!((back - &v).norm() < 1e-10 * v.norm());
    }
}
