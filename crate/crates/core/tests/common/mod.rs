//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use essq::{ClickDetectorConfig, MeasurementDirection, TwoModeState, C64};

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn choose(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Output amplitudes `<m, N-m| U |na, N-na>` of the splitter
/// `a+ -> T a+ - R* b+`, `b+ -> R a+ + T* b+`, by expanding the polynomial.
pub fn splitter_block(t: C64, r: C64, n: usize) -> Vec<Vec<C64>> {
    let mut u = vec![vec![C64::new(0.0, 0.0); n + 1]; n + 1];
    for na in 0..=n {
        let nb = n - na;
        // coefficient of x^m y^(n-m) in (T x - R* y)^na (R x + T* y)^nb
        let mut poly = vec![C64::new(0.0, 0.0); n + 1];
        for i in 0..=na {
            let ci = choose(na, i) * t.powu(i as u32) * (-r.conj()).powu((na - i) as u32);
            for j in 0..=nb {
                let cj = choose(nb, j) * r.powu(j as u32) * t.conj().powu((nb - j) as u32);
                poly[i + j] += ci * cj;
            }
        }
        let norm = 1.0 / (factorial(na) * factorial(nb)).sqrt();
        for (m, c) in poly.iter().enumerate() {
            u[m][na] = c * norm * (factorial(m) * factorial(n - m)).sqrt();
        }
    }
    u
}

/// Joint photon-number distribution behind the splitter, from the density
/// matrix elements of the state.
pub fn photon_distribution(state: &TwoModeState, dir: &MeasurementDirection) -> Vec<Vec<f64>> {
    let c = state.cutoff();
    let top = 2 * c;
    let mut p = vec![vec![0.0; top + 1]; top + 1];
    for n in 0..=top {
        let u = splitter_block(dir.T(), dir.R(), n);
        let inputs: Vec<usize> = (0..=n).filter(|&na| na <= c && n - na <= c).collect();
        for m in 0..=n {
            let mut acc = C64::new(0.0, 0.0);
            for &i in &inputs {
                for &j in &inputs {
                    acc += u[m][i] * state.element((i, n - i), (j, n - j)) * u[m][j].conj();
                }
            }
            p[m][n - m] = acc.re;
        }
    }
    p
}

/// `E[za^na zb^nb]` over a distribution table.
pub fn power_sum(p: &[Vec<f64>], za: f64, zb: f64) -> f64 {
    let mut s = 0.0;
    for (na, row) in p.iter().enumerate() {
        for (nb, v) in row.iter().enumerate() {
            s += v * za.powi(na as i32) * zb.powi(nb as i32);
        }
    }
    s
}

/// Click-number distribution of one array for `n` incident photons: every
/// photon is registered with probability `eps * eta` by a uniformly chosen
/// APD, then every silent APD fires from a dark count with probability
/// `1 - exp(-nu)`.
pub fn apd_clicks(cfg: &ClickDetectorConfig, n: usize) -> Vec<f64> {
    let d = cfg.d;
    let p_det = cfg.eps * cfg.eta;
    let mut occ = vec![0.0; d + 1];
    occ[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; d + 1];
        for (k, w) in occ.iter().enumerate() {
            next[k] += w * (1.0 - p_det);
            next[k] += w * p_det * k as f64 / d as f64;
            if k < d {
                next[k + 1] += w * p_det * (d - k) as f64 / d as f64;
            }
        }
        occ = next;
    }
    let dark = 1.0 - (-cfg.nu).exp();
    let mut out = vec![0.0; d + 1];
    for (k, w) in occ.iter().enumerate() {
        let free = d - k;
        for extra in 0..=free {
            out[k + extra] +=
                w * choose(free, extra) * dark.powi(extra as i32) * (1.0 - dark).powi((free - extra) as i32);
        }
    }
    out
}

/// Joint click table from a photon distribution.
pub fn click_table(p: &[Vec<f64>], a: &ClickDetectorConfig, b: &ClickDetectorConfig) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; b.d + 1]; a.d + 1];
    for (na, row) in p.iter().enumerate() {
        let qa = apd_clicks(a, na);
        for (nb, v) in row.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            let qb = apd_clicks(b, nb);
            for i in 0..=a.d {
                for j in 0..=b.d {
                    c[i][j] += v * qa[i] * qb[j];
                }
            }
        }
    }
    c
}
