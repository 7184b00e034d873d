use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{MeasurementDirection, TwoModeState};

/// `e^{|a|^2 + |b|^2} pi^2 Q(a, b)`: the squared overlaps without the Gaussian.
fn overlap_sum(state: &TwoModeState, alpha: C64, beta: C64) -> f64 {
    let nmax = state.max_total();
    // u[n] = conj(x)^n / sqrt(n!)
    let powers = |x: C64| {
        let mut u = Vec::with_capacity(nmax + 1);
        let mut cur = C64::new(1.0, 0.0);
        u.push(cur);
        for n in 1..=nmax {
            cur *= x.conj() / (n as f64).sqrt();
            u.push(cur);
        }
        u
    };
    let (ua, ub) = (powers(alpha), powers(beta));
    state
        .components()
        .iter()
        .map(|c| {
            let mut acc = C64::new(0.0, 0.0);
            for (n, block) in c.blocks.iter().enumerate() {
                for (na, amp) in block.iter().enumerate() {
                    acc += amp * ua[na] * ub[n - na];
                }
            }
            c.weight * acc.norm_sqr()
        })
        .sum()
}

/// Husimi function `<a, b| rho |a, b> / pi^2`.
pub fn husimi_q(state: &TwoModeState, alpha: C64, beta: C64) -> f64 {
    let g = (-alpha.norm_sqr() - beta.norm_sqr()).exp();
    if g == 0.0 {
        return 0.0;
    }
    g * overlap_sum(state, alpha, beta) / (PI * PI)
}

/// Nodes and weights of the `n`-point Gauss-Laguerre rule for weight `e^{-x}`
/// on `[0, inf)`, from the eigen-decomposition of the Jacobi matrix.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = (2 * i + 1) as f64;
        if i + 1 < n {
            j[(i, i + 1)] = (i + 1) as f64;
            j[(i + 1, i)] = (i + 1) as f64;
        }
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Node counts for the Husimi quadrature. `None` picks counts that are exact
/// for the polynomial integrand of the truncated state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
    /// Accepted relative change when all node counts are raised by four.
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radial_nodes: None,
            angular_nodes: None,
            rel_tol: 1e-4,
        }
    }
}

fn quadrature(
    state: &TwoModeState,
    dir: &MeasurementDirection,
    la: f64,
    lb: f64,
    n_r: usize,
    n_ang: usize,
) -> f64 {
    let (x, w) = gauss_laguerre(n_r);
    let (t, r) = (dir.T(), dir.R());
    let phases: Vec<C64> = (0..n_ang)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n_ang as f64))
        .collect();
    let total: f64 = (0..n_r)
        .into_par_iter()
        .map(|i1| {
            let r1 = ((1.0 - la) * x[i1]).sqrt();
            let mut acc = 0.0;
            for i2 in 0..n_r {
                let r2 = ((1.0 - lb) * x[i2]).sqrt();
                let mut inner = 0.0;
                for p1 in &phases {
                    let ae = p1 * r1;
                    for p2 in &phases {
                        let be = p2 * r2;
                        let alpha = t.conj() * ae - r * be;
                        let beta = r.conj() * ae + t * be;
                        inner += overlap_sum(state, alpha, beta);
                    }
                }
                acc += w[i2] * inner;
            }
            w[i1] * acc
        })
        .sum();
    let ang = 2.0 * PI / n_ang as f64;
    0.25 * total * ang * ang / (PI * PI)
}

/// `M(t e; tau)` as a four-dimensional integral of the Husimi function
/// against the antinormally ordered kernel, evaluated in polar coordinates
/// of the output amplitudes.
///
/// After rescaling each radius by `1 - lambda` the kernel becomes `e^{-x}`
/// for both ports, so a Gauss-Laguerre rule in `x` and the trapezoid rule in
/// the phases are exact for truncated states once enough nodes are used. The
/// result is compared against a run with four more nodes per axis and
/// rejected if the two differ by more than `quad.rel_tol`.
///
/// Requires `tau -/+ t < 1`.
pub fn mgf_via_husimi_quadrature(
    state: &TwoModeState,
    dir: &MeasurementDirection,
    t: f64,
    tau: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let (la, lb) = (tau - t, tau + t);
    if !(la < 1.0 && lb < 1.0) || !t.is_finite() || !tau.is_finite() {
        return Err(Error::Domain(format!(
            "Husimi kernel needs tau -/+ t < 1 (got {la}, {lb})"
        )));
    }
    let n_r = quad.radial_nodes.unwrap_or(state.max_total() / 2 + 2);
    let n_ang = quad.angular_nodes.unwrap_or(state.max_total() + 2);
    let a = quadrature(state, dir, la, lb, n_r, n_ang);
    let b = quadrature(state, dir, la, lb, n_r + 4, n_ang + 4);
    if (a - b).abs() > quad.rel_tol * b.abs() + 1e-14 {
        return Err(Error::NotConverged(format!(
            "{a} with ({n_r}, {n_ang}) nodes vs {b} with ({}, {}) nodes",
            n_r + 4,
            n_ang + 4
        )));
    }
    Ok(b)
}
