//! Inversion of the essential MGF on the imaginary axis to a phase-space
//! density over the Stokes vector.

mod ensemble;
mod grid;
mod io;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnosed, Warning};
use crate::error::{Error, Result};
use crate::fock::TwoModeState;
use crate::mgf::char_fn_damped;
use crate::tolerance::Tolerances;

pub use ensemble::{mgf_imaginary_grid, pess_mc_oracle, stokes_of, CoherentEnsemble, MgfGrid};
pub use grid::{Axis, Grid3};

/// Taper applied to the wave-number data before inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Raised cosine `prod_axes (1 + cos(k spacing)) / 2`, applied as the
    /// equivalent nonnegative kernel `[1/4, 1/2, 1/4]` per axis after the
    /// factor `exp(tau |S|)`, which keeps point masses normalized.
    #[default]
    Hann,
    /// No taper; only the unpaired Nyquist planes are dropped.
    None,
}

/// How a [`PessGrid`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum PessSource {
    Inversion {
        window: Window,
        /// The exact distribution is singular; values are a smoothed stand-in.
        band_limited: bool,
    },
    Histogram {
        samples: u64,
        /// Fraction of samples outside the grid.
        outside_fraction: f64,
    },
}

/// Essential phase-space density sampled on a Stokes grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PessGrid {
    grid: Grid3,
    #[serde(skip)]
    values: Vec<f64>,
    tau_used: f64,
    source: PessSource,
}

impl PessGrid {
    pub fn new(grid: Grid3, values: Vec<f64>, tau_used: f64, source: PessSource) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            tau_used,
            source,
        })
    }

    pub(crate) fn from_histogram(grid: Grid3, values: Vec<f64>, outside_fraction: f64, samples: u64) -> Self {
        Self {
            grid,
            values,
            tau_used: 0.0,
            source: PessSource::Histogram {
                samples,
                outside_fraction,
            },
        }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tau_used(&self) -> f64 {
        self.tau_used
    }

    pub fn source(&self) -> &PessSource {
        &self.source
    }

    pub fn at(&self, i: [usize; 3]) -> f64 {
        self.values[self.grid.index(i)]
    }

    /// `sum values * cell volume`.
    pub fn riemann_sum(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index and position of the largest value.
    pub fn argmax(&self) -> ([usize; 3], [f64; 3]) {
        let (flat, _) = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("grids are non-empty");
        let i = self.grid.unravel(flat);
        (i, self.grid.point(i))
    }

    /// Share of `sum |P|` sitting on the faces of the grid box.
    pub fn boundary_mass(&self) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.abs()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let edge: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(f, _)| self.grid.on_boundary(self.grid.unravel(*f)))
            .map(|(_, v)| v.abs())
            .sum();
        edge / total
    }

    /// True when the Riemann sum is one within `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.riemann_sum() - 1.0).abs() <= tol
    }
}

/// Three-dimensional forward DFT in place, row-major with the last axis
/// fastest.
fn fft3(data: &mut [C64], shape: [usize; 3]) {
    let mut planner = FftPlanner::<f64>::new();
    let strides = [shape[1] * shape[2], shape[2], 1];
    for axis in 0..3 {
        let n = shape[axis];
        let fft = planner.plan_fft_forward(n);
        let stride = strides[axis];
        let lines = data.len() / n;
        // gather every line along `axis`, transform, scatter back
        let starts: Vec<usize> = (0..data.len())
            .filter(|&f| (f / stride) % n == 0)
            .collect();
        debug_assert_eq!(starts.len(), lines);
        let mut buf: Vec<C64> = Vec::with_capacity(data.len());
        for &s in &starts {
            buf.extend((0..n).map(|i| data[s + i * stride]));
        }
        buf.par_chunks_mut(n).for_each(|line| fft.process(line));
        for (l, &s) in starts.iter().enumerate() {
            for i in 0..n {
                data[s + i * stride] = buf[l * n + i];
            }
        }
    }
}

/// Circular `[1/4, 1/2, 1/4]` smoothing along every axis.
fn smooth3(values: &mut [f64], shape: [usize; 3]) {
    let strides = [shape[1] * shape[2], shape[2], 1];
    let mut out = vec![0.0; values.len()];
    for axis in 0..3 {
        let (n, stride) = (shape[axis], strides[axis]);
        for (flat, o) in out.iter_mut().enumerate() {
            let i = (flat / stride) % n;
            let base = flat - i * stride;
            let prev = base + ((i + n - 1) % n) * stride;
            let next = base + ((i + 1) % n) * stride;
            *o = 0.5 * values[flat] + 0.25 * (values[prev] + values[next]);
        }
        values.copy_from_slice(&out);
    }
}

/// Inverse Fourier transform of `M(i k; tau)` times `exp(tau |S|)`.
///
/// The wave-number grid must be the one paired with `s_grid` (as produced
/// by [`mgf_imaginary_grid`] or [`mgf_imaginary_grid_state`]) and `tau` the
/// converging factor it was evaluated with. The result carries an
/// [`Warning::Aliasing`] warning when more than the configured share of the
/// mass lies on the grid faces, and [`Warning::BandLimited`] when the source
/// distribution is singular.
pub fn invert_to_pess(mgf: &MgfGrid, tau: f64, s_grid: &Grid3, window: Window) -> Result<Diagnosed<PessGrid>> {
    let tol = Tolerances::DEFAULT;
    s_grid.validate()?;
    if mgf.grid != *s_grid {
        return Err(Error::InvalidGrid(
            "wave-number data was not sampled on the grid paired with s_grid".into(),
        ));
    }
    if mgf.tau != tau {
        return Err(Error::Domain(format!(
            "data was evaluated with tau = {}, not {tau}",
            mgf.tau
        )));
    }
    if mgf.values.len() != s_grid.len() {
        return Err(Error::InvalidGrid("value count does not match the grid".into()));
    }
    let shape = s_grid.shape();
    let axes = s_grid.axes;
    // reorder to FFT index order (k >= 0 first) and fold in exp(-i k min)
    let mut data = vec![C64::new(0.0, 0.0); s_grid.len()];
    for (flat, value) in mgf.values.iter().enumerate() {
        let j = s_grid.unravel(flat);
        // the Nyquist planes have no partner at +n/2
        if j.contains(&0) {
            continue;
        }
        let k = s_grid.wave_vector(j);
        let phase = -(k[0] * axes[0].min + k[1] * axes[1].min + k[2] * axes[2].min);
        let target = [0, 1, 2].map(|a| (j[a] + axes[a].n / 2) % axes[a].n);
        data[s_grid.index(target)] = value * C64::from_polar(1.0, phase);
    }
    fft3(&mut data, shape);
    let norm: f64 = axes
        .iter()
        .map(|a| a.dk() / (2.0 * std::f64::consts::PI))
        .product();
    let peak = data.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let residue = data.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if peak > 0.0 && residue > tol.imaginary_residue * peak {
        return Err(Error::ImaginaryResidue(residue / peak));
    }
    let mut values: Vec<f64> = data
        .iter()
        .enumerate()
        .map(|(flat, c)| {
            let s = s_grid.point(s_grid.unravel(flat));
            let r = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
            c.re * norm * (tau * r).exp()
        })
        .collect();
    if window == Window::Hann {
        smooth3(&mut values, shape);
    }
    let pess = PessGrid::new(
        *s_grid,
        values,
        tau,
        PessSource::Inversion {
            window,
            band_limited: mgf.singular,
        },
    )?;
    let mut warnings = Vec::new();
    let boundary_mass = pess.boundary_mass();
    if boundary_mass > tol.boundary_mass {
        warnings.push(Warning::Aliasing { boundary_mass });
    }
    if mgf.singular {
        warnings.push(Warning::BandLimited);
    }
    Ok(Diagnosed {
        value: pess,
        warnings,
    })
}

/// `M(i k; tau)` of a Fock-space state on the wave numbers paired with
/// `grid`, by the photon-statistics route. Costs one beam-splitter transform
/// per grid point. The reconstruction of such states is always labeled
/// band-limited.
pub fn mgf_imaginary_grid_state(state: &TwoModeState, grid: &Grid3, tau: f64) -> Result<MgfGrid> {
    grid.validate()?;
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::Domain(format!("tau = {tau} must be >= 0")));
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map(|flat| char_fn_damped(state, grid.wave_vector(grid.unravel(flat)), tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(MgfGrid {
        grid: *grid,
        tau,
        values,
        singular: true,
    })
}

/// Minimum of the grid and whether it stays above `-tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalityReport {
    pub min_value: f64,
    pub essentially_classical: bool,
}

/// Essential classicality of a reconstructed density: nonnegative up to the
/// caller's tolerance, which must absorb band-limiting ringing (a few percent
/// of the peak for Hann-windowed inversions).
pub fn classicality_check(p: &PessGrid, tol: f64) -> ClassicalityReport {
    let min_value = p.min_value();
    ClassicalityReport {
        min_value,
        essentially_classical: min_value >= -tol,
    }
}

/// `sum |p/|p|_1 - q/|q|_1| * cell volume` with both grids rescaled to unit
/// Riemann sum.
pub fn l1_distance(p: &PessGrid, q: &PessGrid) -> Result<f64> {
    if p.grid != q.grid {
        return Err(Error::InvalidGrid("L1 distance needs a common grid".into()));
    }
    let (sp, sq) = (p.riemann_sum(), q.riemann_sum());
    if sp == 0.0 || sq == 0.0 {
        return Err(Error::InvalidGrid("cannot normalize an all-zero grid".into()));
    }
    Ok(p.values
        .iter()
        .zip(&q.values)
        .map(|(a, b)| (a / sp - b / sq).abs())
        .sum::<f64>()
        * p.grid.cell_volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_state, CoherentComponent, StateSpec};

    #[test]
    fn vacuum_is_a_smoothed_point() {
        let grid = Grid3::cube([0.0; 3], 4.0, 16).unwrap();
        let ens = CoherentEnsemble::from_spec(&StateSpec::Vacuum).unwrap();
        let tau = grid.default_tau();
        let m = mgf_imaginary_grid(&ens, &grid, tau).unwrap();
        let p = invert_to_pess(&m, tau, &grid, Window::Hann).unwrap();
        assert!(p.warnings.contains(&Warning::BandLimited));
        let p = p.value;
        let (_, at) = p.argmax();
        assert_eq!(at, [0.0; 3]);
        let dv = grid.cell_volume();
        assert!((p.at([8, 8, 8]) * dv - 0.125).abs() < 0.03);
        assert!((p.at([7, 8, 8]) * dv - 0.0625).abs() < 0.02);
        assert!(p.min_value() > -5e-3 * p.peak());
        assert!(classicality_check(&p, 0.02 * p.peak()).essentially_classical);
        assert!(p.is_normalized(1e-2));
        let fine = Grid3::cube([0.0; 3], 4.0, 64).unwrap();
        let tau = fine.default_tau();
        let m = mgf_imaginary_grid(&ens, &fine, tau).unwrap();
        let p = invert_to_pess(&m, tau, &fine, Window::Hann).unwrap().value;
        assert!(p.is_normalized(1e-2));
    }

    #[test]
    fn state_route_matches_ensemble_route() {
        let grid = Grid3::cube([0.0; 3], 3.0, 8).unwrap();
        let vac = make_state(&StateSpec::Vacuum, 0).unwrap();
        let m = mgf_imaginary_grid_state(&vac, &grid, 0.1).unwrap();
        assert!(m.values.iter().all(|v| (v - C64::new(1.0, 0.0)).norm() < 1e-15));
        let spec = StateSpec::coherent(C64::new(0.6, 0.2), C64::new(-0.3, 0.4));
        let s = make_state(&spec, 25).unwrap();
        let a = mgf_imaginary_grid_state(&s, &grid, 0.1).unwrap();
        let b = mgf_imaginary_grid(&CoherentEnsemble::from_spec(&spec).unwrap(), &grid, 0.1).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn two_point_mixture_has_two_peaks() {
        let grid = Grid3::cube([0.0; 3], 4.0, 16).unwrap();
        let half = CoherentComponent {
            weight: 0.5,
            alpha: C64::new(2f64.sqrt(), 0.0),
            beta: C64::default(),
        };
        let other = CoherentComponent {
            weight: 0.5,
            alpha: C64::default(),
            beta: C64::new(2f64.sqrt(), 0.0),
        };
        let ens = CoherentEnsemble::Finite {
            components: vec![half, other],
        };
        let tau = grid.default_tau();
        let m = mgf_imaginary_grid(&ens, &grid, tau).unwrap();
        let p = invert_to_pess(&m, tau, &grid, Window::Hann).unwrap().value;
        let up = p.at(grid.nearest([0.0, 0.0, 2.0]).unwrap());
        let down = p.at(grid.nearest([0.0, 0.0, -2.0]).unwrap());
        let origin = p.at(grid.nearest([0.0; 3]).unwrap());
        assert!((up - p.peak()).abs() < 1e-12 * p.peak());
        assert!((up - down).abs() < 0.01 * up);
        assert!(origin.abs() < 1e-2 * up);
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let grid = Grid3::cube([0.0; 3], 4.0, 8).unwrap();
        let other = Grid3::cube([0.0; 3], 5.0, 8).unwrap();
        let ens = CoherentEnsemble::from_spec(&StateSpec::Vacuum).unwrap();
        let m = mgf_imaginary_grid(&ens, &grid, 0.1).unwrap();
        assert!(invert_to_pess(&m, 0.1, &other, Window::Hann).is_err());
        assert!(invert_to_pess(&m, 0.2, &grid, Window::Hann).is_err());
    }

    #[test]
    fn non_hermitian_data_leaves_residue() {
        let grid = Grid3::cube([0.0; 3], 4.0, 8).unwrap();
        let mut values = vec![C64::new(1.0, 0.0); grid.len()];
        values[grid.index([5, 4, 4])] = C64::new(0.0, 1.0);
        let m = MgfGrid {
            grid,
            tau: 0.1,
            values,
            singular: false,
        };
        assert!(matches!(
            invert_to_pess(&m, 0.1, &grid, Window::Hann),
            Err(Error::ImaginaryResidue(_))
        ));
    }
}
