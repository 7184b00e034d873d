//! Numerical tolerances shared across the crate.
//!
//! Every threshold used by a validity check or a verdict lives here so that
//! tests and callers refer to one set of numbers.

/// Largest APD array supported by the alternating-sum click evaluation.
pub const MAX_APDS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max elementwise |rho - rho^dagger|.
    pub hermiticity: f64,
    /// Slack on trace(rho) and on sums of photon-number distributions.
    pub trace: f64,
    /// Smallest admissible eigenvalue of a density matrix.
    pub eigenvalue_floor: f64,
    /// |e| = 1 and |T|^2 + |R|^2 = 1 for stored directions.
    pub direction: f64,
    /// Accepted deviation of |T|^2 + |R|^2 from one on input.
    pub unitarity: f64,
    /// Leakage above which a truncation warning is attached.
    pub leakage_bound: f64,
    /// Leakage above which evaluations outside |z| <= 1 carry a warning.
    pub convergence_leakage: f64,
    /// Mixture weights must sum to one within this.
    pub mixture_weights: f64,
    /// Absolute threshold separating negativity from round-off in verdicts.
    pub verdict: f64,
    /// Matrices with larger anti-Hermitian parts are rejected.
    pub matrix_hermiticity: f64,
    /// Bisection stops once the bracket is narrower than this.
    pub root: f64,
    /// Number of uniform samples scanned for sign changes before bisection.
    pub root_prescan: usize,
    /// Most negative click probability tolerated before reporting an error.
    pub click_negative: f64,
    /// Sum of click probabilities must be one within this for sampling.
    pub click_sum: f64,
    /// Max imaginary residue after Fourier inversion, relative to the peak.
    pub imaginary_residue: f64,
    /// Default normalization slack of a band-limited reconstruction.
    pub normalization: f64,
    /// Fraction of |P| on the faces of a periodic grid that flags aliasing.
    pub boundary_mass: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-10,
        trace: 1e-10,
        eigenvalue_floor: -1e-9,
        direction: 1e-12,
        unitarity: 1e-10,
        leakage_bound: 1e-10,
        convergence_leakage: 1e-12,
        mixture_weights: 1e-12,
        verdict: 1e-9,
        matrix_hermiticity: 1e-8,
        root: 1e-10,
        root_prescan: 512,
        click_negative: 1e-10,
        click_sum: 1e-9,
        imaginary_residue: 1e-6,
        normalization: 1e-2,
        boundary_mass: 1e-3,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
