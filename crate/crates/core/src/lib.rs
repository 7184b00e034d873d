//! Essential quantum correlations of two-mode light.
//!
//! States live on a truncated two-mode Fock basis ([`TwoModeState`]). An
//! interferometer setting ([`MeasurementDirection`]) turns a state into joint
//! photon statistics, from which the essential moment-generating function
//! ([`mgf()`]) and the nonclassicality criteria follow. The [`detector`]
//! module models click-counting measurements and [`reconstruct`] inverts the
//! MGF to a phase-space density over the Stokes vector.

mod complex_json;
pub mod detector;
pub mod diagnostics;
pub mod error;
pub mod fock;
pub mod mgf;
pub mod nonclassicality;
pub mod reconstruct;
pub mod special;
pub mod tolerance;

pub use diagnostics::{Diagnosed, Warning};
pub use error::{Error, Result};
pub use fock::{
    beam_splitter, direction_to_beamsplitter, factorial_moment, joint_photon_distribution,
    make_state, power_expectation, stokes_mean, CoherentComponent, JointPhotonDistribution,
    MeasurementDirection, StateRequest, StateSpec, StokesVector, TwoModeState,
};
pub use mgf::{
    char_fn, char_fn_damped, find_node, husimi_q, mgf, mgf_closed_form, mgf_from_distribution,
    mgf_via_husimi_quadrature, surface_map, MgfQuery, QuadratureConfig, SurfaceSample,
};
pub use num_complex::Complex64 as C64;
pub use tolerance::Tolerances;
pub use detector::{
    accessible_region, click_distribution, click_moment_to_mgf_point, estimate_mgf_from_samples,
    moments_from_clicks, sample_clicks, AccessibleRegion, ClickDetectorConfig, ClickDistribution,
    ClickSampleSet, MomentEstimate,
};
pub use nonclassicality::{
    cauchy_schwarz_violation, char_fn_criterion, cross_correlation_det, matrix_verdict,
    mgf_matrix, second_order_det, sylvester_minors, variance_criteria, CriterionReport,
    MgfMatrixSpec, MgfPoint, Verdict,
};
pub use reconstruct::{
    classicality_check, invert_to_pess, l1_distance, mgf_imaginary_grid, mgf_imaginary_grid_state,
    pess_mc_oracle, Axis, CoherentEnsemble, Grid3, MgfGrid, PessGrid, Window,
};
