//! Two-mode states on a truncated Fock basis, beam splitters and photon
//! statistics.

mod beam_splitter;
mod direction;
mod spec;
mod state;
mod stats;

pub use beam_splitter::beam_splitter;
pub use direction::{direction_from_coefficients, direction_to_beamsplitter, MeasurementDirection};
pub use spec::{coherent_amplitudes, make_state, CoherentComponent, StateRequest, StateSpec};
pub use state::{label_index, TwoModeState};
pub use stats::{
    factorial_moment, joint_photon_distribution, power_expectation, stokes_mean,
    JointPhotonDistribution, StokesVector,
};
