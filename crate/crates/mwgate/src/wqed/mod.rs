//! Three qubits side-coupled to a waveguide at quarter-wavelength spacing.
//!
//! [`analytic`] holds the closed-form single-photon results. The remaining
//! modules simulate wavepackets on a time-bin grid: [`lattice`] builds the
//! discretized scatterer and calibrates it, [`engine`] evolves one or two
//! photons, [`analysis`] extracts the nonlinear correction and error
//! measures, and [`study`] drives the collimated-limit estimates.

pub mod analysis;
pub mod analytic;
pub mod engine;
pub mod lattice;
pub mod study;

pub use analysis::{
    anti_diagonal, excess_reflection, extract_nonlinear_correction, extrapolate_collimated, overlap_error,
    reflected_density, window_overlap_error, window_phase_error, AntiDiagonal, Extrapolation, NonlinearCorrection,
};
pub use analytic::{
    full_transmission_detuning, full_transmission_phase, single_photon_s21, transmission_band, FullTransmission,
    WqedParams,
};
pub use engine::{
    evolve_single_photon, evolve_two_photon, PairAmplitudes, ProductState, Pulse, PulseShape, SinglePhotonState,
    TwoPhotonState,
};
pub use lattice::{build_lattice_model, calibrate_coupling, Calibration, LatticeConfig, LatticeModel};
pub use study::{correlation_bins, study_gamma, GammaStudy, StudyConfig, WindowErrors};
