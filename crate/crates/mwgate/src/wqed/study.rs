//! Collimated-limit estimates of the two-photon nonlinearity.
//!
//! Coincident photons cannot be prepared on a finite grid, so the
//! collimated limit is approached with flat-top pulses whose plateau is many
//! two-photon correlation lengths long. Inside the plateau the scattered
//! state approaches the plane-wave result and the coincident phase converges
//! as the plateau grows.

use super::analysis::{
    anti_diagonal, excess_reflection, extract_nonlinear_correction, extrapolate_collimated, reflected_density,
    window_overlap_error, window_phase_error, AntiDiagonal, Extrapolation, NonlinearCorrection,
};
use super::engine::{evolve_single_photon, evolve_two_photon, ProductState, Pulse, PulseShape};
use super::lattice::LatticeModel;
use crate::error::{Error, Result};

/// Pulse and analysis settings for [`study_gamma`].
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    /// Plateau lengths in units of the correlation length.
    pub plateau_multiples: Vec<f64>,
    /// Shortest plateau in bins.
    pub min_plateau: usize,
    /// Width of the pulse flanks in units of `1/Γ`.
    pub edge_over_gamma: f64,
    /// Integration half-widths `x_pulse` for the error estimates, in units
    /// of the correlation length.
    pub window_multiples: Vec<f64>,
    /// Length of the reported correction profile in correlation lengths.
    pub profile_multiple: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            plateau_multiples: vec![4.0, 8.0, 16.0],
            min_plateau: 64,
            edge_over_gamma: 2.0,
            window_multiples: vec![0.25, 0.5, 1.0, 2.0],
            profile_multiple: 4.0,
        }
    }
}

/// Error measures over one integration window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowErrors {
    /// Window half-width in bins.
    pub x_pulse: usize,
    pub overlap: f64,
    pub phase: f64,
}

/// Nonlinear scattering summary for one coupling ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaStudy {
    pub gamma_ratio: f64,
    pub detuning_over_gamma: f64,
    /// Decay length of the slowest two-photon correlation, in bins.
    pub correlation_bins: f64,
    pub plateaus: Vec<usize>,
    /// Coincident nonlinear phase for each plateau.
    pub phases: Vec<f64>,
    pub extrapolation: Extrapolation,
    /// Excess reflection of the longest pulse.
    pub excess_reflection: f64,
    /// Doubly reflected density of the longest pulse.
    pub reflected: Vec<(i64, f64)>,
    /// Correction profile of the longest pulse.
    pub correction: NonlinearCorrection,
    pub slice: AntiDiagonal,
    /// Overlap and phase errors of the longest pulse, by increasing window.
    pub errors: Vec<WindowErrors>,
    /// Largest norm drift among the nonlinear runs.
    pub max_norm_drift: f64,
}

/// Bins over which the slowest collective qubit mode decays, `4/(γΓ)`.
pub fn correlation_bins(model: &LatticeModel) -> f64 {
    4.0 / (model.gamma_ratio * model.gamma_dt)
}

/// Runs hard-core and linear scattering for a sequence of plateau lengths
/// and extracts the collimated nonlinear phase and reflection. The errors
/// compare the longest pulse with its linear counterpart carrying the
/// coincident phase, integrated over windows `|Δx| ≤ x_pulse`.
pub fn study_gamma(model: &LatticeModel, cfg: &StudyConfig) -> Result<GammaStudy> {
    if !(model.gamma_ratio > 0.0) {
        return Err(Error::InvalidParameter("the nonlinearity study needs a positive coupling ratio".into()));
    }
    if cfg.plateau_multiples.is_empty() {
        return Err(Error::InvalidArgument("no plateau lengths requested".into()));
    }
    let hard = model.with_hardcore(true);
    let ell = correlation_bins(model);
    let edge = (cfg.edge_over_gamma / model.gamma_dt).max(1.0);
    let mut plateaus: Vec<usize> =
        cfg.plateau_multiples.iter().map(|k| ((k * ell).round() as usize).max(cfg.min_plateau)).collect();
    plateaus.sort_unstable();
    plateaus.dedup();

    let mut phases = Vec::with_capacity(plateaus.len());
    let mut max_norm_drift: f64 = 0.0;
    let mut last = None;
    for (k, &plateau) in plateaus.iter().enumerate() {
        let pulse = Pulse::with_default_tail(PulseShape::FlatTop { plateau, edge }, &hard);
        let nl = evolve_two_photon(&hard, &pulse)?;
        max_norm_drift = max_norm_drift.max((nl.norm() - nl.initial_norm()).abs());
        let lin = ProductState { single: evolve_single_photon(&hard, &pulse)? };
        if k + 1 < plateaus.len() {
            phases.push(extract_nonlinear_correction(&nl, &lin, 0)?.nonlinear_phase);
            continue;
        }
        let half = plateau / 2;
        let profile = ((cfg.profile_multiple * ell).round() as usize).min(half);
        let correction = extract_nonlinear_correction(&nl, &lin, profile)?;
        phases.push(correction.nonlinear_phase);
        let windows: Vec<usize> =
            cfg.window_multiples.iter().map(|m| ((m * ell).round() as usize).clamp(1, half)).collect();
        let slice = anti_diagonal(&nl, &lin, profile)?;
        let wide = anti_diagonal(&nl, &lin, windows.iter().copied().max().unwrap_or(0))?;
        let errors = windows
            .iter()
            .map(|&x| {
                Ok(WindowErrors {
                    x_pulse: x,
                    overlap: window_overlap_error(&wide, correction.nonlinear_phase, x)?,
                    phase: window_phase_error(&wide, correction.nonlinear_phase, x)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        last = Some((excess_reflection(&nl, &lin)?, reflected_density(&nl, profile)?, correction, slice, errors));
    }
    let (excess_reflection, reflected, correction, slice, errors) = last.expect("at least one plateau");
    let widths: Vec<f64> = plateaus.iter().map(|&p| p as f64).collect();
    let extrapolation = if widths.len() >= 2 {
        extrapolate_collimated(&widths, &phases)?
    } else {
        Extrapolation { limit: phases[0], slope: 0.0 }
    };
    Ok(GammaStudy {
        gamma_ratio: model.gamma_ratio,
        detuning_over_gamma: model.detuning_over_gamma,
        correlation_bins: ell,
        plateaus,
        phases,
        extrapolation,
        excess_reflection,
        reflected,
        correction,
        slice,
        errors,
        max_norm_drift,
    })
}
