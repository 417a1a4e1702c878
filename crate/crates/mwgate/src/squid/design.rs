use super::{flux_from_inductance, SquidDevice};
use crate::error::{Error, Result};
use crate::scalar::Real;

const DEGENERATE_GUARD: f64 = 1e-12;

/// Side and middle inductances giving unit transmission with phase
/// `2φ + theta`.
///
/// The returned values may be negative, which no SQUID can realize;
/// [`design_phase_shifter`] reports such designs as infeasible.
pub fn design_inductances<T: Real>(theta: T, dev: &SquidDevice<T>) -> Result<(T, T)> {
    let two = T::lit(2.0);
    let half = theta / two;
    let s = half.sin();
    let two_phi = two * dev.phi_line;
    let cz = two * dev.cap * dev.omega * dev.z0;

    let den1 = cz * s - (half + two_phi).cos() + half.cos();
    let den2 = cz * ((theta + two_phi).sin() - two_phi.sin()) + two_phi.cos() - T::one();
    if den1.abs() < T::lit(DEGENERATE_GUARD) || den2.abs() < T::lit(DEGENERATE_GUARD) {
        return Err(Error::DegenerateDesign(format!("vanishing denominator at theta = {theta}")));
    }
    let l1 = two * dev.z0 * s / (dev.omega * den1);
    let l2 = T::lit(4.0) * dev.z0 * s * (half + two_phi).cos() / (dev.omega * den2);
    if !(l1.is_finite() && l2.is_finite()) {
        return Err(Error::DegenerateDesign(format!("non-finite inductance at theta = {theta}")));
    }
    Ok((l1, l2))
}

/// Whether a design can be realized with the given SQUIDs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible(String),
}

/// Inductances and flux biases realizing a target phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShifterDesign<T> {
    pub theta: T,
    pub l1: T,
    pub l2: T,
    /// Principal-branch side-SQUID flux in units of Φ0, when realizable.
    pub flux1: Option<T>,
    /// Principal-branch middle-SQUID flux in units of Φ0, when realizable.
    pub flux2: Option<T>,
    pub feasibility: Feasibility,
}

impl<T: Real> PhaseShifterDesign<T> {
    pub fn is_feasible(&self) -> bool {
        self.feasibility == Feasibility::Feasible
    }
}

/// Solves for inductances and maps them to flux biases. Never fails: any
/// obstruction is reported through [`PhaseShifterDesign::feasibility`].
pub fn design_phase_shifter<T: Real>(theta: T, dev: &SquidDevice<T>) -> PhaseShifterDesign<T> {
    let nan = T::nan();
    let (l1, l2) = match design_inductances(theta, dev) {
        Ok(pair) => pair,
        Err(e) => {
            return PhaseShifterDesign {
                theta,
                l1: nan,
                l2: nan,
                flux1: None,
                flux2: None,
                feasibility: Feasibility::Infeasible(e.to_string()),
            }
        }
    };
    let mut reasons = Vec::new();
    for (name, l) in [("l1", l1), ("l2", l2)] {
        if l < T::zero() {
            reasons.push(format!("{name} negative"));
        }
    }
    let flux1 = flux_from_inductance(dev.ic1, l1);
    let flux2 = flux_from_inductance(dev.ic2, l2);
    if reasons.is_empty() && (flux1.is_err() || flux2.is_err()) {
        reasons.push("L below Lmin".to_string());
    }
    let feasibility =
        if reasons.is_empty() { Feasibility::Feasible } else { Feasibility::Infeasible(reasons.join("; ")) };
    PhaseShifterDesign { theta, l1, l2, flux1: flux1.ok(), flux2: flux2.ok(), feasibility }
}
