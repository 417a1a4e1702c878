//! Three-SQUID tunable phase shifter.
//!
//! Each SQUID is a flux-tunable Josephson inductance shunted by a
//! capacitance, inserted in series with the line. Two identical side SQUIDs
//! flank a middle one, separated by line sections of electrical length `φ`.

mod closed_form;
mod curve;
mod design;
mod sweep;

pub use closed_form::{s21_closed_form, squid_chain, squid_chain_s_params};
pub use curve::{fit_line_phase, full_transmission_curve, CurvePoint, FluxWindow, PhaseFit};
pub use design::{design_inductances, design_phase_shifter, Feasibility, PhaseShifterDesign};
pub use sweep::{flux_sweep, AxisRange, FluxGrid, FluxSweep, SweepCell};

use crate::constants::FLUX_QUANTUM;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Distance of `|cos(π·flux)|` from zero below which the inductance is
/// considered divergent.
const HALF_FLUX_GUARD: f64 = 1e-12;

/// Electrical parameters of the three-SQUID phase shifter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquidDevice<T> {
    /// Critical current of each side SQUID in amperes.
    pub ic1: T,
    /// Critical current of the middle SQUID in amperes.
    pub ic2: T,
    /// Shunt capacitance of every SQUID in farads.
    pub cap: T,
    /// Line impedance in ohms.
    pub z0: T,
    /// Electrical length of each inter-SQUID line section in radians.
    pub phi_line: T,
    /// Drive angular frequency in rad/s.
    pub omega: T,
}

impl<T: Real> SquidDevice<T> {
    /// Builds a device, rejecting non-positive physical parameters.
    pub fn new(ic1: T, ic2: T, cap: T, z0: T, phi_line: T, omega: T) -> Result<Self> {
        let dev = Self { ic1, ic2, cap, z0, phi_line, omega };
        dev.validate()?;
        Ok(dev)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [("ic1", self.ic1), ("ic2", self.ic2), ("cap", self.cap), ("z0", self.z0), ("omega", self.omega)];
        for (name, v) in named {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !self.phi_line.is_finite() {
            return Err(Error::InvalidParameter(format!("phi_line must be finite, got {}", self.phi_line)));
        }
        Ok(())
    }

    /// Same device with a different line phase.
    #[must_use]
    pub fn with_phi_line(mut self, phi_line: T) -> Self {
        self.phi_line = phi_line;
        self
    }

    /// Minimum inductance of a side SQUID.
    pub fn lmin1(&self) -> T {
        min_inductance(self.ic1)
    }

    /// Minimum inductance of the middle SQUID.
    pub fn lmin2(&self) -> T {
        min_inductance(self.ic2)
    }
}

/// Josephson inductance at integer flux, `Φ0 / (4π·ic)`.
pub fn min_inductance<T: Real>(ic: T) -> T {
    T::lit(FLUX_QUANTUM) / (T::lit(4.0) * T::PI() * ic)
}

/// Inductance of a symmetric SQUID with critical current `ic` (per SQUID) at
/// applied `flux` in units of Φ0.
pub fn josephson_inductance<T: Real>(ic: T, flux: T) -> Result<T> {
    if !(ic > T::zero()) || !flux.is_finite() {
        return Err(Error::InvalidParameter(format!("need ic > 0 and finite flux (got {ic}, {flux})")));
    }
    // Reducing to [-1/2, 1/2] makes the period exact.
    let reduced = flux - flux.round();
    let cos = (T::PI() * reduced).cos().abs();
    if cos < T::lit(HALF_FLUX_GUARD) {
        return Err(Error::DivergentInductance { flux: flux.to_f64_lossy() });
    }
    Ok(min_inductance(ic) / cos)
}

/// Principal-branch flux in `[0, 1/2]` at which the SQUID has inductance `l`.
pub fn flux_from_inductance<T: Real>(ic: T, l: T) -> Result<T> {
    let lmin = min_inductance(ic);
    // Allow the last few ulps so that boundary designs land on flux 0.
    let slack = T::one() - T::lit(8.0) * T::epsilon();
    if !(l >= lmin * slack) || !l.is_finite() {
        return Err(Error::InfeasibleInductance { inductance: l.to_f64_lossy(), minimum: lmin.to_f64_lossy() });
    }
    let ratio = (lmin / l).min(T::one());
    Ok(ratio.acos() / T::PI())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn minimum_inductance_value() {
        let l = josephson_inductance(1e-6, 0.0).unwrap();
        assert_relative_eq!(l, 2.067_833_848e-15 / (4.0 * std::f64::consts::PI * 1e-6), max_relative = 1e-15);
        assert_relative_eq!(l, 0.1646e-9, max_relative = 1e-3);
        let omega = 2.0 * std::f64::consts::PI * 6.3e9;
        assert!((omega * l - 6.5).abs() < 0.05);
    }

    #[test]
    fn third_flux_doubles_inductance() {
        let base = josephson_inductance(0.7e-6, 0.0).unwrap();
        assert_relative_eq!(josephson_inductance(0.7e-6, 1.0 / 3.0).unwrap(), 2.0 * base, max_relative = 1e-14);
    }

    #[test]
    fn half_flux_diverges() {
        assert!(matches!(josephson_inductance(1e-6, 0.5), Err(Error::DivergentInductance { .. })));
        assert!(josephson_inductance(1e-6, -1.5).is_err());
    }

    #[test]
    fn periodic_and_even() {
        for &f in &[0.1, 0.27, 0.44, 0.61, 0.93] {
            let l = josephson_inductance(1e-6, f).unwrap();
            assert_relative_eq!(josephson_inductance(1e-6, f + 1.0).unwrap(), l, max_relative = 1e-12);
            assert_relative_eq!(josephson_inductance(1e-6, -f).unwrap(), l, max_relative = 1e-15);
            assert_relative_eq!(josephson_inductance(1e-6, 2.0 - f).unwrap(), l, max_relative = 1e-12);
        }
    }

    #[test]
    fn inverse_branch() {
        let ic = 2.2e-6;
        let lmin = min_inductance(ic);
        assert_eq!(flux_from_inductance(ic, lmin).unwrap(), 0.0);
        assert_relative_eq!(flux_from_inductance(ic, 2.0 * lmin).unwrap(), 1.0 / 3.0, max_relative = 1e-14);
        let err = flux_from_inductance(ic, 0.9 * lmin).unwrap_err();
        assert!(matches!(err, Error::InfeasibleInductance { minimum, .. } if (minimum - lmin).abs() < 1e-24));
        for k in 1..50 {
            let l = lmin * (1.0 + 0.37 * k as f64);
            let f = flux_from_inductance(ic, l).unwrap();
            assert!((0.0..=0.5).contains(&f));
            assert_relative_eq!(josephson_inductance(ic, f).unwrap(), l, max_relative = 1e-12);
        }
    }

    #[test]
    fn device_validation() {
        assert!(SquidDevice::new(0.7e-6, 2.2e-6, 26e-15, 50.0, 2.0, 4e10).is_ok());
        assert!(SquidDevice::new(0.0, 2.2e-6, 26e-15, 50.0, 2.0, 4e10).is_err());
        assert!(SquidDevice::new(0.7e-6, 2.2e-6, 26e-15, -50.0, 2.0, 4e10).is_err());
    }
}
