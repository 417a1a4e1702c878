//! Closed-form single-photon scattering off three qubits spaced by a quarter
//! wavelength, side qubits decaying at `Γ` and the middle one at `γΓ`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Physical parameters of the three-qubit phase shifter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WqedParams<T> {
    /// Qubit transition frequency `Ω` in rad/s.
    pub omega_q: T,
    /// Side-qubit decay rate `Γ` in rad/s.
    pub gamma_rate: T,
    /// Middle-qubit decay rate divided by `Γ`.
    pub gamma_ratio: T,
    /// Photon detuning `δ = vk − Ω` in rad/s.
    pub detuning: T,
}

impl<T: Real> WqedParams<T> {
    pub fn new(omega_q: T, gamma_rate: T, gamma_ratio: T, detuning: T) -> Result<Self> {
        if !(gamma_rate > T::zero() && gamma_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("decay rate must be positive, got {gamma_rate}")));
        }
        if !(gamma_ratio >= T::zero() && gamma_ratio < T::lit(2.0)) {
            return Err(Error::InvalidParameter(format!("coupling ratio must lie in [0, 2), got {gamma_ratio}")));
        }
        if !(omega_q.is_finite() && detuning.is_finite()) {
            return Err(Error::InvalidParameter("frequencies must be finite".into()));
        }
        Ok(Self { omega_q, gamma_rate, gamma_ratio, detuning })
    }

    /// Transmission at the stored detuning.
    pub fn s21(&self) -> Result<Complex<T>> {
        single_photon_s21(self.detuning, self.gamma_rate, self.gamma_ratio)
    }

    /// Positions of the three qubits, `(−λ/4, 0, λ/4)`, for photon
    /// wavenumber `k`.
    pub fn positions(k: T) -> [T; 3] {
        let q = T::FRAC_PI_2() / k;
        [-q, T::zero(), q]
    }
}

/// Single-photon transmission amplitude at detuning `delta`.
pub fn single_photon_s21<T: Real>(delta: T, gamma_rate: T, gamma_ratio: T) -> Result<Complex<T>> {
    if !(delta.is_finite() && gamma_rate.is_finite() && gamma_ratio.is_finite()) {
        return Err(Error::InvalidParameter("single-photon inputs must be finite".into()));
    }
    if !(gamma_rate > T::zero()) {
        return Err(Error::InvalidParameter(format!("decay rate must be positive, got {gamma_rate}")));
    }
    if delta == T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let two = T::lit(2.0);
    let g = gamma_rate;
    let num = two * delta * delta * delta;
    let first = Complex::new(delta, g);
    let second = Complex::new(two * delta * delta - gamma_ratio * g * g, gamma_ratio * g * delta);
    Ok(Complex::new(num, T::zero()) / (first * second))
}

/// Detunings of unit single-photon transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullTransmission<T> {
    pub plus: T,
    pub minus: T,
    /// Set at `γ = 0`, where both roots merge at zero detuning and the
    /// transmission there vanishes instead.
    pub degenerate: bool,
}

fn check_ratio<T: Real>(gamma_ratio: T) -> Result<()> {
    if gamma_ratio >= T::lit(2.0) {
        return Err(Error::NoRealSolution(format!("coupling ratio {gamma_ratio} is not below 2")));
    }
    if !(gamma_ratio >= T::zero()) {
        return Err(Error::InvalidParameter(format!("coupling ratio must be non-negative, got {gamma_ratio}")));
    }
    Ok(())
}

/// `±√(γ/(2−γ))·Γ`.
pub fn full_transmission_detuning<T: Real>(gamma_ratio: T, gamma_rate: T) -> Result<FullTransmission<T>> {
    check_ratio(gamma_ratio)?;
    let d = (gamma_ratio / (T::lit(2.0) - gamma_ratio)).sqrt() * gamma_rate;
    Ok(FullTransmission { plus: d, minus: -d, degenerate: gamma_ratio == T::zero() })
}

/// Phase of unit transmission, `atan2(√(2γ − γ²), 1 − γ)`, on the branch
/// running from 0 at `γ = 0` through `π/2` at `γ = 1` towards `π` as
/// `γ → 2`.
///
/// The transmission amplitude at the two roots is `−e^{±iφ}` with `φ` this
/// value, so `arg S21(δ_f^±) = ∓(π − φ)`, which equals `±φ` modulo `π`.
pub fn full_transmission_phase<T: Real>(gamma_ratio: T) -> Result<T> {
    check_ratio(gamma_ratio)?;
    let y = (T::lit(2.0) * gamma_ratio - gamma_ratio * gamma_ratio).sqrt();
    Ok(y.atan2(T::one() - gamma_ratio))
}

/// Number of logarithmically spaced probes used to bracket band edges.
const BAND_PROBES: usize = 4000;

fn first_crossing<T: Real>(
    level: T,
    origin: T,
    direction: T,
    reach: T,
    magnitude: &dyn Fn(T) -> T,
    tol: T,
) -> Option<T> {
    let lo_exp = T::lit(-10.0);
    let hi_exp = reach.log10();
    let mut inside = T::zero();
    for k in 0..=BAND_PROBES {
        let e = lo_exp + (hi_exp - lo_exp) * T::from_usize(k).unwrap() / T::from_usize(BAND_PROBES).unwrap();
        let off = T::lit(10.0).powf(e).min(reach);
        if magnitude(origin + direction * off) < level {
            let mut outside = off;
            while (outside - inside).abs() > tol {
                let mid = (inside + outside) / T::lit(2.0);
                if mid == inside || mid == outside {
                    break;
                }
                if magnitude(origin + direction * mid) < level {
                    outside = mid;
                } else {
                    inside = mid;
                }
            }
            return Some(origin + direction * inside);
        }
        inside = off;
    }
    None
}

/// Detuning interval around the positive full-transmission point inside
/// which `|S21|` stays at or above `amplitude_threshold`.
///
/// For weakly coupled middle qubits the transmission dips below the
/// threshold again above `δ_f`; otherwise it stays above it for all larger
/// detunings and the upper bound is `+∞`.
pub fn transmission_band<T: Real>(gamma_ratio: T, gamma_rate: T, amplitude_threshold: T) -> Result<(T, T)> {
    if !(gamma_ratio > T::zero() && gamma_ratio < T::lit(2.0)) {
        return Err(Error::InvalidParameter(format!("coupling ratio must lie in (0, 2), got {gamma_ratio}")));
    }
    if !(amplitude_threshold > T::zero() && amplitude_threshold <= T::one()) {
        return Err(Error::NoBand(format!("threshold {amplitude_threshold} is outside (0, 1]")));
    }
    let df = full_transmission_detuning(gamma_ratio, gamma_rate)?.plus;
    if amplitude_threshold == T::one() {
        return Ok((df, df));
    }
    let mag = |d: T| single_photon_s21(d, gamma_rate, gamma_ratio).map(|s| s.norm()).unwrap_or(T::zero());
    let tol = T::lit(1e-10) * gamma_rate;
    let lo = first_crossing(amplitude_threshold, df, -T::one(), df, &mag, tol)
        .ok_or_else(|| Error::NoBand("no lower crossing below the full-transmission point".into()))?;
    let hi = first_crossing(amplitude_threshold, df, T::one(), T::lit(1e4) * gamma_rate + df, &mag, tol)
        .unwrap_or_else(T::infinity);
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    #[test]
    fn zero_detuning_reflects() {
        assert_eq!(single_photon_s21(0.0, 1.0, 0.62).unwrap(), Complex::new(0.0, 0.0));
        assert_eq!(single_photon_s21(0.0, 1.0, 0.0).unwrap(), Complex::new(0.0, 0.0));
    }

    #[test]
    fn far_detuning_transmits() {
        for &g in &[0.1_f64, 1.0, 1.9] {
            assert!((single_photon_s21(1000.0_f64, 1.0, g).unwrap().norm() - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn unit_ratio_point() {
        let s = single_photon_s21(1.0_f64, 1.0, 1.0).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert_relative_eq!(s.arg(), -PI / 2.0, epsilon = 1e-12);
        let s = single_photon_s21(-1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(s.arg(), PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(full_transmission_phase(1.0).unwrap(), PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn roots_give_unit_transmission() {
        for &g in &[0.01_f64, 0.1, 0.5, 0.62, 1.0, 1.5, 1.9, 2.0 - 1e-9] {
            let ft = full_transmission_detuning(g, 1.3).unwrap();
            assert!(!ft.degenerate);
            for d in [ft.plus, ft.minus] {
                assert!((single_photon_s21(d, 1.3, g).unwrap().norm() - 1.0).abs() < 1e-12, "gamma {g}");
            }
            let phase = full_transmission_phase(g).unwrap();
            assert!((0.0..PI).contains(&phase));
            let minus = single_photon_s21(ft.minus, 1.3, g).unwrap();
            let plus = single_photon_s21(ft.plus, 1.3, g).unwrap();
            assert!((minus + C::from_polar(1.0, -phase)).norm() < 1e-10);
            assert!((plus + C::from_polar(1.0, phase)).norm() < 1e-10);
            assert!((minus.arg() - (PI - phase)).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_and_invalid_ratios() {
        let ft = full_transmission_detuning(0.0, 1.0).unwrap();
        assert!(ft.degenerate && ft.plus == 0.0);
        assert!(matches!(full_transmission_detuning(2.0, 1.0), Err(Error::NoRealSolution(_))));
        assert!(full_transmission_phase(2.5).is_err());
        assert!(full_transmission_phase(1e-300).unwrap() < 1e-100);
    }

    #[test]
    fn magnitude_is_even_in_detuning() {
        for k in -300..=300 {
            let d = k as f64 * 0.01;
            let a = single_photon_s21(d, 1.0, 0.7).unwrap().norm();
            let b = single_photon_s21(-d, 1.0, 0.7).unwrap().norm();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn band_matches_grid_scan() {
        let th = 0.9_f64.sqrt();
        let (lo, hi) = transmission_band(1.0, 1.0, th).unwrap();
        assert!(hi.is_infinite());
        let mut scan_lo = f64::NAN;
        let mut d = 1.0;
        while d > 0.0 {
            if single_photon_s21(d, 1.0, 1.0).unwrap().norm() < th {
                scan_lo = d;
                break;
            }
            d -= 1e-4;
        }
        assert!((lo - scan_lo).abs() <= 1e-4);

        let (lo, hi) = transmission_band(0.1, 1.0, th).unwrap();
        let df = full_transmission_detuning(0.1, 1.0).unwrap().plus;
        assert!(lo < df && df < hi && hi.is_finite());
        let mag = |d: f64| single_photon_s21(d, 1.0, 0.1).unwrap().norm();
        assert!((mag(lo) - th).abs() < 1e-8 && (mag(hi) - th).abs() < 1e-8);
    }

    #[test]
    fn band_collapses_at_unit_threshold() {
        let df = full_transmission_detuning(0.8, 1.0).unwrap().plus;
        assert_eq!(transmission_band(0.8, 1.0, 1.0).unwrap(), (df, df));
        let (lo, hi) = transmission_band(0.8, 1.0, 1.0 - 1e-10).unwrap();
        assert!(df - lo < 1e-3 && hi - df < 1e-3);
        assert!(transmission_band(0.8, 1.0, 1.2).is_err());
    }

    #[test]
    fn single_precision() {
        let s = single_photon_s21(1.0_f32, 1.0, 1.0).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-6);
    }
}
