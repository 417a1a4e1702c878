//! Observables extracted from scattered two-photon states.

use num_complex::Complex64 as C;
use std::f64::consts::PI;

use super::engine::PairAmplitudes;
use crate::error::{Error, Result};

/// Envelope products smaller than this fraction of the peak are treated as
/// carrying no information.
const ENVELOPE_FLOOR: f64 = 1e-8;

fn pair_bins(center: usize, dx: i64) -> Option<(usize, usize)> {
    let a = dx.div_euclid(2);
    let b = dx - a;
    let m1 = center as i64 - a;
    let m2 = center as i64 + b;
    (m1 >= 0 && m2 >= 0).then_some((m1 as usize, m2 as usize))
}

/// Transmitted amplitudes along `x2 − x1 = dx` through the pulse centre,
/// for `dx` in `−half_width..=half_width`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiDiagonal {
    pub dx: Vec<i64>,
    pub nonlinear: Vec<C>,
    pub linear: Vec<C>,
    /// Product of the input envelopes at the two bins.
    pub envelope: Vec<f64>,
}

/// Samples both states along the anti-diagonal through their common pulse
/// centre.
pub fn anti_diagonal(
    nonlinear: &impl PairAmplitudes,
    linear: &impl PairAmplitudes,
    half_width: usize,
) -> Result<AntiDiagonal> {
    check_pair(nonlinear, linear)?;
    let c = nonlinear.center();
    let n = nonlinear.bins();
    let w = half_width as i64;
    let mut out = AntiDiagonal { dx: Vec::new(), nonlinear: Vec::new(), linear: Vec::new(), envelope: Vec::new() };
    for dx in -w..=w {
        let (m1, m2) = pair_bins(c, dx)
            .filter(|&(a, b)| a < n && b < n)
            .ok_or_else(|| Error::InvalidArgument(format!("separation {dx} leaves the simulated window")))?;
        out.dx.push(dx);
        out.nonlinear.push(nonlinear.transmitted(m1, m2));
        out.linear.push(linear.transmitted(m1, m2));
        out.envelope.push(nonlinear.input()[m1] * nonlinear.input()[m2]);
    }
    Ok(out)
}

fn check_pair(a: &impl PairAmplitudes, b: &impl PairAmplitudes) -> Result<()> {
    if a.bins() != b.bins() || a.center() != b.center() || a.input() != b.input() {
        return Err(Error::InvalidArgument("states come from different pulses".into()));
    }
    Ok(())
}

/// Two-photon transmission beyond the product of single-photon amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearCorrection {
    /// Photon separations in bins, starting at zero.
    pub dx: Vec<i64>,
    /// Correction `B(dx)` relative to the freely propagated envelope.
    pub b: Vec<C>,
    /// Phase of the coincident amplitude relative to the linear one.
    pub nonlinear_phase: f64,
}

/// Extracts `B(dx) = (ψ_nl − ψ_lin)/envelope` for `dx = 0..=max_dx`.
pub fn extract_nonlinear_correction(
    nonlinear: &impl PairAmplitudes,
    linear: &impl PairAmplitudes,
    max_dx: usize,
) -> Result<NonlinearCorrection> {
    let slice = anti_diagonal(nonlinear, linear, max_dx)?;
    let peak = nonlinear.input()[nonlinear.center()].powi(2);
    let mut dx = Vec::with_capacity(max_dx + 1);
    let mut b = Vec::with_capacity(max_dx + 1);
    for k in max_dx..slice.dx.len() {
        let env = slice.envelope[k];
        if !(env > ENVELOPE_FLOOR * peak) {
            return Err(Error::UndefinedDensity(format!("envelope vanishes at separation {}", slice.dx[k])));
        }
        dx.push(slice.dx[k]);
        b.push((slice.nonlinear[k] - slice.linear[k]) / env);
    }
    let (nl0, lin0) = (slice.nonlinear[max_dx], slice.linear[max_dx]);
    if lin0.norm() == 0.0 || nl0.norm() == 0.0 {
        return Err(Error::UndefinedDensity("coincident amplitude vanishes".into()));
    }
    Ok(NonlinearCorrection { dx, b, nonlinear_phase: (nl0 / lin0).arg() })
}

/// Intercept and slope of a straight-line fit of the phase against the
/// inverse pulse width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    /// Value extrapolated to infinite width.
    pub limit: f64,
    pub slope: f64,
}

/// Least-squares fit `phase = limit + slope / width`.
pub fn extrapolate_collimated(widths: &[f64], phases: &[f64]) -> Result<Extrapolation> {
    if widths.len() != phases.len() || widths.len() < 2 {
        return Err(Error::InvalidArgument("extrapolation needs at least two matching samples".into()));
    }
    if widths.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidArgument("pulse widths must be positive".into()));
    }
    let n = widths.len() as f64;
    let x: Vec<f64> = widths.iter().map(|w| 1.0 / w).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = phases.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("extrapolation needs distinct widths".into()));
    }
    let sxy: f64 = x.iter().zip(phases).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok(Extrapolation { limit: my - slope * mx, slope })
}

/// `1 − P_T,nl / P_T,lin`: the share of doubly transmitted probability lost
/// to the interaction.
pub fn excess_reflection(nonlinear: &impl PairAmplitudes, linear: &impl PairAmplitudes) -> Result<f64> {
    check_pair(nonlinear, linear)?;
    let lin = linear.transmitted_probability();
    if lin <= 0.0 {
        return Err(Error::UndefinedDensity("linear run transmits nothing".into()));
    }
    Ok(1.0 - nonlinear.transmitted_probability() / lin)
}

/// Doubly reflected density `|ψ_LL|²` relative to the squared input
/// envelope along the anti-diagonal through the pulse centre.
pub fn reflected_density(state: &impl PairAmplitudes, max_dx: usize) -> Result<Vec<(i64, f64)>> {
    let c = state.center();
    let n = state.bins();
    let peak = state.input()[c].powi(2);
    (0..=max_dx as i64)
        .map(|dx| {
            let (m1, m2) = pair_bins(c, dx)
                .filter(|&(a, b)| a < n && b < n)
                .ok_or_else(|| Error::InvalidArgument(format!("separation {dx} leaves the simulated window")))?;
            let env = state.input()[m1] * state.input()[m2];
            if !(env > ENVELOPE_FLOOR * peak) {
                return Err(Error::UndefinedDensity(format!("envelope vanishes at separation {dx}")));
            }
            Ok((dx, state.reflected(m1, m2).norm_sqr() / (env * env)))
        })
        .collect()
}

/// `1 − |⟨out|ideal⟩| / √(⟨out|out⟩⟨ideal|ideal⟩)`.
pub fn overlap_error(out: &[C], ideal: &[C]) -> Result<f64> {
    if out.len() != ideal.len() {
        return Err(Error::InvalidArgument("overlap needs equally long samples".into()));
    }
    let no: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    let ni: f64 = ideal.iter().map(|z| z.norm_sqr()).sum();
    let a = (no * ni).sqrt();
    if !(a > 0.0) {
        return Err(Error::UndefinedDensity("zero-norm window".into()));
    }
    let overlap: C = out.iter().zip(ideal).map(|(o, i)| o.conj() * i).sum();
    Ok((1.0 - overlap.norm() / a).clamp(0.0, 1.0))
}

fn window(slice: &AntiDiagonal, x_pulse: usize) -> impl Iterator<Item = usize> + '_ {
    let x = x_pulse as i64;
    (0..slice.dx.len()).filter(move |&k| slice.dx[k].abs() <= x)
}

/// Overlap error of the scattered state against the linear state carrying
/// the collimated nonlinear phase, over separations `|dx| ≤ x_pulse`.
pub fn window_overlap_error(slice: &AntiDiagonal, nonlinear_phase: f64, x_pulse: usize) -> Result<f64> {
    let rot = C::from_polar(1.0, nonlinear_phase);
    let (out, ideal): (Vec<C>, Vec<C>) = window(slice, x_pulse).map(|k| (slice.nonlinear[k], slice.linear[k] * rot)).unzip();
    overlap_error(&out, &ideal)
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// Envelope-density-weighted mean deviation of the local nonlinear phase
/// from the collimated value over `|dx| ≤ x_pulse`.
pub fn window_phase_error(slice: &AntiDiagonal, nonlinear_phase: f64, x_pulse: usize) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in window(slice, x_pulse) {
        let w = slice.envelope[k] * slice.envelope[k];
        if slice.linear[k].norm() == 0.0 || slice.nonlinear[k].norm() == 0.0 {
            continue;
        }
        num += w * wrap((slice.nonlinear[k] / slice.linear[k]).arg() - nonlinear_phase).abs();
        den += w;
    }
    if !(den > 0.0) {
        return Err(Error::UndefinedDensity("zero-norm window".into()));
    }
    Ok(num / den)
}
