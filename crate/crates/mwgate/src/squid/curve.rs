use num_complex::Complex;

use super::{design_phase_shifter, s21_closed_form, SquidDevice};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Number of phase samples used to locate the feasible arc before refining
/// its ends.
const SCAN_POINTS: usize = 4096;
const BISECTION_STEPS: usize = 80;

/// Box in the principal-branch flux plane, in units of Φ0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxWindow<T> {
    pub flux1: (T, T),
    pub flux2: (T, T),
}

impl<T: Real> FluxWindow<T> {
    /// The whole principal branch `[0, 1/2]²`.
    pub fn full() -> Self {
        let half = T::lit(0.5);
        Self { flux1: (T::zero(), half), flux2: (T::zero(), half) }
    }

    pub fn contains(&self, flux1: T, flux2: T) -> bool {
        flux1 >= self.flux1.0 && flux1 <= self.flux1.1 && flux2 >= self.flux2.0 && flux2 <= self.flux2.1
    }
}

/// Sample of the unit-transmission locus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<T> {
    /// Normalized arc length along the curve in the flux plane.
    pub tau: T,
    pub theta: T,
    pub flux1: T,
    pub flux2: T,
    /// Closed-form transmission at this point, before any normalization.
    pub s21: Complex<T>,
}

fn feasible_fluxes<T: Real>(theta: T, dev: &SquidDevice<T>, window: &FluxWindow<T>) -> Option<(T, T)> {
    let d = design_phase_shifter(theta, dev);
    match (d.is_feasible(), d.flux1, d.flux2) {
        (true, Some(f1), Some(f2)) if window.contains(f1, f2) => Some((f1, f2)),
        _ => None,
    }
}

/// Moves from a feasible phase towards an infeasible one and returns the
/// last feasible phase found.
fn refine_edge<T: Real>(
    mut inside: T,
    mut outside: T,
    dev: &SquidDevice<T>,
    window: &FluxWindow<T>,
) -> T {
    for _ in 0..BISECTION_STEPS {
        let mid = (inside + outside) / T::lit(2.0);
        if mid == inside || mid == outside {
            break;
        }
        if feasible_fluxes(mid, dev, window).is_some() {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Longest contiguous feasible phase interval, possibly wrapping through ±π.
fn feasible_arc<T: Real>(dev: &SquidDevice<T>, window: &FluxWindow<T>) -> Option<(T, T)> {
    let n = SCAN_POINTS;
    let two_pi = T::lit(2.0) * T::PI();
    let step = two_pi / T::from_usize(n).unwrap();
    let theta_at = |k: isize| -T::PI() + step * T::from_isize(k).unwrap();
    let ok: Vec<bool> = (0..n).map(|k| feasible_fluxes(theta_at(k as isize), dev, window).is_some()).collect();
    if ok.iter().all(|&b| b) {
        return Some((-T::PI(), T::PI() - step));
    }
    // Start scanning right after an infeasible sample so runs never straddle
    // the starting point.
    let origin = ok.iter().position(|&b| !b)?;
    let mut best: Option<(usize, usize)> = None;
    let mut run_start = None;
    for j in 1..=n {
        let idx = (origin + j) % n;
        match (ok[idx], run_start) {
            (true, None) => run_start = Some(j),
            (false, Some(s)) => {
                let len = j - s;
                if best.map_or(true, |(_, l)| len > l) {
                    best = Some((s, len));
                }
                run_start = None;
            }
            _ => {}
        }
    }
    let (start, len) = best?;
    let first = (origin + start) as isize;
    let last = first + len as isize - 1;
    let lo = refine_edge(theta_at(first), theta_at(first - 1), dev, window);
    let hi = refine_edge(theta_at(last), theta_at(last + 1), dev, window);
    Some((lo, hi))
}

/// Traces the unit-transmission curve across the feasible phase range,
/// restricted to the given flux window.
pub fn full_transmission_curve<T: Real>(
    dev: &SquidDevice<T>,
    samples: usize,
    window: &FluxWindow<T>,
) -> Result<Vec<CurvePoint<T>>> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("curve needs at least 2 samples, got {samples}")));
    }
    dev.validate()?;
    let (lo, hi) = feasible_arc(dev, window)
        .ok_or_else(|| Error::NoCurve("no phase is realizable inside the flux window".into()))?;
    let denom = T::from_usize(samples - 1).unwrap();
    let mut points = Vec::with_capacity(samples);
    for k in 0..samples {
        let theta = lo + (hi - lo) * T::from_usize(k).unwrap() / denom;
        let design = design_phase_shifter(theta, dev);
        let (Some(flux1), Some(flux2)) = (design.flux1, design.flux2) else {
            continue;
        };
        if !design.is_feasible() {
            continue;
        }
        let s21 = s21_closed_form(design.l1, design.l2, dev)?;
        points.push(CurvePoint { tau: T::zero(), theta, flux1, flux2, s21 });
    }
    if points.len() < 2 {
        return Err(Error::NoCurve("feasible arc is too short to sample".into()));
    }
    let mut lengths = vec![T::zero(); points.len()];
    for k in 1..points.len() {
        let (a, b) = (&points[k - 1], &points[k]);
        lengths[k] = lengths[k - 1] + (b.flux1 - a.flux1).hypot(b.flux2 - a.flux2);
    }
    let total = lengths[lengths.len() - 1];
    let last = T::from_usize(points.len() - 1).unwrap();
    for (k, (p, s)) in points.iter_mut().zip(&lengths).enumerate() {
        p.tau = if total > T::zero() { *s / total } else { T::from_usize(k).unwrap() / last };
    }
    Ok(points)
}

/// Line phase that best places the curve ends at two target flux points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFit<T> {
    pub phi_line: T,
    /// Root of the summed squared endpoint distances.
    pub residual: T,
    pub endpoints: [(T, T); 2],
}

fn endpoint_cost<T: Real>(
    dev: &SquidDevice<T>,
    window: &FluxWindow<T>,
    targets: &[(T, T); 2],
) -> Option<(T, [(T, T); 2])> {
    let curve = full_transmission_curve(dev, 2, window).ok()?;
    let a = (curve[0].flux1, curve[0].flux2);
    let b = (curve[curve.len() - 1].flux1, curve[curve.len() - 1].flux2);
    let d2 = |p: (T, T), q: (T, T)| (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2);
    let straight = d2(a, targets[0]) + d2(b, targets[1]);
    let swapped = d2(b, targets[0]) + d2(a, targets[1]);
    Some((straight.min(swapped), [a, b]))
}

/// Fits the inter-SQUID line phase so that the curve endpoints match
/// `targets`, scanning `[phi_lo, phi_hi]` and then refining by golden-section
/// search.
pub fn fit_line_phase<T: Real>(
    dev: &SquidDevice<T>,
    window: &FluxWindow<T>,
    targets: &[(T, T); 2],
    phi_lo: T,
    phi_hi: T,
    scan_steps: usize,
) -> Result<PhaseFit<T>> {
    if scan_steps < 2 || !(phi_hi > phi_lo) {
        return Err(Error::InvalidArgument("fit needs a nonempty phase range and at least 2 steps".into()));
    }
    let cost = |phi: T| endpoint_cost(&dev.with_phi_line(phi), window, targets).map(|(c, _)| c);
    let step = (phi_hi - phi_lo) / T::from_usize(scan_steps - 1).unwrap();
    let mut best: Option<(T, T)> = None;
    for k in 0..scan_steps {
        let phi = phi_lo + step * T::from_usize(k).unwrap();
        if let Some(c) = cost(phi) {
            if best.map_or(true, |(_, b)| c < b) {
                best = Some((phi, c));
            }
        }
    }
    let (phi0, _) = best.ok_or_else(|| Error::NoCurve("no line phase in range yields a curve".into()))?;

    let golden = T::lit(0.618_033_988_749_894_9);
    let big = T::max_value();
    let f = |phi: T| cost(phi).unwrap_or(big);
    let (mut a, mut b) = ((phi0 - step).max(phi_lo), (phi0 + step).min(phi_hi));
    let mut x1 = b - golden * (b - a);
    let mut x2 = a + golden * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = f(x2);
        }
    }
    let phi = if f1 <= f2 { x1 } else { x2 };
    let candidates = [phi, phi0];
    let (phi, (c, endpoints)) = candidates
        .iter()
        .filter_map(|&p| endpoint_cost(&dev.with_phi_line(p), window, targets).map(|r| (p, r)))
        .min_by(|x, y| x.1 .0.partial_cmp(&y.1 .0).unwrap())
        .ok_or_else(|| Error::NoCurve("fitted phase lost the curve".into()))?;
    Ok(PhaseFit { phi_line: phi, residual: c.sqrt(), endpoints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn device(phi: f64) -> SquidDevice<f64> {
        SquidDevice::new(0.7e-6, 2.2e-6, 26e-15, 50.0, phi, 2.0 * PI * 6.3e9).unwrap()
    }

    #[test]
    fn curve_has_unit_transmission() {
        let dev = device(2.0);
        let curve = full_transmission_curve(&dev, 101, &FluxWindow::full()).unwrap();
        assert_eq!(curve.len(), 101);
        assert_eq!(curve[0].tau, 0.0);
        assert!((curve[100].tau - 1.0).abs() < 1e-15);
        for p in &curve {
            assert!((p.s21.norm() - 1.0).abs() < 1e-9);
        }
        for w in curve.windows(2) {
            assert!(w[1].theta > w[0].theta);
            assert!(w[1].tau >= w[0].tau);
        }
    }

    #[test]
    fn window_clips_the_curve() {
        let dev = device(2.0);
        let window = FluxWindow { flux1: (0.3, 0.5), flux2: (0.0, 0.5) };
        let curve = full_transmission_curve(&dev, 50, &window).unwrap();
        for p in &curve {
            assert!(window.contains(p.flux1, p.flux2));
        }
        let empty = FluxWindow { flux1: (0.499, 0.5), flux2: (0.499, 0.5) };
        assert!(matches!(full_transmission_curve(&dev, 10, &empty), Err(Error::NoCurve(_))));
    }

    #[test]
    fn curve_ridge_matches_grid_maximum() {
        // |S21| <= 1 everywhere, so the unit-transmission locus is where a
        // scan of |S21| along the middle flux peaks.
        let dev = device(2.0);
        let curve = full_transmission_curve(&dev, 9, &FluxWindow::full()).unwrap();
        for p in &curve[1..8] {
            let l1 = crate::squid::josephson_inductance(dev.ic1, p.flux1).unwrap();
            let (mut best, mut arg) = (0.0, 0.0);
            for k in 0..=5000 {
                let f2 = 0.4999 * k as f64 / 5000.0;
                let l2 = crate::squid::josephson_inductance(dev.ic2, f2).unwrap();
                let m = s21_closed_form(l1, l2, &dev).unwrap().norm();
                if m > best {
                    best = m;
                    arg = f2;
                }
            }
            assert!((arg - p.flux2).abs() < 2e-4, "ridge at {arg}, curve at {}", p.flux2);
        }
    }
}
