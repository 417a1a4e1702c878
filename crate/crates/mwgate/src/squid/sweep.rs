use num_complex::Complex;

use super::{josephson_inductance, s21_closed_form, SquidDevice};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Evenly spaced samples from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange<T> {
    pub lo: T,
    pub hi: T,
    pub count: usize,
}

impl<T: Real> AxisRange<T> {
    pub fn new(lo: T, hi: T, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument(format!("axis needs at least 2 samples, got {count}")));
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidArgument("axis bounds must be finite".into()));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn value(&self, k: usize) -> T {
        let t = T::from_usize(k).unwrap() / T::from_usize(self.count - 1).unwrap();
        self.lo + (self.hi - self.lo) * t
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.count).map(|k| self.value(k))
    }
}

/// Rectangular grid over the side (`flux1`) and middle (`flux2`) biases, in
/// units of Φ0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxGrid<T> {
    pub flux1: AxisRange<T>,
    pub flux2: AxisRange<T>,
}

/// One grid point. `s21` is `None` where a SQUID sits at half-integer flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell<T> {
    pub flux1: T,
    pub flux2: T,
    pub s21: Option<Complex<T>>,
}

/// Transmission over a flux grid, ordered with `flux1` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSweep<T> {
    pub grid: FluxGrid<T>,
    pub cells: Vec<SweepCell<T>>,
    /// Transmission with every SQUID at integer flux.
    pub reference: Complex<T>,
}

impl<T: Real> FluxSweep<T> {
    /// Cell transmission divided by the reference transmission.
    pub fn normalized(&self, cell: &SweepCell<T>) -> Option<Complex<T>> {
        cell.s21.map(|s| s / self.reference)
    }

    pub fn divergent_count(&self) -> usize {
        self.cells.iter().filter(|c| c.s21.is_none()).count()
    }
}

/// Closed-form transmission over a flux grid.
pub fn flux_sweep<T: Real>(dev: &SquidDevice<T>, grid: &FluxGrid<T>) -> Result<FluxSweep<T>> {
    dev.validate()?;
    let reference = s21_closed_form(dev.lmin1(), dev.lmin2(), dev)?;
    let flux2: Vec<T> = grid.flux2.values().collect();
    let l2: Vec<Option<T>> = flux2.iter().map(|&f| josephson_inductance(dev.ic2, f).ok()).collect();
    let mut cells = Vec::with_capacity(grid.flux1.count * grid.flux2.count);
    for f1 in grid.flux1.values() {
        let l1 = josephson_inductance(dev.ic1, f1).ok();
        for (&f2, &l2) in flux2.iter().zip(&l2) {
            let s21 = match (l1, l2) {
                (Some(a), Some(b)) => s21_closed_form(a, b, dev).ok(),
                _ => None,
            };
            cells.push(SweepCell { flux1: f1, flux2: f2, s21 });
        }
    }
    Ok(FluxSweep { grid: *grid, cells, reference })
}
