use num_complex::Complex;

use super::SquidDevice;
use crate::error::{Error, Result};
use crate::network::{abcd_line, cascade_elements, series_lc, Chain, Element, SMatrix};
use crate::scalar::Real;

/// Forward transmission of the SQUID chain for side inductance `l1` and
/// middle inductance `l2`, evaluated from the closed-form ratio `f/g`.
pub fn s21_closed_form<T: Real>(l1: T, l2: T, dev: &SquidDevice<T>) -> Result<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let two = T::lit(2.0);
    let w = dev.omega;
    let z0 = dev.z0;
    let c = dev.cap;

    let e = Complex::from_polar(T::one(), two * dev.phi_line);
    let t1 = c * l1 * w * w - T::one();
    let t2 = c * l2 * w * w - T::one();

    let f = e * (T::lit(8.0) * z0 * z0 * z0 * t2 * t1 * t1);
    let inner = (e + two) * (c * l2 * l1 * w * w) - l2 - (one + e) * l1;
    let first = Complex::new(T::lit(4.0) * z0 * z0 * t2 * t1, T::zero())
        + (e - one) * (l2 * l1 * w * w)
        + i * inner * (two * w * z0);
    let second = Complex::new(two * z0 * t1, T::zero()) - i * (e - one) * (l1 * w);
    let g = first * second;
    if !(g.norm() > T::lit(1e-300)) {
        return Err(Error::SingularEvaluation("denominator g vanishes".into()));
    }
    Ok(f / g)
}

/// Chain of series tanks and line sections making up the phase shifter:
/// side SQUID, line, middle SQUID, line, side SQUID.
pub fn squid_chain<T: Real>(l1: T, l2: T, dev: &SquidDevice<T>) -> Result<Chain<T>> {
    let side = series_lc(l1, dev.cap, dev.omega)?;
    let middle = series_lc(l2, dev.cap, dev.omega)?;
    let line = Element::Finite(abcd_line(dev.phi_line, dev.z0)?);
    cascade_elements(&[side, line, middle, line, side])
}

/// Scattering matrix of the SQUID chain via the network cascade.
pub fn squid_chain_s_params<T: Real>(l1: T, l2: T, dev: &SquidDevice<T>) -> Result<SMatrix<T>> {
    squid_chain(l1, l2, dev)?.s_params(dev.z0)
}
