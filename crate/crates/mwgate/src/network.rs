//! Chain-matrix (ABCD) algebra for reciprocal two-ports and conversion to
//! scattering parameters.
//!
//! Phasors carry the time dependence `exp(-iωt)`. An inductor therefore has
//! impedance `-iωL`, a capacitor `i/(ωC)`, and a matched lossless line of
//! electrical length `φ` multiplies the transmitted wave by `exp(+iφ)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Chain matrix `[[a, b], [c, d]]` relating port-1 voltage and current to
/// port-2 voltage and outgoing current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortAbcd<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Real> TwoPortAbcd<T> {
    #[must_use]
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self { a, b, c, d }
    }

    /// The through connection.
    #[must_use]
    pub fn identity() -> Self {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        Self::new(one, zero, zero, one)
    }

    #[must_use]
    pub fn determinant(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    /// Matrix product `self · next`, i.e. `next` follows `self` along the
    /// direction of propagation.
    #[must_use]
    pub fn then(&self, next: &Self) -> Self {
        Self {
            a: self.a * next.a + self.b * next.c,
            b: self.a * next.b + self.b * next.d,
            c: self.c * next.a + self.d * next.c,
            d: self.c * next.b + self.d * next.d,
        }
    }

    fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Scattering parameters referenced to a common port impedance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix<T> {
    pub s11: Complex<T>,
    pub s21: Complex<T>,
    pub s12: Complex<T>,
    pub s22: Complex<T>,
    pub z0: T,
}

impl<T: Real> SMatrix<T> {
    /// `|s11|² + |s21|²`, which equals one for a lossless network.
    #[must_use]
    pub fn power_sum(&self) -> T {
        self.s11.norm_sqr() + self.s21.norm_sqr()
    }
}

/// Element inserted in series with the signal conductor.
pub fn abcd_series<T: Real>(z: Complex<T>) -> Result<TwoPortAbcd<T>> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidElement(format!("series impedance {z} is not finite")));
    }
    let one = Complex::new(T::one(), T::zero());
    Ok(TwoPortAbcd::new(one, z, Complex::new(T::zero(), T::zero()), one))
}

/// Lossless uniform line of electrical length `phi` and impedance `z0`.
pub fn abcd_line<T: Real>(phi: T, z0: T) -> Result<TwoPortAbcd<T>> {
    if !(z0 > T::zero()) || !z0.is_finite() {
        return Err(Error::InvalidParameter(format!("line impedance must be positive, got {z0}")));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("line phase must be finite, got {phi}")));
    }
    let (s, c) = phi.sin_cos();
    let zero = T::zero();
    Ok(TwoPortAbcd::new(
        Complex::new(c, zero),
        Complex::new(zero, -z0 * s),
        Complex::new(zero, -s / z0),
        Complex::new(c, zero),
    ))
}

/// Multiplies the chain matrices in propagation order.
pub fn cascade<T: Real>(elements: &[TwoPortAbcd<T>]) -> Result<TwoPortAbcd<T>> {
    let (first, rest) = elements
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("cascade needs at least one element".into()))?;
    Ok(rest.iter().fold(*first, |acc, m| acc.then(m)))
}

/// Converts a chain matrix to scattering parameters with both ports
/// terminated in `z0`.
pub fn s_params<T: Real>(m: &TwoPortAbcd<T>, z0: T) -> Result<SMatrix<T>> {
    if !(z0 > T::zero()) || !z0.is_finite() {
        return Err(Error::InvalidParameter(format!("reference impedance must be positive, got {z0}")));
    }
    if !m.is_finite() {
        return Err(Error::InvalidElement("chain matrix has non-finite entries".into()));
    }
    let b = m.b / z0;
    let c = m.c * z0;
    let den = m.a + b + c + m.d;
    if den.norm() <= T::min_positive_value() {
        return Err(Error::SingularNetwork("a + b/Z0 + c*Z0 + d vanishes".into()));
    }
    let two = T::one() + T::one();
    Ok(SMatrix {
        s11: (m.a + b - c - m.d) / den,
        s21: Complex::new(two, T::zero()) / den,
        s12: Complex::new(two, T::zero()) * m.determinant() / den,
        s22: (-m.a + b - c + m.d) / den,
        z0,
    })
}

/// A series branch that may degenerate into an open circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element<T> {
    Finite(TwoPortAbcd<T>),
    Open,
}

impl<T: Real> From<TwoPortAbcd<T>> for Element<T> {
    fn from(m: TwoPortAbcd<T>) -> Self {
        Element::Finite(m)
    }
}

/// Relative distance from the parallel-LC resonance below which the branch
/// is treated as an open circuit.
pub const RESONANCE_GUARD: f64 = 1e-12;

/// Parallel LC tank inserted in series with the line.
///
/// Returns [`Element::Open`] at resonance, where the tank impedance
/// `-iωL / (1 - ω²LC)` is unbounded.
pub fn series_lc<T: Real>(l: T, c: T, omega: T) -> Result<Element<T>> {
    if !(l >= T::zero() && c >= T::zero() && omega > T::zero()) || !(l * c * omega).is_finite() {
        return Err(Error::InvalidElement(format!(
            "series LC needs finite l >= 0, c >= 0, omega > 0 (got {l}, {c}, {omega})"
        )));
    }
    let detune = T::one() - omega * omega * l * c;
    if detune.abs() < T::lit(RESONANCE_GUARD) {
        return Ok(Element::Open);
    }
    abcd_series(Complex::new(T::zero(), -omega * l / detune)).map(Element::Finite)
}

/// Result of cascading elements some of which may be open circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Chain<T> {
    Finite(TwoPortAbcd<T>),
    /// At least one open branch. `prefix` is everything before the first
    /// open and `suffix` everything after the last one.
    Open { prefix: TwoPortAbcd<T>, suffix: TwoPortAbcd<T> },
}

impl<T: Real> Chain<T> {
    /// Scattering parameters of the chain. An open chain transmits nothing
    /// and each port sees its own side terminated in an open circuit.
    pub fn s_params(&self, z0: T) -> Result<SMatrix<T>> {
        match self {
            Chain::Finite(m) => s_params(m, z0),
            Chain::Open { prefix, suffix } => {
                if !(z0 > T::zero()) {
                    return Err(Error::InvalidParameter(format!(
                        "reference impedance must be positive, got {z0}"
                    )));
                }
                let zero = Complex::new(T::zero(), T::zero());
                let reflect = |num: Complex<T>, cz: Complex<T>| -> Result<Complex<T>> {
                    let den = num + cz;
                    if den.norm() <= T::min_positive_value() {
                        return Err(Error::SingularNetwork("open-terminated section is singular".into()));
                    }
                    Ok((num - cz) / den)
                };
                Ok(SMatrix {
                    s11: reflect(prefix.a, prefix.c * z0)?,
                    s21: zero,
                    s12: zero,
                    s22: reflect(suffix.d, suffix.c * z0)?,
                    z0,
                })
            }
        }
    }
}

/// Cascades elements that may contain open branches.
pub fn cascade_elements<T: Real>(elements: &[Element<T>]) -> Result<Chain<T>> {
    if elements.is_empty() {
        return Err(Error::InvalidArgument("cascade needs at least one element".into()));
    }
    let first_open = elements.iter().position(|e| matches!(e, Element::Open));
    let last_open = elements.iter().rposition(|e| matches!(e, Element::Open));
    let product = |part: &[Element<T>]| {
        part.iter().fold(TwoPortAbcd::identity(), |acc, e| match e {
            Element::Finite(m) => acc.then(m),
            Element::Open => acc,
        })
    };
    Ok(match (first_open, last_open) {
        (Some(i), Some(j)) => Chain::Open {
            prefix: product(&elements[..i]),
            suffix: product(&elements[j + 1..]),
        },
        _ => Chain::Finite(product(elements)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
    }

    #[test]
    fn series_zero_is_identity() {
        assert_eq!(abcd_series(C::new(0.0, 0.0)).unwrap(), TwoPortAbcd::identity());
    }

    #[test]
    fn series_reactance_entries() {
        let m = abcd_series(C::new(0.0, 7.0)).unwrap();
        assert_eq!(m.a, C::new(1.0, 0.0));
        assert_eq!(m.b, C::new(0.0, 7.0));
        assert_eq!(m.c, C::new(0.0, 0.0));
        assert_eq!(abcd_series(C::new(1.0, 2.0)).unwrap().determinant(), C::new(1.0, 0.0));
    }

    #[test]
    fn series_rejects_non_finite() {
        assert!(matches!(abcd_series(C::new(f64::INFINITY, 0.0)), Err(Error::InvalidElement(_))));
        assert!(abcd_series(C::new(0.0, f64::NAN)).is_err());
    }

    #[test]
    fn quarter_wave_line() {
        let m = abcd_line(std::f64::consts::FRAC_PI_2, 50.0).unwrap();
        assert!(m.a.norm() < 1e-15 && m.d.norm() < 1e-15);
        assert_relative_eq!(m.b.im.abs(), 50.0, epsilon = 1e-12);
        assert_relative_eq!(m.c.im.abs(), 0.02, epsilon = 1e-15);
        assert_eq!(abcd_line(0.0, 50.0).unwrap(), TwoPortAbcd::identity());
        assert!(abcd_line(0.3, 0.0).is_err());
        assert!(abcd_line(0.3, -5.0).is_err());
    }

    #[test]
    fn matched_line_advances_phase() {
        for &phi in &[0.1, 1.0, 2.5, -0.7] {
            let s = s_params(&abcd_line(phi, 50.0).unwrap(), 50.0).unwrap();
            assert!(close(s.s21, C::from_polar(1.0, phi), 1e-14));
            assert!(s.s11.norm() < 1e-14);
        }
    }

    #[test]
    fn through_connection() {
        let s = s_params(&TwoPortAbcd::<f64>::identity(), 50.0).unwrap();
        assert_eq!(s.s21, C::new(1.0, 0.0));
        assert_eq!(s.s11, C::new(0.0, 0.0));
    }

    #[test]
    fn cascade_composes_series() {
        let z1 = C::new(0.0, 3.0);
        let z2 = C::new(2.0, -1.0);
        let m = cascade(&[abcd_series(z1).unwrap(), abcd_series(z2).unwrap()]).unwrap();
        assert_eq!(m, abcd_series(z1 + z2).unwrap());
        let id = TwoPortAbcd::<f64>::identity();
        assert_eq!(cascade(&[id, id]).unwrap(), id);
        assert!(cascade::<f64>(&[]).is_err());
    }

    #[test]
    fn resonant_tank_is_open() {
        let omega = 2.0 * std::f64::consts::PI * 6.3e9;
        let cap = 26e-15;
        let l = 1.0 / (omega * omega * cap);
        assert_eq!(series_lc(l, cap, omega).unwrap(), Element::Open);
        let line = Element::Finite(abcd_line(0.4, 50.0).unwrap());
        let chain = cascade_elements(&[line, Element::Open, line]).unwrap();
        let s = chain.s_params(50.0).unwrap();
        assert_eq!(s.s21, C::new(0.0, 0.0));
        assert!(!s.s21.re.is_nan());
        assert_relative_eq!(s.s11.norm(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(s.s22.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn near_resonance_approaches_open() {
        let omega = 1.0;
        let cap = 1.0;
        let l = 1.0 - 1e-9;
        let chain = cascade_elements(&[series_lc(l, cap, omega).unwrap()]).unwrap();
        let s = chain.s_params(50.0).unwrap();
        assert!(s.s21.norm() < 1e-6);
    }

    #[test]
    fn works_in_single_precision() {
        let m = cascade(&[abcd_line(0.3_f32, 50.0).unwrap(), abcd_series(Complex::new(0.0_f32, 5.0)).unwrap()])
            .unwrap();
        let s = s_params(&m, 50.0_f32).unwrap();
        assert!((s.power_sum() - 1.0).abs() < 1e-5);
    }

    fn arb_element() -> impl Strategy<Value = TwoPortAbcd<f64>> {
        prop_oneof![
            (-200.0..200.0f64).prop_map(|x| abcd_series(C::new(0.0, x)).unwrap()),
            (-3.2..3.2f64, 10.0..120.0f64).prop_map(|(phi, z)| abcd_line(phi, z).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn cascade_keeps_reciprocity(chain in prop::collection::vec(arb_element(), 1..50)) {
            let m = cascade(&chain).unwrap();
            let det = m.determinant();
            let scale = m.a.norm() * m.d.norm() + m.b.norm() * m.c.norm();
            prop_assert!((det - 1.0).norm() <= 1e-9 * scale.max(1.0));
        }

        #[test]
        fn lossless_chain_is_unitary(chain in prop::collection::vec(arb_element(), 1..20)) {
            let s = s_params(&cascade(&chain).unwrap(), 50.0).unwrap();
            prop_assert!((s.power_sum() - 1.0).abs() <= 1e-9);
            prop_assert!(close(s.s21, s.s12, 1e-9));
        }

        #[test]
        fn cascade_is_associative(a in arb_element(), b in arb_element(), c in arb_element()) {
            let left = cascade(&[cascade(&[a, b]).unwrap(), c]).unwrap();
            let right = cascade(&[a, cascade(&[b, c]).unwrap()]).unwrap();
            for (x, y) in [(left.a, right.a), (left.b, right.b), (left.c, right.c), (left.d, right.d)] {
                prop_assert!(close(x, y, 1e-12));
            }
        }
    }
}
