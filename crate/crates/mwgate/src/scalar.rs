//! Floating-point abstraction shared by the analytic models.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type accepted by the analytic scattering models.
///
/// Implemented for `f32` and `f64`. Tolerances throughout the crate are
/// stated for `f64`; single precision works but only to its own epsilon.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    fn lit(x: f64) -> Self;

    /// Widens the value to `f64`.
    fn to_f64_lossy(self) -> f64;
}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }
        }
    )*};
}

impl_real!(f32, f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.25), 0.25_f32);
        assert_eq!(0.5_f32.to_f64_lossy(), 0.5);
    }
}
