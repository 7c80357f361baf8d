//! Scalar abstraction: the field math is generic over `f32`/`f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, Signed, ToPrimitive};

/// Floating-point scalar used throughout the crate.
///
/// The bound set is what the spectral kernels need: `rustfft` requires
/// `Copy + FromPrimitive + Signed + Sync + Send + Debug + 'static`, the rest
/// is ordinary float arithmetic.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Signed
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; panics only for non-representable values,
    /// which cannot occur for the finite constants used here.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to scalar")
    }

    /// Widening view as `f64` for I/O and cross-precision checks.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Signed
        + NumAssign
        + Sum
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Error function, widened through `f64` (full precision for both scalars).
pub fn erf<T: Real>(x: T) -> T {
    T::of(libm::erf(x.as_f64()))
}

/// Complementary error function (accurate for large positive arguments).
pub fn erfc<T: Real>(x: T) -> T {
    T::of(libm::erfc(x.as_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_roundtrip() {
        let x: f32 = Real::of(0.25);
        assert_eq!(x, 0.25f32);
        let y: f64 = Real::of(1.0e-12);
        assert_eq!(y.as_f64(), 1.0e-12);
    }

    #[test]
    fn erf_reference_values() {
        // erf(1) = 0.8427007929497149
        assert!((erf(1.0f64) - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((erf(-1.0f64) + 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((erf(0.5f32) - 0.520_499_88f32).abs() < 1e-6);
    }
}
