use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the numerical core is generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + LinalgScalar
    + ScalarOperand
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Relative tolerance for comparisons that should hold up to roundoff.
    ///
    /// `1e-9` in double precision, widened for narrower types so that it never
    /// sits below a few hundred ulps.
    fn roundoff_tol() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(256.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Natural log of the dimension, floored at 1 so that `d = 1` still yields a
/// usable oversampling constant.
pub(crate) fn log_dim<T: Scalar>(d: usize) -> T {
    T::lit((d as f64).ln().max(1.0))
}
