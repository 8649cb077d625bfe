//! Scalar abstraction for the continuous dynamics and the fitting code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar (f32 or f64) the solver state and regressions are
/// generic over.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Conversion from `f64` for constants and seeded initial values.
    /// Panics only if the target type cannot represent any finite `f64`,
    /// which does not happen for f32/f64.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from(x).expect("finite f64 must convert")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("real scalar must widen to f64")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn midpoint<T: Real>(a: T, b: T) -> T {
        (a + b) / T::from_f64_lossy(2.0)
    }

    #[test]
    fn works_for_both_float_widths() {
        assert_eq!(midpoint(1.0f32, 2.0f32), 1.5f32);
        assert_eq!(midpoint(1.0f64, 2.0f64), 1.5f64);
    }
}
