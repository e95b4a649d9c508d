//! Floating-point scalar abstraction.
//!
//! All numerics in this crate are generic over [`Scalar`], which is any
//! IEEE-style float with the transcendental functions from `num_traits`.
//! Concrete aliases for `f32`/`f64` live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssignOps, NumCast};

/// Scalar type the simulation is generic over.
///
/// Blanket-implemented for anything float-like; in practice `f32` and `f64`.
pub trait Scalar:
    Float + FloatConst + NumAssignOps + Sum<Self> + Debug + Display + Send + Sync + 'static
{
    /// Convert an `f64` constant (tolerance, literal) into the scalar type.
    fn from_f64(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 constant not representable in scalar type")
    }

    /// Widen to `f64` for diagnostics and error payloads.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + NumAssignOps + Sum<Self> + Debug + Display + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_f64_roundtrips_for_f64() {
        assert_eq!(<f64 as Scalar>::from_f64(0.25), 0.25);
        assert_eq!(0.25f64.to_f64_lossy(), 0.25);
    }

    #[test]
    fn from_f64_narrows_to_f32() {
        let x = <f32 as Scalar>::from_f64(1.5);
        assert_eq!(x, 1.5f32);
    }
}
