//! Scalar abstraction: every numerical routine in this crate is generic over
//! a floating-point type implementing [`Scalar`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar usable throughout the crate.
///
/// Implemented for `f32` and `f64`. The `FftNum` bound is what the spectral
/// solve needs; everything else comes from `num_traits::Float`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FftNum + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for constants and RNG draws.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("f64 conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Euclidean norm of a slice.
pub fn norm2<T: Scalar>(xs: &[T]) -> T {
    xs.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// Inner product of two equal-length slices.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
