//! Floating-point abstraction shared by every module.
//!
//! All numerics are generic over [`Scalar`] so the same code runs in `f32`
//! for fast parameter sweeps and in `f64` for reference accuracy. The trait
//! is a bundle of the `num-traits` capabilities the algorithms actually use,
//! with a blanket impl so both built-in float types qualify automatically.

use std::fmt::{Debug, Display};

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar type driving all field computations (`f32` or `f64`).
///
/// `Send + Sync + 'static` is required because pattern and grid evaluation
/// parallelize over rows.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Converts a compile-time `f64` constant into the active scalar type.
///
/// Infallible for finite constants: both supported scalars accept every
/// finite `f64` (with rounding for `f32`).
pub(crate) fn real<T: Scalar>(value: f64) -> T {
    T::from_f64(value).expect("finite f64 constant must convert to the scalar type")
}
