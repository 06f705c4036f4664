//! Scalar abstraction shared by all geometric code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point coordinate type: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("literal representable")
}

/// `2^-m` as `T`.
#[inline]
pub fn dyadic_len<T: Scalar>(m: i32) -> T {
    T::from_f64(2f64.powi(-m)).expect("dyadic length representable")
}

/// Integer lattice coordinate `c` at scale `m`, i.e. `c * 2^-m`.
#[inline]
pub fn dyadic_coord<T: Scalar>(c: i64, m: i32) -> T {
    T::from_i64(c).expect("coordinate representable") * dyadic_len::<T>(m)
}

/// Relative geometric tolerance, about 1.5e-11 for `f64` and 3.5e-7 for `f32`.
#[inline]
pub fn geom_tol<T: Scalar>() -> T {
    T::epsilon().sqrt() * lit(1e-3)
}

#[inline]
pub fn to_f64<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
