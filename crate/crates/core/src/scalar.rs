use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real field the engine is generic over: `f32`, `f64`, or anything else
/// with the usual float surface.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// Lift an `f64` constant into `T`.
#[inline]
pub fn cst<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

#[inline]
pub fn cre<T: Real>(x: f64) -> Complex<T> {
    Complex::new(cst(x), T::zero())
}

#[inline]
pub fn cim<T: Real>(x: f64) -> Complex<T> {
    Complex::new(T::zero(), cst(x))
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Modulus used for residual reporting (max of |re|, |im| is not enough for
/// tolerances stated on complex values).
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.norm()
}
