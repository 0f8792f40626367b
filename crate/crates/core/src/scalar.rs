//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FloatConst, ToPrimitive};

/// Real floating point type the simulator is generic over: `f32` or `f64`.
pub trait Real: RealField + Copy + FloatConst + ToPrimitive + Send + Sync {}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Cplx<T> {
    Complex::new(x, T::zero())
}

/// `r e^{i phi}`.
#[inline]
pub(crate) fn polar<T: Real>(r: T, phi: T) -> Cplx<T> {
    let (s, c) = phi.sin_cos();
    Complex::new(r * c, r * s)
}
