//! Globally adaptive Gauss-Kronrod (7/15) quadrature for real and complex
//! integrands.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Cplx, Real};

/// Values that can be integrated: closed under addition and real scaling.
pub trait QuadValue<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn magnitude(&self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Cplx<T> {
    fn zero() -> Self {
        Cplx::new(T::zero(), T::zero())
    }
    fn magnitude(&self) -> T {
        self.norm_sqr().sqrt()
    }
}

#[allow(clippy::excessive_precision)]
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
#[allow(clippy::excessive_precision)]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default cap on the number of subintervals.
pub const MAX_SUBINTERVALS: usize = 4000;

struct Segment<T, V> {
    a: T,
    b: T,
    value: V,
    error: T,
}

fn kronrod<T: Real, V: QuadValue<T>>(f: &mut impl FnMut(T) -> V, a: T, b: T) -> (V, T) {
    let half: T = (b - a) * lit(0.5);
    let mid: T = (a + b) * lit(0.5);
    let fc = f(mid);
    let mut k = fc * lit(KRONROD_WEIGHTS[7]);
    let mut g = fc * lit(GAUSS_WEIGHTS[3]);
    for i in 0..7 {
        let dx = half * lit(KRONROD_NODES[i]);
        let sum = f(mid - dx) + f(mid + dx);
        k = k + sum * lit(KRONROD_WEIGHTS[i]);
        if i % 2 == 1 {
            g = g + sum * lit(GAUSS_WEIGHTS[i / 2]);
        }
    }
    let value = k * half;
    let error = ((k - g) * half).magnitude();
    (value, error)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`, bisecting the
/// segment with the largest error estimate until the summed estimate meets
/// the tolerance.
pub fn integrate<T, V, F>(mut f: F, a: T, b: T, abs_tol: T) -> Result<V>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    integrate_with_limit(&mut f, a, b, abs_tol, MAX_SUBINTERVALS)
}

pub fn integrate_with_limit<T, V, F>(
    f: &mut F,
    a: T,
    b: T,
    abs_tol: T,
    max_segments: usize,
) -> Result<V>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    if a == b {
        return Ok(V::zero());
    }
    let (value, error) = kronrod(f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    let mut total_error = error;
    while total_error > abs_tol {
        if segments.len() >= max_segments {
            return Err(Error::Quadrature {
                achieved: to_f64(total_error),
                requested: to_f64(abs_tol),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| {
                x.1.error
                    .partial_cmp(&y.1.error)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(i, _)| i)
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = (seg.a + seg.b) * lit(0.5);
        let (lv, le) = kronrod(f, seg.a, mid);
        let (rv, re_) = kronrod(f, mid, seg.b);
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: lv,
            error: le,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: rv,
            error: re_,
        });
        total_error = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
        if !total_error.is_finite() {
            return Err(Error::Quadrature {
                achieved: f64::INFINITY,
                requested: to_f64(abs_tol),
            });
        }
    }
    Ok(segments.iter().fold(V::zero(), |acc, s| acc + s.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let v: f64 = integrate(|x: f64| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-14).unwrap();
        assert!((v - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        // int_0^{20} e^{i x} dx = (e^{20 i} - 1)/i
        let v: Cplx<f64> = integrate(|x: f64| Cplx::from_polar(1.0, x), 0.0, 20.0, 1e-12).unwrap();
        let want = (Cplx::from_polar(1.0, 20.0) - 1.0) / Cplx::new(0.0, 1.0);
        assert!((v - want).norm() < 1e-11);
    }

    #[test]
    fn endpoint_singularity_refines() {
        let v: f64 = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let mut f = |x: f64| (1.0 / x).sin();
        let r = integrate_with_limit(&mut f, 1e-6, 1.0, 1e-14, 8);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn empty_interval() {
        let v: f64 = integrate(|x: f64| x, 1.0, 1.0, 1e-12).unwrap();
        assert_eq!(v, 0.0);
        let s: f64 = integrate(|x: f64| x.sin(), 0.0, PI, 1e-12).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
    }
}
