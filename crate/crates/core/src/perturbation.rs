//! Perturbative corrections to the adiabatic-frame density matrix at the
//! final time, for PAP couplings (constant gap `G0`).
//!
//! Order 0 is the dark state (`rho'_22 = 1`). Order 1 carries the qubit
//! decay, orders 2 and 3 the non-adiabatic leakage and its interplay with
//! cavity loss. Only the elements `rho'_11`, `rho'_13`, `rho'_22` are
//! tracked; with `theta(t_f) = pi/4` the concurrence is
//! `rho'_22 + Re rho'_13 - rho'_11`.

use std::ops::{Add, Mul, Sub};

use crate::error::Result;
use crate::model::{PulseProfile, SystemParams};
use crate::quadrature::{integrate, QuadValue};
use crate::scalar::{lit, polar, Cplx, Real};

/// Absolute tolerance for single integrals.
pub const SINGLE_TOL: f64 = 1e-10;
/// Outer tolerance for the nested second-order integrals.
pub const NESTED_TOL: f64 = 1e-8;

/// Corrections of a single perturbative order at `t_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderTerms<T> {
    pub rho11: T,
    pub rho13: Cplx<T>,
    pub rho22: T,
}

impl<T: Real> OrderTerms<T> {
    pub fn zero() -> Self {
        Self {
            rho11: T::zero(),
            rho13: Cplx::new(T::zero(), T::zero()),
            rho22: T::zero(),
        }
    }

    /// Largest modulus among the three elements.
    pub fn max_magnitude(&self) -> T {
        self.rho11
            .abs()
            .max(self.rho13.norm_sqr().sqrt())
            .max(self.rho22.abs())
    }

    /// Largest elementwise deviation from `other`.
    pub fn max_deviation(&self, other: &Self) -> T {
        (self.rho11 - other.rho11)
            .abs()
            .max((self.rho13 - other.rho13).norm_sqr().sqrt())
            .max((self.rho22 - other.rho22).abs())
    }
}

/// Orders 1-3 of the boundary-form expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeTerms<T> {
    pub order1: OrderTerms<T>,
    pub order2: OrderTerms<T>,
    pub order3: OrderTerms<T>,
}

impl<T: Real> PerturbativeTerms<T> {
    pub fn order0_rho22(&self) -> T {
        T::one()
    }

    fn sum(&self) -> OrderTerms<T> {
        let o = [self.order1, self.order2, self.order3];
        o.iter().fold(
            OrderTerms {
                rho22: self.order0_rho22(),
                ..OrderTerms::zero()
            },
            |acc, t| OrderTerms {
                rho11: acc.rho11 + t.rho11,
                rho13: acc.rho13 + t.rho13,
                rho22: acc.rho22 + t.rho22,
            },
        )
    }

    pub fn rho11(&self) -> T {
        self.sum().rho11
    }

    pub fn rho13(&self) -> Cplx<T> {
        self.sum().rho13
    }

    pub fn rho22(&self) -> T {
        self.sum().rho22
    }

    /// `|rho'_22 + Re rho'_13 - rho'_11|`, the concurrence at `theta = pi/4`.
    pub fn concurrence(&self) -> T {
        let s = self.sum();
        (s.rho22 + s.rho13.re - s.rho11).abs()
    }
}

/// Boundary data entering the PAP concurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PapBoundary<T> {
    pub a1: T,
    pub a2: T,
    pub theta_dot_0: T,
    pub theta_dot_tf: T,
    /// `int_0^{t_f} G dt = G0 t_f`.
    pub gap_phase: T,
}

impl<T: Real> PapBoundary<T> {
    pub fn new(params: &SystemParams<T>, profile: &PulseProfile<T>) -> Self {
        let (a1, a2) = boundary_coefficients(params.g0, params.gamma, profile.t_f());
        Self {
            a1,
            a2,
            theta_dot_0: profile.rate_at_start(),
            theta_dot_tf: profile.rate_at_end(),
            gap_phase: params.g0 * profile.t_f(),
        }
    }
}

/// `A1 = (2 - gamma t_f/2) cos(G0 t_f)`, `A2 = (-1 + gamma t_f/2) sin^2(G0 t_f)`.
pub fn boundary_coefficients<T: Real>(g0: T, gamma: T, t_f: T) -> (T, T) {
    let half_loss = gamma * t_f * lit(0.5);
    let (s, c) = (g0 * t_f).sin_cos();
    (
        (lit::<T>(2.0) - half_loss) * c,
        (half_loss - T::one()) * s * s,
    )
}

/// First order: only the qubit decay acts, `rho'_22 = -int (k1 cos^2 + k2 sin^2)`.
pub fn order1_terms<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
) -> Result<OrderTerms<T>> {
    let (k1, k2) = (params.kappa1, params.kappa2);
    let loss: T = integrate(
        |t: T| {
            let (s, c) = profile.theta_unchecked(t).sin_cos();
            k1 * c * c + k2 * s * s
        },
        T::zero(),
        profile.t_f(),
        lit(SINGLE_TOL),
    )?;
    Ok(OrderTerms {
        rho22: -loss,
        ..OrderTerms::zero()
    })
}

#[derive(Clone, Copy)]
struct Pair<T: Real>(Cplx<T>, Cplx<T>);

impl<T: Real> Add for Pair<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

impl<T: Real> Sub for Pair<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Pair(self.0 - o.0, self.1 - o.1)
    }
}

impl<T: Real> Mul<T> for Pair<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Pair(self.0 * k, self.1 * k)
    }
}

impl<T: Real> QuadValue<T> for Pair<T> {
    fn zero() -> Self {
        let z = Cplx::new(T::zero(), T::zero());
        Pair(z, z)
    }
    fn magnitude(&self) -> T {
        self.0.norm_sqr().sqrt().max(self.1.norm_sqr().sqrt())
    }
}

/// Second order from the nested time integrals,
///
/// `rho'_11 = int_0^{t_f} dt' th'(t') int_0^{t'} dt th'(t) cos(G0 (t' - t))`,
/// `rho'_13 = -int_0^{t_f} dt' th'(t') e^{-2i G0 (t_f - t')} int_0^{t'} dt th'(t) e^{-i G0 (t' - t)}`,
///
/// with `rho'_22 = -2 rho'_11`. Qubit decay is not carried beyond first order.
pub fn order2_terms_quadrature<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
) -> Result<OrderTerms<T>> {
    let g0 = params.g0;
    let t_f = profile.t_f();
    let inner_tol: T = lit(SINGLE_TOL);
    let mut failure = None;
    let outer: Pair<T> = integrate(
        |tp: T| {
            // J(t') = int_0^{t'} th'(t) e^{-i G0 (t' - t)} dt
            let j: Cplx<T> = match integrate(
                |t: T| polar(profile.theta_dot_unchecked(t), -g0 * (tp - t)),
                T::zero(),
                tp,
                inner_tol,
            ) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    Cplx::new(T::zero(), T::zero())
                }
            };
            let rate = profile.theta_dot_unchecked(tp);
            let phase = polar(T::one(), -lit::<T>(2.0) * g0 * (t_f - tp));
            Pair(Cplx::new(rate * j.re, T::zero()), -(phase * j * rate))
        },
        T::zero(),
        t_f,
        lit(NESTED_TOL),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let rho11 = outer.0.re;
    Ok(OrderTerms {
        rho11,
        rho13: outer.1,
        rho22: -lit::<T>(2.0) * rho11,
    })
}

/// Second order after integrating by parts and keeping the boundary terms.
pub fn order2_terms_boundary<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
) -> OrderTerms<T> {
    let b = PapBoundary::new(params, profile);
    let g2 = params.g0 * params.g0;
    let (x, y) = (b.theta_dot_0, b.theta_dot_tf);
    let half: T = lit(0.5);
    let rho11 = x * x / g2 * half + y * y / g2 * half - x * y / g2 * b.gap_phase.cos();
    let e1 = polar(T::one(), -b.gap_phase);
    let e2 = polar(T::one(), -lit::<T>(2.0) * b.gap_phase);
    let rho13 =
        Cplx::new(y * y / g2 * half, T::zero()) - e1 * (x * y / g2) + e2 * (x * x / g2 * half);
    OrderTerms {
        rho11,
        rho13,
        rho22: -lit::<T>(2.0) * rho11,
    }
}

/// Third order (cavity loss acting on the leaked population), boundary form.
/// The bulk term `int theta_dot^2 / G0^2` is integrated numerically.
pub fn order3_terms_boundary<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
) -> Result<OrderTerms<T>> {
    let b = PapBoundary::new(params, profile);
    let g0 = params.g0;
    let g2 = g0 * g0;
    let gamma = params.gamma;
    let t_f = profile.t_f();
    let (x, y) = (b.theta_dot_0, b.theta_dot_tf);
    let quarter_loss = gamma * t_f * lit(0.25);
    let cos = b.gap_phase.cos();
    let rho11 = quarter_loss * x * y / g2 * cos - quarter_loss * x * x / g2;
    let e1 = polar(T::one(), -b.gap_phase);
    let e2 = polar(T::one(), -lit::<T>(2.0) * b.gap_phase);
    let rho13 = e1 * (quarter_loss * x * y / g2) - e2 * (quarter_loss * x * x / g2);
    let bulk: T = integrate(
        |t: T| {
            let r = profile.theta_dot_unchecked(t) / g0;
            r * r
        },
        T::zero(),
        t_f,
        lit(SINGLE_TOL),
    )?;
    let rho22 = -gamma * bulk - lit::<T>(2.0) * quarter_loss * x * y / g2 * cos;
    Ok(OrderTerms {
        rho11,
        rho13,
        rho22,
    })
}

/// Orders 1-3 with the boundary forms for orders 2 and 3.
pub fn perturbative_terms<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
) -> Result<PerturbativeTerms<T>> {
    Ok(PerturbativeTerms {
        order1: order1_terms(params, profile)?,
        order2: order2_terms_boundary(params, profile),
        order3: order3_terms_boundary(params, profile)?,
    })
}

/// PAP concurrence for equal qubit decay rates and `theta(t_f) = pi/4`:
///
/// `C = 1 - k t_f - g int th'^2/G0^2 - x^2/G0^2 - y^2/G0^2 + A1 x y/G0^2 + A2 x^2/G0^2`
///
/// with `x = theta_dot(0)`, `y = theta_dot(t_f)`. All Fourier sums are exact.
pub fn concurrence_perturbative_pap<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
) -> Result<T> {
    let kappa = params.symmetric_kappa()?;
    let b = PapBoundary::new(params, profile);
    let g2 = params.g0 * params.g0;
    let t_f = profile.t_f();
    let (x, y) = (b.theta_dot_0, b.theta_dot_tf);
    let bulk = T::one() - kappa * t_f - params.gamma * profile.rate_sq_integral() / g2;
    Ok(bulk - x * x / g2 - y * y / g2 + b.a1 * x * y / g2 + b.a2 * x * x / g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;
    use std::f64::consts::PI;

    fn params(gamma: f64, k1: f64, k2: f64) -> SystemParams<f64> {
        SystemParams::new(1.0, gamma, k1, k2).unwrap()
    }

    #[test]
    fn order1_symmetric_decay_is_linear_in_time() {
        let prof = PulseProfile::fixed_endpoint(9.0, &[0.02, -0.05]).unwrap();
        let t = order1_terms(&params(0.2, 0.01, 0.01), &prof).unwrap();
        assert!((t.rho22 + 0.01 * 9.0).abs() < 1e-10);
        assert_eq!(t.rho11, 0.0);
        assert_eq!(t.rho13.norm(), 0.0);
        let t = order1_terms(&params(0.2, 0.0, 0.0), &prof).unwrap();
        assert_eq!(t.rho22, 0.0);
    }

    #[test]
    fn order1_ramp_closed_form() {
        let t_f = 12.0;
        let k1 = 0.003;
        let prof = PulseProfile::linear_ramp(t_f).unwrap();
        let t = order1_terms(&params(0.2, k1, 0.0), &prof).unwrap();
        // int_0^{t_f} cos^2(pi t / 4 t_f) dt = t_f (1/2 + 1/pi)
        assert!((t.rho22 + k1 * t_f * (0.5 + 1.0 / PI)).abs() < 1e-12);
    }

    #[test]
    fn order2_vanishes_without_rotation() {
        let prof = PulseProfile::new(10.0, vec![0.0, 0.0, 0.0]).unwrap();
        let p = params(0.25, 0.0, 0.0);
        let q = order2_terms_quadrature(&p, &prof).unwrap();
        assert_eq!(q.max_magnitude(), 0.0);
        assert_eq!(order2_terms_boundary(&p, &prof).max_magnitude(), 0.0);
    }

    #[test]
    fn order2_boundary_examples() {
        let p = params(0.25, 0.0, 0.0);
        // theta_dot(0) = theta_dot(t_f) = 0: pure even harmonic cancelling a_0
        let t_f = 10.0;
        let a0 = PI / (4.0 * t_f);
        let prof = PulseProfile::fixed_endpoint(t_f, &[0.0, -a0]).unwrap();
        assert!(order2_terms_boundary(&p, &prof).max_magnitude() < 1e-18);

        // equal boundary rates and G0 t_f = 2 pi m
        let t_f = 4.0 * PI;
        let prof = PulseProfile::linear_ramp(t_f).unwrap();
        let b = order2_terms_boundary(&p, &prof);
        assert!(b.rho11.abs() < 1e-18);

        // theta_dot(0) = 0, theta_dot(t_f) = v
        let t_f = 7.0;
        let a0 = PI / (4.0 * t_f);
        let prof = PulseProfile::fixed_endpoint(t_f, &[-a0 / 2.0, -a0 / 2.0]).unwrap();
        assert!(prof.rate_at_start().abs() < 1e-18);
        let v = prof.rate_at_end();
        let b = order2_terms_boundary(&p, &prof);
        assert!((b.rho13.re - v * v / 2.0).abs() < 1e-18);
        assert!(b.rho13.im.abs() < 1e-18);
        assert_eq!(b.rho22, -2.0 * b.rho11);
    }

    #[test]
    fn order2_quadrature_relation_and_boundary_agreement() {
        let p = params(0.25, 0.0, 0.0);
        let t_f = 40.0;
        let prof = PulseProfile::linear_ramp(t_f).unwrap();
        let q = order2_terms_quadrature(&p, &prof).unwrap();
        let b = order2_terms_boundary(&p, &prof);
        assert_eq!(q.rho22, -2.0 * q.rho11);
        let scale = q.max_magnitude().max(b.max_magnitude());
        assert!(q.max_deviation(&b) <= scale / t_f, "{:?} vs {:?}", q, b);
    }

    #[test]
    fn order3_examples() {
        let prof = PulseProfile::fixed_endpoint(8.0, &[0.01, 0.03]).unwrap();
        let t = order3_terms_boundary(&params(0.0, 0.01, 0.01), &prof).unwrap();
        assert_eq!(t.max_magnitude(), 0.0);

        let gamma = 0.25;
        let t_f = 8.0;
        let a0 = PI / (4.0 * t_f);
        let prof = PulseProfile::fixed_endpoint(t_f, &[-a0 / 2.0, -a0 / 2.0]).unwrap();
        let t = order3_terms_boundary(&params(gamma, 0.0, 0.0), &prof).unwrap();
        assert!(t.rho11.abs() < 1e-18 && t.rho13.norm() < 1e-18);
        assert!((t.rho22 + gamma * prof.rate_sq_integral()).abs() < 1e-12);

        let ramp = PulseProfile::linear_ramp(t_f).unwrap();
        let bulk = -gamma * PI * PI / (16.0 * t_f);
        let v = a0;
        let boundary = -gamma * t_f * v * v / 2.0 * t_f.cos();
        let t = order3_terms_boundary(&params(gamma, 0.0, 0.0), &ramp).unwrap();
        assert!((t.rho22 - (bulk + boundary)).abs() < 1e-12);
    }

    #[test]
    fn pap_concurrence_examples() {
        let t_f = 9.0;
        let p = params(0.0, 0.0, 0.0);
        let ramp = PulseProfile::linear_ramp(t_f).unwrap();
        let (a1, a2) = boundary_coefficients(1.0, 0.0, t_f);
        let v = PI / (4.0 * t_f);
        let want = 1.0 - v * v * (2.0 - a1 - a2);
        assert!((concurrence_perturbative_pap(&p, &ramp).unwrap() - want).abs() < 1e-15);

        let a0 = PI / (4.0 * t_f);
        let flat = PulseProfile::fixed_endpoint(t_f, &[0.0, -a0]).unwrap();
        let gamma = 0.25;
        let c = concurrence_perturbative_pap(&params(gamma, 0.0, 0.0), &flat).unwrap();
        assert!((c - (1.0 - gamma * flat.rate_sq_integral())).abs() < 1e-15);

        assert!(matches!(
            concurrence_perturbative_pap(&params(0.1, 0.01, 0.02), &ramp),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn pap_concurrence_is_sum_of_boundary_orders() {
        let p = params(0.25, 0.0025, 0.0025);
        let prof = PulseProfile::fixed_endpoint(8.0, &[0.01, -0.03, 0.02, 0.005]).unwrap();
        let terms = perturbative_terms(&p, &prof).unwrap();
        let c = concurrence_perturbative_pap(&p, &prof).unwrap();
        assert!((terms.concurrence() - c).abs() < 1e-10);
        assert_eq!(terms.order1.rho11, 0.0);
        assert_eq!(terms.order2.rho22, -2.0 * terms.order2.rho11);
    }

    #[test]
    fn boundary_terms_scale_with_duration() {
        // stretching t_f at fixed shape halves theta_dot
        let p = params(0.25, 0.0, 0.0);
        let shape = [0.3, -0.2, 0.1, 0.05];
        let build = |t_f: f64| {
            let a0 = PI / (4.0 * t_f);
            let h: Vec<f64> = shape.iter().map(|s| s * a0).collect();
            PulseProfile::fixed_endpoint(t_f, &h).unwrap()
        };
        // choose t_f with G0 t_f a multiple of 2 pi so the phases coincide
        let (short, long) = (build(4.0 * PI), build(8.0 * PI));
        let (b1, b2) = (
            order2_terms_boundary(&p, &short),
            order2_terms_boundary(&p, &long),
        );
        assert!((b2.rho11 - b1.rho11 / 4.0).abs() < 1e-15);
        assert!((b2.rho13 - b1.rho13 / 4.0).norm() < 1e-15);
        // int theta_dot^2 scales as 1/t_f
        assert!((long.rate_sq_integral() - short.rate_sq_integral() / 2.0).abs() < 1e-15);
    }
}
