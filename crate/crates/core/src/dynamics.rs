//! Lab-frame Lindblad integration on the four-state space and rotation of
//! the result into the adiabatic basis.
//!
//! The excitation number is conserved by the coupling and every jump
//! operator ends in `|4>`, so the four-state truncation is exact at zero
//! temperature.

use crate::error::{Error, Result};
use crate::model::{
    adiabatic_unitary, couplings_at, DensityMatrix, Frame, Mat4, PulseProfile, SystemParams,
};
use crate::scalar::{lit, re, to_f64, Cplx, Real};

/// Largest admissible `h * G0` for the fixed-step integrator.
pub const MAX_STEP_G0: f64 = 0.05;

/// Trace drift beyond which an integration is reported as failed.
pub const TRACE_FAILURE: f64 = 1e-6;

/// Generator of non-adiabatic transitions in the rotated frame,
/// `mu = |2><1| + |3><2| - h.c.` (zero row and column for `|4>`).
pub fn non_adiabatic_coupling<T: Real>() -> Mat4<T> {
    let one = re(T::one());
    let mut mu = Mat4::zeros();
    mu[(1, 0)] = one;
    mu[(2, 1)] = one;
    mu[(0, 1)] = -one;
    mu[(1, 2)] = -one;
    mu
}

/// Decay rate out of each basis state: qubit 1, photon, qubit 2, ground.
fn decay_rates<T: Real>(params: &SystemParams<T>) -> [T; 4] {
    [params.kappa1, params.gamma, params.kappa2, T::zero()]
}

/// `-i[H, rho] + sum_k r_k D[|4><k|] rho` for `H` with couplings `(g1, g2)`.
fn rhs_lab<T: Real>(g1: T, g2: T, rates: &[T; 4], rho: &Mat4<T>) -> Mat4<T> {
    let (g1, g2) = (re(g1), re(g2));
    let zero = Cplx::new(T::zero(), T::zero());
    let half: T = lit(0.5);
    let mut d = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let h_rho = match i {
                0 => g1 * rho[(1, j)],
                1 => g1 * rho[(0, j)] + g2 * rho[(2, j)],
                2 => g2 * rho[(1, j)],
                _ => zero,
            };
            let rho_h = match j {
                0 => rho[(i, 1)] * g1,
                1 => rho[(i, 0)] * g1 + rho[(i, 2)] * g2,
                2 => rho[(i, 1)] * g2,
                _ => zero,
            };
            let comm = h_rho - rho_h;
            // -i * comm
            let coherent = Cplx::new(comm.im, -comm.re);
            d[(i, j)] = coherent - rho[(i, j)] * re((rates[i] + rates[j]) * half);
        }
    }
    let feed = (0..3).fold(T::zero(), |acc, k| acc + rates[k] * rho[(k, k)].re);
    d[(3, 3)] += re(feed);
    d
}

/// Time derivative of a lab-frame density matrix under the master equation.
pub fn lindblad_rhs<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
    t: T,
    rho: &DensityMatrix<T>,
) -> Result<Mat4<T>> {
    rho.expect_frame(Frame::Lab)?;
    let (g1, g2) = profile.couplings(params, t)?;
    Ok(rhs_lab(g1, g2, &decay_rates(params), &rho.entries))
}

/// Time derivative of an adiabatic-frame density matrix: diagonal energies,
/// the `theta_dot / sqrt(2) [mu, rho']` leakage term, and the lab dissipator
/// rotated into the frame.
pub fn adiabatic_rhs<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
    t: T,
    rho_p: &DensityMatrix<T>,
) -> Result<Mat4<T>> {
    rho_p.expect_frame(Frame::Adiabatic)?;
    let theta = profile.theta(t)?;
    let theta_dot = profile.theta_dot(t)?;
    let g = params.g0;
    let mut h = Mat4::zeros();
    h[(0, 0)] = re(g);
    h[(2, 2)] = re(-g);
    let r = &rho_p.entries;
    let coherent = (h * r - r * h) * Cplx::new(T::zero(), -T::one());
    let mu = non_adiabatic_coupling::<T>();
    let leakage = (mu * r - r * mu) * re(theta_dot * T::FRAC_1_SQRT_2());
    let u = adiabatic_unitary(theta);
    let lab = u * r * u.adjoint();
    let diss_lab = rhs_lab(T::zero(), T::zero(), &decay_rates(params), &lab);
    Ok(coherent + leakage + u.adjoint() * diss_lab * u)
}

/// Smallest step count satisfying the `h * G0 <= 0.05` guard.
pub fn min_steps<T: Real>(params: &SystemParams<T>, t_f: T) -> usize {
    let n = to_f64(params.g0 * t_f) / MAX_STEP_G0;
    (n - 1e-9).ceil().max(1.0) as usize
}

fn check_guard<T: Real>(params: &SystemParams<T>, t_f: T, n_steps: usize) -> Result<()> {
    let h_g0 = to_f64(params.g0 * t_f) / n_steps.max(1) as f64;
    if n_steps == 0 || h_g0 > MAX_STEP_G0 * (1.0 + 1e-12) {
        return Err(Error::StepGuard {
            h_g0,
            limit: MAX_STEP_G0,
            min_steps: min_steps(params, t_f),
        });
    }
    Ok(())
}

/// Sampled lab-frame evolution.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix<T>>,
    pub params: SystemParams<T>,
    pub profile: PulseProfile<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn theta_at(&self, k: usize) -> T {
        self.profile.theta_unchecked(self.times[k])
    }

    pub fn last(&self) -> &DensityMatrix<T> {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }

    /// Every sample rotated into the adiabatic frame.
    pub fn adiabatic_states(&self) -> Vec<DensityMatrix<T>> {
        self.states
            .iter()
            .enumerate()
            .map(|(k, s)| rotate(&s.entries, self.theta_at(k), true))
            .collect()
    }
}

/// Classical RK4 from `|1><1|`, calling `visit(step, t, rho)` after every step.
fn integrate<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
    n_steps: usize,
    mut visit: impl FnMut(usize, T, &Mat4<T>),
) -> Result<Mat4<T>> {
    let t_f = profile.t_f();
    check_guard(params, t_f, n_steps)?;
    let rates = decay_rates(params);
    let g0 = params.g0;
    let n: T = lit(n_steps as f64);
    let h = t_f / n;
    let half_h = h * lit(0.5);
    let sixth_h = h / lit(6.0);
    let two = re(lit::<T>(2.0));
    let one = re(T::one());
    let coupling = |t: T| couplings_at(g0, profile.theta_unchecked(t));

    let mut rho = DensityMatrix::<T>::initial().entries;
    let mut c0 = coupling(T::zero());
    visit(0, T::zero(), &rho);
    for step in 0..n_steps {
        let t0 = t_f * lit::<T>(step as f64) / n;
        let t1 = if step + 1 == n_steps {
            t_f
        } else {
            t_f * lit::<T>((step + 1) as f64) / n
        };
        let cm = coupling(t0 + half_h);
        let c1 = coupling(t1);
        let k1 = rhs_lab(c0.0, c0.1, &rates, &rho);
        let k2 = rhs_lab(cm.0, cm.1, &rates, &(rho + k1 * re(half_h)));
        let k3 = rhs_lab(cm.0, cm.1, &rates, &(rho + k2 * re(half_h)));
        let k4 = rhs_lab(c1.0, c1.1, &rates, &(rho + k3 * re(h)));
        rho += (k1 + k2 * two + k3 * two + k4) * re(sixth_h);
        c0 = c1;

        let drift = (rho.trace() - one).norm_sqr().sqrt();
        if !(to_f64(drift) <= TRACE_FAILURE) {
            return Err(Error::Integration {
                t: to_f64(t1),
                drift: to_f64(drift),
            });
        }
        visit(step + 1, t1, &rho);
    }
    Ok(rho)
}

/// Final lab-frame state after `n_steps` RK4 steps over `[0, t_f]`.
pub fn evolve_final<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
    n_steps: usize,
) -> Result<DensityMatrix<T>> {
    let rho = integrate(params, profile, n_steps, |_, _, _| {})?;
    Ok(DensityMatrix::new(rho, Frame::Lab))
}

/// Evolution recorded every `stride` steps; the final time is always included.
pub fn evolve_trajectory<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
    n_steps: usize,
    stride: usize,
) -> Result<Trajectory<T>> {
    let stride = stride.max(1);
    let mut times = Vec::with_capacity(n_steps / stride + 2);
    let mut states = Vec::with_capacity(n_steps / stride + 2);
    integrate(params, profile, n_steps, |step, t, rho| {
        if step % stride == 0 || step == n_steps {
            times.push(t);
            states.push(DensityMatrix::new(*rho, Frame::Lab));
        }
    })?;
    Ok(Trajectory {
        times,
        states,
        params: *params,
        profile: profile.clone(),
    })
}

fn rotate<T: Real>(m: &Mat4<T>, theta: T, into_adiabatic: bool) -> DensityMatrix<T> {
    let u = adiabatic_unitary(theta);
    if into_adiabatic {
        DensityMatrix::new(u.adjoint() * m * u, Frame::Adiabatic)
    } else {
        DensityMatrix::new(u * m * u.adjoint(), Frame::Lab)
    }
}

/// `rho' = U^dagger(theta) rho U(theta)`.
pub fn to_adiabatic<T: Real>(rho: &DensityMatrix<T>, theta: T) -> Result<DensityMatrix<T>> {
    rho.expect_frame(Frame::Lab)?;
    Ok(rotate(&rho.entries, theta, true))
}

/// `rho = U(theta) rho' U^dagger(theta)`.
pub fn from_adiabatic<T: Real>(rho_p: &DensityMatrix<T>, theta: T) -> Result<DensityMatrix<T>> {
    rho_p.expect_frame(Frame::Adiabatic)?;
    Ok(rotate(&rho_p.entries, theta, false))
}
