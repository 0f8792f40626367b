//! Physical parameters, the Fourier-parameterized mixing angle, the lab-frame
//! Hamiltonian and the rotation into the instantaneous adiabatic basis.
//!
//! The four basis states are, in order,
//! `|1> = |e,0,g>`, `|2> = |g,1,g>`, `|3> = |g,0,e>`, `|4> = |g,0,g>`
//! (qubit 1, photon number, qubit 2). Matrices are indexed from zero, so
//! `|1>` is row/column 0.

use nalgebra::Matrix4;

use crate::error::{invalid, Error, Result};
use crate::scalar::{lit, re, to_f64, Cplx, Real};

/// 4x4 complex matrix over the fixed basis.
pub type Mat4<T> = Matrix4<Cplx<T>>;

/// Coupling amplitude and decay rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    /// PAP coupling amplitude (the constant gap).
    pub g0: T,
    /// Bosonic-mode decay rate.
    pub gamma: T,
    /// Qubit-1 decay rate.
    pub kappa1: T,
    /// Qubit-2 decay rate.
    pub kappa2: T,
}

impl<T: Real> SystemParams<T> {
    pub fn new(g0: T, gamma: T, kappa1: T, kappa2: T) -> Result<Self> {
        if !(g0 > T::zero()) || !g0.is_finite() {
            return Err(invalid("g0", "must be positive and finite"));
        }
        for (name, v) in [("gamma", gamma), ("kappa1", kappa1), ("kappa2", kappa2)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be non-negative and finite"));
            }
        }
        Ok(Self {
            g0,
            gamma,
            kappa1,
            kappa2,
        })
    }

    /// Equal qubit decay rates.
    pub fn symmetric(g0: T, gamma: T, kappa: T) -> Result<Self> {
        Self::new(g0, gamma, kappa, kappa)
    }

    pub fn kappa_mean(&self) -> T {
        (self.kappa1 + self.kappa2) * lit(0.5)
    }

    /// `4 G0^2 / (gamma * kappa)` with `kappa` the mean qubit decay rate.
    pub fn cooperativity(&self) -> Result<T> {
        let kappa = self.kappa_mean();
        if self.gamma <= T::zero() || self.kappa1 <= T::zero() || self.kappa2 <= T::zero() {
            return Err(invalid(
                "cooperativity",
                "requires gamma > 0 and kappa1, kappa2 > 0",
            ));
        }
        Ok(lit::<T>(4.0) * self.g0 * self.g0 / (self.gamma * kappa))
    }

    /// The common qubit decay rate, or a contract violation if `kappa1 != kappa2`.
    pub fn symmetric_kappa(&self) -> Result<T> {
        if self.kappa1 != self.kappa2 {
            return Err(Error::Contract(format!(
                "requires kappa1 == kappa2, got {} and {}",
                to_f64(self.kappa1),
                to_f64(self.kappa2)
            )));
        }
        Ok(self.kappa1)
    }
}

/// Control angle profile with a truncated Fourier series for its rate,
/// `theta_dot(t) = a_0 + sum_{n=1}^{2N} a_n cos(n pi t / t_f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseProfile<T> {
    t_f: T,
    alpha: Vec<T>,
    theta0: T,
}

impl<T: Real> PulseProfile<T> {
    /// Builds a profile from the full coefficient list `a_0..a_{2N}`.
    pub fn new(t_f: T, alpha: Vec<T>) -> Result<Self> {
        if !(t_f > T::zero()) || !t_f.is_finite() {
            return Err(invalid("t_f", "must be positive and finite"));
        }
        if alpha.is_empty() || alpha.len().is_multiple_of(2) {
            return Err(invalid(
                "alpha",
                format!("expected 2N+1 coefficients, got {}", alpha.len()),
            ));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(invalid("alpha", "coefficients must be finite"));
        }
        Ok(Self {
            t_f,
            alpha,
            theta0: T::zero(),
        })
    }

    /// Fixed-endpoint profile: `a_0 = pi/(4 t_f)` so that `theta(t_f) = pi/4`,
    /// with the given harmonics `a_1..a_{2N}`.
    pub fn fixed_endpoint(t_f: T, harmonics: &[T]) -> Result<Self> {
        let mut alpha = Vec::with_capacity(harmonics.len() + 1);
        alpha.push(Self::endpoint_rate(t_f));
        alpha.extend_from_slice(harmonics);
        Self::new(t_f, alpha)
    }

    /// Linear ramp from 0 to pi/4 (N = 0).
    pub fn linear_ramp(t_f: T) -> Result<Self> {
        Self::fixed_endpoint(t_f, &[])
    }

    /// The constant rate `pi/(4 t_f)` that lands the angle on pi/4.
    pub fn endpoint_rate(t_f: T) -> T {
        T::FRAC_PI_4() / t_f
    }

    pub fn with_theta0(mut self, theta0: T) -> Self {
        self.theta0 = theta0;
        self
    }

    pub fn t_f(&self) -> T {
        self.t_f
    }

    pub fn theta0(&self) -> T {
        self.theta0
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    /// Fourier truncation order `N`.
    pub fn order(&self) -> usize {
        (self.alpha.len() - 1) / 2
    }

    /// Whether `a_0` equals `pi/(4 t_f)` exactly.
    pub fn is_fixed_endpoint(&self) -> bool {
        self.alpha[0] == Self::endpoint_rate(self.t_f)
    }

    fn check_time(&self, t: T) -> Result<()> {
        if t >= T::zero() && t <= self.t_f {
            Ok(())
        } else {
            Err(Error::Domain {
                t: to_f64(t),
                t_f: to_f64(self.t_f),
            })
        }
    }

    pub fn theta_dot(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        Ok(self.theta_dot_unchecked(t))
    }

    /// Exact antiderivative of the rate series.
    pub fn theta(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        Ok(self.theta_unchecked(t))
    }

    pub(crate) fn theta_dot_unchecked(&self, t: T) -> T {
        let w = T::PI() * t / self.t_f;
        self.alpha
            .iter()
            .enumerate()
            .skip(1)
            .fold(self.alpha[0], |acc, (n, &a)| {
                acc + a * (w * lit(n as f64)).cos()
            })
    }

    pub(crate) fn theta_unchecked(&self, t: T) -> T {
        let w = T::PI() * t / self.t_f;
        self.alpha.iter().enumerate().skip(1).fold(
            self.theta0 + self.alpha[0] * t,
            |acc, (n, &a)| {
                let k: T = lit(n as f64);
                acc + a * self.t_f / (k * T::PI()) * (w * k).sin()
            },
        )
    }

    /// `theta_dot(0) = a_0 + sum a_n`.
    pub fn rate_at_start(&self) -> T {
        self.alpha.iter().fold(T::zero(), |acc, &a| acc + a)
    }

    /// `theta_dot(t_f) = a_0 + sum (-1)^n a_n`.
    pub fn rate_at_end(&self) -> T {
        self.alpha.iter().enumerate().fold(
            T::zero(),
            |acc, (n, &a)| if n % 2 == 0 { acc + a } else { acc - a },
        )
    }

    /// `int_0^{t_f} theta_dot^2 dt = a_0^2 t_f + (t_f/2) sum a_n^2` (orthogonality).
    pub fn rate_sq_integral(&self) -> T {
        let harmonics = self.alpha[1..]
            .iter()
            .fold(T::zero(), |acc, &a| acc + a * a);
        self.alpha[0] * self.alpha[0] * self.t_f + harmonics * self.t_f * lit(0.5)
    }

    /// `(G1, G2) = (G0 sin theta, G0 cos theta)` at time `t`.
    pub fn couplings(&self, params: &SystemParams<T>, t: T) -> Result<(T, T)> {
        Ok(couplings_at(params.g0, self.theta(t)?))
    }
}

pub(crate) fn couplings_at<T: Real>(g0: T, theta: T) -> (T, T) {
    let (s, c) = theta.sin_cos();
    (g0 * s, g0 * c)
}

/// Coupling Hamiltonian in the 4-state basis: `|1>-|2>` via `G1`,
/// `|2>-|3>` via `G2`; `|4>` is decoupled.
pub fn hamiltonian_lab<T: Real>(g1: T, g2: T) -> Mat4<T> {
    let mut h = Mat4::<T>::zeros();
    h[(0, 1)] = re(g1);
    h[(1, 0)] = re(g1);
    h[(1, 2)] = re(g2);
    h[(2, 1)] = re(g2);
    h
}

/// Unitary whose columns are the instantaneous eigenstates
/// (bright `+G`, dark, bright `-G`, ground).
pub fn adiabatic_unitary<T: Real>(theta: T) -> Mat4<T> {
    let (s, c) = theta.sin_cos();
    let r = T::FRAC_1_SQRT_2();
    let z = T::zero();
    let one = T::one();
    #[rustfmt::skip]
    let u = Matrix4::new(
        s * r, -c, -s * r, z,
        r,      z,  r,     z,
        c * r,  s, -c * r, z,
        z,      z,  z,     one,
    );
    u.map(re)
}

/// Which basis a density matrix is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Adiabatic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    pub entries: Mat4<T>,
    pub frame: Frame,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(entries: Mat4<T>, frame: Frame) -> Self {
        Self { entries, frame }
    }

    /// `|k><k|` (zero-based index).
    pub fn basis_projector(k: usize, frame: Frame) -> Self {
        let mut m = Mat4::zeros();
        m[(k, k)] = re(T::one());
        Self::new(m, frame)
    }

    /// The fixed initial condition `|1><1|` in the lab frame.
    pub fn initial() -> Self {
        Self::basis_projector(0, Frame::Lab)
    }

    pub fn expect_frame(&self, frame: Frame) -> Result<()> {
        if self.frame == frame {
            Ok(())
        } else {
            Err(Error::FrameMismatch {
                expected: frame,
                found: self.frame,
            })
        }
    }

    /// Element `rho_{ij}` using the one-based labels of the basis states.
    pub fn element(&self, i: usize, j: usize) -> Cplx<T> {
        self.entries[(i - 1, j - 1)]
    }

    pub fn population(&self, k: usize) -> T {
        self.element(k, k).re
    }

    pub fn trace(&self) -> Cplx<T> {
        self.entries.trace()
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> T {
        // Tr(rho rho) = sum_ij rho_ij rho_ji
        let mut acc = Cplx::new(T::zero(), T::zero());
        for i in 0..4 {
            for j in 0..4 {
                acc += self.entries[(i, j)] * self.entries[(j, i)];
            }
        }
        acc.re
    }

    /// Largest elementwise `|rho - rho^dagger|`.
    pub fn hermiticity_error(&self) -> T {
        let mut worst = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                let d = self.entries[(i, j)] - self.entries[(j, i)].conj();
                worst = worst.max(d.norm_sqr().sqrt());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> T {
        let h = (self.entries + self.entries.adjoint()) * re(lit::<T>(0.5));
        h.symmetric_eigenvalues().min()
    }
}
