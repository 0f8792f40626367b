//! Two-qubit entanglement of the simulated state.
//!
//! The reduced qubit state is written in the basis
//! `|ee>, |eg>, |ge>, |gg>` (qubit 1 first).

use nalgebra::{Matrix4, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{DensityMatrix, Frame, Mat4};
use crate::scalar::{lit, re, to_f64, Real};

/// Positivity tolerance for density matrices.
pub const NEGATIVITY_TOL: f64 = 1e-10;

/// Clamp window for the eigenvalues of `rho (Y rho* Y)`.
pub const SPECTRAL_CLAMP: f64 = 1e-12;

/// Qubit density matrix obtained by tracing out the bosonic mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTwoQubitState<T: Real>(pub Mat4<T>);

impl<T: Real> ReducedTwoQubitState<T> {
    pub fn matrix(&self) -> &Mat4<T> {
        &self.0
    }
}

/// Partial trace over the mode. Coherences between `|gg>` and the
/// one-excitation states vanish, and `|ee>` is never populated.
pub fn reduce<T: Real>(rho: &DensityMatrix<T>) -> Result<ReducedTwoQubitState<T>> {
    rho.expect_frame(Frame::Lab)?;
    let r = &rho.entries;
    let mut m = Mat4::zeros();
    m[(1, 1)] = r[(0, 0)];
    m[(1, 2)] = r[(0, 2)];
    m[(2, 1)] = r[(2, 0)];
    m[(2, 2)] = r[(2, 2)];
    m[(3, 3)] = r[(1, 1)] + r[(3, 3)];
    Ok(ReducedTwoQubitState(m))
}

/// `sigma_y (x) sigma_y` in the `ee, eg, ge, gg` basis.
fn spin_flip<T: Real>() -> Mat4<T> {
    let (o, z) = (T::one(), T::zero());
    #[rustfmt::skip]
    let y = Matrix4::new(
        z,  z, z, -o,
        z,  z, o,  z,
        z,  o, z,  z,
        -o, z, z,  z,
    );
    y.map(re)
}

fn combine<T: Real>(mut lambdas: Vec<T>) -> T {
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let c = lambdas[1..].iter().fold(lambdas[0], |acc, &l| acc - l);
    c.max(T::zero())
}

/// Wootters concurrence `max{0, l1 - l2 - l3 - l4}`.
///
/// The `l_i` (square roots of the spectrum of `rho (Y rho* Y)`) are obtained
/// as the singular values of `X^T Y X` for the factorization `rho = X X^dagger`,
/// which avoids taking square roots of near-zero eigenvalues.
pub fn wootters_concurrence<T: Real>(rr: &ReducedTwoQubitState<T>) -> Result<T> {
    let m = rr.matrix();
    let herm = (m + m.adjoint()) * re(lit::<T>(0.5));
    let eig = SymmetricEigen::new(herm);
    let tol: T = lit(NEGATIVITY_TOL);
    let mut x = eig.eigenvectors;
    for (k, &w) in eig.eigenvalues.iter().enumerate() {
        if w < -tol {
            return Err(Error::NonPhysical {
                eigenvalue: to_f64(w),
            });
        }
        let s = re(w.max(T::zero()).sqrt());
        for i in 0..4 {
            x[(i, k)] *= s;
        }
    }
    let tau = x.transpose() * spin_flip::<T>() * x;
    let sv = tau.svd(false, false).singular_values;
    Ok(combine(sv.iter().copied().collect()))
}

/// Wootters concurrence from the eigenvalues of the non-Hermitian
/// `rho (Y rho* Y)` via a complex Schur decomposition.
///
/// Near rank-deficient states the square root turns eigenvalue roundoff
/// `eps` into an error of order `sqrt(eps)`.
pub fn wootters_concurrence_spectral<T: Real>(rr: &ReducedTwoQubitState<T>) -> Result<T> {
    let m = rr.matrix();
    let y = spin_flip::<T>();
    let r = m * y * m.map(|z| z.conj()) * y;
    let ev = r
        .eigenvalues()
        .ok_or_else(|| Error::Contract("Schur decomposition failed to converge".into()))?;
    let clamp: T = lit(SPECTRAL_CLAMP);
    let lambdas = ev
        .iter()
        .map(|z| {
            if z.re < -clamp {
                Err(Error::NonPhysical {
                    eigenvalue: to_f64(z.re),
                })
            } else {
                Ok(z.re.max(T::zero()).sqrt())
            }
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(combine(lambdas))
}

/// `C = 2 |rho_31|` for a lab-frame state.
pub fn concurrence_fast<T: Real>(rho: &DensityMatrix<T>) -> T {
    debug_assert_eq!(rho.frame, Frame::Lab);
    let z = rho.entries[(2, 0)];
    lit::<T>(2.0) * z.norm_sqr().sqrt()
}

/// Concurrence from adiabatic-frame elements,
/// `|(rho'_22 + Re rho'_13 - rho'_11) sin 2theta + 2 sqrt2 Re rho'_12 cos 2theta|`.
///
/// Relies on `rho'_11 = rho'_33` and `rho'_12 = -rho'_23`.
pub fn concurrence_adiabatic<T: Real>(rho_p: &DensityMatrix<T>, theta: T) -> T {
    debug_assert_eq!(rho_p.frame, Frame::Adiabatic);
    let r = &rho_p.entries;
    let two_theta = theta * lit(2.0);
    let bulk = r[(1, 1)].re + r[(0, 2)].re - r[(0, 0)].re;
    let coherence = lit::<T>(2.0) * T::SQRT_2() * r[(0, 1)].re;
    (bulk * two_theta.sin() + coherence * two_theta.cos()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_trajectory, to_adiabatic};
    use crate::model::{PulseProfile, SystemParams};
    use crate::scalar::Cplx;
    use std::f64::consts::PI;

    fn lab(entries: &[((usize, usize), Cplx<f64>)]) -> DensityMatrix<f64> {
        let mut m = Mat4::zeros();
        for &((i, j), z) in entries {
            m[(i - 1, j - 1)] = z;
        }
        DensityMatrix::new(m, Frame::Lab)
    }

    fn bell() -> DensityMatrix<f64> {
        lab(&[
            ((1, 1), re(0.5)),
            ((3, 3), re(0.5)),
            ((1, 3), re(0.5)),
            ((3, 1), re(0.5)),
        ])
    }

    #[test]
    fn photon_and_ground_reduce_to_gg() {
        for k in [2, 4] {
            let rr = reduce(&lab(&[((k, k), re(1.0))])).unwrap();
            let mut want = Mat4::zeros();
            want[(3, 3)] = re(1.0);
            assert_eq!(rr.0, want);
            assert_eq!(wootters_concurrence(&rr).unwrap(), 0.0);
        }
    }

    #[test]
    fn bell_state_structure_and_concurrence() {
        let rr = reduce(&bell()).unwrap();
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert_eq!(rr.0[(i, j)], re(0.5));
        }
        assert!((0..4).all(|k| rr.0[(0, k)].norm() == 0.0 && rr.0[(k, 0)].norm() == 0.0));
        assert!((wootters_concurrence(&rr).unwrap() - 1.0).abs() < 1e-12);
        assert!((wootters_concurrence_spectral(&rr).unwrap() - 1.0).abs() < 1e-7);
        assert!((concurrence_fast(&bell()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn incoherent_mixture_is_separable() {
        let rho = lab(&[((1, 1), re(0.5)), ((3, 3), re(0.5))]);
        let rr = reduce(&rho).unwrap();
        assert!(wootters_concurrence(&rr).unwrap().abs() < 1e-15);
        assert_eq!(concurrence_fast(&rho), 0.0);
    }

    #[test]
    fn fast_form_uses_modulus_only() {
        for phi in [0.0, 0.4, 2.0, -2.9] {
            let z = Cplx::from_polar(0.3, phi);
            let rho = lab(&[((3, 1), z), ((1, 3), z.conj())]);
            assert!((concurrence_fast(&rho) - 0.6).abs() < 1e-15);
        }
    }

    #[test]
    fn reduce_requires_lab_frame() {
        let rho = DensityMatrix::<f64>::basis_projector(0, Frame::Adiabatic);
        assert!(matches!(reduce(&rho), Err(Error::FrameMismatch { .. })));
    }

    #[test]
    fn negative_state_is_rejected() {
        let rho = lab(&[((1, 1), re(1.1)), ((4, 4), re(-0.1))]);
        let rr = reduce(&rho).unwrap();
        assert!(matches!(
            wootters_concurrence(&rr),
            Err(Error::NonPhysical { .. })
        ));
    }

    #[test]
    fn adiabatic_form_examples() {
        let dark = DensityMatrix::<f64>::basis_projector(1, Frame::Adiabatic);
        assert!((concurrence_adiabatic(&dark, PI / 4.0) - 1.0).abs() < 1e-15);
        let mut m = Mat4::<f64>::zeros();
        m[(0, 0)] = re(0.1);
        m[(1, 1)] = re(0.7);
        m[(0, 2)] = Cplx::new(0.05, 0.02);
        m[(0, 1)] = Cplx::new(0.3, 0.1);
        let rp = DensityMatrix::new(m, Frame::Adiabatic);
        let want: f64 = 0.7 + 0.05 - 0.1;
        assert!((concurrence_adiabatic(&rp, PI / 4.0) - want.abs()).abs() < 1e-15);
    }

    #[test]
    fn forms_agree_along_symmetric_trajectory() {
        let p = SystemParams::<f64>::symmetric(1.0, 0.25, 0.01).unwrap();
        let prof = PulseProfile::fixed_endpoint(7.0, &[0.04, -0.03, 0.01, 0.02]).unwrap();
        let traj = evolve_trajectory(&p, &prof, 1400, 25).unwrap();
        for (k, rho) in traj.states.iter().enumerate() {
            let fast = concurrence_fast(rho);
            let rr = reduce(rho).unwrap();
            assert!((wootters_concurrence(&rr).unwrap() - fast).abs() < 1e-10);
            assert!((wootters_concurrence_spectral(&rr).unwrap() - fast).abs() < 1e-6);
            let theta = traj.theta_at(k);
            let rp = to_adiabatic(rho, theta).unwrap();
            assert!((concurrence_adiabatic(&rp, theta) - fast).abs() < 1e-8);
            // Cauchy-Schwarz bound
            let (p11, p33) = (rho.population(1), rho.population(3));
            assert!(fast * fast <= 4.0 * p11 * p33 + NEGATIVITY_TOL);
            assert!(2.0 * (p11 * p33).sqrt() <= p11 + p33 + 1e-12);
        }
    }
}
