//! Simulation and optimization of fractional STIRAP entanglement generation
//! between two qubits sharing a lossy bosonic mode.
//!
//! The crate is generic over the real scalar type (see [`Real`]); the `*64`
//! aliases below fix it to `f64`, which is what the tolerances in the test
//! suites are calibrated for.
//!
//! Module map:
//! - [`model`]: physical parameters, Fourier pulse, Hamiltonian, adiabatic basis
//! - [`dynamics`]: lab-frame Lindblad integration and frame rotation
//! - [`entanglement`]: reduced qubit state and concurrence
//! - [`perturbation`]: perturbative density-matrix corrections and the PAP concurrence
//! - [`optimize`]: closed-form optimal pulses and numerical optimization

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod entanglement;
mod error;
pub mod model;
pub mod nelder_mead;
pub mod optimize;
pub mod perturbation;
pub mod quadrature;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{lit, Cplx, Real};

pub use dynamics::{evolve_final, evolve_trajectory, lindblad_rhs, to_adiabatic, Trajectory};
pub use entanglement::{
    concurrence_adiabatic, concurrence_fast, reduce, wootters_concurrence, ReducedTwoQubitState,
};
pub use model::{DensityMatrix, Frame, Mat4, PulseProfile, SystemParams};
pub use optimize::{OptimizationResult, SweepMode, SweepRow};
pub use perturbation::{PapBoundary, PerturbativeTerms};

pub type SystemParams64 = SystemParams<f64>;
pub type PulseProfile64 = PulseProfile<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type OptimizationResult64 = OptimizationResult<f64>;
pub type PerturbativeTerms64 = PerturbativeTerms<f64>;
pub type SweepRow64 = SweepRow<f64>;

pub type SystemParams32 = SystemParams<f32>;
pub type PulseProfile32 = PulseProfile<f32>;
pub type DensityMatrix32 = DensityMatrix<f32>;
