//! Optimal single-carrier quantum states for transmitting a Cartesian frame.
//!
//! Alice encodes the orientation of her axes in a superposition of
//! hydrogen-like level `n` states; Bob measures with a covariant POVM built
//! from a fiducial state. The crate computes the coupling coefficients of
//! the fidelity objective, alternates eigenvector and renormalization steps
//! to find good `(a, b)` pairs, and checks the result by quadrature and by
//! sampling.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix `f64`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
pub mod eigen;
pub mod error;
pub mod frames;
pub mod objective;
pub mod optimizer;
pub mod quadrature;
pub mod scalar;
pub mod simulator;
pub mod so3;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Real;

pub type AliceState64 = states::AliceState<f64>;
pub type FiducialState64 = states::FiducialState<f64>;
pub type EulerAngles64 = so3::EulerAngles<f64>;
pub type RotationMatrix64 = so3::RotationMatrix<f64>;
pub type Objective64 = coefficients::Objective<f64>;
pub type CoefficientTensor64 = coefficients::SparseCoefficientTensor<f64>;
pub type SO3Grid64 = quadrature::SO3Grid<f64>;
pub type ObjectiveMatrix64 = objective::ObjectiveMatrix<f64>;
pub type FidelityReport64 = objective::FidelityReport<f64>;
pub type OptimizationResult64 = optimizer::OptimizationResult<f64>;
pub type SweepRow64 = optimizer::SweepRow<f64>;
pub type MonteCarloReport64 = simulator::MonteCarloReport<f64>;
pub type WeightedVectorSet64 = frames::WeightedVectorSet<f64>;
pub type GramLikeMatrix64 = frames::GramLikeMatrix<f64>;
