//! Money as a rank-3 tensor over (sector, agent, time).
//!
//! * [`tensor`]: dense third-order tensors, unfoldings and the rank-1
//!   alternating least squares fit.
//! * [`ledger`]: taxonomies, transactions, tensor construction and World Bank
//!   indicator ingestion.
//! * [`momentum`]: the GDP amplifier and sector-by-agent momentum.
//! * [`policy`]: stimulus, regulatory and feedback operators, and routing of
//!   discrete actions onto them.
//! * [`sim`]: the discrete-time economy and its indicators.
//! * [`io`]: tensor JSON, indicator CSV and scenario files.
//!
//! Numeric cores are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.

// `!(v > 0)` style checks are deliberate: they reject NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod ledger;
pub mod matrix;
pub mod momentum;
pub mod policy;
pub mod scalar;
pub mod scenarios;
pub mod sim;
pub mod tensor;

pub use error::{Axis, Error, Result};
pub use matrix::Matrix;
pub use scalar::Scalar;
pub use tensor::{outer_product3, rank1_approx, AlsConfig, Dims, FactorTriple, Rank1Fit, Tensor3};

pub type Tensor3F64 = Tensor3<f64>;
pub type Tensor3F32 = Tensor3<f32>;
pub type MatrixF64 = Matrix<f64>;
pub type MatrixF32 = Matrix<f32>;
pub type FactorTripleF64 = FactorTriple<f64>;
pub type FactorTripleF32 = FactorTriple<f32>;
pub type AlsConfigF64 = AlsConfig<f64>;
pub type AlsConfigF32 = AlsConfig<f32>;
pub type Rank1FitF64 = Rank1Fit<f64>;
pub type Rank1FitF32 = Rank1Fit<f32>;
pub type MomentumInputsF64 = momentum::MomentumInputs<f64>;
pub type MomentumInputsF32 = momentum::MomentumInputs<f32>;
pub type MomentumMatrixF64 = momentum::MomentumMatrix<f64>;
pub type MomentumMatrixF32 = momentum::MomentumMatrix<f32>;
pub type StimulusPlanF64 = policy::StimulusPlan<f64>;
pub type RegulatoryPlanF64 = policy::RegulatoryPlan<f64>;
