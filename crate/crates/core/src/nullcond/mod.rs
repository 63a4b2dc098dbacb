//! Quadratic nonlinearities of wave equations: the classic null condition,
//! the failure factors ℵ⁺/ℵ⁻ and fluid Lagrangians.

pub mod aleph;
pub mod classic;
pub mod fluid;
pub mod tensors;

use thiserror::Error;

pub use aleph::{aleph_minus, aleph_plus, aleph_plus_scalar, aleph_plus_system, range_over, MetricFamily, MetricKind};
pub use classic::{
    check_classic_null, check_classic_null_scaled, NullCheck, NullDirection, QuadraticNonlinearity,
    DEFAULT_DIRECTIONS, NULL_TOLERANCE,
};
pub use fluid::{
    fluid_derived, is_exceptional, DerivativeMode, FluidDerived, FluidLagrangian, LagrangianKind,
};
pub use tensors::{Tensor2, Tensor3, MINKOWSKI};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NullError {
    #[error("metric family has kind {found:?}, operation needs {expected:?}")]
    WrongKind { expected: MetricKind, found: MetricKind },
    #[error("at least 6 sample directions are required, got {0}")]
    TooFewDirections(usize),
    #[error("covector scale must be finite and nonzero, got {0}")]
    InvalidScale(f64),
    #[error("unknown metric family '{0}'")]
    UnknownMetric(String),
    #[error("unknown Lagrangian '{0}'")]
    UnknownLagrangian(String),
    #[error("Lagrangian expression: {0}")]
    Expression(String),
    #[error("background constant k must be finite and nonzero, got {0}")]
    InvalidBackground(f64),
    #[error("Lagrangian is not differentiable near σ = {sigma}")]
    NotDifferentiable { sigma: f64 },
    #[error("degenerate sound speed at σ = {sigma}: η² = {eta_sq}")]
    DegenerateSound { sigma: f64, eta_sq: f64 },
}
