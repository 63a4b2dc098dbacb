//! Solver for John's spherically symmetric equation
//!
//! `−∂ₜ²(rΨ) + (1+Ψ)∂ᵣ²(rΨ) = −r(∂ₜΨ)²/(1+Ψ)`
//!
//! in geometric coordinates `(t, u)`, where `u` is the outgoing eikonal
//! function with `u = 1 − r` at `t = 0` and `μ = 1/∂ₜu` is the inverse
//! foliation density. A shock forms where μ reaches zero.

pub mod data;
pub mod order;
pub mod reduced;
pub mod run;
pub mod scheme;
pub mod state;

use thiserror::Error;

pub use data::{DataSpec, MolSettings, RadialMol, StartTime};
pub use order::{measure_order, OrderReport};
pub use reduced::{predict_shock_time, reduced_mu_profile, transversal_data_derivative, PredictedShock};
pub use run::{run, run_with_observer, Outcome, RunOptions, ShockReport};
pub use scheme::{step, step_tau};
pub use state::{check_constraint, diagnostics, init_state, GeometricGrid, MonitorSet, StateSlice, StepPolicy};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JohnError {
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("μ vanished at t = {t} (τ = {tau}), u = {u}")]
    MuVanished { t: f64, tau: f64, u: f64 },
    #[error("hyperbolicity lost (1 + Ψ ≤ 0) at t = {t} (τ = {tau}), u = {u}")]
    HyperbolicityLost { t: f64, tau: f64, u: f64 },
    #[error("non-finite field value at t = {t} (τ = {tau}), u = {u}")]
    NonFinite { t: f64, tau: f64, u: f64 },
}
