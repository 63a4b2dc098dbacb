//! Radon transforms of initial data, Friedlander's radiation field, the
//! John–Hörmander lifespan bound and the fluid shock functional `𝒮`.

pub mod christodoulou;
pub mod field;
pub mod lifespan;
pub mod radon;

use thiserror::Error;

pub use christodoulou::{christodoulou_criterion, christodoulou_s, ShockIndicator};
pub use field::SpatialField;
pub use lifespan::{
    john_hormander_sup, positivity_check, positivity_trials, random_bump_pair, GridSettings, LifespanEstimate,
    PositivityTrial, RadiationField,
};
pub use radon::{friedlander, radon, QDerivative, Radon, RadiationData, RadonSettings};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadiationError {
    #[error("quadrature refinement stalled at q = {q}, θ = {theta:?}")]
    QuadratureFailure { q: f64, theta: [f64; 3] },
    #[error("direction {0:?} is not a unit vector")]
    InvalidDirection([f64; 3]),
    #[error("{0}")]
    InvalidParameter(String),
}
