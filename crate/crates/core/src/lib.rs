//! Numerical laboratory for small-data shock formation.
//!
//! * [`burgers`]: exact characteristic solver for Burgers' equation.
//! * [`john`]: geometric-coordinate solver for John's spherically symmetric
//!   wave equation `−∂ₜ²Ψ + (1+Ψ)Δ Ψ = 0`, tracking the inverse foliation
//!   density μ up to shock formation.
//! * [`nullcond`]: classic null condition, failure factors ℵ± and the
//!   irrotational relativistic fluid Lagrangian chain.
//! * [`radiation`]: Radon transform, Friedlander radiation field and the
//!   John–Hörmander lifespan bound.
//! * [`config`] and [`experiment`]: the plain-text run configuration and the
//!   experiment driver behind the `shocklab` binary.

pub mod burgers;
pub mod config;
pub mod experiment;
pub mod expr;
pub mod john;
pub mod nullcond;
pub mod profile;
pub mod quadrature;
pub mod radiation;

pub use profile::Profile1D;
