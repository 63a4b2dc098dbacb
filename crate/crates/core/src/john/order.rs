//! Convergence-order measurement under simultaneous `(dt, du)` halving.

use serde::Serialize;

use super::data::DataSpec;
use super::scheme::step;
use super::state::{check_constraint, init_state, GeometricGrid, StateSlice};
use super::JohnError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub t_end: f64,
    pub n_u: [usize; 3],
    pub steps: [usize; 3],
    /// Max-norm error of the coarse and fine runs against the reference.
    pub errors: [f64; 2],
    pub ratio: f64,
    /// Constraint residual of the coarse and fine runs.
    pub constraint: [f64; 2],
    pub constraint_ratio: f64,
}

/// Runs to `t_end` with a fixed physical step.
pub fn run_fixed(
    data: &DataSpec,
    u0: f64,
    n_u: usize,
    steps: usize,
    t_end: f64,
) -> Result<StateSlice, JohnError> {
    let mut st = init_state(data, &GeometricGrid::new(u0, n_u))?;
    let dt = t_end / steps as f64;
    for _ in 0..steps {
        st = step(&st, dt)?;
    }
    Ok(st)
}

/// Max over the nodes of `coarse` of the field differences to `fine`,
/// where `fine` has `factor` times as many cells.
pub fn slice_difference(coarse: &StateSlice, fine: &StateSlice, factor: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..coarse.len() {
        let k = j * factor;
        for (a, b) in [
            (coarse.x[j], fine.x[k]),
            (coarse.a[j], fine.a[k]),
            (coarse.mu[j], fine.mu[k]),
            (coarse.w[j], fine.w[k]),
            (coarse.s[j], fine.s[k]),
        ] {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Runs at `(n_u, steps)`, `(2n_u, 2steps)` and the reference
/// `(8n_u, 8steps)`, a quarter of the finer step.
pub fn measure_order(
    data: &DataSpec,
    u0: f64,
    n_u: usize,
    steps: usize,
    t_end: f64,
) -> Result<OrderReport, JohnError> {
    let coarse = run_fixed(data, u0, n_u, steps, t_end)?;
    let fine = run_fixed(data, u0, 2 * n_u, 2 * steps, t_end)?;
    let reference = run_fixed(data, u0, 8 * n_u, 8 * steps, t_end)?;
    let e0 = slice_difference(&coarse, &reference, 8);
    let e1 = slice_difference(&fine, &reference, 4);
    let c0 = check_constraint(&coarse);
    let c1 = check_constraint(&fine);
    Ok(OrderReport {
        t_end,
        n_u: [n_u, 2 * n_u, 8 * n_u],
        steps: [steps, 2 * steps, 8 * steps],
        errors: [e0, e1],
        ratio: e0 / e1,
        constraint: [c0, c1],
        constraint_ratio: c0 / c1,
    })
}
