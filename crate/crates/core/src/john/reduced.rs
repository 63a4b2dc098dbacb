//! Reduced model for μ along each characteristic.
//!
//! To leading order in the amplitude, `W = μL̄(rΨ)` is constant along `L`
//! and `Lμ ≈ −W/(4r)` with `r ≈ 1 − u + t`, so
//!
//! `μ(t, u) ≈ 1 − ¼ ln((1 − u + t)/(1 − u))·δ(u)`,
//!
//! where `δ(u) = (∂ₜ − ∂ᵣ)(rΨ)` on the slice `t = 0` at `r = 1 − u`. A shock
//! is predicted on characteristics with `δ > 0`, at
//! `t(u) = (1 − u)(exp(4/δ(u)) − 1)`.

use serde::Serialize;

use super::data::DataSpec;

/// `δ(u) = (∂ₜ − ∂ᵣ)(rΨ)` at `t = 0`, `r = 1 − u`.
///
/// For data prescribed at `t = 0` this is `r(Ψ̊₀ − ∂ᵣΨ̊) − Ψ̊`; data prescribed
/// at `t = −1/2` are first evolved to `t = 0`.
pub fn transversal_data_derivative(data: &DataSpec, u: f64) -> f64 {
    let pt = data.initial_slice().at(1.0 - u);
    pt.v_t - pt.v_r
}

pub fn reduced_mu_profile(data: &DataSpec, u: f64, t: f64) -> f64 {
    reduced_mu_from_delta(transversal_data_derivative(data, u), u, t)
}

pub fn reduced_mu_from_delta(delta: f64, u: f64, t: f64) -> f64 {
    1.0 - 0.25 * (t / (1.0 - u)).ln_1p() * delta
}

/// Predicted first shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedShock {
    /// Shock time; `f64::INFINITY` when it exceeds the range of `f64`.
    pub t: f64,
    /// `ln t`, always finite.
    pub ln_t: f64,
    pub u: f64,
    pub delta: f64,
}

/// `ln(e^y − 1)` without overflow.
pub fn ln_expm1(y: f64) -> f64 {
    if y > 30.0 {
        y + (-(-y).exp()).ln_1p()
    } else {
        y.exp_m1().ln()
    }
}

/// `ln t(u)` for a characteristic with `δ > 0`.
pub fn ln_shock_time(delta: f64, u: f64) -> f64 {
    (1.0 - u).ln() + ln_expm1(4.0 / delta)
}

/// Minimizes the predicted shock time over `(u, δ(u))` samples.
pub fn predict_from_deltas(samples: &[(f64, f64)]) -> Option<PredictedShock> {
    let mut best: Option<PredictedShock> = None;
    for &(u, delta) in samples {
        if !(delta > 0.0) {
            continue;
        }
        let ln_t = ln_shock_time(delta, u);
        if best.is_none_or(|b| ln_t < b.ln_t) {
            best = Some(PredictedShock {
                t: ln_t.exp(),
                ln_t,
                u,
                delta,
            });
        }
    }
    best
}

/// Predicted shock over the nodes `u_j = j·U0/n_u`, `j = 1..=n_u`.
pub fn predict_shock_time(data: &DataSpec, u0: f64, n_u: usize) -> Option<PredictedShock> {
    let samples: Vec<(f64, f64)> = (1..=n_u)
        .map(|j| {
            let u = u0 * j as f64 / n_u as f64;
            (u, transversal_data_derivative(data, u))
        })
        .collect();
    predict_from_deltas(&samples)
}
