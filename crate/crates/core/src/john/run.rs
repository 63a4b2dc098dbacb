//! Marching to the shock and the run report.

use serde::Serialize;

use super::data::DataSpec;
use super::reduced::{predict_shock_time, PredictedShock};
use super::scheme::step_tau;
use super::state::{check_constraint, diagnostics, init_state, log_e_plus_t, GeometricGrid, MonitorSet, StateSlice};
use super::JohnError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunOptions {
    /// Stop once `min μ ≤ mu_stop`.
    pub mu_stop: f64,
    /// Smallest μ a step may start from.
    pub mu_floor: f64,
    /// Record the μ minimum every this many steps.
    pub history_stride: usize,
    /// Hard cap on the number of steps.
    pub max_steps: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            mu_stop: 0.01,
            mu_floor: 1e-6,
            history_stride: 100,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Shock,
    NoShock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryPoint {
    pub step: usize,
    pub tau: f64,
    pub mu_min: f64,
    pub u_argmin: f64,
}

/// Running suprema of the dispersive monitors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundMonitors {
    /// Suprema over the whole run.
    pub sup: MonitorSet,
    /// Suprema up to the reference time.
    pub at_reference: MonitorSet,
    /// Reference time, one unit after the data time.
    pub reference_t: f64,
    /// `sup / at_reference` for the five bounded quantities.
    pub ratio: [f64; 5],
}

/// Bookkeeping for nodes whose μ has dropped below 1/4.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NoReturnStats {
    /// Node-steps started with `μ < 1/4`.
    pub checked: u64,
    /// Of those, steps whose discrete `Lμ` was not negative.
    pub l_mu_violations: u64,
    /// Steps in which μ increased at a node that had already crossed 1/4.
    pub monotone_violations: u64,
}

/// Lower bound for `|μL̄Ψ|` at the shock node after μ first drops below 1/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupMechanism {
    /// Fitted `c` in `|μL̄Ψ| ≥ c/((1+t)ln(e+t))`; `None` if the shock node
    /// never crossed 1/4.
    pub c_fit: Option<f64>,
    /// Sign changes of `μL̄Ψ` at the shock node after the crossing.
    pub sign_changes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShockReport {
    pub outcome: Outcome,
    /// Shock time `T` measured from the slice `u = 1 − r`; `None` when it
    /// exceeds the range of `f64` or no shock formed.
    pub lifespan: Option<f64>,
    /// `ln T`.
    pub ln_lifespan: Option<f64>,
    /// `ln(1 + T)`, the log-time of the shock.
    pub tau_star: Option<f64>,
    pub shock_u: Option<f64>,
    pub shock_node: Option<usize>,
    pub steps: usize,
    pub final_tau: f64,
    pub final_mu_min: f64,
    pub mu_min_history: Vec<HistoryPoint>,
    pub predicted: Option<PredictedShock>,
    /// `|T_pred − T|/T`, evaluated from the logarithms.
    pub prediction_rel_error: Option<f64>,
    /// `|ln T_pred − ln T|/ln T`.
    pub prediction_log_rel_error: Option<f64>,
    pub bound_monitors: BoundMonitors,
    pub no_return: NoReturnStats,
    pub blowup: BlowupMechanism,
    /// `sup |W(t, u) − W(0, u)|`.
    pub w_drift: f64,
    /// `w_drift / λ²`.
    pub w_drift_scaled: f64,
    pub final_constraint: f64,
}

pub fn run(data: &DataSpec, grid: &GeometricGrid, opts: &RunOptions) -> Result<ShockReport, JohnError> {
    run_with_observer(data, grid, opts, |_, _| {})
}

/// Like [`run`], calling `observer(slice, step)` on the initial slice and
/// after every step.
pub fn run_with_observer<F: FnMut(&StateSlice, usize)>(
    data: &DataSpec,
    grid: &GeometricGrid,
    opts: &RunOptions,
    mut observer: F,
) -> Result<ShockReport, JohnError> {
    if !(opts.mu_stop > 0.0 && opts.mu_stop <= 0.25) {
        return Err(JohnError::InvalidGrid(format!(
            "mu_stop must lie in (0, 1/4], got {}",
            opts.mu_stop
        )));
    }
    if !(opts.mu_floor > 0.0 && opts.mu_floor < opts.mu_stop) {
        return Err(JohnError::InvalidGrid("mu_floor must lie in (0, mu_stop)".into()));
    }
    let mut state = init_state(data, grid)?;
    let n = state.len();
    let tau_limit = grid.tau_limit();
    let reference_t = data.start_time.value() + 1.0;
    let stride = opts.history_stride.max(1);

    let w0 = state.w.clone();
    let mut w_drift: f64 = 0.0;
    let mut sup = diagnostics(&state);
    let mut at_reference = sup;
    let mut reference_done = state.t >= reference_t;
    let mut stats = NoReturnStats::default();
    let mut crossed = vec![false; n];
    let mut v_min_fit = vec![f64::INFINITY; n];
    let mut v_sign = vec![0i8; n];
    let mut sign_changes = vec![0u64; n];
    let mut history = Vec::new();
    let (m0, j0) = state.mu_min();
    history.push(HistoryPoint {
        step: 0,
        tau: 0.0,
        mu_min: m0,
        u_argmin: state.u[j0],
    });
    observer(&state, 0);

    let mut steps = 0usize;
    let mut prev: Option<StateSlice> = None;
    let outcome = loop {
        let (mu_min, _) = state.mu_min();
        if mu_min <= opts.mu_stop {
            break Outcome::Shock;
        }
        if state.tau >= tau_limit * (1.0 - 1e-15) || steps >= opts.max_steps {
            break Outcome::NoShock;
        }
        if mu_min <= opts.mu_floor {
            return Err(JohnError::MuVanished {
                t: state.t,
                tau: state.tau,
                u: state.u[state.mu_min().1],
            });
        }
        let mut dtau = grid.policy.dtau(state.du, state.tau);
        if state.tau + dtau > tau_limit {
            dtau = tau_limit - state.tau;
        }
        let next = step_tau(&state, dtau)?;
        steps += 1;

        let ln = log_e_plus_t(next.tau);
        for j in 0..n {
            if state.mu[j] < 0.25 {
                stats.checked += 1;
                if next.mu[j] - state.mu[j] >= 0.0 {
                    stats.l_mu_violations += 1;
                }
            }
            if crossed[j] && next.mu[j] > state.mu[j] {
                stats.monotone_violations += 1;
            }
            if next.mu[j] < 0.25 {
                crossed[j] = true;
                let nv = next.view(j);
                let value = nv.v.abs() * nv.omega * ln;
                v_min_fit[j] = v_min_fit[j].min(value);
                let sign = if nv.v > 0.0 { 1 } else if nv.v < 0.0 { -1 } else { 0 };
                if v_sign[j] != 0 && sign != v_sign[j] {
                    sign_changes[j] += 1;
                }
                v_sign[j] = sign;
            }
            w_drift = w_drift.max((next.w[j] - w0[j]).abs());
        }
        let mon = diagnostics(&next);
        sup.max_with(&mon);
        if !reference_done {
            at_reference = sup;
            if next.t >= reference_t {
                reference_done = true;
            }
        }
        if steps.is_multiple_of(stride) {
            let (m, j) = next.mu_min();
            history.push(HistoryPoint {
                step: steps,
                tau: next.tau,
                mu_min: m,
                u_argmin: next.u[j],
            });
        }
        observer(&next, steps);
        prev = Some(std::mem::replace(&mut state, next));
    };

    let (mu_min, j_min) = state.mu_min();
    if history.last().map(|h| h.step) != Some(steps) {
        history.push(HistoryPoint {
            step: steps,
            tau: state.tau,
            mu_min,
            u_argmin: state.u[j_min],
        });
    }

    let mut ratio = [0.0; 5];
    for (k, (s, r)) in sup.bounded().iter().zip(at_reference.bounded()).enumerate() {
        ratio[k] = if r > 0.0 {
            s / r
        } else if *s == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
    }
    let bound_monitors = BoundMonitors {
        sup,
        at_reference,
        reference_t,
        ratio,
    };

    let predicted = predict_shock_time(data, grid.u0, grid.n_u);
    let lambda = data.amplitude;
    let mut report = ShockReport {
        outcome,
        lifespan: None,
        ln_lifespan: None,
        tau_star: None,
        shock_u: None,
        shock_node: None,
        steps,
        final_tau: state.tau,
        final_mu_min: mu_min,
        mu_min_history: history,
        predicted,
        prediction_rel_error: None,
        prediction_log_rel_error: None,
        bound_monitors,
        no_return: stats,
        blowup: BlowupMechanism {
            c_fit: None,
            sign_changes: 0,
        },
        w_drift,
        w_drift_scaled: w_drift / (lambda * lambda),
        final_constraint: check_constraint(&state),
    };

    if outcome == Outcome::Shock {
        let tau_star = match &prev {
            Some(p) if p.mu[j_min] > state.mu[j_min] => {
                state.tau + state.mu[j_min] * (state.tau - p.tau) / (p.mu[j_min] - state.mu[j_min])
            }
            _ => state.tau,
        };
        let ln_t = tau_star + (-(-tau_star).exp_m1()).ln();
        let t = tau_star.exp_m1();
        report.tau_star = Some(tau_star);
        report.ln_lifespan = Some(ln_t);
        report.lifespan = t.is_finite().then_some(t);
        report.shock_u = Some(state.u[j_min]);
        report.shock_node = Some(j_min);
        report.blowup = BlowupMechanism {
            c_fit: crossed[j_min].then_some(v_min_fit[j_min]),
            sign_changes: sign_changes[j_min],
        };
        if let Some(p) = predicted {
            let d = p.ln_t - ln_t;
            report.prediction_rel_error = Some(d.exp_m1().abs()).filter(|v| v.is_finite());
            report.prediction_log_rel_error = Some(d.abs() / ln_t.abs());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::john::state::StepPolicy;

    #[test]
    fn zero_data_runs_to_t_max_without_shock() {
        let grid = GeometricGrid::new(0.9, 30)
            .with_policy(StepPolicy::LogTime { kappa: 1.0, dtau_max: 0.05 })
            .with_t_max(100.0);
        let rep = run(&DataSpec::zero(), &grid, &RunOptions::default()).unwrap();
        assert_eq!(rep.outcome, Outcome::NoShock);
        assert_eq!(rep.final_mu_min, 1.0);
        assert!((rep.final_tau - 101f64.ln()).abs() < 1e-12);
        assert!(rep.lifespan.is_none());
        assert_eq!(rep.w_drift, 0.0);
    }

    #[test]
    fn option_validation() {
        let grid = GeometricGrid::new(0.9, 30);
        let bad = RunOptions {
            mu_stop: 0.5,
            ..RunOptions::default()
        };
        assert!(run(&DataSpec::zero(), &grid, &bad).is_err());
    }
}
