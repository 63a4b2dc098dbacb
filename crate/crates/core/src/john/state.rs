//! Geometric grid, state slices, initialization and slice diagnostics.
//!
//! The state is stored in log-time rescaled variables. With
//! `τ = ln(1 + t)`, `E = e^{−τ}` and `ω = (1+t)/r = 1/(1 + (x − 1)E)`, each
//! u-node carries
//!
//! * `x = r − t` (starts at `1 − u`),
//! * `a = rΨ`,
//! * `μ`,
//! * `W = μL̄(rΨ)`,
//! * `s = (1+t)²Q` with `Q = L(rΨ)`.
//!
//! All of them stay O(1) up to the shock even when the lifespan is far
//! beyond the range of `f64`.

use serde::{Deserialize, Serialize};

use super::data::DataSpec;
use super::JohnError;

/// Rule for choosing the next time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepPolicy {
    /// Physical step `dt = min(dt_max, κ·du)`.
    Courant { kappa: f64, dt_max: f64 },
    /// Log-time step `dτ = min(κ·du, dtau_max)`.
    LogTime { kappa: f64, dtau_max: f64 },
}

impl StepPolicy {
    /// Log-time increment for a slice at log-time `tau`.
    pub fn dtau(&self, du: f64, tau: f64) -> f64 {
        match *self {
            StepPolicy::Courant { kappa, dt_max } => {
                let dt = dt_max.min(kappa * du);
                (dt * (-tau).exp()).ln_1p()
            }
            StepPolicy::LogTime { kappa, dtau_max } => dtau_max.min(kappa * du),
        }
    }
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy::LogTime {
            kappa: 2.0,
            dtau_max: 0.02,
        }
    }
}

/// Uniform grid `u_j = j·du`, `j = 0..=n_u`, on the strip `0 ≤ u ≤ U0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricGrid {
    pub u0: f64,
    pub n_u: usize,
    pub policy: StepPolicy,
    /// Stop time, measured from the slice where `u = 1 − r`.
    pub t_max: f64,
    /// Stop log-time `ln(1 + t)`; whichever of `t_max`, `tau_max` comes first.
    pub tau_max: f64,
}

impl GeometricGrid {
    pub fn new(u0: f64, n_u: usize) -> Self {
        Self {
            u0,
            n_u,
            policy: StepPolicy::default(),
            t_max: f64::INFINITY,
            tau_max: 1e4,
        }
    }

    pub fn with_policy(mut self, policy: StepPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn du(&self) -> f64 {
        self.u0 / self.n_u as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_u).map(|j| j as f64 * self.du()).collect()
    }

    /// Effective log-time limit.
    pub fn tau_limit(&self) -> f64 {
        self.tau_max.min(self.t_max.ln_1p())
    }

    pub fn validate(&self) -> Result<(), JohnError> {
        if !(self.u0 > 0.0 && self.u0 < 1.0) {
            return Err(JohnError::InvalidGrid(format!(
                "U0 must lie in (0, 1), got {}",
                self.u0
            )));
        }
        if self.n_u < 2 {
            return Err(JohnError::InvalidGrid("n_u must be at least 2".into()));
        }
        let ok = match self.policy {
            StepPolicy::Courant { kappa, dt_max } => kappa > 0.0 && dt_max > 0.0,
            StepPolicy::LogTime { kappa, dtau_max } => kappa > 0.0 && dtau_max > 0.0,
        };
        if !ok {
            return Err(JohnError::InvalidGrid(
                "step policy parameters must be positive".into(),
            ));
        }
        if !(self.t_max > 0.0) || !(self.tau_max > 0.0) {
            return Err(JohnError::InvalidGrid("t_max and tau_max must be positive".into()));
        }
        Ok(())
    }
}

/// Field values on one time level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSlice {
    /// Time since the slice where `u = 1 − r` (infinite once it overflows).
    pub t: f64,
    /// `ln(1 + t)`.
    pub tau: f64,
    pub du: f64,
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    pub a: Vec<f64>,
    pub mu: Vec<f64>,
    pub w: Vec<f64>,
    pub s: Vec<f64>,
}

/// Point values derived from the stored variables at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeView {
    /// `e^{−τ}`.
    pub e: f64,
    /// `(1 + t)/r`.
    pub omega: f64,
    pub psi: f64,
    /// `√(1 + Ψ)`.
    pub c: f64,
    /// `r²LΨ`.
    pub p: f64,
    /// `rμL̄Ψ`.
    pub v: f64,
}

impl NodeView {
    #[inline]
    pub fn new(x: f64, a: f64, mu: f64, w: f64, s: f64, e: f64) -> Self {
        let omega = 1.0 / (1.0 + (x - 1.0) * e);
        let psi = a * e * omega;
        let c = (1.0 + psi).sqrt();
        let p = s * e / omega - c * a;
        let v = w + mu * c * a * e * omega;
        Self {
            e,
            omega,
            psi,
            c,
            p,
            v,
        }
    }
}

impl StateSlice {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn e(&self) -> f64 {
        (-self.tau).exp()
    }

    pub fn view(&self, j: usize) -> NodeView {
        NodeView::new(self.x[j], self.a[j], self.mu[j], self.w[j], self.s[j], self.e())
    }

    /// Areal radius `r = x + t`.
    pub fn r(&self, j: usize) -> f64 {
        self.x[j] + self.t
    }

    pub fn psi(&self, j: usize) -> f64 {
        self.view(j).psi
    }

    /// `Q = L(rΨ)`.
    pub fn q(&self, j: usize) -> f64 {
        let e = self.e();
        self.s[j] * e * e
    }

    pub fn psi_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.psi(j)).collect()
    }

    pub fn r_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.r(j)).collect()
    }

    pub fn q_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.q(j)).collect()
    }

    /// `(min μ, argmin node)`; the earliest node wins ties.
    pub fn mu_min(&self) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (j, &m) in self.mu.iter().enumerate() {
            if m < best.0 {
                best = (m, j);
            }
        }
        best
    }
}

/// Builds the slice `t = 0` on which `u = 1 − r`.
pub fn init_state(data: &DataSpec, grid: &GeometricGrid) -> Result<StateSlice, JohnError> {
    grid.validate()?;
    data.validate()?;
    let slice = data.initial_slice();
    let du = grid.du();
    let u = grid.nodes();
    let n = u.len();
    let mut st = StateSlice {
        t: 0.0,
        tau: 0.0,
        du,
        u: u.clone(),
        x: vec![0.0; n],
        a: vec![0.0; n],
        mu: vec![0.0; n],
        w: vec![0.0; n],
        s: vec![0.0; n],
    };
    for (j, &uj) in u.iter().enumerate() {
        let r = 1.0 - uj;
        let pt = slice.at(r);
        let psi = pt.v / r;
        if !(1.0 + psi > 0.0) {
            return Err(JohnError::InvalidData(format!(
                "1 + Ψ = {} ≤ 0 at r = {r} on the initial slice",
                1.0 + psi
            )));
        }
        let c = (1.0 + psi).sqrt();
        let mu = 1.0 / c;
        st.x[j] = r;
        st.a[j] = pt.v;
        st.mu[j] = mu;
        st.s[j] = pt.v_t + c * pt.v_r;
        st.w[j] = mu * (pt.v_t - c * pt.v_r);
    }
    Ok(st)
}

/// `max_j |(r_{j+1} − r_{j−1})/(2du) + μ_j√(1+Ψ_j)|` over interior nodes.
pub fn check_constraint(state: &StateSlice) -> f64 {
    let n = state.len();
    let mut worst: f64 = 0.0;
    for j in 1..n.saturating_sub(1) {
        let dr = (state.x[j + 1] - state.x[j - 1]) / (2.0 * state.du);
        let c = state.view(j).c;
        worst = worst.max((dr + state.mu[j] * c).abs());
    }
    worst
}

/// `ln(e + t)` evaluated stably from `τ = ln(1 + t)`.
pub fn log_e_plus_t(tau: f64) -> f64 {
    tau + ((std::f64::consts::E - 1.0) * (-tau).exp()).ln_1p()
}

/// Slice suprema of the dispersive monitors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MonitorSet {
    /// `r²|LΨ|`.
    pub r2_l_psi: f64,
    /// `r|μL̄Ψ|`.
    pub r_mu_lbar_psi: f64,
    /// `r|Ψ|`.
    pub r_psi: f64,
    /// `|μ − 1|/ln(e + t)`.
    pub mu_dev: f64,
    /// `|1 − r + t − u|/ln(e + t)`.
    pub eikonal_dev: f64,
    /// `|rLμ + ¼rμL̄Ψ|`.
    pub relation: f64,
}

impl MonitorSet {
    pub fn max_with(&mut self, o: &MonitorSet) {
        self.r2_l_psi = self.r2_l_psi.max(o.r2_l_psi);
        self.r_mu_lbar_psi = self.r_mu_lbar_psi.max(o.r_mu_lbar_psi);
        self.r_psi = self.r_psi.max(o.r_psi);
        self.mu_dev = self.mu_dev.max(o.mu_dev);
        self.eikonal_dev = self.eikonal_dev.max(o.eikonal_dev);
        self.relation = self.relation.max(o.relation);
    }

    /// The five bounded quantities, in declaration order.
    pub fn bounded(&self) -> [f64; 5] {
        [
            self.r2_l_psi,
            self.r_mu_lbar_psi,
            self.r_psi,
            self.mu_dev,
            self.eikonal_dev,
        ]
    }

    pub const BOUNDED_NAMES: [&'static str; 5] =
        ["r2_l_psi", "r_mu_lbar_psi", "r_psi", "mu_dev", "eikonal_dev"];
}

pub fn diagnostics(state: &StateSlice) -> MonitorSet {
    let ln = log_e_plus_t(state.tau);
    let mut m = MonitorSet::default();
    for j in 0..state.len() {
        let nv = state.view(j);
        let mu = state.mu[j];
        let relation =
            ((nv.v * nv.psi - mu * nv.p * nv.omega * nv.e) / (4.0 * (1.0 + nv.psi))).abs();
        let one = MonitorSet {
            r2_l_psi: nv.p.abs(),
            r_mu_lbar_psi: nv.v.abs(),
            r_psi: state.a[j].abs(),
            mu_dev: (mu - 1.0).abs() / ln,
            eikonal_dev: (1.0 - state.u[j] - state.x[j]).abs() / ln,
            relation,
        };
        m.max_with(&one);
    }
    m
}
