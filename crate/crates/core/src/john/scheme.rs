//! Two-stage time step in log-time τ = ln(1 + t).
//!
//! Stage A transports `(x, a, μ, W)` along `L = ∂/∂t|_u`:
//!
//! ```text
//! ∂τx = aω/(c + 1)
//! ∂τa = sE
//! ∂τμ = −(μpω²E + vω) / (4(1+Ψ))
//! ∂τW = ½pvω²E/(1+Ψ) − ¼(μ/c)apω³E² + ¼avω²E/c
//! ```
//!
//! Stage B recovers `s` from the transversal equation
//! `μE∂τs + 2∂ᵤs = F`, with
//! `F = ω²[¼μp²Eω/(1+Ψ) + ¾pv/(1+Ψ) + ½av/c] + 2μsE`, by a box-scheme sweep
//! in `u` from `s(u = 0) = 0`. Stage A uses Heun's method; each stage
//! calls the sweep with the freshly predicted transport fields.

use super::state::{NodeView, StateSlice};
use super::JohnError;

/// Right-hand side of the transport equations at one node.
#[inline]
pub fn transport_rhs(x: f64, a: f64, mu: f64, w: f64, s: f64, e: f64) -> [f64; 4] {
    let nv = NodeView::new(x, a, mu, w, s, e);
    let om = nv.omega;
    let om2 = om * om;
    let one_psi = 1.0 + nv.psi;
    let dx = a * om / (nv.c + 1.0);
    let da = s * e;
    let dmu = -(mu * nv.p * om2 * e + nv.v * om) / (4.0 * one_psi);
    let dw = 0.5 * nv.p * nv.v * om2 * e / one_psi - 0.25 * (mu / nv.c) * a * nv.p * om2 * om * e * e
        + 0.25 * a * nv.v * om2 * e / nv.c;
    [dx, da, dmu, dw]
}

/// Source `F` of the transversal equation at one node.
#[inline]
pub fn sweep_source(x: f64, a: f64, mu: f64, w: f64, s: f64, e: f64) -> f64 {
    let nv = NodeView::new(x, a, mu, w, s, e);
    let om = nv.omega;
    let one_psi = 1.0 + nv.psi;
    om * om
        * (0.25 * mu * nv.p * nv.p * e * om / one_psi
            + 0.75 * nv.p * nv.v / one_psi
            + 0.5 * a * nv.v / nv.c)
        + 2.0 * mu * s * e
}

struct Fields<'a> {
    x: &'a [f64],
    a: &'a [f64],
    mu: &'a [f64],
    w: &'a [f64],
}

const SWEEP_ITERS: usize = 4;

/// Box-scheme sweep: given the old level `(fields, s_old)` at `e_old` and the
/// new transport fields at `e_new`, fills `s_new` from `s_new[0] = 0`.
fn sweep(
    old: &Fields,
    s_old: &[f64],
    e_old: f64,
    new: &Fields,
    e_new: f64,
    dtau: f64,
    du: f64,
    s_new: &mut [f64],
) {
    let n = s_old.len();
    s_new[0] = 0.0;
    let f_old = |j: usize| sweep_source(old.x[j], old.a[j], old.mu[j], old.w[j], s_old[j], e_old);
    let f_new = |j: usize, s: f64| sweep_source(new.x[j], new.a[j], new.mu[j], new.w[j], s, e_new);
    let mut fo_j = f_old(0);
    let mut fn_j = f_new(0, s_new[0]);
    for j in 0..n - 1 {
        let fo_j1 = f_old(j + 1);
        let alpha = 0.25
            * (e_old * (old.mu[j] + old.mu[j + 1]) + e_new * (new.mu[j] + new.mu[j + 1]));
        let kt = alpha / (2.0 * dtau);
        let ku = 1.0 / du;
        let known = kt * (s_old[j + 1] + s_old[j] - s_new[j]) + ku * (s_new[j] - s_old[j + 1] + s_old[j]);
        let mut guess = s_old[j + 1] + (s_new[j] - s_old[j]);
        let mut fn_j1 = f_new(j + 1, guess);
        for _ in 0..SWEEP_ITERS {
            let fbar = 0.25 * (fo_j + fo_j1 + fn_j + fn_j1);
            let next = (fbar + known) / (kt + ku);
            let done = (next - guess).abs() <= 1e-15 * (1.0 + next.abs());
            guess = next;
            fn_j1 = f_new(j + 1, guess);
            if done {
                break;
            }
        }
        s_new[j + 1] = guess;
        fo_j = fo_j1;
        fn_j = fn_j1;
    }
}

/// Advances the slice by `dtau` in log-time.
pub fn step_tau(state: &StateSlice, dtau: f64) -> Result<StateSlice, JohnError> {
    let t_new = (state.tau + dtau).exp_m1();
    advance(state, dtau, t_new)
}

/// Advances the slice by the physical step `dt`.
pub fn step(state: &StateSlice, dt: f64) -> Result<StateSlice, JohnError> {
    let dtau = (dt * state.e()).ln_1p();
    advance(state, dtau, state.t + dt)
}

fn advance(state: &StateSlice, dtau: f64, t_new: f64) -> Result<StateSlice, JohnError> {
    let n = state.len();
    let e0 = state.e();
    let tau_new = state.tau + dtau;
    let e1 = (-tau_new).exp();

    let mut k1 = vec![[0.0; 4]; n];
    let mut ys = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for j in 0..n {
        let k = transport_rhs(state.x[j], state.a[j], state.mu[j], state.w[j], state.s[j], e0);
        k1[j] = k;
        ys[0][j] = state.x[j] + dtau * k[0];
        ys[1][j] = state.a[j] + dtau * k[1];
        ys[2][j] = state.mu[j] + dtau * k[2];
        ys[3][j] = state.w[j] + dtau * k[3];
    }
    let old = Fields {
        x: &state.x,
        a: &state.a,
        mu: &state.mu,
        w: &state.w,
    };
    let mut s_star = vec![0.0; n];
    {
        let pred = Fields {
            x: &ys[0],
            a: &ys[1],
            mu: &ys[2],
            w: &ys[3],
        };
        sweep(&old, &state.s, e0, &pred, e1, dtau, state.du, &mut s_star);
    }

    let mut next = StateSlice {
        t: t_new,
        tau: tau_new,
        du: state.du,
        u: state.u.clone(),
        x: vec![0.0; n],
        a: vec![0.0; n],
        mu: vec![0.0; n],
        w: vec![0.0; n],
        s: vec![0.0; n],
    };
    for j in 0..n {
        let k2 = transport_rhs(ys[0][j], ys[1][j], ys[2][j], ys[3][j], s_star[j], e1);
        let h = 0.5 * dtau;
        next.x[j] = state.x[j] + h * (k1[j][0] + k2[0]);
        next.a[j] = state.a[j] + h * (k1[j][1] + k2[1]);
        next.mu[j] = state.mu[j] + h * (k1[j][2] + k2[2]);
        next.w[j] = state.w[j] + h * (k1[j][3] + k2[3]);
    }
    {
        let fresh = Fields {
            x: &next.x,
            a: &next.a,
            mu: &next.mu,
            w: &next.w,
        };
        let mut s = vec![0.0; n];
        sweep(&old, &state.s, e0, &fresh, e1, dtau, state.du, &mut s);
        next.s = s;
    }

    for j in 0..n {
        let vals = [next.x[j], next.a[j], next.mu[j], next.w[j], next.s[j]];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(JohnError::NonFinite {
                t: next.t,
                tau: next.tau,
                u: next.u[j],
            });
        }
        if next.mu[j] <= 0.0 {
            return Err(JohnError::MuVanished {
                t: next.t,
                tau: next.tau,
                u: next.u[j],
            });
        }
        if 1.0 + next.psi(j) <= 0.0 {
            return Err(JohnError::HyperbolicityLost {
                t: next.t,
                tau: next.tau,
                u: next.u[j],
            });
        }
    }
    Ok(next)
}
