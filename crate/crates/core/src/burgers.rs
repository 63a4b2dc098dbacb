//! Method-of-characteristics solver for the inviscid Burgers equation
//! `∂ₜΨ + Ψ∂ₓΨ = 0` with smooth data `Ψ(0,x) = Ψ̊(x)`.
//!
//! Along `x(t, α) = α + tΨ̊(α)` the solution is constant, and the slope
//! `y = ∂ₓΨ` obeys `dy/dt = −y²`, which blows up at `t = −1/Ψ̊′(α)`.

use serde::Serialize;
use thiserror::Error;

use crate::profile::Profile1D;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BurgersError {
    #[error("characteristic inversion did not converge at t = {t}, x = {x}")]
    NoConvergence { t: f64, x: f64 },
    #[error("t = {t} is not before the blow-up time {blowup}")]
    OutOfLifespan { t: f64, blowup: f64 },
    #[error("Riccati slope blows up at t = {time}")]
    Blowup { time: f64 },
}

/// Half-width of the search window for profiles without compact support.
pub const DEFAULT_SEARCH_HALF_WIDTH: f64 = 10.0;
pub const DEFAULT_GRID_POINTS: usize = 100_000;

const ROOT_TOL: f64 = 1e-12;
const ROOT_MAX_ITER: usize = 100;

pub fn characteristic_position(profile: &Profile1D, t: f64, alpha: f64) -> f64 {
    alpha + t * profile.value(alpha)
}

pub fn jacobian(profile: &Profile1D, t: f64, alpha: f64) -> f64 {
    1.0 + t * profile.derivative(alpha)
}

/// Launch points, their positions and Jacobians at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacteristicFan {
    pub time: f64,
    pub alphas: Vec<f64>,
    pub positions: Vec<f64>,
    pub jacobians: Vec<f64>,
}

impl CharacteristicFan {
    pub fn new(profile: &Profile1D, alphas: &[f64], time: f64) -> Self {
        let mut alphas = alphas.to_vec();
        alphas.sort_by(f64::total_cmp);
        let positions = alphas
            .iter()
            .map(|&a| characteristic_position(profile, time, a))
            .collect();
        let jacobians = alphas.iter().map(|&a| jacobian(profile, time, a)).collect();
        Self {
            time,
            alphas,
            positions,
            jacobians,
        }
    }

    /// Uniformly spaced launch points on `[lo, hi]`.
    pub fn uniform(profile: &Profile1D, lo: f64, hi: f64, n: usize, time: f64) -> Self {
        Self::new(profile, &linspace(lo, hi, n), time)
    }

    pub fn min_jacobian(&self) -> f64 {
        self.jacobians.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// True when the map `α ↦ x` is still strictly increasing on the fan.
    pub fn is_ordered(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] < w[1])
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Interval on which launch points are searched.
pub fn search_window(profile: &Profile1D) -> (f64, f64) {
    let r = profile.support_radius();
    if r.is_finite() {
        (-r, r)
    } else {
        (-DEFAULT_SEARCH_HALF_WIDTH, DEFAULT_SEARCH_HALF_WIDTH)
    }
}

/// Location and value of the most negative slope of the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeMinimum {
    pub alpha: f64,
    pub slope: f64,
}

/// Global minimum of `Ψ̊′` on `[lo, hi]`: dense grid scan then one Newton
/// polish on `Ψ̊″ = 0` confined to the neighbouring grid cells.
pub fn min_slope(profile: &Profile1D, lo: f64, hi: f64, n_grid: usize) -> SlopeMinimum {
    let n = n_grid.max(3);
    let h = (hi - lo) / (n - 1) as f64;
    let mut best = SlopeMinimum {
        alpha: lo,
        slope: profile.derivative(lo),
    };
    for i in 1..n {
        let a = lo + h * i as f64;
        let s = profile.derivative(a);
        if s < best.slope {
            best = SlopeMinimum { alpha: a, slope: s };
        }
    }
    if h == 0.0 {
        return best;
    }
    let (blo, bhi) = ((best.alpha - h).max(lo), (best.alpha + h).min(hi));
    let d = |x: f64| profile.derivative(x);
    let e = (h * 1e-2).max(1e-7);
    let mut x = best.alpha;
    for _ in 0..20 {
        let d2 = (d(x + e) - d(x - e)) / (2.0 * e);
        let d3 = (d(x + e) - 2.0 * d(x) + d(x - e)) / (e * e);
        if !(d3 > 0.0) {
            break;
        }
        let next = x - d2 / d3;
        if !(blo..=bhi).contains(&next) {
            break;
        }
        let done = (next - x).abs() < 1e-14 * (1.0 + x.abs());
        x = next;
        if done {
            break;
        }
    }
    let s = d(x);
    if s < best.slope {
        best = SlopeMinimum { alpha: x, slope: s };
    }
    best
}

/// Blow-up time `T* = 1/max(−Ψ̊′)`, or `None` when `Ψ̊′ ≥ 0` everywhere.
pub fn blowup_time(profile: &Profile1D) -> Option<f64> {
    blowup_time_with(profile, DEFAULT_GRID_POINTS)
}

pub fn blowup_time_with(profile: &Profile1D, n_grid: usize) -> Option<f64> {
    blowup_point(profile, n_grid).map(|(t, _)| t)
}

/// Blow-up time together with the launch point whose Jacobian vanishes first.
pub fn blowup_point(profile: &Profile1D, n_grid: usize) -> Option<(f64, f64)> {
    if profile.is_trivially_zero() {
        return None;
    }
    let (lo, hi) = search_window(profile);
    let m = min_slope(profile, lo, hi, n_grid);
    (m.slope < 0.0).then(|| (-1.0 / m.slope, m.alpha))
}

/// Solution value `Ψ(t, x)` by inverting the characteristic map.
pub fn evaluate(profile: &Profile1D, t: f64, x: f64) -> Result<f64, BurgersError> {
    let blowup = blowup_time(profile);
    evaluate_with_blowup(profile, t, x, blowup)
}

/// Same as [`evaluate`] with a precomputed blow-up time, for repeated calls.
pub fn evaluate_with_blowup(
    profile: &Profile1D,
    t: f64,
    x: f64,
    blowup: Option<f64>,
) -> Result<f64, BurgersError> {
    if let Some(b) = blowup {
        if t >= b {
            return Err(BurgersError::OutOfLifespan { t, blowup: b });
        }
    }
    let alpha = invert_characteristic(profile, t, x)?;
    Ok(profile.value(alpha))
}

/// Solves `α + tΨ̊(α) = x` by Newton's method safeguarded with bisection.
pub fn invert_characteristic(profile: &Profile1D, t: f64, x: f64) -> Result<f64, BurgersError> {
    let g = |a: f64| characteristic_position(profile, t, a) - x;
    let fail = || BurgersError::NoConvergence { t, x };

    let mut step = 1.0 + t * profile.value(x).abs();
    let (mut lo, mut hi) = (x - step, x + step);
    let mut tries = 0;
    while g(lo) > 0.0 || g(hi) < 0.0 {
        step *= 2.0;
        if g(lo) > 0.0 {
            lo = x - step;
        }
        if g(hi) < 0.0 {
            hi = x + step;
        }
        tries += 1;
        if tries > 200 || !step.is_finite() {
            return Err(fail());
        }
    }

    let mut a = x - t * profile.value(x);
    if !(lo..=hi).contains(&a) {
        a = 0.5 * (lo + hi);
    }
    for _ in 0..ROOT_MAX_ITER {
        let ga = g(a);
        if ga == 0.0 {
            return Ok(a);
        }
        if ga < 0.0 {
            lo = a;
        } else {
            hi = a;
        }
        let dg = jacobian(profile, t, a);
        let mut next = if dg > 0.0 { a - ga / dg } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - a).abs() <= ROOT_TOL * (1.0 + a.abs()) || (hi - lo) <= ROOT_TOL {
            return Ok(next);
        }
        a = next;
    }
    Err(fail())
}

/// Exact solution `y0/(1 + t·y0)` of `dy/dt = −y²`.
pub fn riccati_slope(y0: f64, t: f64) -> Result<f64, BurgersError> {
    let denom = 1.0 + t * y0;
    if y0 < 0.0 && denom <= 0.0 {
        return Err(BurgersError::Blowup { time: -1.0 / y0 });
    }
    Ok(y0 / denom)
}

/// One row of the characteristic table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FanRow {
    pub t: f64,
    pub alpha: f64,
    pub x: f64,
    pub jacobian: f64,
    pub psi: f64,
}

/// Characteristic table on `n_t` uniform times in `[0, t_max]` and `n_alpha`
/// launch points over the search window.
pub fn fan_table(profile: &Profile1D, t_max: f64, n_t: usize, n_alpha: usize) -> Vec<FanRow> {
    let (lo, hi) = search_window(profile);
    let alphas = linspace(lo, hi, n_alpha);
    let mut rows = Vec::with_capacity(n_t * n_alpha);
    for t in linspace(0.0, t_max, n_t.max(1)) {
        let t = if n_t <= 1 { t_max } else { t };
        for &a in &alphas {
            rows.push(FanRow {
                t,
                alpha: a,
                x: characteristic_position(profile, t, a),
                jacobian: jacobian(profile, t, a),
                psi: profile.value(a),
            });
        }
    }
    rows
}

/// First time at which the fan's minimum Jacobian reaches zero, located by
/// bisection in time on a fixed set of launch points.
pub fn first_jacobian_zero(profile: &Profile1D, alphas: &[f64], t_max: f64) -> Option<f64> {
    let min_j = |t: f64| {
        alphas
            .iter()
            .map(|&a| jacobian(profile, t, a))
            .fold(f64::INFINITY, f64::min)
    };
    if min_j(t_max) > 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0, t_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if min_j(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi {
            break;
        }
    }
    Some(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> Profile1D {
        Profile1D::gaussian(1.0, 0.0, 1.0)
    }

    #[test]
    fn closed_form_positions_and_jacobians() {
        let lin = Profile1D::linear(-1.0);
        assert_eq!(characteristic_position(&lin, 0.5, 2.0), 1.0);
        assert_eq!(characteristic_position(&Profile1D::zero(), 4.0, 3.0), 3.0);
        assert_eq!(characteristic_position(&gauss(), 1.0, 0.0), 1.0);
        assert_eq!(jacobian(&lin, 1.0, 0.3), 0.0);
        assert_eq!(jacobian(&Profile1D::constant(2.5), 3.0, 1.0), 1.0);
        let a = 0.5f64.sqrt();
        let expected = 1.0 - (2.0 / std::f64::consts::E).sqrt();
        assert!((jacobian(&gauss(), 1.0, a) - expected).abs() < 1e-14);
    }

    #[test]
    fn blowup_times() {
        assert_eq!(blowup_time(&Profile1D::zero()), None);
        assert!((blowup_time(&Profile1D::linear(-1.0)).unwrap() - 1.0).abs() < 1e-15);
        let t = blowup_time(&gauss()).unwrap();
        assert!((t - (std::f64::consts::E / 2.0).sqrt()).abs() < 1e-10);
        assert_eq!(blowup_time(&Profile1D::linear(2.0)), None);
    }

    #[test]
    fn evaluate_linear_and_zero() {
        assert_eq!(evaluate(&Profile1D::zero(), 5.0, 1.0).unwrap(), 0.0);
        let v = evaluate(&Profile1D::linear(-1.0), 0.5, 0.5).unwrap();
        assert!((v + 1.0).abs() < 1e-12);
        assert!(matches!(
            evaluate(&Profile1D::linear(-1.0), 1.0, 0.5),
            Err(BurgersError::OutOfLifespan { .. })
        ));
    }

    #[test]
    fn riccati() {
        assert_eq!(riccati_slope(0.0, 7.0).unwrap(), 0.0);
        assert!((riccati_slope(2.0, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            riccati_slope(-1.0, 1.0),
            Err(BurgersError::Blowup { time: 1.0 })
        );
        assert!(riccati_slope(-1.0, 1.0 - 1e-9).unwrap() < -1e8);
    }

    #[test]
    fn fan_orders_and_table_shape() {
        let fan = CharacteristicFan::uniform(&gauss(), -3.0, 3.0, 101, 1.0);
        assert!(fan.is_ordered());
        assert!(fan.min_jacobian() > 0.0);
        let rows = fan_table(&gauss(), 1.0, 3, 5);
        assert_eq!(rows.len(), 15);
        assert_eq!(rows[14].t, 1.0);
    }
}
