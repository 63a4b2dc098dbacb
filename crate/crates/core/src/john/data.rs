//! Initial data for John's radial equation and the t = 0 slice it induces.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::JohnError;
use crate::profile::Profile1D;
use crate::quadrature::lagrange_uniform;

/// Time at which the data pair is prescribed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartTime {
    /// Data at t = 0, supported in r ≤ 1.
    Zero,
    /// Data at t = −1/2, supported in r ≤ 1/2, evolved to t = 0 before the
    /// eikonal function is initialized.
    MinusHalf,
}

impl StartTime {
    pub fn value(self) -> f64 {
        match self {
            StartTime::Zero => 0.0,
            StartTime::MinusHalf => -0.5,
        }
    }

    pub fn from_value(t: f64) -> Option<Self> {
        if t == 0.0 {
            Some(StartTime::Zero)
        } else if t == -0.5 {
            Some(StartTime::MinusHalf)
        } else {
            None
        }
    }

    pub fn max_support(self) -> f64 {
        match self {
            StartTime::Zero => 1.0,
            StartTime::MinusHalf => 0.5,
        }
    }
}

/// Discretization used to carry data from t = −1/2 to t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MolSettings {
    /// Radial cells per unit length.
    pub cells_per_unit: usize,
    /// Outer edge of the radial grid.
    pub r_out: f64,
    /// Time step as a fraction of the grid spacing.
    pub cfl: f64,
}

impl Default for MolSettings {
    fn default() -> Self {
        Self {
            cells_per_unit: 1024,
            r_out: 1.25,
            cfl: 0.25,
        }
    }
}

/// The data pair `(Ψ̊, Ψ̊₀)` scaled by `amplitude`.
#[derive(Debug, Clone)]
pub struct DataSpec {
    pub psi0: Profile1D,
    pub psi0_dot: Profile1D,
    pub support_radius: f64,
    pub amplitude: f64,
    pub start_time: StartTime,
    pub mol: MolSettings,
    slice: OnceLock<Arc<InitialSlice>>,
}

impl DataSpec {
    pub fn new(
        psi0: Profile1D,
        psi0_dot: Profile1D,
        support_radius: f64,
        amplitude: f64,
        start_time: StartTime,
    ) -> Result<Self, JohnError> {
        let data = Self {
            psi0,
            psi0_dot,
            support_radius,
            amplitude,
            start_time,
            mol: MolSettings::default(),
            slice: OnceLock::new(),
        };
        data.validate()?;
        Ok(data)
    }

    /// Zero data at t = 0.
    pub fn zero() -> Self {
        Self::new(Profile1D::zero(), Profile1D::zero(), 1.0, 1.0, StartTime::Zero)
            .expect("zero data is valid")
    }

    pub fn with_mol(mut self, mol: MolSettings) -> Self {
        self.mol = mol;
        self.slice = OnceLock::new();
        self
    }

    pub fn validate(&self) -> Result<(), JohnError> {
        let invalid = |m: String| Err(JohnError::InvalidData(m));
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return invalid(format!("amplitude must be positive, got {}", self.amplitude));
        }
        if !(self.support_radius > 0.0 && self.support_radius <= 1.0) {
            return invalid(format!(
                "support radius must lie in (0, 1], got {}",
                self.support_radius
            ));
        }
        let max = self.start_time.max_support();
        if self.support_radius > max {
            return invalid(format!(
                "support radius {} exceeds {} required for start time {}",
                self.support_radius,
                max,
                self.start_time.value()
            ));
        }
        for p in [&self.psi0, &self.psi0_dot] {
            if p.support_radius() > self.support_radius + 1e-12 {
                return invalid(format!(
                    "profile '{}' has support radius {} beyond the declared {}",
                    p.label(),
                    p.support_radius(),
                    self.support_radius
                ));
            }
        }
        let n = 4096;
        for i in 0..=n {
            let r = self.support_radius * i as f64 / n as f64;
            let psi = self.amplitude * self.psi0.value(r);
            if !(1.0 + psi > 0.0) {
                return invalid(format!("1 + Ψ̊ = {} ≤ 0 at r = {r}", 1.0 + psi));
            }
        }
        Ok(())
    }

    pub fn psi(&self, r: f64) -> f64 {
        self.amplitude * self.psi0.value(r)
    }

    pub fn psi_r(&self, r: f64) -> f64 {
        self.amplitude * self.psi0.derivative(r)
    }

    pub fn psi_dot(&self, r: f64) -> f64 {
        self.amplitude * self.psi0_dot.value(r)
    }

    /// Same data with a different amplitude.
    pub fn with_amplitude(&self, amplitude: f64) -> Result<Self, JohnError> {
        let d = Self {
            amplitude,
            slice: OnceLock::new(),
            ..self.clone()
        };
        d.validate()?;
        Ok(d)
    }

    pub fn is_zero(&self) -> bool {
        self.psi0.is_trivially_zero() && self.psi0_dot.is_trivially_zero()
    }

    /// The solution on the slice t = 0, where the eikonal function is set
    /// to `u = 1 − r`.
    pub fn initial_slice(&self) -> Arc<InitialSlice> {
        self.slice
            .get_or_init(|| {
                Arc::new(match self.start_time {
                    StartTime::Zero => InitialSlice::Analytic(self.clone_without_cache()),
                    StartTime::MinusHalf => {
                        let mut mol = RadialMol::from_data(self, self.mol);
                        mol.evolve(0.5);
                        InitialSlice::Tabulated(mol.tabulate())
                    }
                })
            })
            .clone()
    }

    fn clone_without_cache(&self) -> Self {
        Self {
            slice: OnceLock::new(),
            ..self.clone()
        }
    }
}

/// `v = rΨ` and its first derivatives at one radius on the t = 0 slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePoint {
    pub v: f64,
    pub v_t: f64,
    pub v_r: f64,
}

/// Tabulated `v, ∂ₜv, ∂ᵣv` on a uniform radial grid starting at r = 0.
#[derive(Debug, Clone)]
pub struct TabulatedSlice {
    pub h: f64,
    pub v: Vec<f64>,
    pub v_t: Vec<f64>,
    pub v_r: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum InitialSlice {
    Analytic(DataSpec),
    Tabulated(TabulatedSlice),
}

impl InitialSlice {
    pub fn at(&self, r: f64) -> SlicePoint {
        match self {
            InitialSlice::Analytic(d) => SlicePoint {
                v: r * d.psi(r),
                v_t: r * d.psi_dot(r),
                v_r: d.psi(r) + r * d.psi_r(r),
            },
            InitialSlice::Tabulated(t) => {
                let r_max = t.h * (t.v.len() - 1) as f64;
                if r >= r_max {
                    return SlicePoint {
                        v: 0.0,
                        v_t: 0.0,
                        v_r: 0.0,
                    };
                }
                SlicePoint {
                    v: lagrange_uniform(&t.v, 0.0, t.h, r, 6),
                    v_t: lagrange_uniform(&t.v_t, 0.0, t.h, r, 6),
                    v_r: lagrange_uniform(&t.v_r, 0.0, t.h, r, 6),
                }
            }
        }
    }
}

/// Method-of-lines solver for `v = rΨ` in `(t, r)` coordinates:
///
/// `∂ₜ²v = (1 + v/r)∂ᵣ²v + (∂ₜv)²/(r + v)`,
///
/// with the odd reflection `v(−r) = −v(r)` at the origin, fourth-order
/// centered differences and classical RK4 in time.
#[derive(Debug, Clone)]
pub struct RadialMol {
    pub h: f64,
    pub t: f64,
    pub v: Vec<f64>,
    pub v_t: Vec<f64>,
    dt: f64,
}

impl RadialMol {
    pub fn from_data(data: &DataSpec, settings: MolSettings) -> Self {
        Self::from_fn(
            settings,
            |r| r * data.psi(r),
            |r| r * data.psi_dot(r),
        )
    }

    /// Initializes from arbitrary `v(0, r)` and `∂ₜv(0, r)`.
    pub fn from_fn(
        settings: MolSettings,
        v0: impl Fn(f64) -> f64,
        v1: impl Fn(f64) -> f64,
    ) -> Self {
        let h = 1.0 / settings.cells_per_unit as f64;
        let n = (settings.r_out / h).ceil() as usize + 1;
        let v = (0..n).map(|i| if i == 0 { 0.0 } else { v0(i as f64 * h) }).collect();
        let v_t = (0..n).map(|i| if i == 0 { 0.0 } else { v1(i as f64 * h) }).collect();
        Self {
            h,
            t: 0.0,
            v,
            v_t,
            dt: settings.cfl * h,
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    fn at(v: &[f64], i: isize) -> f64 {
        if i < 0 {
            -v[(-i) as usize]
        } else if (i as usize) < v.len() {
            v[i as usize]
        } else {
            0.0
        }
    }

    fn d2(v: &[f64], i: usize, h: f64) -> f64 {
        let i = i as isize;
        (-Self::at(v, i - 2) + 16.0 * Self::at(v, i - 1) - 30.0 * Self::at(v, i)
            + 16.0 * Self::at(v, i + 1)
            - Self::at(v, i + 2))
            / (12.0 * h * h)
    }

    fn d1(v: &[f64], i: usize, h: f64) -> f64 {
        let i = i as isize;
        (Self::at(v, i - 2) - 8.0 * Self::at(v, i - 1) + 8.0 * Self::at(v, i + 1)
            - Self::at(v, i + 2))
            / (12.0 * h)
    }

    fn accel(&self, v: &[f64], vt: &[f64], out: &mut [f64]) {
        let h = self.h;
        out[0] = 0.0;
        for i in 1..v.len() {
            let r = i as f64 * h;
            let psi = v[i] / r;
            out[i] = (1.0 + psi) * Self::d2(v, i, h) + vt[i] * vt[i] / (r + v[i]);
        }
    }

    /// Advances by `duration` with steps no larger than the configured one.
    pub fn evolve(&mut self, duration: f64) {
        if duration <= 0.0 {
            return;
        }
        let steps = (duration / self.dt).ceil() as usize;
        let dt = duration / steps as f64;
        let n = self.len();
        let mut k = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut kv: [Vec<f64>; 4] = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut tv = vec![0.0; n];
        let mut tvt = vec![0.0; n];
        for _ in 0..steps {
            let coeffs = [0.0, 0.5, 0.5, 1.0];
            for stage in 0..4 {
                if stage == 0 {
                    tv.copy_from_slice(&self.v);
                    tvt.copy_from_slice(&self.v_t);
                } else {
                    let c = coeffs[stage] * dt;
                    for i in 0..n {
                        tv[i] = self.v[i] + c * kv[stage - 1][i];
                        tvt[i] = self.v_t[i] + c * k[stage - 1][i];
                    }
                }
                kv[stage].copy_from_slice(&tvt);
                self.accel(&tv, &tvt, &mut k[stage]);
            }
            for i in 0..n {
                self.v[i] += dt / 6.0 * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
                self.v_t[i] += dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
            }
            self.v[0] = 0.0;
            self.v_t[0] = 0.0;
            self.t += dt;
        }
    }

    /// Ψ at radius `r`, interpolated from the grid.
    pub fn psi_at(&self, r: f64) -> f64 {
        if r < 4.0 * self.h {
            return lagrange_uniform(&self.v_r(), 0.0, self.h, r, 6);
        }
        lagrange_uniform(&self.v, 0.0, self.h, r, 6) / r
    }

    pub fn v_r(&self) -> Vec<f64> {
        (0..self.len()).map(|i| Self::d1(&self.v, i, self.h)).collect()
    }

    pub fn tabulate(&self) -> TabulatedSlice {
        TabulatedSlice {
            h: self.h,
            v: self.v.clone(),
            v_t: self.v_t.clone(),
            v_r: self.v_r(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_data() {
        let bump = Profile1D::poly_bump(1.0, 4.0, 0.5);
        assert!(DataSpec::new(Profile1D::zero(), bump.clone(), 0.5, 0.1, StartTime::MinusHalf).is_ok());
        assert!(matches!(
            DataSpec::new(Profile1D::zero(), Profile1D::poly_bump(1.0, 4.0, 0.8), 0.8, 0.1, StartTime::MinusHalf),
            Err(JohnError::InvalidData(_))
        ));
        assert!(matches!(
            DataSpec::new(bump.scaled(-3.0), Profile1D::zero(), 0.5, 1.0, StartTime::Zero),
            Err(JohnError::InvalidData(_))
        ));
        assert!(matches!(
            DataSpec::new(Profile1D::zero(), bump, 0.4, 0.1, StartTime::Zero),
            Err(JohnError::InvalidData(_))
        ));
    }

    #[test]
    fn linear_small_data_follows_dalembert() {
        // For tiny amplitude the evolution is linear: v(t, r) is the
        // d'Alembert solution of the odd-extended data.
        let eps = 1e-9;
        let g = |s: f64| s * (1.0 - 4.0 * s * s).max(0.0).powi(4);
        let mut mol = RadialMol::from_fn(
            MolSettings { cells_per_unit: 256, r_out: 1.25, cfl: 0.25 },
            |_| 0.0,
            |r| eps * g(r),
        );
        mol.evolve(0.5);
        // v(t, r) = ½∫_{r−t}^{r+t} g, so ∂ₜv − ∂ᵣv = g(r − t).
        let tab = mol.tabulate();
        for &r in &[0.3, 0.55, 0.8, 0.95] {
            let i = (r * 256.0) as usize;
            let rr = i as f64 / 256.0;
            let got = (tab.v_t[i] - tab.v_r[i]) / eps;
            assert!((got - g(rr - 0.5)).abs() < 1e-5, "r = {rr}: {got} vs {}", g(rr - 0.5));
        }
    }
}
