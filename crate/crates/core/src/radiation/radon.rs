//! Plane integrals and the Friedlander radiation field.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use super::field::SpatialField;
use super::RadiationError;
use crate::quadrature::{adaptive_gl, dot, norm, orthonormal_frame, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadonSettings {
    /// Gauss–Legendre nodes per radial panel.
    pub radial_nodes: usize,
    /// Uniform angular nodes on each plane.
    pub angular_nodes: usize,
    /// Absolute tolerance of each plane integral.
    pub tol: f64,
    /// Maximum panel bisection depth.
    pub max_depth: u32,
}

impl Default for RadonSettings {
    fn default() -> Self {
        Self {
            radial_nodes: 64,
            angular_nodes: 128,
            tol: 1e-8,
            max_depth: 30,
        }
    }
}

/// How `∂_q ℛ[Φ̊]` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QDerivative {
    /// `ℛ[θ·∇Φ̊]` when a gradient is available, the stencil otherwise.
    Auto,
    /// Five-point central stencil in `q`.
    Stencil,
}

/// Quadrature engine for plane integrals `ℛ[f](q, θ) = ∫_{y·θ = q} f dσ`.
#[derive(Debug, Clone)]
pub struct Radon {
    pub settings: RadonSettings,
    gl: GaussLegendre,
    cos_sin: Vec<(f64, f64)>,
}

impl Default for Radon {
    fn default() -> Self {
        Self::new(RadonSettings::default())
    }
}

fn check_direction(theta: [f64; 3]) -> Result<(), RadiationError> {
    if (norm(theta) - 1.0).abs() > 1e-12 {
        return Err(RadiationError::InvalidDirection(theta));
    }
    Ok(())
}

impl Radon {
    pub fn new(settings: RadonSettings) -> Self {
        let n = settings.angular_nodes.max(1);
        let cos_sin = (0..n)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / n as f64;
                (phi.cos(), phi.sin())
            })
            .collect();
        Self {
            gl: GaussLegendre::new(settings.radial_nodes.max(1)),
            settings,
            cos_sin,
        }
    }

    /// Shared engine with default settings.
    pub fn shared() -> &'static Radon {
        static ENGINE: OnceLock<Radon> = OnceLock::new();
        ENGINE.get_or_init(Radon::default)
    }

    pub fn transform(&self, f: &SpatialField, q: f64, theta: [f64; 3]) -> Result<f64, RadiationError> {
        check_direction(theta)?;
        let r = f.support_radius();
        if f.is_zero() || q.abs() >= r {
            return Ok(0.0);
        }
        if let Some(p) = f.radial_profile() {
            let value = adaptive_gl(&self.gl, q.abs(), r, self.settings.tol, self.settings.max_depth, |s| {
                p.value(s) * s
            })
            .ok_or(RadiationError::QuadratureFailure { q, theta })?;
            return Ok(2.0 * PI * value);
        }
        self.plane(|y| f.eval(y), r, q, theta)
    }

    /// Polar quadrature of `g` on the plane `y·θ = q`, over the disk of
    /// radius `√(R² − q²)` plus a margin of `R/50`.
    fn plane<G: Fn([f64; 3]) -> f64>(&self, g: G, r: f64, q: f64, theta: [f64; 3]) -> Result<f64, RadiationError> {
        let (e1, e2) = orthonormal_frame(theta);
        let c = [q * theta[0], q * theta[1], q * theta[2]];
        let weight = 2.0 * PI / self.cos_sin.len() as f64;
        let ring = |rho: f64| -> f64 {
            let mut s = 0.0;
            for &(cs, sn) in &self.cos_sin {
                let a = rho * cs;
                let b = rho * sn;
                s += g([
                    c[0] + a * e1[0] + b * e2[0],
                    c[1] + a * e1[1] + b * e2[1],
                    c[2] + a * e1[2] + b * e2[2],
                ]);
            }
            s * weight * rho
        };
        let rho0 = (r * r - q * q).max(0.0).sqrt();
        let margin = r / 50.0;
        let tol = 0.5 * self.settings.tol;
        let fail = RadiationError::QuadratureFailure { q, theta };
        let inner = adaptive_gl(&self.gl, 0.0, rho0, tol, self.settings.max_depth, &ring).ok_or(fail.clone())?;
        let outer = adaptive_gl(&self.gl, rho0, rho0 + margin, tol, self.settings.max_depth, &ring).ok_or(fail)?;
        Ok(inner + outer)
    }

    /// `∂_q ℛ[f](q, θ)`.
    pub fn q_derivative(
        &self,
        f: &SpatialField,
        q: f64,
        theta: [f64; 3],
        mode: QDerivative,
        h: f64,
    ) -> Result<f64, RadiationError> {
        check_direction(theta)?;
        if f.is_zero() {
            return Ok(0.0);
        }
        if mode == QDerivative::Auto && f.has_gradient() {
            let r = f.support_radius();
            if q.abs() >= r {
                return Ok(0.0);
            }
            if let Some(p) = f.radial_profile() {
                return Ok(-2.0 * PI * q * p.value(q.abs()));
            }
            return self.plane(
                |y| {
                    let g = f.gradient(y).unwrap_or([0.0; 3]);
                    dot(theta, g)
                },
                r,
                q,
                theta,
            );
        }
        let at = |x: f64| self.transform(f, x, theta);
        Ok((at(q - 2.0 * h)? - 8.0 * at(q - h)? + 8.0 * at(q + h)? - at(q + 2.0 * h)?) / (12.0 * h))
    }
}

/// `ℛ[f](q, θ)` with the default engine.
pub fn radon(f: &SpatialField, q: f64, theta: [f64; 3]) -> Result<f64, RadiationError> {
    Radon::shared().transform(f, q, theta)
}

/// Data pair `(Φ̊, Φ̊₀)` with the options used to evaluate its radiation field.
#[derive(Debug, Clone)]
pub struct RadiationData {
    pub phi0: SpatialField,
    pub phi0_dot: SpatialField,
    pub derivative: QDerivative,
    /// Stencil spacing in `q`; defaults to `R/512`.
    pub h_q: Option<f64>,
}

impl RadiationData {
    pub fn new(phi0: SpatialField, phi0_dot: SpatialField) -> Self {
        Self {
            phi0,
            phi0_dot,
            derivative: QDerivative::Auto,
            h_q: None,
        }
    }

    pub fn with_stencil(mut self, h_q: Option<f64>) -> Self {
        self.derivative = QDerivative::Stencil;
        self.h_q = h_q;
        self
    }

    pub fn support_radius(&self) -> f64 {
        self.phi0.support_radius().max(self.phi0_dot.support_radius())
    }

    pub fn is_zero(&self) -> bool {
        self.phi0.is_zero() && self.phi0_dot.is_zero()
    }

    pub fn is_radial(&self) -> bool {
        self.phi0.radial_profile().is_some() && self.phi0_dot.radial_profile().is_some()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            phi0: self.phi0.scaled(lambda),
            phi0_dot: self.phi0_dot.scaled(lambda),
            derivative: self.derivative,
            h_q: self.h_q,
        }
    }

    pub fn h_q(&self) -> f64 {
        self.h_q.unwrap_or(self.support_radius().max(1e-300) / 512.0)
    }

    /// `𝔉(q, θ) = −(1/4π)∂_qℛ[Φ̊](q, θ) + (1/4π)ℛ[Φ̊₀](q, θ)`.
    pub fn friedlander(&self, engine: &Radon, q: f64, theta: [f64; 3]) -> Result<f64, RadiationError> {
        let d = engine.q_derivative(&self.phi0, q, theta, self.derivative, self.h_q())?;
        let v = engine.transform(&self.phi0_dot, q, theta)?;
        Ok((v - d) / (4.0 * PI))
    }
}

/// `𝔉(q, θ)` with the default engine.
pub fn friedlander(phi0: &SpatialField, phi0_dot: &SpatialField, q: f64, theta: [f64; 3]) -> Result<f64, RadiationError> {
    RadiationData::new(phi0.clone(), phi0_dot.clone()).friedlander(Radon::shared(), q, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile1D;
    use crate::quadrature::normalize;

    #[test]
    fn general_path_matches_radial_path() {
        let p = Profile1D::poly_bump(1.0, 4.0, 0.5);
        let radial = SpatialField::radial(p.clone());
        let general = SpatialField::new("bump", 0.5, move |y| p.value(norm(y)));
        let th = normalize([0.3, -0.4, 0.8]);
        for q in [-0.45, -0.1, 0.0, 0.2, 0.49] {
            let a = radon(&radial, q, th).unwrap();
            let b = radon(&general, q, th).unwrap();
            assert!((a - b).abs() < 1e-9, "q={q}: {a} vs {b}");
        }
    }

    #[test]
    fn outside_support_vanishes() {
        let f = SpatialField::gaussian();
        assert_eq!(radon(&f, 8.5, [0.0, 0.0, 1.0]).unwrap(), 0.0);
        assert!(radon(&f, 0.0, [1.0, 1.0, 0.0]).is_err());
    }
}
