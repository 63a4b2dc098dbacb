//! The data functional `𝒮(U)` for fluid Lagrangians and its sign criterion.

use std::f64::consts::PI;

use serde::Serialize;

use super::field::SpatialField;
use super::RadiationError;
use crate::quadrature::{adaptive_gl, GaussLegendre};

const SPHERE_Z_NODES: usize = 32;
const SPHERE_PHI_NODES: usize = 64;

/// `∫_{S_{0,U}} r{(Φ̊₀ − k) − η₀∂ᵣΦ̊} dυ + ∫_{Σ₀^U} {2(Φ̊₀ − k) − η₀∂ᵣΦ̊} d³x`,
/// with the sphere at `r = 1 − U` and the volume over `1 − U ≤ r ≤ 1`.
pub fn christodoulou_s(
    phi0: &SpatialField,
    phi0_dot: &SpatialField,
    k: f64,
    eta0: f64,
    u: f64,
) -> Result<f64, RadiationError> {
    if !(u > 0.0 && u < 1.0) {
        return Err(RadiationError::InvalidParameter(format!("U must lie in (0, 1), got {u}")));
    }
    if !(eta0 > 0.0 && eta0 < 1.0) {
        return Err(RadiationError::InvalidParameter(format!("η₀ must lie in (0, 1), got {eta0}")));
    }
    let r_in = 1.0 - u;
    let gl = GaussLegendre::new(64);
    let fail = || RadiationError::QuadratureFailure { q: r_in, theta: [0.0; 3] };

    let value = match (phi0.radial_profile(), phi0_dot.radial_profile()) {
        (Some(p), Some(d)) => {
            let dphi = |s: f64| if s > phi0.support_radius() { 0.0 } else { p.derivative(s) };
            let dot = |s: f64| if s > phi0_dot.support_radius() { 0.0 } else { d.value(s) };
            let sphere = 4.0 * PI * r_in.powi(3) * (dot(r_in) - k - eta0 * dphi(r_in));
            let volume = adaptive_gl(&gl, r_in, 1.0, 1e-12, 30, |s| {
                4.0 * PI * s * s * (2.0 * (dot(s) - k) - eta0 * dphi(s))
            })
            .ok_or_else(fail)?;
            sphere + volume
        }
        _ => {
            let rule = SphereRule::new(SPHERE_Z_NODES, SPHERE_PHI_NODES);
            let sphere = r_in.powi(3) * rule.integrate(r_in, |y| phi0_dot.eval(y) - k - eta0 * phi0.radial_derivative(y));
            let volume = adaptive_gl(&gl, r_in, 1.0, 1e-10, 20, |s| {
                s * s * rule.integrate(s, |y| 2.0 * (phi0_dot.eval(y) - k) - eta0 * phi0.radial_derivative(y))
            })
            .ok_or_else(fail)?;
            sphere + volume
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(fail())
    }
}

/// Product rule on the unit sphere: Gauss–Legendre in `cos ϑ` times a uniform
/// rule in the azimuth.
struct SphereRule {
    points: Vec<([f64; 3], f64)>,
}

impl SphereRule {
    fn new(n_z: usize, n_phi: usize) -> Self {
        let gl = GaussLegendre::new(n_z);
        let mut points = Vec::with_capacity(n_z * n_phi);
        for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
            let rho = (1.0 - z * z).sqrt();
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                points.push(([rho * phi.cos(), rho * phi.sin(), *z], wz * 2.0 * PI / n_phi as f64));
            }
        }
        Self { points }
    }

    /// `∫_{S²} f(r·ω) dω`.
    fn integrate<F: Fn([f64; 3]) -> f64>(&self, r: f64, f: F) -> f64 {
        self.points
            .iter()
            .map(|(w, weight)| weight * f([r * w[0], r * w[1], r * w[2]]))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShockIndicator {
    pub shock_indicated: bool,
    pub note: String,
}

/// Sign structure of the shock condition: indicated when `ell > 0` and
/// `𝒮 < 0`, or `ell < 0` and `𝒮 > 0`.
pub fn christodoulou_criterion(s_value: f64, ell: f64) -> ShockIndicator {
    let indicated = (ell > 0.0 && s_value < 0.0) || (ell < 0.0 && s_value > 0.0);
    let note = if ell == 0.0 {
        "dH/dσ vanishes: the quadratic nonlinearities are null and no shock is indicated".to_string()
    } else if s_value == 0.0 {
        "S vanishes: threshold case, no shock indicated".to_string()
    } else if indicated {
        "sign of S opposes dH/dσ: shock indicated (threshold constant not evaluated)".to_string()
    } else {
        "sign of S agrees with dH/dσ: no shock indicated".to_string()
    };
    ShockIndicator {
        shock_indicated: indicated,
        note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile1D;

    #[test]
    fn constant_deficit_closed_form() {
        let (k, c, u) = (0.4, 0.1, 0.3);
        let phi0 = SpatialField::zero();
        let dot = SpatialField::radial_truncated(Profile1D::constant(k - c), 2.0);
        let s = christodoulou_s(&phi0, &dot, k, 0.5, u).unwrap();
        let r3 = (1.0 - u).powi(3);
        let exact = -c * (4.0 * PI * r3 + 8.0 * PI / 3.0 * (1.0 - r3));
        assert!((s - exact).abs() < 1e-12, "{s} vs {exact}");
    }

    #[test]
    fn general_path_matches_radial_path() {
        let p = Profile1D::poly_bump(0.3, 4.0, 1.2);
        let d = Profile1D::poly_bump(0.2, 3.0, 1.5);
        let (pc, dc) = (p.clone(), d.clone());
        let radial = christodoulou_s(
            &SpatialField::radial(p),
            &SpatialField::radial(d),
            0.1,
            0.6,
            0.25,
        )
        .unwrap();
        let general = christodoulou_s(
            &SpatialField::new("p", 1.2, move |y| pc.value(crate::quadrature::norm(y))),
            &SpatialField::new("d", 1.5, move |y| dc.value(crate::quadrature::norm(y))),
            0.1,
            0.6,
            0.25,
        )
        .unwrap();
        assert!((radial - general).abs() < 1e-7, "{radial} vs {general}");
    }

    #[test]
    fn criterion_sign_table() {
        assert!(christodoulou_criterion(-0.3, 1.0).shock_indicated);
        assert!(!christodoulou_criterion(0.3, 1.0).shock_indicated);
        assert!(!christodoulou_criterion(0.0, -2.0).shock_indicated);
        assert!(christodoulou_criterion(0.3, -1.0).shock_indicated);
    }

    #[test]
    fn rejects_bad_parameters() {
        let z = SpatialField::zero();
        assert!(christodoulou_s(&z, &z, 0.1, 0.5, 1.0).is_err());
        assert!(christodoulou_s(&z, &z, 0.1, 1.5, 0.5).is_err());
    }
}
