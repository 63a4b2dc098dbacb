//! Metric families and the null condition failure factors ℵ⁺ and ℵ⁻.

use serde::Serialize;

use super::tensors::{contract2, lower, symmetrize2, symmetrize3_tail, Tensor2, Tensor3, MINKOWSKI, ZERO2, ZERO3};
use super::NullError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// `g = g(Ψ)`, a scalar quasilinear equation `□_{g(Ψ)}Ψ = 0`.
    ScalarGPsi,
    /// `g = g(∂Φ)`, the equation `(g⁻¹)^{αβ}(∂Φ)∂_α∂_βΦ = 0`.
    SystemGdPhi,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::ScalarGPsi => "scalar_gPsi",
            MetricKind::SystemGdPhi => "system_gdPhi",
        }
    }
}

/// First Taylor coefficient of a metric family at the background.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricFamily {
    /// `G_{μν} = d/dΨ g_{μν}(0)`.
    ScalarGPsi(Tensor2),
    /// `G^λ_{αβ} = ∂/∂(∂_λΦ) g_{αβ}(0)`, stored as `g3[λ][α][β]`.
    SystemGdPhi(Tensor3),
}

impl MetricFamily {
    /// Scalar family; `g2` is symmetrized.
    pub fn scalar(g2: Tensor2) -> Self {
        MetricFamily::ScalarGPsi(symmetrize2(&g2))
    }

    /// System family; `g3[λ]` is symmetrized in its lower pair.
    pub fn system(g3: Tensor3) -> Self {
        MetricFamily::SystemGdPhi(symmetrize3_tail(&g3))
    }

    pub fn kind(&self) -> MetricKind {
        match self {
            MetricFamily::ScalarGPsi(_) => MetricKind::ScalarGPsi,
            MetricFamily::SystemGdPhi(_) => MetricKind::SystemGdPhi,
        }
    }

    /// John's metric `−dt² + (1+Ψ)⁻¹Σ(dxᵃ)²`.
    pub fn john() -> Self {
        let mut g = ZERO2;
        for i in 1..4 {
            g[i][i] = -1.0;
        }
        MetricFamily::ScalarGPsi(g)
    }

    /// `g = (1 + f(Ψ))m` with `f′(0) = c`.
    pub fn conformal(c: f64) -> Self {
        let mut g = MINKOWSKI;
        g.iter_mut().flatten().for_each(|v| *v *= c);
        MetricFamily::ScalarGPsi(g)
    }

    /// `g = m + Ψ(dx¹⊗dx² + dx²⊗dx¹)`.
    pub fn off_diagonal() -> Self {
        let mut g = ZERO2;
        g[1][2] = 1.0;
        g[2][1] = 1.0;
        MetricFamily::ScalarGPsi(g)
    }

    /// `□Φ = ∂ₜ((m⁻¹)^{αβ}∂_αΦ∂_βΦ)`, with `G^λ_{αβ} = 2δ^λ_α m_{β0}`.
    pub fn dt_null_form() -> Self {
        let mut g = ZERO3;
        for (lambda, gl) in g.iter_mut().enumerate() {
            for beta in 0..4 {
                gl[lambda][beta] += 2.0 * MINKOWSKI[beta][0];
            }
        }
        Self::system(g)
    }

    /// `□Φ = 2∂ₜΦ∂ₜ²Φ`, with `G^λ_{αβ} = m_{α0}m_{β0}δ₀^λ`.
    pub fn dt_phi_dtt() -> Self {
        let mut g = ZERO3;
        g[0][0][0] = MINKOWSKI[0][0] * MINKOWSKI[0][0];
        MetricFamily::SystemGdPhi(g)
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &[
            "john",
            "conformal[:c]",
            "off_diagonal",
            "dt_null_form",
            "dt_phi_dtt",
            "zero_scalar",
            "zero_system",
        ]
    }

    /// Looks up a built-in family by name, e.g. `john` or `conformal:2`.
    pub fn builtin(spec: &str) -> Result<Self, NullError> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec.trim(), None),
        };
        let no_arg = |m: Self| match arg {
            None => Ok(m),
            Some(_) => Err(NullError::UnknownMetric(spec.to_string())),
        };
        match name {
            "john" => no_arg(Self::john()),
            "conformal" => {
                let c = match arg {
                    None => 1.0,
                    Some(a) => a.parse().map_err(|_| NullError::UnknownMetric(spec.to_string()))?,
                };
                Ok(Self::conformal(c))
            }
            "off_diagonal" => no_arg(Self::off_diagonal()),
            "dt_null_form" => no_arg(Self::dt_null_form()),
            "dt_phi_dtt" => no_arg(Self::dt_phi_dtt()),
            "zero_scalar" => no_arg(MetricFamily::ScalarGPsi(ZERO2)),
            "zero_system" => no_arg(MetricFamily::SystemGdPhi(ZERO3)),
            _ => Err(NullError::UnknownMetric(spec.to_string())),
        }
    }
}

fn outgoing(theta: [f64; 3]) -> [f64; 4] {
    [1.0, theta[0], theta[1], theta[2]]
}

fn incoming(theta: [f64; 3]) -> [f64; 4] {
    [-1.0, theta[0], theta[1], theta[2]]
}

fn scalar_factor(g: &Tensor2, l: &[f64; 4]) -> f64 {
    contract2(g, l, l)
}

/// `m_{κλ}G^κ_{αβ}L^αL^βL^λ`.
fn system_factor(g: &Tensor3, l: &[f64; 4]) -> f64 {
    let l_low = lower(l);
    (0..4).map(|kappa| l_low[kappa] * contract2(&g[kappa], l, l)).sum()
}

fn factor(mf: &MetricFamily, l: &[f64; 4]) -> f64 {
    match mf {
        MetricFamily::ScalarGPsi(g) => scalar_factor(g, l),
        MetricFamily::SystemGdPhi(g) => system_factor(g, l),
    }
}

/// `G_{αβ}L^αL^β` with `L = (1, θ)`.
pub fn aleph_plus_scalar(mf: &MetricFamily, theta: [f64; 3]) -> Result<f64, NullError> {
    match mf {
        MetricFamily::ScalarGPsi(g) => Ok(scalar_factor(g, &outgoing(theta))),
        _ => Err(NullError::WrongKind {
            expected: MetricKind::ScalarGPsi,
            found: mf.kind(),
        }),
    }
}

/// `m_{κλ}G^κ_{αβ}L^αL^βL^λ` with `L = (1, θ)`.
pub fn aleph_plus_system(mf: &MetricFamily, theta: [f64; 3]) -> Result<f64, NullError> {
    match mf {
        MetricFamily::SystemGdPhi(g) => Ok(system_factor(g, &outgoing(theta))),
        _ => Err(NullError::WrongKind {
            expected: MetricKind::SystemGdPhi,
            found: mf.kind(),
        }),
    }
}

/// ℵ⁺ for either kind.
pub fn aleph_plus(mf: &MetricFamily, theta: [f64; 3]) -> f64 {
    factor(mf, &outgoing(theta))
}

/// The past factor: the same contraction with `(−1, θ)` in place of `L`.
pub fn aleph_minus(mf: &MetricFamily, theta: [f64; 3]) -> f64 {
    factor(mf, &incoming(theta))
}

/// `(min, max)` of `f` over `dirs`.
pub fn range_over<F: Fn([f64; 3]) -> f64>(dirs: &[[f64; 3]], f: F) -> (f64, f64) {
    dirs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
        let v = f(*d);
        (lo.min(v), hi.max(v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::fibonacci_sphere;

    #[test]
    fn john_metric_factors() {
        let mf = MetricFamily::john();
        for th in fibonacci_sphere(64) {
            assert!((aleph_plus_scalar(&mf, th).unwrap() + 1.0).abs() < 1e-14);
            assert!((aleph_minus(&mf, th) + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let th = [0.0, 0.0, 1.0];
        assert!(matches!(
            aleph_plus_system(&MetricFamily::john(), th),
            Err(NullError::WrongKind { .. })
        ));
        assert!(aleph_plus_scalar(&MetricFamily::dt_phi_dtt(), th).is_err());
    }

    #[test]
    fn dt_null_form_is_symmetrized_and_null() {
        let MetricFamily::SystemGdPhi(g) = MetricFamily::dt_null_form() else {
            unreachable!()
        };
        assert_eq!(g[2][2][0], -1.0);
        assert_eq!(g[2][0][2], -1.0);
        for th in fibonacci_sphere(32) {
            assert!(aleph_plus(&MetricFamily::dt_null_form(), th).abs() < 1e-14);
        }
    }

    #[test]
    fn builtin_lookup() {
        assert_eq!(MetricFamily::builtin("conformal:2").unwrap(), MetricFamily::conformal(2.0));
        assert!(MetricFamily::builtin("john:3").is_err());
        assert!(MetricFamily::builtin("nope").is_err());
    }
}
