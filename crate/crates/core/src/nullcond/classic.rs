//! The classic null condition for quadratic nonlinearities.

use rayon::prelude::*;
use serde::Serialize;

use super::aleph::MetricFamily;
use super::tensors::{
    add2, contract2, matmul, raise_both, scale2, symmetrize2, trace, Tensor2, Tensor3, MINKOWSKI, ZERO2, ZERO3,
};
use super::NullError;
use crate::quadrature::fibonacci_sphere;

pub const NULL_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_DIRECTIONS: usize = 4096;

/// Quadratic part of a wave equation:
/// `𝒜^{μνσ}∂_σΦ∂_μ∂_νΦ + 𝒜′^{μν}Φ∂_μ∂_νΦ + 𝒩^{μν}∂_μΦ∂_νΦ`.
///
/// `a3` is stored as `a3[μ][ν][σ]` and is symmetric in `(μ, ν)`.
/// `a2` is the `Φ∂∂Φ` coefficient that only occurs for `g = g(Ψ)` equations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticNonlinearity {
    pub a3: Tensor3,
    pub a2: Tensor2,
    pub n: Tensor2,
}

impl QuadraticNonlinearity {
    pub fn new(a3: Tensor3, a2: Tensor2, n: Tensor2) -> Self {
        let mut sym = ZERO3;
        for mu in 0..4 {
            for nu in 0..4 {
                for sigma in 0..4 {
                    sym[mu][nu][sigma] = 0.5 * (a3[mu][nu][sigma] + a3[nu][mu][sigma]);
                }
            }
        }
        Self {
            a3: sym,
            a2: symmetrize2(&a2),
            n: symmetrize2(&n),
        }
    }

    pub fn semilinear(n: Tensor2) -> Self {
        Self::new(ZERO3, ZERO2, n)
    }

    pub fn zero() -> Self {
        Self::new(ZERO3, ZERO2, ZERO2)
    }

    /// Quadratic terms generated by a metric family.
    ///
    /// For `□_{g(Ψ)}Ψ` these are `−Ψ(m⁻¹Gm⁻¹)∂∂Ψ` and
    /// `(−m⁻¹Gm⁻¹ + ½tr(m⁻¹G)m⁻¹)∂Ψ∂Ψ`; for `(g⁻¹)(∂Φ)∂∂Φ` the single term
    /// `−(m⁻¹G^σm⁻¹)∂_σΦ∂∂Φ`.
    pub fn induced_by(mf: &MetricFamily) -> Self {
        match mf {
            MetricFamily::ScalarGPsi(g) => {
                let raised = raise_both(g);
                let tr = trace(&matmul(&MINKOWSKI, g));
                let n = add2(&scale2(&raised, -1.0), &scale2(&MINKOWSKI, 0.5 * tr));
                Self::new(ZERO3, scale2(&raised, -1.0), n)
            }
            MetricFamily::SystemGdPhi(g) => {
                let mut a3 = ZERO3;
                for (sigma, gs) in g.iter().enumerate() {
                    let raised = raise_both(gs);
                    for mu in 0..4 {
                        for nu in 0..4 {
                            a3[mu][nu][sigma] = -raised[mu][nu];
                        }
                    }
                }
                Self::new(a3, ZERO2, ZERO2)
            }
        }
    }

    /// `|𝒜ℓℓℓ| + |𝒜′ℓℓ| + |𝒩ℓℓ|` at the covector `ell`.
    pub fn violation(&self, ell: &[f64; 4]) -> f64 {
        let mut cubic = 0.0;
        for sigma in 0..4 {
            let mut s = 0.0;
            for mu in 0..4 {
                for nu in 0..4 {
                    s += self.a3[mu][nu][sigma] * ell[mu] * ell[nu];
                }
            }
            cubic += s * ell[sigma];
        }
        cubic.abs() + contract2(&self.a2, ell, ell).abs() + contract2(&self.n, ell, ell).abs()
    }
}

/// A flat null direction and its two null covectors `(∓1, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullDirection {
    pub theta: [f64; 3],
    /// `L_flat = (1, θ)`.
    pub l_flat: [f64; 4],
    /// `[(−1, θ), (1, θ)]`.
    pub covectors: [[f64; 4]; 2],
}

impl NullDirection {
    pub fn new(theta: [f64; 3]) -> Self {
        let [a, b, c] = theta;
        Self {
            theta,
            l_flat: [1.0, a, b, c],
            covectors: [[-1.0, a, b, c], [1.0, a, b, c]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullCheck {
    pub passes: bool,
    pub max_violation: f64,
    pub witness: NullDirection,
    /// Sign of `ℓ₀` in the witnessing covector.
    pub witness_sign: f64,
    pub n_dirs: usize,
}

pub fn check_classic_null(nl: &QuadraticNonlinearity, n_dirs: usize) -> Result<NullCheck, NullError> {
    check_classic_null_scaled(nl, n_dirs, 1.0)
}

/// [`check_classic_null`] with every covector multiplied by `scale`.
///
/// The pass threshold is applied to the unit-normalized violation, so the
/// verdict does not depend on `scale`; the reported `max_violation` is the
/// raw value at the scaled covectors.
pub fn check_classic_null_scaled(
    nl: &QuadraticNonlinearity,
    n_dirs: usize,
    scale: f64,
) -> Result<NullCheck, NullError> {
    if n_dirs < 6 {
        return Err(NullError::TooFewDirections(n_dirs));
    }
    if !(scale.is_finite() && scale != 0.0) {
        return Err(NullError::InvalidScale(scale));
    }
    let dirs = fibonacci_sphere(n_dirs);
    let per_dir: Vec<(f64, f64, f64)> = dirs
        .par_iter()
        .map(|th| {
            let d = NullDirection::new(*th);
            let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
            for ell in d.covectors {
                let scaled = ell.map(|v| v * scale);
                let raw = nl.violation(&scaled);
                let normalized = nl.violation(&ell);
                if normalized > best.0 {
                    best = (normalized, raw, ell[0]);
                }
            }
            best
        })
        .collect();
    let mut arg = 0;
    for (i, v) in per_dir.iter().enumerate() {
        if v.0 > per_dir[arg].0 {
            arg = i;
        }
    }
    let (normalized, raw, sign) = per_dir[arg];
    Ok(NullCheck {
        passes: normalized <= NULL_TOLERANCE,
        max_violation: raw,
        witness: NullDirection::new(dirs[arg]),
        witness_sign: sign,
        n_dirs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_form_passes_and_dt_squared_fails() {
        let q0 = QuadraticNonlinearity::semilinear(MINKOWSKI);
        let r = check_classic_null(&q0, 512).unwrap();
        assert!(r.passes, "{}", r.max_violation);

        let mut n = ZERO2;
        n[0][0] = 1.0;
        let r = check_classic_null(&QuadraticNonlinearity::semilinear(n), 512).unwrap();
        assert!(!r.passes);
        assert!((r.max_violation - 1.0).abs() < 1e-15);
    }

    #[test]
    fn too_few_directions() {
        assert!(check_classic_null(&QuadraticNonlinearity::zero(), 5).is_err());
    }

    #[test]
    fn stored_covectors_are_null() {
        for th in fibonacci_sphere(100) {
            let d = NullDirection::new(th);
            for ell in d.covectors {
                assert!(contract2(&MINKOWSKI, &ell, &ell).abs() < 1e-14);
            }
        }
    }
}
