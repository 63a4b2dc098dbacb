//! Irrotational relativistic fluid Lagrangians `ℒ(σ)` and the derived
//! quantities around the constant state `Φ = kt`, where `σ = k²`.

use serde::Serialize;

use super::NullError;
use crate::expr::Expr;

#[derive(Debug, Clone)]
pub enum LagrangianKind {
    /// `scale·(1 − √(1−σ))`.
    Exceptional { scale: f64 },
    /// `ℒ = σ`.
    Linear,
    /// `aσ + bσ²`.
    Quadratic { a: f64, b: f64 },
    /// User expression in the variable `r`, read as σ.
    Expression(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    /// Fourth-order central differences with base step `h`.
    FiniteDifference { h: f64 },
}

#[derive(Debug, Clone)]
pub struct FluidLagrangian {
    pub kind: LagrangianKind,
    pub k: f64,
    pub mode: DerivativeMode,
}

/// `ℒ, ℒ′, ℒ″, ℒ‴` at one σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub l: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Derived functions evaluated at one σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainValues {
    pub sigma: f64,
    pub g: f64,
    pub f: f64,
    pub h: f64,
    pub dh_dsigma: f64,
    pub eta_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Positivity {
    pub sigma: bool,
    pub lagrangian: bool,
    pub first_derivative: bool,
    pub over_sqrt_derivative: bool,
    pub second_derivative: bool,
}

impl Positivity {
    pub fn all(&self) -> bool {
        self.sigma && self.lagrangian && self.first_derivative && self.over_sqrt_derivative && self.second_derivative
    }
}

/// Inputs of the lapse `α⁻² = −(h⁻¹)^{00} = 1 + F·k²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaInputs {
    pub f: f64,
    pub k: f64,
    pub alpha_inv_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluidDerived {
    pub k: f64,
    pub sigma: f64,
    pub g: f64,
    pub f: f64,
    pub h: f64,
    pub eta: f64,
    pub alpha_inputs: AlphaInputs,
    pub dh_dsigma_at_k2: f64,
    pub positivity: Positivity,
    pub positivity_ok: bool,
}

impl FluidLagrangian {
    pub fn new(kind: LagrangianKind, k: f64) -> Self {
        let mode = match kind {
            LagrangianKind::Expression(_) => DerivativeMode::FiniteDifference {
                h: default_step(k),
            },
            _ => DerivativeMode::Analytic,
        };
        Self { kind, k, mode }
    }

    pub fn exceptional(k: f64) -> Self {
        Self::new(LagrangianKind::Exceptional { scale: 1.0 }, k)
    }

    pub fn linear(k: f64) -> Self {
        Self::new(LagrangianKind::Linear, k)
    }

    pub fn quadratic(a: f64, b: f64, k: f64) -> Self {
        Self::new(LagrangianKind::Quadratic { a, b }, k)
    }

    pub fn with_finite_differences(mut self) -> Self {
        self.mode = DerivativeMode::FiniteDifference { h: default_step(self.k) };
        self
    }

    /// Parses `exceptional[:scale]`, `linear`, `quadratic:a,b` (or
    /// `quadratic(a,b)`) and `expr:<expression in r>`.
    pub fn parse(spec: &str, k: f64) -> Result<Self, NullError> {
        let spec = spec.trim();
        let bad = || NullError::UnknownLagrangian(spec.to_string());
        if let Some(text) = spec.strip_prefix("expr:") {
            let e = Expr::compile(text).map_err(|e| NullError::Expression(e.to_string()))?;
            return Ok(Self::new(LagrangianKind::Expression(e), k));
        }
        let (name, args) = if let Some(open) = spec.find('(') {
            let inner = spec[open + 1..].strip_suffix(')').ok_or_else(bad)?;
            (&spec[..open], Some(inner))
        } else if let Some((n, a)) = spec.split_once(':') {
            (n, Some(a))
        } else {
            (spec, None)
        };
        let nums: Vec<f64> = match args {
            Some(a) => a
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?,
            None => Vec::new(),
        };
        let kind = match (name.trim(), nums.as_slice()) {
            ("exceptional", []) => LagrangianKind::Exceptional { scale: 1.0 },
            ("exceptional", [s]) => LagrangianKind::Exceptional { scale: *s },
            ("linear", []) => LagrangianKind::Linear,
            ("quadratic", [a, b]) => LagrangianKind::Quadratic { a: *a, b: *b },
            _ => return Err(bad()),
        };
        Ok(Self::new(kind, k))
    }

    pub fn value(&self, sigma: f64) -> f64 {
        match &self.kind {
            LagrangianKind::Exceptional { scale } => scale * (1.0 - (1.0 - sigma).sqrt()),
            LagrangianKind::Linear => sigma,
            LagrangianKind::Quadratic { a, b } => a * sigma + b * sigma * sigma,
            LagrangianKind::Expression(e) => e.eval(sigma),
        }
    }

    pub fn jet(&self, sigma: f64) -> Result<Jet, NullError> {
        let jet = match self.mode {
            DerivativeMode::Analytic => self.analytic_jet(sigma)?,
            DerivativeMode::FiniteDifference { h } => self.fd_jet(sigma, h)?,
        };
        if [jet.l, jet.d1, jet.d2, jet.d3].iter().all(|v| v.is_finite()) {
            Ok(jet)
        } else {
            Err(NullError::NotDifferentiable { sigma })
        }
    }

    fn analytic_jet(&self, sigma: f64) -> Result<Jet, NullError> {
        Ok(match &self.kind {
            LagrangianKind::Exceptional { scale } => {
                let w = 1.0 - sigma;
                if w <= 0.0 {
                    return Err(NullError::NotDifferentiable { sigma });
                }
                let s = w.sqrt();
                Jet {
                    l: scale * (1.0 - s),
                    d1: scale * 0.5 / s,
                    d2: scale * 0.25 / (w * s),
                    d3: scale * 0.375 / (w * w * s),
                }
            }
            LagrangianKind::Linear => Jet {
                l: sigma,
                d1: 1.0,
                d2: 0.0,
                d3: 0.0,
            },
            LagrangianKind::Quadratic { a, b } => Jet {
                l: a * sigma + b * sigma * sigma,
                d1: a + 2.0 * b * sigma,
                d2: 2.0 * b,
                d3: 0.0,
            },
            LagrangianKind::Expression(_) => return self.fd_jet(sigma, default_step(self.k)),
        })
    }

    /// Steps `h`, `100h` and `300h` for the first three derivatives.
    fn fd_jet(&self, sigma: f64, h: f64) -> Result<Jet, NullError> {
        let f = |x: f64| -> Result<f64, NullError> {
            let v = self.value(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(NullError::NotDifferentiable { sigma })
            }
        };
        let l = f(sigma)?;
        let h1 = h;
        let d1 = (-f(sigma + 2.0 * h1)? + 8.0 * f(sigma + h1)? - 8.0 * f(sigma - h1)? + f(sigma - 2.0 * h1)?)
            / (12.0 * h1);
        let h2 = 100.0 * h;
        let d2 = (-f(sigma + 2.0 * h2)? + 16.0 * f(sigma + h2)? - 30.0 * l + 16.0 * f(sigma - h2)?
            - f(sigma - 2.0 * h2)?)
            / (12.0 * h2 * h2);
        let h3 = 300.0 * h;
        let d3 = (-f(sigma + 3.0 * h3)? + 8.0 * f(sigma + 2.0 * h3)? - 13.0 * f(sigma + h3)?
            + 13.0 * f(sigma - h3)?
            - 8.0 * f(sigma - 2.0 * h3)?
            + f(sigma - 3.0 * h3)?)
            / (8.0 * h3 * h3 * h3);
        Ok(Jet { l, d1, d2, d3 })
    }

    /// `G, F, H, dH/dσ, η²` at `sigma`.
    pub fn chain_at(&self, sigma: f64) -> Result<ChainValues, NullError> {
        let j = self.jet(sigma)?;
        chain_from_jet(sigma, &j)
    }

    pub fn derived(&self) -> Result<FluidDerived, NullError> {
        fluid_derived(self)
    }
}

pub fn default_step(k: f64) -> f64 {
    1e-5 * (k * k).max(1.0)
}

pub fn chain_from_jet(sigma: f64, j: &Jet) -> Result<ChainValues, NullError> {
    if j.d1 == 0.0 {
        return Err(NullError::NotDifferentiable { sigma });
    }
    let g = 2.0 * j.d1;
    let f = 2.0 * j.d2 / j.d1;
    let df = 2.0 * (j.d3 * j.d1 - j.d2 * j.d2) / (j.d1 * j.d1);
    let denom = 1.0 + sigma * f;
    if denom == 0.0 {
        return Err(NullError::DegenerateSound { sigma, eta_sq: f64::NEG_INFINITY });
    }
    let h = f / denom;
    let dh = (df - f * f) / (denom * denom);
    Ok(ChainValues {
        sigma,
        g,
        f,
        h,
        dh_dsigma: dh,
        eta_sq: 1.0 - sigma * h,
    })
}

pub fn fluid_derived(fl: &FluidLagrangian) -> Result<FluidDerived, NullError> {
    let k = fl.k;
    if k == 0.0 || !k.is_finite() {
        return Err(NullError::InvalidBackground(k));
    }
    let sigma = k * k;
    let j = fl.jet(sigma)?;
    let c = chain_from_jet(sigma, &j)?;
    if c.eta_sq <= 0.0 {
        return Err(NullError::DegenerateSound { sigma, eta_sq: c.eta_sq });
    }
    let root = sigma.sqrt();
    let positivity = Positivity {
        sigma: sigma > 0.0,
        lagrangian: j.l > 0.0,
        first_derivative: j.d1 > 0.0,
        over_sqrt_derivative: j.d1 / root - 0.5 * j.l / (sigma * root) > 0.0,
        second_derivative: j.d2 > 0.0,
    };
    let eta = c.eta_sq.sqrt();
    let positivity_ok = positivity.all();
    debug_assert!(!positivity_ok || (eta > 0.0 && eta < 1.0));
    Ok(FluidDerived {
        k,
        sigma,
        g: c.g,
        f: c.f,
        h: c.h,
        eta,
        alpha_inputs: AlphaInputs {
            f: c.f,
            k,
            alpha_inv_sq: 1.0 + c.f * sigma,
        },
        dh_dsigma_at_k2: c.dh_dsigma,
        positivity,
        positivity_ok,
    })
}

pub fn is_exceptional(fl: &FluidLagrangian, tol: f64) -> Result<bool, NullError> {
    Ok(fluid_derived(fl)?.dh_dsigma_at_k2.abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exceptional_has_unit_h() {
        let d = fluid_derived(&FluidLagrangian::exceptional(0.5)).unwrap();
        assert!((d.h - 1.0).abs() < 1e-14);
        assert!(d.dh_dsigma_at_k2.abs() < 1e-12);
        assert!(d.positivity_ok);
        assert!(d.eta > 0.0 && d.eta < 1.0);
    }

    #[test]
    fn linear_is_free_wave() {
        let d = fluid_derived(&FluidLagrangian::linear(0.3)).unwrap();
        assert_eq!((d.f, d.h, d.eta, d.dh_dsigma_at_k2), (0.0, 0.0, 1.0, 0.0));
        assert!(!d.positivity.second_derivative);
    }

    #[test]
    fn parse_forms() {
        assert!(matches!(
            FluidLagrangian::parse("quadratic(1, 1)", 0.1).unwrap().kind,
            LagrangianKind::Quadratic { a, b } if a == 1.0 && b == 1.0
        ));
        assert!(matches!(
            FluidLagrangian::parse("exceptional:2", 0.1).unwrap().kind,
            LagrangianKind::Exceptional { scale } if scale == 2.0
        ));
        let e = FluidLagrangian::parse("expr:r + r^2", 0.1).unwrap();
        assert!(matches!(e.mode, DerivativeMode::FiniteDifference { .. }));
        assert!(FluidLagrangian::parse("cubic:1", 0.1).is_err());
        assert!(FluidLagrangian::parse("linear:3", 0.1).is_err());
    }

    #[test]
    fn stencil_outside_domain_is_reported() {
        let fl = FluidLagrangian::exceptional(0.9999).with_finite_differences();
        assert!(matches!(fluid_derived(&fl), Err(NullError::NotDifferentiable { .. })));
        assert!(fluid_derived(&FluidLagrangian::exceptional(1.5)).is_err());
    }

    #[test]
    fn zero_background_rejected() {
        assert!(matches!(
            fluid_derived(&FluidLagrangian::linear(0.0)),
            Err(NullError::InvalidBackground(_))
        ));
    }
}
