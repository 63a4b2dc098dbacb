//! One-dimensional data profiles with value and derivative evaluators.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{Expr, ExprError};

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("unknown profile '{0}' (expected zero, constant, linear, gaussian, poly_bump, cinf_bump or expr)")]
    Unknown(String),
    #[error("profile '{name}': {message}")]
    BadParams { name: String, message: String },
    #[error("profile expression: {0}")]
    Expr(#[from] ExprError),
}

/// A real profile `x -> value(x)` together with its derivative.
///
/// The support radius is the half-width outside which the profile vanishes;
/// analytic test profiles use `f64::INFINITY`.
#[derive(Clone)]
pub struct Profile1D {
    label: String,
    value: Evaluator,
    derivative: Evaluator,
    support_radius: f64,
    analytic_derivative: bool,
}

impl fmt::Debug for Profile1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Profile1D")
            .field("label", &self.label)
            .field("support_radius", &self.support_radius)
            .field("analytic_derivative", &self.analytic_derivative)
            .finish()
    }
}

/// Step used by the synthesized fourth-order derivative.
const FD_STEP: f64 = 1e-3;

fn central4<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

impl Profile1D {
    pub fn new(
        label: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_radius: f64,
    ) -> Self {
        Self {
            label: label.into(),
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            support_radius,
            analytic_derivative: true,
        }
    }

    /// Builds a profile whose derivative is synthesized by fourth-order
    /// central differences.
    pub fn from_value(
        label: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_radius: f64,
    ) -> Self {
        let value: Evaluator = Arc::new(value);
        let v = value.clone();
        let derivative: Evaluator = Arc::new(move |x| {
            let h = FD_STEP * x.abs().max(1.0);
            central4(&|y| v(y), x, h)
        });
        Self {
            label: label.into(),
            value,
            derivative,
            support_radius,
            analytic_derivative: false,
        }
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| 0.0, |_| 0.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        let support = if c == 0.0 { 0.0 } else { f64::INFINITY };
        Self::new(format!("constant:{c}"), move |_| c, |_| 0.0, support)
    }

    pub fn linear(a: f64) -> Self {
        let support = if a == 0.0 { 0.0 } else { f64::INFINITY };
        Self::new(format!("linear:{a}"), move |x| a * x, move |_| a, support)
    }

    /// `a * exp(-((x - c)/w)^2)`.
    pub fn gaussian(a: f64, c: f64, w: f64) -> Self {
        Self::new(
            format!("gaussian:{a},{c},{w}"),
            move |x| {
                let z = (x - c) / w;
                a * (-z * z).exp()
            },
            move |x| {
                let z = (x - c) / w;
                -2.0 * a * z / w * (-z * z).exp()
            },
            if a == 0.0 { 0.0 } else { f64::INFINITY },
        )
    }

    /// `a * (1 - (x/R)^2)^p` on `|x| <= R`, zero outside.
    pub fn poly_bump(a: f64, p: f64, radius: f64) -> Self {
        Self::new(
            format!("poly_bump:{a},{p},{radius}"),
            move |x| {
                let s = 1.0 - (x / radius).powi(2);
                if s <= 0.0 {
                    0.0
                } else {
                    a * s.powf(p)
                }
            },
            move |x| {
                let s = 1.0 - (x / radius).powi(2);
                if s <= 0.0 {
                    0.0
                } else {
                    -2.0 * a * p * x / (radius * radius) * s.powf(p - 1.0)
                }
            },
            radius,
        )
    }

    /// `a * exp(-1/(1 - (x/R)^2))` on `|x| < R`, zero outside.
    pub fn cinf_bump(a: f64, radius: f64) -> Self {
        Self::new(
            format!("cinf_bump:{a},{radius}"),
            move |x| {
                let s = 1.0 - (x / radius).powi(2);
                if s <= 0.0 {
                    0.0
                } else {
                    a * (-1.0 / s).exp()
                }
            },
            move |x| {
                let s = 1.0 - (x / radius).powi(2);
                if s <= 0.0 {
                    0.0
                } else {
                    a * (-1.0 / s).exp() * (-2.0 * x / (radius * radius)) / (s * s)
                }
            },
            radius,
        )
    }

    /// Compiles an expression in `r`, optionally cut off to zero for `|r| > R`.
    pub fn expression(text: &str, cutoff: Option<f64>) -> Result<Self, ProfileError> {
        let expr = Arc::new(Expr::compile(text)?);
        let label = match cutoff {
            Some(r) => format!("expr:{}|{r}", expr.source()),
            None => format!("expr:{}", expr.source()),
        };
        let support = cutoff.unwrap_or(f64::INFINITY);
        let e = expr.clone();
        let value = move |x: f64| {
            if x.abs() > support {
                0.0
            } else {
                e.eval(x)
            }
        };
        Ok(Self::from_value(label, value, support))
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.analytic_derivative
    }

    /// Returns `lambda * self`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let v = self.value.clone();
        let d = self.derivative.clone();
        let support = if lambda == 0.0 { 0.0 } else { self.support_radius };
        Self {
            label: format!("{}*{}", lambda, self.label),
            value: Arc::new(move |x| lambda * v(x)),
            derivative: Arc::new(move |x| lambda * d(x)),
            support_radius: support,
            analytic_derivative: self.analytic_derivative,
        }
    }

    /// True when the profile is identically zero by construction.
    pub fn is_trivially_zero(&self) -> bool {
        self.support_radius == 0.0
    }

    /// Parses a `name:params` profile string.
    ///
    /// | spec | profile |
    /// |------|---------|
    /// | `zero` | 0 |
    /// | `constant:c` | c |
    /// | `linear:a` | a·x |
    /// | `gaussian:a,c,w` | a·exp(−((x−c)/w)²) |
    /// | `poly_bump:a,p[,R]` | a(1−(x/R)²)^p, R defaults to 1/2 |
    /// | `cinf_bump:a[,R]` | a·exp(−1/(1−(x/R)²)), R defaults to 1/2 |
    /// | `expr:<e>[\|R]` | expression in `r`, zero for \|r\| > R |
    pub fn parse(spec: &str) -> Result<Self, ProfileError> {
        let spec = spec.trim();
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (spec, ""),
        };
        if name == "expr" {
            let (body, cutoff) = match rest.rsplit_once('|') {
                Some((b, r)) => {
                    let radius = r.trim().parse::<f64>().map_err(|_| ProfileError::BadParams {
                        name: name.into(),
                        message: format!("bad support cutoff '{}'", r.trim()),
                    })?;
                    if !(radius > 0.0) {
                        return Err(ProfileError::BadParams {
                            name: name.into(),
                            message: "support cutoff must be positive".into(),
                        });
                    }
                    (b, Some(radius))
                }
                None => (rest, None),
            };
            return Self::expression(body, cutoff);
        }
        let params: Vec<f64> = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| ProfileError::BadParams {
                        name: name.into(),
                        message: format!("'{}' is not a number", s.trim()),
                    })
                })
                .collect::<Result<_, _>>()?
        };
        let arity = |lo: usize, hi: usize| -> Result<(), ProfileError> {
            if params.len() < lo || params.len() > hi {
                let expected = if lo == hi {
                    format!("{lo}")
                } else {
                    format!("{lo} to {hi}")
                };
                Err(ProfileError::BadParams {
                    name: name.into(),
                    message: format!("expected {expected} parameters, got {}", params.len()),
                })
            } else {
                Ok(())
            }
        };
        let positive = |v: f64, what: &str| -> Result<f64, ProfileError> {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(ProfileError::BadParams {
                    name: name.into(),
                    message: format!("{what} must be positive and finite"),
                })
            }
        };
        match name {
            "zero" => {
                arity(0, 0)?;
                Ok(Self::zero())
            }
            "constant" => {
                arity(1, 1)?;
                Ok(Self::constant(params[0]))
            }
            "linear" => {
                arity(1, 1)?;
                Ok(Self::linear(params[0]))
            }
            "gaussian" => {
                arity(3, 3)?;
                let w = positive(params[2], "width")?;
                Ok(Self::gaussian(params[0], params[1], w))
            }
            "poly_bump" => {
                arity(2, 3)?;
                let p = positive(params[1], "exponent")?;
                let r = positive(params.get(2).copied().unwrap_or(0.5), "radius")?;
                Ok(Self::poly_bump(params[0], p, r))
            }
            "cinf_bump" => {
                arity(1, 2)?;
                let r = positive(params.get(1).copied().unwrap_or(0.5), "radius")?;
                Ok(Self::cinf_bump(params[0], r))
            }
            other => Err(ProfileError::Unknown(other.into())),
        }
    }
}
