//! Compactly supported functions on ℝ³.

use std::fmt;
use std::sync::Arc;

use crate::profile::Profile1D;
use crate::quadrature::norm;

pub type Eval3 = Arc<dyn Fn([f64; 3]) -> f64 + Send + Sync>;
pub type Grad3 = Arc<dyn Fn([f64; 3]) -> [f64; 3] + Send + Sync>;

/// A real function on ℝ³ that vanishes outside the ball of radius
/// `support_radius`, with an optional gradient.
///
/// Fields built from a radial [`Profile1D`] remember the profile so that the
/// Radon transform can take its one-dimensional fast path.
#[derive(Clone)]
pub struct SpatialField {
    eval: Eval3,
    gradient: Option<Grad3>,
    support_radius: f64,
    radial: Option<Profile1D>,
    label: String,
}

impl fmt::Debug for SpatialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialField")
            .field("label", &self.label)
            .field("support_radius", &self.support_radius)
            .field("radial", &self.radial.is_some())
            .field("gradient", &self.gradient.is_some())
            .finish()
    }
}

impl SpatialField {
    /// A general field. Values outside `support_radius` are forced to zero.
    pub fn new(
        label: impl Into<String>,
        support_radius: f64,
        eval: impl Fn([f64; 3]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let r = support_radius;
        Self {
            eval: Arc::new(move |y| if norm(y) > r { 0.0 } else { eval(y) }),
            gradient: None,
            support_radius,
            radial: None,
            label: label.into(),
        }
    }

    pub fn with_gradient(mut self, gradient: impl Fn([f64; 3]) -> [f64; 3] + Send + Sync + 'static) -> Self {
        let r = self.support_radius;
        self.gradient = Some(Arc::new(move |y| if norm(y) > r { [0.0; 3] } else { gradient(y) }));
        self
    }

    pub fn zero() -> Self {
        Self::radial(Profile1D::zero())
    }

    /// `y ↦ profile(|y|)`, supported on the profile's support radius.
    ///
    /// Panics if the profile does not have compact support; use
    /// [`SpatialField::radial_truncated`] for rapidly decaying profiles.
    pub fn radial(profile: Profile1D) -> Self {
        let r = profile.support_radius();
        assert!(r.is_finite(), "radial field needs a compactly supported profile");
        Self::radial_truncated(profile, r)
    }

    /// `y ↦ profile(|y|)` cut off at `radius`.
    pub fn radial_truncated(profile: Profile1D, radius: f64) -> Self {
        let pv = profile.clone();
        let pg = profile.clone();
        let eval = move |y: [f64; 3]| {
            let s = norm(y);
            if s > radius {
                0.0
            } else {
                pv.value(s)
            }
        };
        let grad = move |y: [f64; 3]| {
            let s = norm(y);
            if s > radius || s == 0.0 {
                [0.0; 3]
            } else {
                let d = pg.derivative(s) / s;
                [d * y[0], d * y[1], d * y[2]]
            }
        };
        let r = if profile.is_trivially_zero() { 0.0 } else { radius };
        Self {
            eval: Arc::new(eval),
            gradient: Some(Arc::new(grad)),
            support_radius: r,
            label: format!("radial({})", profile.label()),
            radial: Some(profile),
        }
    }

    /// Indicator of the closed ball of radius `radius`.
    pub fn ball_indicator(radius: f64) -> Self {
        let p = Profile1D::new(
            format!("ball:{radius}"),
            move |s| if s.abs() <= radius { 1.0 } else { 0.0 },
            |_| 0.0,
            radius,
        );
        let mut f = Self::radial(p);
        f.gradient = None;
        f
    }

    /// `exp(−|y|²)`, truncated at radius 8.
    pub fn gaussian() -> Self {
        Self::radial_truncated(Profile1D::gaussian(1.0, 0.0, 1.0), 8.0)
    }

    pub fn eval(&self, y: [f64; 3]) -> f64 {
        (self.eval)(y)
    }

    pub fn gradient(&self, y: [f64; 3]) -> Option<[f64; 3]> {
        self.gradient.as_ref().map(|g| g(y))
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn radial_profile(&self) -> Option<&Profile1D> {
        self.radial.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_zero(&self) -> bool {
        self.support_radius == 0.0
    }

    /// Radial derivative `ŷ·∇f`, by the gradient when available and by
    /// fourth-order central differences along the ray otherwise.
    pub fn radial_derivative(&self, y: [f64; 3]) -> f64 {
        let s = norm(y);
        if let Some(p) = &self.radial {
            return if s > self.support_radius { 0.0 } else { p.derivative(s) };
        }
        if s == 0.0 {
            return 0.0;
        }
        let dir = [y[0] / s, y[1] / s, y[2] / s];
        if let Some(g) = self.gradient(y) {
            return g[0] * dir[0] + g[1] * dir[1] + g[2] * dir[2];
        }
        let h = 1e-4 * s.max(1.0);
        let at = |t: f64| self.eval([dir[0] * t, dir[1] * t, dir[2] * t]);
        (at(s - 2.0 * h) - 8.0 * at(s - h) + 8.0 * at(s + h) - at(s + 2.0 * h)) / (12.0 * h)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &SpatialField, b: f64) -> SpatialField {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let support = self.support_radius.max(other.support_radius);
        let mut out = SpatialField {
            eval: Arc::new(move |y| a * f(y) + b * g(y)),
            gradient: None,
            support_radius: support,
            radial: None,
            label: format!("{a}*{} + {b}*{}", self.label, other.label),
        };
        if let (Some(gf), Some(gg)) = (self.gradient.clone(), other.gradient.clone()) {
            out.gradient = Some(Arc::new(move |y| {
                let (u, v) = (gf(y), gg(y));
                [a * u[0] + b * v[0], a * u[1] + b * v[1], a * u[2] + b * v[2]]
            }));
        }
        out
    }

    /// `lambda·self`, keeping the radial fast path.
    pub fn scaled(&self, lambda: f64) -> SpatialField {
        if let Some(p) = &self.radial {
            let mut out = Self::radial_truncated(p.scaled(lambda), self.support_radius);
            if self.gradient.is_none() {
                out.gradient = None;
            }
            return out;
        }
        self.combine(lambda, &SpatialField::zero(), 0.0)
    }
}
