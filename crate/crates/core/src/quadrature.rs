//! Quadrature rules and direction sampling shared by the radiation and
//! null-condition modules.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Adaptive composite Gauss–Legendre integration of `f` over `[a, b]`.
///
/// A panel is accepted once the single-panel value and the two-half-panel
/// value agree to `tol` (or to a few ulps of the panel value); each split
/// divides the tolerance by √2. Returns `None` when `max_depth` is exceeded or
/// the integrand produced a non-finite value.
pub fn adaptive_gl<F: FnMut(f64) -> f64>(
    gl: &GaussLegendre,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
    mut f: F,
) -> Option<f64> {
    if a == b {
        return Some(0.0);
    }
    let whole = gl.integrate(a, b, &mut f);
    adaptive_panel(gl, a, b, whole, tol, max_depth, &mut f)
}

fn adaptive_panel<F: FnMut(f64) -> f64>(
    gl: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    f: &mut F,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let left = gl.integrate(a, m, &mut *f);
    let right = gl.integrate(m, b, &mut *f);
    let split = left + right;
    if !split.is_finite() {
        return None;
    }
    if (split - whole).abs() <= tol.max(64.0 * f64::EPSILON * split.abs()) {
        return Some(split);
    }
    if depth == 0 {
        return None;
    }
    Some(
        adaptive_panel(gl, a, m, left, tol * FRAC_1_SQRT_2, depth - 1, f)?
            + adaptive_panel(gl, m, b, right, tol * FRAC_1_SQRT_2, depth - 1, f)?,
    )
}

/// Fibonacci lattice of `n` nearly uniform unit vectors on the sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            normalize([rho * phi.cos(), rho * phi.sin(), z])
        })
        .collect()
}

pub fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = norm(v);
    [v[0] / n, v[1] / n, v[2] / n]
}

pub fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orthonormal pair spanning the plane perpendicular to the unit vector `n`.
pub fn orthonormal_frame(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = normalize(cross(n, helper));
    let e2 = cross(n, e1);
    (e1, e2)
}

/// Lagrange interpolation of tabulated values on a uniform grid
/// `x_i = x0 + i*h`, using `width` points centered on `x`.
pub fn lagrange_uniform(values: &[f64], x0: f64, h: f64, x: f64, width: usize) -> f64 {
    let n = values.len();
    assert!(n >= width && width >= 2);
    let s = (x - x0) / h;
    let start = (s.floor() as isize - (width as isize / 2 - 1)).clamp(0, (n - width) as isize) as usize;
    let mut total = 0.0;
    for i in 0..width {
        let xi = (start + i) as f64;
        let mut basis = 1.0;
        for j in 0..width {
            if i != j {
                let xj = (start + j) as f64;
                basis *= (s - xj) / (xi - xj);
            }
        }
        total += basis * values[start + i];
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // degree 15 is the exactness limit for 8 nodes
        let got = gl.integrate(0.0, 2.0, |x| x.powi(15));
        let exact = 2f64.powi(16) / 16.0;
        assert!((got - exact).abs() < 1e-9 * exact);
        let w: f64 = gl.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_odd_count_has_center_node() {
        let gl = GaussLegendre::new(5);
        assert!(gl.nodes[2].abs() < 1e-15);
        let got = gl.integrate(-1.0, 1.0, |x| x.cos());
        assert!((got - 2.0 * 1f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let gl = GaussLegendre::new(16);
        let got = adaptive_gl(&gl, 0.0, 1.0, 1e-12, 40, |x| x.sqrt()).unwrap();
        assert!((got - 2.0 / 3.0).abs() < 1e-11);
        assert!(adaptive_gl(&gl, 0.0, 1.0, 1e-12, 3, |x| 1.0 / x).is_none());
    }

    #[test]
    fn fibonacci_points_are_unit() {
        for p in fibonacci_sphere(1000) {
            assert!((norm(p) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn frame_is_orthonormal() {
        for n in fibonacci_sphere(50) {
            let (a, b) = orthonormal_frame(n);
            assert!(dot(a, n).abs() < 1e-14 && dot(b, n).abs() < 1e-14 && dot(a, b).abs() < 1e-14);
            assert!((norm(a) - 1.0).abs() < 1e-14 && (norm(b) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn lagrange_reproduces_quintics() {
        let h = 0.1;
        let vals: Vec<f64> = (0..30).map(|i| (i as f64 * h).powi(5) - 2.0 * (i as f64 * h)).collect();
        let x = 1.234;
        let got = lagrange_uniform(&vals, 0.0, h, x, 6);
        assert!((got - (x.powi(5) - 2.0 * x)).abs() < 1e-11);
    }
}
