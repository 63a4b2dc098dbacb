//! Sampled radiation fields and the John–Hörmander lifespan bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::field::SpatialField;
use super::radon::{Radon, RadiationData, RadonSettings};
use super::RadiationError;
use crate::profile::Profile1D;
use crate::quadrature::{fibonacci_sphere, normalize, orthonormal_frame};

/// A θ-dependent null condition failure factor.
pub type AlephFn<'a> = &'a (dyn Fn([f64; 3]) -> f64 + Sync);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSettings {
    pub n_q: usize,
    pub n_theta: usize,
    /// The q-grid spans `[−w·R, w·R]` for the data support radius `R`.
    pub q_widening: f64,
    pub radon: RadonSettings,
    /// Refine once near the grid argmax.
    pub refine: bool,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            n_q: 513,
            n_theta: 1024,
            q_widening: 1.05,
            radon: RadonSettings::default(),
            refine: true,
        }
    }
}

/// `𝔉` sampled on a uniform q-grid times a Fibonacci sphere.
#[derive(Debug, Clone, Serialize)]
pub struct RadiationField {
    pub q_grid: Vec<f64>,
    pub theta_grid: Vec<[f64; 3]>,
    /// `values[i_theta][i_q]`.
    pub values: Vec<Vec<f64>>,
    /// Five-point `∂²_q𝔉`; `d2q[i_theta][i]` belongs to `q_grid[i + 2]`.
    pub d2q: Vec<Vec<f64>>,
    pub radial: bool,
}

fn d2_stencil(f: &[f64], i: usize, h: f64) -> f64 {
    (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h)
}

impl RadiationField {
    pub fn build(data: &RadiationData, settings: &GridSettings) -> Result<Self, RadiationError> {
        if settings.n_q < 5 || settings.n_theta == 0 {
            return Err(RadiationError::InvalidParameter("grid needs n_q ≥ 5 and n_theta ≥ 1".into()));
        }
        let engine = Radon::new(settings.radon);
        let r = data.support_radius();
        let half = settings.q_widening * if r > 0.0 { r } else { 1.0 };
        let n_q = settings.n_q;
        let dq = 2.0 * half / (n_q - 1) as f64;
        let q_grid: Vec<f64> = (0..n_q).map(|i| -half + i as f64 * dq).collect();
        let theta_grid = fibonacci_sphere(settings.n_theta);
        let radial = data.is_radial();

        let column = |theta: [f64; 3]| -> Result<Vec<f64>, RadiationError> {
            q_grid.iter().map(|&q| data.friedlander(&engine, q, theta)).collect()
        };
        let values: Vec<Vec<f64>> = if radial {
            let c = column(theta_grid[0])?;
            vec![c; theta_grid.len()]
        } else {
            theta_grid.par_iter().map(|th| column(*th)).collect::<Result<_, _>>()?
        };
        let d2q = values
            .iter()
            .map(|v| (2..n_q - 2).map(|i| d2_stencil(v, i, dq)).collect())
            .collect();
        Ok(Self {
            q_grid,
            theta_grid,
            values,
            d2q,
            radial,
        })
    }

    pub fn dq(&self) -> f64 {
        self.q_grid[1] - self.q_grid[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifespanEstimate {
    /// `sup ½ℵ⁺(θ)∂²_q𝔉(q, θ)`.
    pub sup_value: f64,
    pub argmax_q: f64,
    pub argmax_theta: [f64; 3],
    /// Supremum on the coarse grid before refinement.
    pub grid_sup: f64,
    pub refined: bool,
}

impl LifespanEstimate {
    /// `1/(λ·sup)`, the log of the lifespan bound; infinite when `sup = 0`.
    pub fn ln_lifespan_bound(&self, lambda: f64) -> f64 {
        if self.sup_value > 0.0 {
            1.0 / (lambda * self.sup_value)
        } else {
            f64::INFINITY
        }
    }

    /// `exp(1/(λ·sup))`.
    pub fn lifespan_bound(&self, lambda: f64) -> f64 {
        self.ln_lifespan_bound(lambda).exp()
    }
}

/// Grid supremum of `½ℵ⁺·∂²_q𝔉` with one local refinement pass.
pub fn john_hormander_sup(
    data: &RadiationData,
    aleph: AlephFn,
    settings: &GridSettings,
) -> Result<LifespanEstimate, RadiationError> {
    let field = RadiationField::build(data, settings)?;
    sup_from_field(data, &field, aleph, settings)
}

pub fn sup_from_field(
    data: &RadiationData,
    field: &RadiationField,
    aleph: AlephFn,
    settings: &GridSettings,
) -> Result<LifespanEstimate, RadiationError> {
    let alephs: Vec<f64> = field.theta_grid.iter().map(|t| aleph(*t)).collect();
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (it, row) in field.d2q.iter().enumerate() {
        let a = 0.5 * alephs[it];
        for (i, d2) in row.iter().enumerate() {
            let v = a * d2;
            if v > best.0 {
                best = (v, it, i + 2);
            }
        }
    }
    let (grid_sup, it, iq) = best;
    let mut est = LifespanEstimate {
        sup_value: grid_sup,
        argmax_q: field.q_grid[iq],
        argmax_theta: field.theta_grid[it],
        grid_sup,
        refined: false,
    };
    if settings.refine && !data.is_zero() {
        refine(data, field, aleph, settings, &mut est)?;
    }
    Ok(est)
}

fn refine(
    data: &RadiationData,
    field: &RadiationField,
    aleph: AlephFn,
    settings: &GridSettings,
    est: &mut LifespanEstimate,
) -> Result<(), RadiationError> {
    let engine = Radon::new(settings.radon);
    let h = field.dq() / 4.0;
    let spacing = (4.0 * std::f64::consts::PI / field.theta_grid.len() as f64).sqrt() / 4.0;
    let (e1, e2) = orthonormal_frame(est.argmax_theta);
    let t0 = est.argmax_theta;
    let mut thetas = Vec::new();
    for a in -2i32..=2 {
        for b in -2i32..=2 {
            let (sa, sb) = (a as f64 * spacing, b as f64 * spacing);
            thetas.push(normalize([
                t0[0] + sa * e1[0] + sb * e2[0],
                t0[1] + sa * e1[1] + sb * e2[1],
                t0[2] + sa * e1[2] + sb * e2[2],
            ]));
        }
    }
    let qs: Vec<f64> = (-4i32..=4).map(|i| est.argmax_q + i as f64 * h).collect();
    let cells: Vec<([f64; 3], f64)> = if field.radial {
        let th = thetas[0];
        let d2 = second_derivatives(data, &engine, &qs, th, h)?;
        thetas
            .iter()
            .flat_map(|t| {
                let a = 0.5 * aleph(*t);
                d2.iter().map(move |d| (*t, a * d)).collect::<Vec<_>>()
            })
            .collect()
    } else {
        let per: Vec<Vec<f64>> = thetas
            .par_iter()
            .map(|t| second_derivatives(data, &engine, &qs, *t, h))
            .collect::<Result<_, _>>()?;
        thetas
            .iter()
            .zip(per)
            .flat_map(|(t, d2)| {
                let a = 0.5 * aleph(*t);
                d2.into_iter().map(move |d| (*t, a * d)).collect::<Vec<_>>()
            })
            .collect()
    };
    let n_q = qs.len();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (k, (_, v)) in cells.iter().enumerate() {
        if *v > best.0 {
            best = (*v, k);
        }
    }
    est.sup_value = best.0.max(0.0);
    est.argmax_theta = cells[best.1].0;
    est.argmax_q = qs[best.1 % n_q];
    est.refined = true;
    Ok(())
}

fn second_derivatives(
    data: &RadiationData,
    engine: &Radon,
    qs: &[f64],
    theta: [f64; 3],
    h: f64,
) -> Result<Vec<f64>, RadiationError> {
    let lo = qs[0] - 2.0 * h;
    let n = qs.len() + 4;
    let f: Vec<f64> = (0..n)
        .map(|i| data.friedlander(engine, lo + i as f64 * h, theta))
        .collect::<Result<_, _>>()?;
    Ok((2..n - 2).map(|i| d2_stencil(&f, i, h)).collect())
}

/// True iff the refined supremum exceeds `1e-10`.
pub fn positivity_check(
    data: &RadiationData,
    aleph: AlephFn,
    settings: &GridSettings,
) -> Result<bool, RadiationError> {
    let mut s = *settings;
    s.refine = true;
    Ok(john_hormander_sup(data, aleph, &s)?.sup_value > 1e-10)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityTrial {
    pub phi0: String,
    pub phi0_dot: String,
    pub sup_value: f64,
    pub positive: bool,
}

/// Random nontrivial radial bump pair drawn from `rng`.
pub fn random_bump_pair<R: Rng>(rng: &mut R) -> RadiationData {
    let bump = |rng: &mut R| {
        let a = rng.gen_range(0.2..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = rng.gen_range(3.0..6.0_f64).round();
        let radius = rng.gen_range(0.3..1.0);
        Profile1D::poly_bump(a, p, radius)
    };
    let (p0, p1) = (bump(rng), bump(rng));
    match rng.gen_range(0..3) {
        0 => RadiationData::new(SpatialField::zero(), SpatialField::radial(p1)),
        1 => RadiationData::new(SpatialField::radial(p0), SpatialField::zero()),
        _ => RadiationData::new(SpatialField::radial(p0), SpatialField::radial(p1)),
    }
}

/// Runs [`positivity_check`] on `n_trials` seeded random bump pairs.
pub fn positivity_trials(
    seed: u64,
    n_trials: usize,
    aleph: AlephFn,
    settings: &GridSettings,
) -> Result<Vec<PositivityTrial>, RadiationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<RadiationData> = (0..n_trials).map(|_| random_bump_pair(&mut rng)).collect();
    data.iter()
        .map(|d| {
            let est = john_hormander_sup(d, aleph, settings)?;
            Ok(PositivityTrial {
                phi0: d.phi0.label().to_string(),
                phi0_dot: d.phi0_dot.label().to_string(),
                sup_value: est.sup_value,
                positive: est.sup_value > 1e-10,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GridSettings {
        GridSettings {
            n_q: 129,
            n_theta: 64,
            ..GridSettings::default()
        }
    }

    #[test]
    fn zero_data_has_zero_sup() {
        let data = RadiationData::new(SpatialField::zero(), SpatialField::zero());
        let est = john_hormander_sup(&data, &|_| -1.0, &small()).unwrap();
        assert_eq!(est.sup_value, 0.0);
        assert!(est.lifespan_bound(0.1).is_infinite());
    }

    #[test]
    fn field_vanishes_outside_support() {
        let data = RadiationData::new(
            SpatialField::zero(),
            SpatialField::radial(Profile1D::poly_bump(1.0, 4.0, 0.5)),
        );
        let f = RadiationField::build(&data, &small()).unwrap();
        for (i, q) in f.q_grid.iter().enumerate() {
            if q.abs() >= 0.5 {
                assert_eq!(f.values[3][i], 0.0);
            }
        }
    }
}
