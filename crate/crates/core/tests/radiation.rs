use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shocklab::quadrature::{fibonacci_sphere, norm, normalize};
use shocklab::radiation::{
    christodoulou_criterion, christodoulou_s, john_hormander_sup, positivity_check, positivity_trials, radon,
    random_bump_pair, GridSettings, QDerivative, Radon, RadiationData, RadiationField, SpatialField,
};
use shocklab::Profile1D;

fn tilted() -> [f64; 3] {
    normalize([0.3, -0.4, 0.8])
}

fn small_grid(n_q: usize, n_theta: usize) -> GridSettings {
    GridSettings {
        n_q,
        n_theta,
        ..GridSettings::default()
    }
}

/// Off-centre bump, deliberately without the radial fast path.
fn shifted_bump(a: f64, center: [f64; 3], radius: f64) -> SpatialField {
    let p = Profile1D::poly_bump(a, 4.0, radius);
    let pg = p.clone();
    let c = center;
    let support = norm(c) + radius;
    SpatialField::new("shifted", support, move |y| p.value(norm([y[0] - c[0], y[1] - c[1], y[2] - c[2]])))
        .with_gradient(move |y| {
            let d = [y[0] - c[0], y[1] - c[1], y[2] - c[2]];
            let s = norm(d);
            if s == 0.0 {
                return [0.0; 3];
            }
            let g = pg.derivative(s) / s;
            [g * d[0], g * d[1], g * d[2]]
        })
}

#[test]
fn ball_slices_match_disk_area() {
    let r = 0.7;
    let radial = SpatialField::ball_indicator(r);
    let general = SpatialField::new("ball", r, |_| 1.0);
    for q in [-0.69, -0.5, -0.1, 0.0, 0.3, 0.65] {
        let exact = PI * (r * r - q * q);
        assert!((radon(&radial, q, tilted()).unwrap() - exact).abs() < 1e-6, "radial q = {q}");
        assert!((radon(&general, q, tilted()).unwrap() - exact).abs() < 1e-6, "general q = {q}");
    }
    assert_eq!(radon(&radial, 0.71, tilted()).unwrap(), 0.0);
    assert_eq!(radon(&general, -0.8, tilted()).unwrap(), 0.0);
}

#[test]
fn gaussian_slices_match_closed_form() {
    let radial = SpatialField::gaussian();
    let general = SpatialField::new("gauss", 8.0, |y| (-(y[0] * y[0] + y[1] * y[1] + y[2] * y[2])).exp());
    for q in [-2.0f64, -0.7, 0.0, 0.4, 1.5, 3.0] {
        let exact = PI * (-q * q).exp();
        assert!((radon(&radial, q, tilted()).unwrap() - exact).abs() < 1e-6);
        assert!((radon(&general, q, tilted()).unwrap() - exact).abs() < 1e-6, "q = {q}");
    }
}

#[test]
fn friedlander_ball_examples() {
    let r = 0.6;
    let ball = SpatialField::ball_indicator(r);
    let zero = SpatialField::zero();
    let th = tilted();
    let dot = RadiationData::new(zero.clone(), ball.clone());
    let pos = RadiationData::new(ball, zero.clone());
    let engine = Radon::default();
    let h = pos.h_q();
    for q in [-0.5, -0.2, 0.0, 0.25, 0.55] {
        let f_dot = dot.friedlander(&engine, q, th).unwrap();
        assert!((f_dot - (r * r - q * q) / 4.0).abs() < 1e-7);
        if q.abs() < r - 3.0 * h {
            let f_pos = pos.friedlander(&engine, q, th).unwrap();
            assert!((f_pos - q / 2.0).abs() < 1e-6, "q = {q}: {f_pos}");
        }
    }
    let nothing = RadiationData::new(zero.clone(), zero);
    assert_eq!(nothing.friedlander(&engine, 0.1, th).unwrap(), 0.0);
}

#[test]
fn gradient_and_stencil_derivatives_agree() {
    let f = shifted_bump(1.0, [0.2, -0.1, 0.15], 0.6);
    let engine = Radon::default();
    let h = f.support_radius() / 512.0;
    for th in fibonacci_sphere(6) {
        for q in [-0.5, -0.2, 0.05, 0.3, 0.6] {
            let g = engine.q_derivative(&f, q, th, QDerivative::Auto, h).unwrap();
            let s = engine.q_derivative(&f, q, th, QDerivative::Stencil, h).unwrap();
            assert!((g - s).abs() < 1e-6, "q = {q}: {g} vs {s}");
        }
    }
}

#[test]
fn radial_data_give_even_theta_independent_field() {
    // The general quadrature path, so θ-independence is not built in.
    let p = Profile1D::poly_bump(1.0, 4.0, 0.5);
    let dot = SpatialField::new("bump", 0.5, move |y| p.value(norm(y)));
    let data = RadiationData::new(SpatialField::zero(), dot);
    let engine = Radon::default();
    let dirs = fibonacci_sphere(5);
    for q in [0.05, 0.2, 0.37, 0.49] {
        let reference = data.friedlander(&engine, q, dirs[0]).unwrap();
        for th in &dirs {
            assert!((data.friedlander(&engine, q, *th).unwrap() - reference).abs() < 1e-8);
            assert!((data.friedlander(&engine, -q, *th).unwrap() - reference).abs() < 1e-8);
        }
    }
}

#[test]
fn built_fields_vanish_outside_support() {
    let datasets = [
        RadiationData::new(SpatialField::zero(), SpatialField::radial(Profile1D::poly_bump(1.0, 4.0, 0.5))),
        RadiationData::new(shifted_bump(0.7, [0.1, 0.0, -0.2], 0.4), SpatialField::zero()),
    ];
    for data in datasets {
        let r = data.support_radius();
        let field = RadiationField::build(&data, &small_grid(65, 12)).unwrap();
        for row in &field.values {
            for (q, v) in field.q_grid.iter().zip(row) {
                if q.abs() > r {
                    assert_eq!(*v, 0.0, "q = {q}");
                }
            }
        }
    }
}

/// `½·(−1)·∂²_q𝔉` for `Φ̊ = 0` and radial `Φ̊₀ = f`, where
/// `𝔉(q) = ½∫_{|q|}^R f(s)s ds`, so the quantity is `¼(f + qf′)` at `q ≥ 0`.
fn john_sup_oracle(p: &Profile1D, n: usize) -> f64 {
    let r = p.support_radius();
    (0..n)
        .map(|i| r * i as f64 / (n - 1) as f64)
        .map(|q| 0.25 * (p.value(q) + q * p.derivative(q)))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn john_sup_matches_dense_grid_oracle() {
    let john = |_: [f64; 3]| -1.0;
    for p in [
        Profile1D::poly_bump(1.0, 4.0, 0.5),
        Profile1D::poly_bump(-0.8, 5.0, 0.9),
        Profile1D::cinf_bump(1.0, 0.7),
    ] {
        let data = RadiationData::new(SpatialField::zero(), SpatialField::radial(p.clone()));
        let est = john_hormander_sup(&data, &john, &GridSettings::default()).unwrap();
        let oracle = john_sup_oracle(&p, 4 * 513);
        assert!(((est.sup_value - oracle) / oracle).abs() < 0.01, "{} vs {oracle}", est.sup_value);
    }
}

#[test]
fn john_sup_general_path_matches_oracle() {
    let p = Profile1D::poly_bump(1.0, 4.0, 0.5);
    let pv = p.clone();
    let dot = SpatialField::new("bump", 0.5, move |y| pv.value(norm(y)));
    let data = RadiationData::new(SpatialField::zero(), dot);
    let est = john_hormander_sup(&data, &|_| -1.0, &small_grid(65, 8)).unwrap();
    let oracle = john_sup_oracle(&p, 4 * 65);
    assert!(((est.sup_value - oracle) / oracle).abs() < 0.01, "{} vs {oracle}", est.sup_value);
}

#[test]
fn zero_data_is_vacuous() {
    let data = RadiationData::new(SpatialField::zero(), SpatialField::zero());
    let est = john_hormander_sup(&data, &|_| -1.0, &small_grid(33, 4)).unwrap();
    assert_eq!(est.sup_value, 0.0);
    assert!(est.lifespan_bound(0.1).is_infinite());
    assert!(!positivity_check(&data, &|_| -1.0, &small_grid(33, 4)).unwrap());
}

#[test]
fn seeded_positivity_trials() {
    let trials = positivity_trials(7, 20, &|_| -1.0, &GridSettings::default()).unwrap();
    assert_eq!(trials.len(), 20);
    assert!(trials.iter().all(|t| t.positive && t.sup_value > 1e-10));
    let again = positivity_trials(7, 20, &|_| -1.0, &GridSettings::default()).unwrap();
    assert_eq!(trials, again);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn radon_is_linear(
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
        cx in -0.3..0.3f64,
        q in -0.8..0.8f64,
        i in 0usize..64,
    ) {
        let f = shifted_bump(1.0, [cx, 0.1, -0.2], 0.5);
        let g = shifted_bump(0.5, [-0.1, cx, 0.2], 0.4);
        let th = fibonacci_sphere(64)[i];
        let combined = radon(&f.combine(a, &g, b), q, th).unwrap();
        let separate = a * radon(&f, q, th).unwrap() + b * radon(&g, q, th).unwrap();
        prop_assert!((combined - separate).abs() < 1e-7, "{} vs {}", combined, separate);
    }

    #[test]
    fn sup_scales_linearly(seed in 0u64..1000, lambda in 0.1..10.0f64, sign in prop::bool::ANY) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_bump_pair(&mut rng);
        let aleph_value = if sign { 1.0 } else { -1.0 };
        let aleph = move |_: [f64; 3]| aleph_value;
        let grid = small_grid(129, 16);
        let base = john_hormander_sup(&data, &aleph, &grid).unwrap();
        let scaled = john_hormander_sup(&data.scaled(lambda), &aleph, &grid).unwrap();
        prop_assert!(base.sup_value >= 0.0 && scaled.sup_value >= 0.0);
        prop_assert!((scaled.sup_value - lambda * base.sup_value).abs() <= 1e-9 * lambda.max(1.0) * base.sup_value.max(1e-6));
        // The bumps are radial, so ∂²_q𝔉 is even in q and ±q tie exactly.
        let same_node = (scaled.argmax_q - base.argmax_q).abs() < 1e-12;
        let mirror_node = (scaled.argmax_q + base.argmax_q).abs() < 1e-12;
        prop_assert!(same_node || mirror_node, "{} vs {}", scaled.argmax_q, base.argmax_q);
        prop_assert_eq!(scaled.argmax_theta, base.argmax_theta);
        let check = positivity_check(&data, &aleph, &grid).unwrap();
        prop_assert_eq!(check, positivity_check(&data.scaled(lambda), &aleph, &grid).unwrap());
    }

    #[test]
    fn off_diagonal_sup_is_nonnegative(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_bump_pair(&mut rng);
        let aleph = |t: [f64; 3]| 2.0 * t[0] * t[1];
        let est = john_hormander_sup(&data, &aleph, &small_grid(65, 32)).unwrap();
        prop_assert!(est.sup_value > 1e-10);
    }

    #[test]
    fn s_is_nonnegative_for_favourable_data(
        c in 0.0..1.0f64,
        amp in 0.0..2.0f64,
        radius in 0.3..1.5f64,
        k in -1.0..1.0f64,
        eta in 0.05..0.95f64,
        u in 0.1..0.45f64,
    ) {
        // Φ̊₀ − k ≥ 0 and Φ̊ radially constant.
        let dot = Profile1D::poly_bump(amp, 4.0, radius);
        let dot_field = SpatialField::radial_truncated(
            Profile1D::from_value(format!("k+{c}+bump"), move |s| k + c + dot.value(s), f64::INFINITY),
            2.0,
        );
        let phi0 = SpatialField::radial_truncated(Profile1D::constant(3.0), 2.0);
        let s = christodoulou_s(&phi0, &dot_field, k, eta, u).unwrap();
        prop_assert!(s >= 0.0, "S = {}", s);
    }
}

fn s_closed_form(c: f64, u: f64) -> f64 {
    let r3 = (1.0 - u).powi(3);
    -c * (4.0 * PI * r3 + 8.0 * PI / 3.0 * (1.0 - r3))
}

#[test]
fn s_matches_closed_form_for_constant_data() {
    let (k, c, eta) = (0.4, 0.3, 0.6);
    let radial_dot = SpatialField::radial_truncated(Profile1D::constant(k - c), 1.5);
    let general_dot = SpatialField::new("const", 1.5, move |_| k - c);
    for u in [0.1, 0.25, 0.45, 0.9] {
        let exact = s_closed_form(c, u);
        let radial = christodoulou_s(&SpatialField::zero(), &radial_dot, k, eta, u).unwrap();
        assert!((radial - exact).abs() < 1e-8, "U = {u}: {radial} vs {exact}");
        let general = christodoulou_s(&SpatialField::zero(), &general_dot, k, eta, u).unwrap();
        assert!((general - exact).abs() < 1e-8, "U = {u}: {general} vs {exact}");
    }
    let balanced = SpatialField::radial_truncated(Profile1D::constant(k), 1.5);
    let flat = SpatialField::radial_truncated(Profile1D::constant(2.0), 1.5);
    assert!(christodoulou_s(&flat, &balanced, k, eta, 0.3).unwrap().abs() < 1e-12);
}

#[test]
fn s_rejects_bad_parameters() {
    let z = SpatialField::zero();
    assert!(christodoulou_s(&z, &z, 0.1, 0.5, 1.0).is_err());
    assert!(christodoulou_s(&z, &z, 0.1, 1.2, 0.3).is_err());
}

#[test]
fn criterion_sign_structure() {
    assert!(christodoulou_criterion(-0.3, 1.0).shock_indicated);
    assert!(!christodoulou_criterion(0.3, 1.0).shock_indicated);
    assert!(christodoulou_criterion(0.3, -1.0).shock_indicated);
    assert!(!christodoulou_criterion(0.0, 1.0).shock_indicated);
    assert!(!christodoulou_criterion(0.0, -2.0).shock_indicated);
}
