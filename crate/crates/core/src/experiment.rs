//! Experiment driver: turns a [`RunConfig`] into a [`RunSummary`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::burgers::{self, BurgersError};
use crate::config::{Command, ConfigError, RunConfig, Value};
use crate::john::{
    self, measure_order, predict_shock_time, run_with_observer, DataSpec, GeometricGrid, JohnError, MolSettings,
    Outcome, RunOptions, ShockReport, StartTime, StepPolicy,
};
use crate::nullcond::tensors::{from_flat2, from_flat3, ZERO2, ZERO3};
use crate::nullcond::{
    aleph_minus, aleph_plus, check_classic_null, fluid_derived, is_exceptional, range_over, DerivativeMode,
    FluidLagrangian, MetricFamily, NullError, QuadraticNonlinearity, NULL_TOLERANCE,
};
use crate::profile::Profile1D;
use crate::quadrature::fibonacci_sphere;
use crate::radiation::{
    christodoulou_criterion, christodoulou_s, lifespan::sup_from_field, GridSettings, RadiationData,
    RadiationError, RadiationField, SpatialField,
};

pub const THREADS_ENV: &str = "SHOCKLAB_THREADS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    John(#[from] JohnError),
    #[error(transparent)]
    Null(#[from] NullError),
    #[error(transparent)]
    Radiation(#[from] RadiationError),
    #[error(transparent)]
    Burgers(#[from] BurgersError),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("all {} sweep runs failed; first error: {}", .0.len(), .0[0])]
    AllRunsFailed(Vec<ExperimentError>),
}

impl ExperimentError {
    /// 2 for configuration and usage problems, 3 for numerical failures,
    /// 4 for quadrature failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Io { .. } => 2,
            ExperimentError::John(JohnError::InvalidData(_) | JohnError::InvalidGrid(_)) => 2,
            ExperimentError::John(_) | ExperimentError::Burgers(_) => 3,
            ExperimentError::Null(e) => match e {
                NullError::UnknownMetric(_)
                | NullError::UnknownLagrangian(_)
                | NullError::Expression(_)
                | NullError::WrongKind { .. }
                | NullError::TooFewDirections(_)
                | NullError::InvalidScale(_)
                | NullError::InvalidBackground(_) => 2,
                _ => 3,
            },
            ExperimentError::Radiation(RadiationError::QuadratureFailure { .. }) => 4,
            ExperimentError::Radiation(RadiationError::InvalidParameter(_)) => 2,
            ExperimentError::Radiation(_) => 3,
            ExperimentError::AllRunsFailed(errs) => errs[0].exit_code(),
        }
    }
}

fn usage(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(ConfigError::UsageError(msg.into()))
}

/// Result of one configured experiment.
///
/// Serializes to a key-sorted JSON document. Wall time is recorded only
/// when `record_timing = true`, so identical configurations produce
/// identical documents.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub command: Command,
    pub config: BTreeMap<String, Value>,
    pub seed: u64,
    pub result: Json,
    /// `Some(true)` when a shock-seeking run ended without a shock.
    pub no_shock: Option<bool>,
    pub scheme_order: Option<john::OrderReport>,
    pub wall_time_s: Option<f64>,
    #[serde(skip)]
    pub csv: Option<String>,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("summary serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("json value serializes");
        s.push('\n');
        s
    }

    pub fn write_outputs(&self, cfg: &RunConfig) -> Result<(), ExperimentError> {
        if let Some(path) = cfg.opt_str("json")? {
            write_file(path, &self.to_json())?;
        }
        if let (Some(path), Some(csv)) = (cfg.opt_str("csv")?, &self.csv) {
            write_file(path, csv)?;
        }
        Ok(())
    }
}

fn write_file(path: &str, contents: &str) -> Result<(), ExperimentError> {
    let io = |e: std::io::Error| ExperimentError::Io {
        path: path.to_string(),
        message: e.to_string(),
    };
    if let Some(dir) = Path::new(path).parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
    }
    std::fs::write(path, contents).map_err(io)
}

pub fn run_experiment(cfg: &RunConfig) -> Result<RunSummary, ExperimentError> {
    let start = Instant::now();
    let want_csv = cfg.has("csv");
    let out = match cfg.command {
        Command::Burgers => run_burgers(cfg, want_csv)?,
        Command::JohnSolve => run_john_solve(cfg, want_csv)?,
        Command::JohnPredict => run_john_predict(cfg)?,
        Command::JohnSweep => run_sweep(cfg)?,
        Command::NullcondCheck => run_null_check(cfg)?,
        Command::NullcondAleph => run_null_aleph(cfg, want_csv)?,
        Command::NullcondFluid => run_null_fluid(cfg)?,
        Command::Lifespan => run_lifespan(cfg, want_csv)?,
    };
    let wall = start.elapsed().as_secs_f64();
    Ok(RunSummary {
        command: cfg.command,
        config: cfg.params.clone(),
        seed: cfg.seed(),
        result: out.result,
        no_shock: out.no_shock,
        scheme_order: out.order,
        wall_time_s: cfg.bool("record_timing")?.then_some(wall),
        csv: out.csv,
    })
}

struct Output {
    result: Json,
    no_shock: Option<bool>,
    order: Option<john::OrderReport>,
    csv: Option<String>,
}

impl Output {
    fn plain(result: Json) -> Self {
        Self {
            result,
            no_shock: None,
            order: None,
            csv: None,
        }
    }
}

/// `(max − min)/|mean|`, or `None` with fewer than two values.
pub fn relative_spread(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Some((max - min) / mean.abs())
}

fn run_burgers(cfg: &RunConfig, want_csv: bool) -> Result<Output, ExperimentError> {
    let profile = cfg.profile("profile")?;
    let lambdas = cfg.list("lambda")?;
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(usage("burgers: lambda values must be positive"));
    }
    let t_max = cfg.f64("t_max")?;
    let fan_points = cfg.usize("fan_points")?.max(3);
    let mut rows = Vec::new();
    let mut products = Vec::new();
    for &lambda in lambdas {
        let p = profile.scaled(lambda);
        let point = burgers::blowup_point(&p, burgers::DEFAULT_GRID_POINTS);
        let measured = point.and_then(|(t, _)| {
            let (lo, hi) = burgers::search_window(&p);
            burgers::first_jacobian_zero(&p, &burgers::linspace(lo, hi, fan_points), 2.0 * t)
        });
        if let Some(t) = measured {
            products.push(lambda * t);
        }
        rows.push(json!({
            "lambda": lambda,
            "blowup_time": point.map(|(t, _)| t),
            "blowup_alpha": point.map(|(_, a)| a),
            "first_jacobian_zero": measured,
            "lambda_times_t": measured.map(|t| lambda * t),
        }));
    }
    let csv = want_csv.then(|| {
        let p = profile.scaled(lambdas[0]);
        let mut s = String::from("t,alpha,x,jacobian,psi\n");
        for r in burgers::fan_table(&p, t_max, cfg.usize("n_t").unwrap_or(21), cfg.usize("n_alpha").unwrap_or(201)) {
            let _ = writeln!(s, "{:?},{:?},{:?},{:?},{:?}", r.t, r.alpha, r.x, r.jacobian, r.psi);
        }
        s
    });
    let no_shock = products.is_empty();
    Ok(Output {
        result: json!({
            "profile": profile.label(),
            "runs": rows,
            "lambda_times_t_spread": relative_spread(&products),
        }),
        no_shock: Some(no_shock),
        order: None,
        csv,
    })
}

/// Data, grid and options described by a john section.
pub fn john_setup(cfg: &RunConfig) -> Result<(DataSpec, GeometricGrid, RunOptions), ExperimentError> {
    let start = StartTime::from_value(cfg.f64("start_time")?)
        .ok_or_else(|| usage("start_time must be 0 or -0.5"))?;
    let support = cfg.opt_f64("support")?.unwrap_or(start.max_support());
    let amplitude = if cfg.has("amplitude") { cfg.f64("amplitude")? } else { 1.0 };
    let mol = MolSettings {
        cells_per_unit: cfg.usize("mol_cells")?,
        ..MolSettings::default()
    };
    let data = DataSpec::new(cfg.profile("psi0")?, cfg.profile("psi0_dot")?, support, amplitude, start)?.with_mol(mol);
    let kappa = cfg.f64("kappa")?;
    let policy = match cfg.str("policy")? {
        "log_time" => StepPolicy::LogTime {
            kappa,
            dtau_max: cfg.f64("dtau_max")?,
        },
        "courant" => StepPolicy::Courant {
            kappa,
            dt_max: cfg.f64("dt_max")?,
        },
        other => return Err(usage(format!("policy must be log_time or courant, got '{other}'"))),
    };
    let mut grid = GeometricGrid::new(cfg.f64("u0")?, cfg.usize("n_u")?)
        .with_policy(policy)
        .with_t_max(cfg.f64("t_max")?);
    grid.tau_max = cfg.f64("tau_max")?;
    let opts = RunOptions {
        mu_stop: cfg.f64("mu_stop")?,
        history_stride: cfg.usize("history_stride")?,
        max_steps: cfg.usize("max_steps")?,
        ..RunOptions::default()
    };
    Ok((data, grid, opts))
}

fn grid_json(grid: &GeometricGrid) -> Json {
    json!({
        "u0": grid.u0,
        "n_u": grid.n_u,
        "du": grid.du(),
        "policy": grid.policy,
        "t_max": if grid.t_max.is_finite() { Some(grid.t_max) } else { None },
        "tau_max": grid.tau_max,
    })
}

fn slice_rows(out: &mut String, st: &john::StateSlice) {
    let ln = john::state::log_e_plus_t(st.tau);
    for j in 0..st.len() {
        let nv = st.view(j);
        let r = st.r(j);
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            st.t,
            st.u[j],
            nv.psi,
            r,
            st.mu[j],
            st.w[j],
            st.q(j),
            nv.p.abs(),
            nv.v.abs(),
            st.a[j].abs(),
            (st.mu[j] - 1.0).abs() / ln,
            (1.0 - st.u[j] - st.x[j]).abs() / ln,
        );
    }
}

fn run_john_solve(cfg: &RunConfig, want_csv: bool) -> Result<Output, ExperimentError> {
    let (data, grid, opts) = john_setup(cfg)?;
    let stride = cfg.usize("slice_stride")?.max(1);
    let mut csv = want_csv.then(|| String::from("t,u,psi,r,mu,W,Q,r2_l_psi,r_mu_lbar_psi,r_psi,mu_dev,eikonal_dev\n"));
    let report = run_with_observer(&data, &grid, &opts, |st, step| {
        if let Some(out) = csv.as_mut() {
            if step % stride == 0 {
                slice_rows(out, st);
            }
        }
    })?;
    let order = if cfg.bool("order_check")? {
        Some(measure_order(
            &data,
            grid.u0,
            cfg.usize("order_n_u")?,
            cfg.usize("order_steps")?,
            cfg.f64("order_t_end")?,
        )?)
    } else {
        None
    };
    Ok(Output {
        no_shock: Some(report.outcome == Outcome::NoShock),
        result: json!({ "report": report, "grid": grid_json(&grid) }),
        order,
        csv,
    })
}

fn run_john_predict(cfg: &RunConfig) -> Result<Output, ExperimentError> {
    let (data, grid, _) = john_setup(cfg)?;
    grid.validate()?;
    let predicted = predict_shock_time(&data, grid.u0, grid.n_u);
    Ok(Output {
        no_shock: Some(predicted.is_none()),
        result: json!({ "predicted": predicted, "grid": grid_json(&grid) }),
        order: None,
        csv: None,
    })
}

/// Thread pool honoring `SHOCKLAB_THREADS`.
pub fn sweep_pool() -> rayon::ThreadPool {
    let n = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool")
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub lambda: f64,
    pub report: Option<ShockReport>,
    pub error: Option<String>,
}

/// Independent solves for every λ of the list, merged in list order with the
/// `λ·ln T(λ)` table and its relative spread. Fails only when every run
/// fails.
pub fn sweep(cfg: &RunConfig) -> Result<RunSummary, ExperimentError> {
    if cfg.command != Command::JohnSweep {
        return Err(usage(format!("sweep needs a [john.sweep] config, got [{}]", cfg.command.section())));
    }
    run_experiment(cfg)
}

fn run_sweep(cfg: &RunConfig) -> Result<Output, ExperimentError> {
    let lambdas = cfg.list("lambda")?.to_vec();
    if lambdas.len() < 2 {
        return Err(usage(format!("sweep needs at least two lambda values, got {}", lambdas.len())));
    }
    let (base, grid, opts) = john_setup(cfg)?;
    let pool = sweep_pool();
    let results: Vec<Result<ShockReport, ExperimentError>> = pool.install(|| {
        lambdas
            .par_iter()
            .map(|&l| {
                let data = base.with_amplitude(l)?;
                Ok(john::run(&data, &grid, &opts)?)
            })
            .collect()
    });
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    let mut table = Vec::new();
    let mut products = Vec::new();
    for (&lambda, r) in lambdas.iter().zip(results) {
        match r {
            Ok(rep) => {
                if let Some(ln_t) = rep.ln_lifespan {
                    products.push(lambda * ln_t);
                    table.push(json!({ "lambda": lambda, "ln_t": ln_t, "lambda_ln_t": lambda * ln_t }));
                }
                entries.push(SweepEntry {
                    lambda,
                    report: Some(rep),
                    error: None,
                });
            }
            Err(e) => {
                entries.push(SweepEntry {
                    lambda,
                    report: None,
                    error: Some(e.to_string()),
                });
                errors.push(e);
            }
        }
    }
    if errors.len() == lambdas.len() {
        return Err(ExperimentError::AllRunsFailed(errors));
    }
    let spread = relative_spread(&products);
    let note = match spread {
        Some(_) => "relative spread (max − min)/|mean| of λ·ln T",
        None => "spread undefined: fewer than two runs formed a shock",
    };
    Ok(Output {
        no_shock: Some(products.is_empty()),
        result: json!({
            "runs": entries,
            "lambda_ln_t": table,
            "spread": spread,
            "spread_note": note,
            "grid": grid_json(&grid),
        }),
        order: None,
        csv: None,
    })
}

fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("'{s}' is not a number")))
        .collect()
}

/// A metric family from a built-in name or `file:<path>`.
///
/// Tensor files hold whitespace- or comma-separated numbers with `#`
/// comments: 16 numbers give a scalar family `G_{αβ}` and 64 numbers a
/// system family `G^λ_{αβ}`, both row-major with index 0 the time index.
pub fn metric_from_spec(spec: &str) -> Result<MetricFamily, ExperimentError> {
    match spec.strip_prefix("file:") {
        Some(path) => {
            let text = std::fs::read_to_string(path.trim()).map_err(|e| ExperimentError::Io {
                path: path.trim().to_string(),
                message: e.to_string(),
            })?;
            let nums = parse_numbers(&text).map_err(|m| usage(format!("{path}: {m}")))?;
            metric_from_flat(&nums).ok_or_else(|| usage(format!("{path}: expected 16 or 64 numbers, got {}", nums.len())))
        }
        None => Ok(MetricFamily::builtin(spec)?),
    }
}

fn metric_from_flat(nums: &[f64]) -> Option<MetricFamily> {
    match nums.len() {
        16 => from_flat2(nums).map(MetricFamily::scalar),
        64 => from_flat3(nums).map(MetricFamily::system),
        _ => None,
    }
}

fn metric_from_cfg(cfg: &RunConfig) -> Result<Option<MetricFamily>, ExperimentError> {
    let given: Vec<&str> = ["metric", "g2", "g3"].into_iter().filter(|k| cfg.has(k)).collect();
    if given.len() > 1 {
        return Err(usage(format!("give only one of metric, g2, g3 (found {})", given.join(", "))));
    }
    if let Some(spec) = cfg.opt_str("metric")? {
        return metric_from_spec(spec).map(Some);
    }
    for (key, n) in [("g2", 16), ("g3", 64)] {
        if let Some(vals) = cfg.opt_list(key)? {
            if vals.len() != n {
                return Err(usage(format!("{key} needs {n} numbers, got {}", vals.len())));
            }
            return Ok(metric_from_flat(vals));
        }
    }
    Ok(None)
}

fn run_null_check(cfg: &RunConfig) -> Result<Output, ExperimentError> {
    let n_dirs = cfg.usize("n_dirs")?;
    let metric = metric_from_cfg(cfg)?;
    let direct = ["a3", "a2", "n"].into_iter().any(|k| cfg.has(k));
    let (nl, source) = match (metric, direct) {
        (Some(_), true) => return Err(usage("give either a metric or a3/a2/n, not both")),
        (Some(mf), false) => (QuadraticNonlinearity::induced_by(&mf), mf.kind().name().to_string()),
        (None, _) => {
            let t2 = |key: &str| -> Result<_, ExperimentError> {
                match cfg.opt_list(key)? {
                    None => Ok(ZERO2),
                    Some(v) => from_flat2(v).ok_or_else(|| usage(format!("{key} needs 16 numbers"))),
                }
            };
            let a3 = match cfg.opt_list("a3")? {
                None => ZERO3,
                Some(v) => from_flat3(v).ok_or_else(|| usage("a3 needs 64 numbers"))?,
            };
            (QuadraticNonlinearity::new(a3, t2("a2")?, t2("n")?), "quadratic".to_string())
        }
    };
    let check = check_classic_null(&nl, n_dirs)?;
    Ok(Output::plain(json!({ "source": source, "check": check })))
}

fn run_null_aleph(cfg: &RunConfig, want_csv: bool) -> Result<Output, ExperimentError> {
    let mf = metric_from_cfg(cfg)?.ok_or_else(|| {
        ExperimentError::Config(ConfigError::MissingKey {
            section: cfg.command.section().into(),
            key: "metric".into(),
        })
    })?;
    let n_dirs = cfg.usize("n_dirs")?;
    if n_dirs == 0 {
        return Err(usage("n_dirs must be positive"));
    }
    let dirs = fibonacci_sphere(n_dirs);
    let plus = range_over(&dirs, |t| aleph_plus(&mf, t));
    let minus = range_over(&dirs, |t| aleph_minus(&mf, t));
    let max_abs = plus.0.abs().max(plus.1.abs());
    let csv = want_csv.then(|| {
        let mut s = String::from("theta1,theta2,theta3,aleph_plus,aleph_minus\n");
        for t in fibonacci_sphere(cfg.usize("theta_grid").unwrap_or(256).max(1)) {
            let _ = writeln!(
                s,
                "{:?},{:?},{:?},{:?},{:?}",
                t[0],
                t[1],
                t[2],
                aleph_plus(&mf, t),
                aleph_minus(&mf, t)
            );
        }
        s
    });
    Ok(Output {
        result: json!({
            "kind": mf.kind().name(),
            "aleph_plus_range": [plus.0, plus.1],
            "aleph_minus_range": [minus.0, minus.1],
            "aleph_plus_vanishes": max_abs <= NULL_TOLERANCE,
            "n_dirs": n_dirs,
        }),
        no_shock: None,
        order: None,
        csv,
    })
}

fn fluid_from(spec: &str, k: f64) -> Result<FluidLagrangian, ExperimentError> {
    Ok(FluidLagrangian::parse(spec, k)?)
}

fn run_null_fluid(cfg: &RunConfig) -> Result<Output, ExperimentError> {
    let k = cfg.f64("k")?;
    let mut fl = fluid_from(cfg.str("lagrangian")?, k)?;
    match (cfg.str("derivative")?, cfg.opt_f64("fd_step")?) {
        ("analytic", None) => {}
        ("analytic", Some(_)) => return Err(usage("fd_step needs derivative = fd")),
        ("fd", None) => fl = fl.with_finite_differences(),
        ("fd", Some(h)) if h > 0.0 => fl.mode = DerivativeMode::FiniteDifference { h },
        ("fd", Some(h)) => return Err(usage(format!("fd_step must be positive, got {h}"))),
        (other, _) => return Err(usage(format!("derivative must be analytic or fd, got '{other}'"))),
    }
    if matches!(fl.kind, crate::nullcond::LagrangianKind::Expression(_)) && cfg.str("derivative")? == "analytic" {
        fl = fl.with_finite_differences();
        if let Some(h) = cfg.opt_f64("fd_step")? {
            fl.mode = DerivativeMode::FiniteDifference { h };
        }
    }
    let derived = fluid_derived(&fl)?;
    let exceptional = is_exceptional(&fl, cfg.f64("tol")?)?;
    Ok(Output::plain(json!({
        "lagrangian": cfg.str("lagrangian")?,
        "derivative_mode": fl.mode,
        "derived": derived,
        "exceptional": exceptional,
    })))
}

fn field_from_profile(p: Profile1D, name: &str) -> Result<SpatialField, ExperimentError> {
    if p.is_trivially_zero() {
        return Ok(SpatialField::zero());
    }
    if !p.support_radius().is_finite() {
        return Err(usage(format!(
            "{name} must have compact support (poly_bump, cinf_bump or expr with a |R cutoff)"
        )));
    }
    Ok(SpatialField::radial(p))
}

fn aleph_from_spec(spec: &str) -> Result<Box<dyn Fn([f64; 3]) -> f64 + Sync>, ExperimentError> {
    if let Some(c) = spec.strip_prefix("constant:") {
        let c: f64 = c.trim().parse().map_err(|_| usage(format!("bad constant aleph '{spec}'")))?;
        return Ok(Box::new(move |_| c));
    }
    let mf = metric_from_spec(spec)?;
    Ok(Box::new(move |t| aleph_plus(&mf, t)))
}

fn run_lifespan(cfg: &RunConfig, want_csv: bool) -> Result<Output, ExperimentError> {
    let phi0 = field_from_profile(cfg.profile("phi0")?, "phi0")?;
    let phi0_dot = field_from_profile(cfg.profile("phi0_dot")?, "phi0_dot")?;
    let aleph = aleph_from_spec(cfg.str("aleph")?)?;
    let lambdas = cfg.list("lambda")?;
    if lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(usage("lambda values must be positive"));
    }
    let settings = GridSettings {
        n_q: cfg.usize("n_q")?,
        n_theta: cfg.usize("n_theta")?,
        refine: cfg.bool("refine")?,
        ..GridSettings::default()
    };
    let data = RadiationData::new(phi0.clone(), phi0_dot.clone());
    let field = RadiationField::build(&data, &settings)?;
    let est = sup_from_field(&data, &field, aleph.as_ref(), &settings)?;
    let bounds: Vec<Json> = lambdas
        .iter()
        .map(|&l| {
            let ln_b = est.ln_lifespan_bound(l);
            json!({
                "lambda": l,
                "ln_lifespan_bound": ln_b.is_finite().then_some(ln_b),
                "lifespan_bound": ln_b.is_finite().then(|| ln_b.exp()).filter(|b| b.is_finite()),
            })
        })
        .collect();

    let functional = match cfg.opt_f64("s_k")? {
        None => Json::Null,
        Some(k) => {
            let fl = fluid_from(cfg.str("s_lagrangian")?, k)?;
            let derived = fluid_derived(&fl)?;
            let ell = derived.dh_dsigma_at_k2;
            let rows = cfg
                .list("s_u")?
                .iter()
                .map(|&u| {
                    let s = christodoulou_s(&phi0, &phi0_dot, k, derived.eta, u)?;
                    Ok(json!({ "u": u, "s": s, "indicator": christodoulou_criterion(s, ell) }))
                })
                .collect::<Result<Vec<_>, ExperimentError>>()?;
            json!({ "k": k, "eta0": derived.eta, "dh_dsigma": ell, "values": rows })
        }
    };

    let csv = want_csv.then(|| {
        let mut s = String::from("q,theta1,theta2,theta3,F,d2F\n");
        let n_q = field.q_grid.len();
        for (it, t) in field.theta_grid.iter().enumerate() {
            for (iq, q) in field.q_grid.iter().enumerate() {
                let d2 = if iq >= 2 && iq + 2 < n_q {
                    format!("{:?}", field.d2q[it][iq - 2])
                } else {
                    String::new()
                };
                let _ = writeln!(s, "{q:?},{:?},{:?},{:?},{:?},{d2}", t[0], t[1], t[2], field.values[it][iq]);
            }
        }
        s
    });
    Ok(Output {
        result: json!({
            "estimate": est,
            "bounds": bounds,
            "radial": field.radial,
            "grid": settings,
            "christodoulou": functional,
        }),
        no_shock: None,
        order: None,
        csv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(usage("x").exit_code(), 2);
        let q = ExperimentError::Radiation(RadiationError::QuadratureFailure { q: 0.0, theta: [0.0; 3] });
        assert_eq!(q.exit_code(), 4);
        let n = ExperimentError::John(JohnError::NonFinite { t: 0.0, tau: 0.0, u: 0.0 });
        assert_eq!(n.exit_code(), 3);
    }

    #[test]
    fn spread_needs_two_values() {
        assert_eq!(relative_spread(&[1.0]), None);
        assert!((relative_spread(&[1.0, 1.1]).unwrap() - 0.1 / 1.05).abs() < 1e-15);
    }

    #[test]
    fn tensor_text_parsing() {
        let nums = parse_numbers("# header\n1, 2 3\n4 # tail\n").unwrap();
        assert_eq!(nums, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(parse_numbers("1 x").is_err());
    }

    #[test]
    fn fluid_summary_for_the_exceptional_lagrangian() {
        let cfg = parse_config("[nullcond.fluid]\nk = 0.5\n").unwrap();
        let s = run_experiment(&cfg).unwrap();
        assert_eq!(s.result["exceptional"], json!(true));
    }
}
