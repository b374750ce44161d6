//! Validation and execution of the six experiments.
//!
//! [`Plan::from_config`] checks every parameter and builds all core objects
//! (grids, soliton parameters, initial data, ensembles) before any numerical
//! work starts, so that bad input surfaces as a field error (exit 2) and only
//! numerical breakdown reaches [`Plan::execute`] errors (exit 3).

use gdnls_core::evolution::{evolve, ConservedReport, EquationKind, EvolutionConfig};
use gdnls_core::gauge::{gauge_transform, GaugeDirection};
use gdnls_core::probes::{
    gaussian_pairs, is_admissible, leibniz_probe, maximal_probe, smoothing_probe, strichartz_probe,
    LeibnizExponents, ProbeEnsemble, ProbeReport, DEFAULT_SEED, DEFAULT_TIME_STEP,
};
use gdnls_core::scattering::{scatter_report, MAX_DUHAMEL_SPACING};
use gdnls_core::soliton::{
    self, endpoint_alphas, full_wave, hsc_scan_resolved, loglog_fit, resolved_grid, traveling_wave,
    EndpointNorm, SolitonParams,
};
use gdnls_core::spectral::{derivative, sobolev_norm};
use gdnls_core::{ComplexField, Error as CoreError, GridSpec};

use crate::config::{ConfigError, Experiment, ExperimentConfig, Key};
use crate::output::{Cell, Check, Table};

/// Mass drift accepted by the built-in conservation check.
pub const MASS_DRIFT_LIMIT: f64 = 1e-9;
/// Largest grid any experiment builds.
pub const MAX_POINTS: usize = 1 << 22;
/// Cap on `members x n_points` for probe ensembles.
pub const MAX_ENSEMBLE_VALUES: usize = 1 << 25;
/// Smallest `alpha / sqrt(omega)` accepted for soliton data.
pub const MIN_ALPHA: f64 = 1.0 / 16384.0;
/// Accepted range of `omega`.
pub const OMEGA_RANGE: (f64, f64) = (1e-4, 1e4);
/// Largest endpoint sequence `theorem1-scan` accepts (grids grow like `2^count`).
pub const MAX_ENDPOINT_COUNT: u64 = 12;

/// What an experiment produced, before it is stamped into a record.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Vec<(String, f64)>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone)]
pub enum Datum {
    Gaussian(f64),
    Soliton(SolitonParams),
}

#[derive(Debug, Clone)]
pub enum ProbeKind {
    Strichartz { q: f64, r: f64 },
    Smoothing,
    Maximal { p: f64, s: f64 },
    Leibniz { s: f64 },
}

impl ProbeKind {
    fn default_suite() -> Vec<ProbeKind> {
        vec![
            ProbeKind::Strichartz {
                q: f64::INFINITY,
                r: 2.0,
            },
            ProbeKind::Strichartz {
                q: 4.0,
                r: f64::INFINITY,
            },
            ProbeKind::Strichartz { q: 8.0, r: 4.0 },
            ProbeKind::Smoothing,
            ProbeKind::Maximal { p: 4.0, s: 0.25 },
            ProbeKind::Maximal { p: 8.0, s: 0.375 },
            ProbeKind::Leibniz { s: 0.5 },
        ]
    }
}

/// Exponents used by the Leibniz probe: `p = 2`, `p1 = ... = p4 = 4`.
pub const LEIBNIZ_EXPONENTS: LeibnizExponents = LeibnizExponents {
    p: 2.0,
    p1: 4.0,
    p2: 4.0,
    p3: 4.0,
    p4: 4.0,
};

#[derive(Debug, Clone)]
pub enum ScanPoints {
    /// `alpha_j = 2^{-j} sqrt(omega)`
    Endpoint(Vec<f64>),
    Speeds(Vec<f64>),
}

/// A validated experiment, ready to run.
#[derive(Debug, Clone)]
pub enum Plan {
    Atlas {
        omega: f64,
        sigma: f64,
        speeds: Vec<f64>,
    },
    Evolve {
        cfg: EvolutionConfig,
        u0: ComplexField,
        datum: Datum,
    },
    Scatter {
        cfg: EvolutionConfig,
        u0: ComplexField,
        s: f64,
        s_prime: f64,
    },
    Gauge {
        gdnls: EvolutionConfig,
        dnls: EvolutionConfig,
        u0: ComplexField,
    },
    Ineq {
        ensemble: ProbeEnsemble,
        pairs_grid: GridSpec,
        pairs: usize,
        probes: Vec<ProbeKind>,
        horizon: f64,
    },
    Theorem1 {
        sigma: f64,
        omega: f64,
        norm: EndpointNorm,
        points: ScanPoints,
    },
}

fn core_to_config(cfg: &ExperimentConfig, e: CoreError, fallback: Key) -> ConfigError {
    let key = match &e {
        CoreError::InvalidParameter { name, .. } => match *name {
            "T" => Key::Horizon,
            other => other.parse::<Key>().unwrap_or(fallback),
        },
        CoreError::InvalidGrid(_) => Key::NPoints,
        CoreError::Unresolved { .. } => Key::BoxLength,
        CoreError::TooSparse { .. } => Key::Stride,
        _ => fallback,
    };
    cfg.error(key, e.to_string())
}

fn positive(cfg: &ExperimentConfig, key: Key, default: f64) -> Result<f64, ConfigError> {
    let v = cfg.real(key, default);
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(cfg.error(key, format!("{v} must be > 0")))
    }
}

fn count(cfg: &ExperimentConfig, key: Key, default: u64, min: u64) -> Result<usize, ConfigError> {
    let v = cfg.int(key, default);
    if v < min {
        return Err(cfg.error(key, format!("{v} must be >= {min}")));
    }
    usize::try_from(v).map_err(|_| cfg.error(key, format!("{v} is too large")))
}

fn grid(cfg: &ExperimentConfig, n: u64, length: f64) -> Result<GridSpec, ConfigError> {
    let n_points = count(cfg, Key::NPoints, n, 16)?;
    if n_points > MAX_POINTS {
        return Err(cfg.error(Key::NPoints, format!("{n_points} exceeds {MAX_POINTS}")));
    }
    if !n_points.is_power_of_two() {
        return Err(cfg.error(Key::NPoints, format!("{n_points} must be a power of two")));
    }
    let box_length = positive(cfg, Key::BoxLength, length)?;
    GridSpec::new(n_points, box_length).map_err(|e| core_to_config(cfg, e, Key::NPoints))
}

/// Refuse profiles whose resolved grid would exceed [`MAX_POINTS`].
fn check_budget(cfg: &ExperimentConfig, key: Key, p: &SolitonParams) -> Result<(), ConfigError> {
    // keeps the box-doubling loop of the grid rule finite
    if p.alpha() < MIN_ALPHA * p.omega().sqrt() {
        return Err(cfg.error(
            key,
            format!("alpha = {:e} is below {MIN_ALPHA:e} sqrt(omega)", p.alpha()),
        ));
    }
    let needed = resolved_grid(p).n_points();
    if needed > MAX_POINTS {
        return Err(cfg.error(
            key,
            format!("profile needs {needed} grid points (limit {MAX_POINTS}); move c away from the endpoint"),
        ));
    }
    Ok(())
}

fn omega_sigma(cfg: &ExperimentConfig, sigma_min: f64) -> Result<(f64, f64), ConfigError> {
    let omega = positive(cfg, Key::Omega, 1.0)?;
    if !(OMEGA_RANGE.0..=OMEGA_RANGE.1).contains(&omega) {
        return Err(cfg.error(
            Key::Omega,
            format!("{omega} not in [{:e}, {:e}]", OMEGA_RANGE.0, OMEGA_RANGE.1),
        ));
    }
    let sigma = cfg.real(Key::Sigma, 2.0);
    if !(sigma >= sigma_min && sigma <= 8.0) {
        return Err(cfg.error(Key::Sigma, format!("{sigma} must lie in [{sigma_min}, 8]")));
    }
    Ok((omega, sigma))
}

fn check_speed(cfg: &ExperimentConfig, key: Key, c: f64, omega: f64) -> Result<(), ConfigError> {
    if c * c >= 4.0 * omega {
        return Err(cfg.error(
            key,
            format!(
                "c = {c} violates c^2 < 4 omega = {}: c must lie in (-2 sqrt(omega), 2 sqrt(omega))",
                4.0 * omega
            ),
        ));
    }
    Ok(())
}

fn soliton_params(
    cfg: &ExperimentConfig,
    omega: f64,
    sigma: f64,
) -> Result<SolitonParams, ConfigError> {
    match (cfg.opt_real(Key::C), cfg.opt_real(Key::Alpha)) {
        (Some(_), Some(_)) => Err(cfg.error(Key::Alpha, "set either c or alpha, not both")),
        (c, None) => {
            let c = c.unwrap_or(0.0);
            check_speed(cfg, Key::C, c, omega)?;
            SolitonParams::new(omega, c, sigma).map_err(|e| core_to_config(cfg, e, Key::C))
        }
        (None, Some(alpha)) => {
            if !(alpha > 0.0 && alpha <= 2.0 * omega.sqrt()) {
                return Err(cfg.error(
                    Key::Alpha,
                    format!("{alpha} must lie in (0, 2 sqrt(omega)]"),
                ));
            }
            SolitonParams::from_alpha(omega, alpha, sigma)
                .map_err(|e| core_to_config(cfg, e, Key::Alpha))
        }
    }
}

/// Initial datum and the grid it lives on. Soliton data default to the
/// resolved grid unless `n_points`/`box_length` are given.
fn datum(
    cfg: &ExperimentConfig,
    default_grid: (u64, f64),
    equation_is_gdnls: bool,
) -> Result<(Datum, GridSpec, ComplexField), ConfigError> {
    match cfg.text(Key::Datum, "gaussian") {
        "soliton" => {
            if cfg.is_set(Key::Delta) {
                return Err(cfg.error(Key::Delta, "only used with datum = gaussian"));
            }
            if !equation_is_gdnls {
                return Err(cfg.error(Key::Datum, "soliton data need equation = gdnls"));
            }
            let (omega, sigma) = omega_sigma(cfg, 0.5)?;
            let p = soliton_params(cfg, omega, sigma)?;
            let key = if cfg.is_set(Key::Alpha) {
                Key::Alpha
            } else {
                Key::C
            };
            check_budget(cfg, key, &p)?;
            let g = if cfg.is_set(Key::NPoints) || cfg.is_set(Key::BoxLength) {
                let r = resolved_grid(&p);
                grid(cfg, r.n_points() as u64, r.box_length())?
            } else {
                resolved_grid(&p)
            };
            let u0 = full_wave(&p, &g).map_err(|e| core_to_config(cfg, e, Key::BoxLength))?;
            Ok((Datum::Soliton(p), g, u0))
        }
        _ => {
            for k in [Key::Omega, Key::C, Key::Alpha] {
                if cfg.is_set(k) {
                    return Err(cfg.error(k, "only used with datum = soliton"));
                }
            }
            let delta = positive(cfg, Key::Delta, 0.05)?;
            let g = grid(cfg, default_grid.0, default_grid.1)?;
            let u0 = ComplexField::from_real_fn(g, |x| delta * (-x * x).exp())
                .map_err(|e| core_to_config(cfg, e, Key::Delta))?;
            u0.require_edge_decay()
                .map_err(|e| core_to_config(cfg, e, Key::BoxLength))?;
            Ok((Datum::Gaussian(delta), g, u0))
        }
    }
}

fn evolution_config(
    cfg: &ExperimentConfig,
    equation: EquationKind,
    g: GridSpec,
    defaults: (f64, f64, u64),
) -> Result<EvolutionConfig, ConfigError> {
    let dt = positive(cfg, Key::Dt, defaults.0)?;
    let t_end = positive(cfg, Key::TEnd, defaults.1)?;
    if dt > t_end {
        return Err(cfg.error(Key::Dt, format!("{dt} exceeds t_end = {t_end}")));
    }
    if t_end / dt > 1e8 {
        return Err(cfg.error(Key::Dt, "more than 1e8 steps requested"));
    }
    let stride = count(cfg, Key::Stride, defaults.2, 1)?;
    EvolutionConfig::new(equation, g, dt, t_end)
        .and_then(|c| c.with_stride(stride))
        .map_err(|e| core_to_config(cfg, e, Key::Dt))
}

impl Plan {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Plan, ConfigError> {
        match cfg.experiment {
            Experiment::SolitonAtlas => {
                let (omega, sigma) = omega_sigma(cfg, 0.25)?;
                let speeds = match cfg.list(Key::CGrid) {
                    Some(list) => list.to_vec(),
                    None => (0..19)
                        .map(|j| 2.0 * omega.sqrt() * (-0.9 + 0.1 * j as f64))
                        .collect(),
                };
                validate_speeds(cfg, &speeds, omega)?;
                for &c in &speeds {
                    let p = SolitonParams::new(omega, c, sigma)
                        .map_err(|e| core_to_config(cfg, e, Key::CGrid))?;
                    check_budget(cfg, Key::CGrid, &p)?;
                }
                Ok(Plan::Atlas {
                    omega,
                    sigma,
                    speeds,
                })
            }
            Experiment::Evolve => {
                let equation = match cfg.text(Key::Equation, "gdnls") {
                    "gdnls" => {
                        let (_, sigma) = omega_sigma(cfg, 0.5)?;
                        EquationKind::Gdnls { sigma }
                    }
                    other => {
                        if cfg.is_set(Key::Sigma) {
                            return Err(cfg.error(Key::Sigma, "only used with equation = gdnls"));
                        }
                        if other == "dnls" {
                            EquationKind::Dnls
                        } else {
                            EquationKind::Linear
                        }
                    }
                };
                let is_gdnls = matches!(equation, EquationKind::Gdnls { .. });
                let (datum, g, u0) = datum(cfg, (2048, 160.0), is_gdnls)?;
                let ecfg = evolution_config(cfg, equation, g, (2e-3, 8.0, 10))?;
                Ok(Plan::Evolve {
                    cfg: ecfg,
                    u0,
                    datum,
                })
            }
            Experiment::ScatterProbe => {
                let (_, sigma) = omega_sigma(cfg, 0.5)?;
                let (_, g, u0) = datum(cfg, (2048, 160.0), true)?;
                let ecfg =
                    evolution_config(cfg, EquationKind::Gdnls { sigma }, g, (2e-3, 8.0, 10))?;
                let spacing = ecfg.step_count().1 * ecfg.snapshot_stride as f64;
                if spacing > MAX_DUHAMEL_SPACING * (1.0 + 1e-9) {
                    return Err(cfg.error(
                        Key::Stride,
                        format!(
                            "snapshot spacing dt * stride = {spacing} exceeds {MAX_DUHAMEL_SPACING} (needed for u_+)"
                        ),
                    ));
                }
                if ecfg.t_end < 2.0 {
                    return Err(
                        cfg.error(Key::TEnd, "needs t_end >= 2 for a dyadic window from t = 1")
                    );
                }
                let s = cfg.real(Key::S, 0.5);
                if !(0.5..=1.0).contains(&s) {
                    return Err(cfg.error(Key::S, format!("{s} not in [1/2, 1]")));
                }
                let s_prime = cfg.real(Key::SPrime, 0.4);
                if !(s_prime >= 0.0 && s_prime < s) {
                    return Err(cfg.error(Key::SPrime, format!("{s_prime} not in [0, s = {s})")));
                }
                Ok(Plan::Scatter {
                    cfg: ecfg,
                    u0,
                    s,
                    s_prime,
                })
            }
            Experiment::GaugeCheck => {
                let delta = positive(cfg, Key::Delta, 0.5)?;
                let g = grid(cfg, 2048, 80.0)?;
                let u0 = ComplexField::from_real_fn(g, |x| delta * (-x * x).exp())
                    .map_err(|e| core_to_config(cfg, e, Key::Delta))?;
                u0.require_edge_decay()
                    .map_err(|e| core_to_config(cfg, e, Key::BoxLength))?;
                let gdnls =
                    evolution_config(cfg, EquationKind::Gdnls { sigma: 1.0 }, g, (1e-4, 0.5, 500))?;
                let mut dnls = gdnls;
                dnls.equation = EquationKind::Dnls;
                Ok(Plan::Gauge { gdnls, dnls, u0 })
            }
            Experiment::IneqProbe => Self::ineq(cfg),
            Experiment::Theorem1Scan => {
                let (omega, sigma) = omega_sigma(cfg, 0.25)?;
                let norm = match cfg.text(Key::Norm, "critical") {
                    "l2" => EndpointNorm::L2,
                    "h1" => EndpointNorm::H1,
                    "pc" => EndpointNorm::PcMass,
                    _ => {
                        if sigma < 1.0 {
                            return Err(
                                cfg.error(Key::Norm, "critical norm needs sigma >= 1 (s_c >= 0)")
                            );
                        }
                        EndpointNorm::CriticalHomogeneous
                    }
                };
                let points = match cfg.list(Key::CGrid) {
                    Some(list) => {
                        if cfg.is_set(Key::Count) {
                            return Err(
                                cfg.error(Key::Count, "set either count or c_grid, not both")
                            );
                        }
                        validate_speeds(cfg, list, omega)?;
                        if needs_grid(norm) {
                            for &c in list {
                                let p = SolitonParams::new(omega, c, sigma)
                                    .map_err(|e| core_to_config(cfg, e, Key::CGrid))?;
                                check_budget(cfg, Key::CGrid, &p)?;
                            }
                        }
                        ScanPoints::Speeds(list.to_vec())
                    }
                    None => {
                        let n = count(cfg, Key::Count, 11, 4)?;
                        if n as u64 > MAX_ENDPOINT_COUNT {
                            return Err(cfg.error(
                                Key::Count,
                                format!("{n} exceeds {MAX_ENDPOINT_COUNT} (grid size doubles per point)"),
                            ));
                        }
                        let alphas = endpoint_alphas(omega, n);
                        if needs_grid(norm) {
                            for &a in &alphas {
                                let p = SolitonParams::from_alpha(omega, a, sigma)
                                    .map_err(|e| core_to_config(cfg, e, Key::Count))?;
                                check_budget(cfg, Key::Count, &p)?;
                            }
                        }
                        ScanPoints::Endpoint(alphas)
                    }
                };
                Ok(Plan::Theorem1 {
                    sigma,
                    omega,
                    norm,
                    points,
                })
            }
        }
    }

    fn ineq(cfg: &ExperimentConfig) -> Result<Plan, ConfigError> {
        let horizon = positive(cfg, Key::Horizon, 4.0)?;
        let time_step = positive(cfg, Key::TimeStep, DEFAULT_TIME_STEP)?;
        if time_step > horizon / 4.0 {
            return Err(cfg.error(
                Key::TimeStep,
                format!("{time_step} too coarse for horizon {horizon}"),
            ));
        }
        if horizon / time_step > 1e6 {
            return Err(cfg.error(Key::TimeStep, "more than 1e6 time samples requested"));
        }
        let probe = cfg.text(Key::Probe, "all");
        let needs = |keys: &[Key]| -> Result<(), ConfigError> {
            for &k in [Key::Q, Key::R, Key::P, Key::S].iter() {
                if cfg.is_set(k) && !keys.contains(&k) {
                    return Err(cfg.error(k, format!("not used by probe = {probe}")));
                }
            }
            Ok(())
        };
        let probes = match probe {
            "all" => {
                needs(&[])?;
                ProbeKind::default_suite()
            }
            "strichartz" => {
                needs(&[Key::Q, Key::R])?;
                let q = cfg.real(Key::Q, 4.0);
                let r = cfg.real(Key::R, f64::INFINITY);
                if !is_admissible(q, r) {
                    return Err(cfg.error(
                        Key::R,
                        format!(
                            "(q, r) = ({q}, {r}) is not admissible: need 2/q = 1/2 - 1/r, q >= 4"
                        ),
                    ));
                }
                vec![ProbeKind::Strichartz { q, r }]
            }
            "smoothing" => {
                needs(&[])?;
                vec![ProbeKind::Smoothing]
            }
            "maximal" => {
                needs(&[Key::P, Key::S])?;
                let p = cfg.real(Key::P, 4.0);
                if !(4.0..=16.0).contains(&p) {
                    return Err(cfg.error(Key::P, format!("{p} not in [4, 16]")));
                }
                let s = cfg.real(Key::S, 0.5 - 1.0 / p);
                if !(0.0..=2.0).contains(&s) {
                    return Err(cfg.error(Key::S, format!("{s} not in [0, 2]")));
                }
                vec![ProbeKind::Maximal { p, s }]
            }
            _ => {
                needs(&[Key::S])?;
                let s = cfg.real(Key::S, 0.5);
                if !(s > 0.0 && s < 1.0) {
                    return Err(cfg.error(Key::S, format!("{s} not in (0, 1)")));
                }
                vec![ProbeKind::Leibniz { s }]
            }
        };
        let g = grid(cfg, 4096, 400.0)?;
        let members = count(cfg, Key::Members, 20, 0)?;
        if members > 10_000 {
            return Err(cfg.error(Key::Members, format!("{members} exceeds 10000")));
        }
        if (100 + members) * g.n_points() > MAX_ENSEMBLE_VALUES {
            return Err(cfg.error(
                Key::Members,
                format!(
                    "{} members on {} points exceed the {MAX_ENSEMBLE_VALUES}-value budget",
                    100 + members,
                    g.n_points()
                ),
            ));
        }
        let pairs = count(cfg, Key::Pairs, 100, 1)?;
        if pairs > 10_000 {
            return Err(cfg.error(Key::Pairs, format!("{pairs} exceeds 10000")));
        }
        let seed = cfg.int(Key::Seed, DEFAULT_SEED);
        let uses_ensemble = probes
            .iter()
            .any(|p| !matches!(p, ProbeKind::Leibniz { .. }));
        let ensemble = if uses_ensemble {
            let mut ens =
                ProbeEnsemble::gaussians(g).map_err(|e| core_to_config(cfg, e, Key::BoxLength))?;
            ens.members.extend(
                ProbeEnsemble::random(g, seed, members)
                    .map_err(|e| core_to_config(cfg, e, Key::BoxLength))?
                    .members,
            );
            ens.seed = seed;
            ens.with_time_step(time_step)
                .map_err(|e| core_to_config(cfg, e, Key::TimeStep))?
        } else {
            ProbeEnsemble::new(Vec::new(), seed).expect("empty ensemble")
        };
        if probes
            .iter()
            .any(|p| matches!(p, ProbeKind::Leibniz { .. }))
        {
            // the pair generator places Gaussians in [-10, 10]; they must decay on the box
            gaussian_pairs(g, seed, 1)
                .and_then(|p| p[0].0.require_edge_decay())
                .map_err(|e| core_to_config(cfg, e, Key::BoxLength))?;
            if g.box_length() < 60.0 {
                return Err(cfg.error(Key::BoxLength, "Leibniz pairs need box_length >= 60"));
            }
        }
        Ok(Plan::Ineq {
            ensemble,
            pairs_grid: g,
            pairs,
            probes,
            horizon,
        })
    }

    /// Run the plan. Errors here are numerical failures.
    pub fn execute(&self, seed: u64) -> Result<Outcome, CoreError> {
        match self {
            Plan::Atlas {
                omega,
                sigma,
                speeds,
            } => atlas(*omega, *sigma, speeds),
            Plan::Evolve { cfg, u0, datum } => run_evolve(cfg, u0, datum),
            Plan::Scatter {
                cfg,
                u0,
                s,
                s_prime,
            } => run_scatter(cfg, u0, *s, *s_prime),
            Plan::Gauge { gdnls, dnls, u0 } => run_gauge(gdnls, dnls, u0),
            Plan::Ineq {
                ensemble,
                pairs_grid,
                pairs,
                probes,
                horizon,
            } => run_ineq(ensemble, *pairs_grid, *pairs, probes, *horizon, seed),
            Plan::Theorem1 {
                sigma,
                omega,
                norm,
                points,
            } => run_theorem1(*sigma, *omega, *norm, points),
        }
    }
}

fn needs_grid(norm: EndpointNorm) -> bool {
    matches!(norm, EndpointNorm::H1 | EndpointNorm::CriticalHomogeneous)
}

fn validate_speeds(cfg: &ExperimentConfig, speeds: &[f64], omega: f64) -> Result<(), ConfigError> {
    if speeds.is_empty() {
        return Err(cfg.error(Key::CGrid, "empty"));
    }
    if speeds.len() > 10_000 {
        return Err(cfg.error(Key::CGrid, "more than 10000 entries"));
    }
    let limit = 2.0 * omega.sqrt() * (1.0 - 1e-4);
    for &c in speeds {
        check_speed(cfg, Key::CGrid, c, omega)?;
        if c.abs() > limit * (1.0 + 1e-12) {
            return Err(cfg.error(
                Key::CGrid,
                format!(
                    "|c| = {} exceeds 2 sqrt(omega)(1 - 1e-4) = {limit}",
                    c.abs()
                ),
            ));
        }
    }
    Ok(())
}

fn atlas(omega: f64, sigma: f64, speeds: &[f64]) -> Result<Outcome, CoreError> {
    let mut t = Table::new(
        "",
        &[
            "c",
            "alpha",
            "n_points",
            "box_length",
            "l2_mass_closed",
            "l2_mass_grid",
            "pc_mass_closed",
            "pc_mass_grid",
            "virial_ratio",
            "h1_norm",
            "critical_norm",
        ],
    );
    let (mut worst_virial, mut worst_mass) = (0.0f64, 0.0f64);
    for &c in speeds {
        let p = SolitonParams::new(omega, c, sigma)?;
        let g = resolved_grid(&p);
        let phi = full_wave(&p, &g)?;
        let h = g.spacing();
        let l2_grid = phi.l2_norm().powi(2);
        let pc_grid: f64 = g
            .points()
            .iter()
            .map(|&x| p.amplitude_power(x))
            .sum::<f64>()
            * h;
        let l2 = soliton::l2_mass_closed(&p)?;
        let pc = soliton::pc_mass_closed(&p)?;
        let virial = derivative(&phi)?.l2_norm().powi(2) / l2_grid;
        worst_virial = worst_virial.max((virial / omega - 1.0).abs());
        worst_mass = worst_mass.max((l2 / l2_grid - 1.0).abs());
        t.push(vec![
            c.into(),
            p.alpha().into(),
            g.n_points().into(),
            g.box_length().into(),
            l2.into(),
            l2_grid.into(),
            pc.into(),
            pc_grid.into(),
            virial.into(),
            sobolev_norm(&phi, 1.0, false)?.into(),
            soliton::critical_norm(&p, &g)?.into(),
        ]);
    }
    Ok(Outcome {
        tables: vec![t],
        summary: vec![
            ("worst_virial_deviation".into(), worst_virial),
            ("worst_mass_deviation".into(), worst_mass),
        ],
        checks: vec![
            Check::new(
                "virial_identity",
                worst_virial < 1e-6,
                format!("{worst_virial:e} < 1e-6"),
            ),
            Check::new(
                "l2_mass_formula",
                worst_mass < 1e-7,
                format!("{worst_mass:e} < 1e-7"),
            ),
        ],
    })
}

fn conservation_rows(report: &ConservedReport, t: &mut Table, extra: impl Fn(usize) -> Vec<Cell>) {
    for i in 0..report.times.len() {
        let mut row = vec![
            report.times[i].into(),
            report.mass[i].into(),
            report.energy.as_ref().map(|e| e[i]).into(),
            report.linf[i].into(),
        ];
        row.extend(extra(i));
        t.push(row);
    }
}

fn mass_check(report: &ConservedReport) -> Check {
    let d = report.mass_drift();
    Check::new(
        "mass_drift",
        d < MASS_DRIFT_LIMIT,
        format!("{d:e} < {MASS_DRIFT_LIMIT:e}"),
    )
}

fn run_evolve(
    cfg: &EvolutionConfig,
    u0: &ComplexField,
    datum: &Datum,
) -> Result<Outcome, CoreError> {
    let (traj, report) = evolve(u0, cfg)?;
    let kinetic = 0.5 * derivative(u0)?.l2_norm().powi(2);
    let errors = match datum {
        Datum::Soliton(p) => Some(
            traj.times()
                .iter()
                .zip(traj.snapshots())
                .map(|(&t, u)| {
                    let exact = traveling_wave(p, &cfg.grid, t)?;
                    Ok(u.l2_distance(&exact) / exact.l2_norm())
                })
                .collect::<Result<Vec<f64>, CoreError>>()?,
        ),
        Datum::Gaussian(_) => None,
    };
    let mut t = Table::new("", &["t", "mass", "energy", "linf", "soliton_error"]);
    conservation_rows(&report, &mut t, |i| {
        vec![errors.as_ref().map(|e| e[i]).into()]
    });
    let mut summary = vec![
        ("mass_drift".into(), report.mass_drift()),
        ("steps".into(), report.steps as f64),
        ("dt".into(), report.dt),
        (
            "linf_growth_flagged".into(),
            f64::from(u8::from(report.linf_growth_flagged)),
        ),
    ];
    if let Some(d) = report.energy_drift(kinetic) {
        summary.push(("energy_drift".into(), d));
    }
    if let Some(e) = &errors {
        summary.push(("final_soliton_error".into(), *e.last().expect("snapshots")));
    }
    Ok(Outcome {
        tables: vec![t],
        summary,
        checks: vec![mass_check(&report)],
    })
}

fn run_scatter(
    cfg: &EvolutionConfig,
    u0: &ComplexField,
    s: f64,
    s_prime: f64,
) -> Result<Outcome, CoreError> {
    let (traj, conserved) = evolve(u0, cfg)?;
    let report = scatter_report(&traj, cfg.equation, s, s_prime)?;
    let mut t = Table::new("", &["t", "mass", "energy", "linf", "xt_norm"]);
    // the working-space curve starts at the second snapshot
    let xt = |i: usize| -> Cell {
        if i == 0 {
            Cell::Real(0.0)
        } else {
            report.xt_norm_curve[i - 1].1.into()
        }
    };
    conservation_rows(&conserved, &mut t, |i| vec![xt(i)]);
    let mut w = Table::new("windows", &["t1", "t2", "pullback_difference"]);
    for &(a, b, d) in &report.pullback_cauchy {
        w.push(vec![a.into(), b.into(), d.into()]);
    }
    let xt_final = report.xt_norm_curve.last().map_or(0.0, |p| p.1);
    let mut summary = vec![
        ("xt_final".into(), xt_final),
        ("uplus_residual".into(), report.uplus_residual),
        ("mass_drift".into(), conserved.mass_drift()),
    ];
    if let Some(e) = report.decay_exponent {
        summary.push(("decay_exponent".into(), e));
    }
    let monotone = report.xt_norm_curve.windows(2).all(|p| p[1].1 >= p[0].1);
    Ok(Outcome {
        tables: vec![t, w],
        summary,
        checks: vec![
            mass_check(&conserved),
            Check::new("xt_nondecreasing", monotone, "prefix curve"),
        ],
    })
}

fn run_gauge(
    gdnls: &EvolutionConfig,
    dnls: &EvolutionConfig,
    u0: &ComplexField,
) -> Result<Outcome, CoreError> {
    let (direct, r1) = evolve(u0, gdnls)?;
    let v0 = gauge_transform(u0, GaugeDirection::Forward)?;
    let (gauged, r2) = evolve(&v0, dnls)?;
    let mut t = Table::new("", &["t", "difference", "mass_gdnls", "mass_dnls"]);
    let mut last = 0.0;
    for i in 0..direct.len() {
        let back = gauge_transform(&gauged.snapshots()[i], GaugeDirection::Inverse)?;
        last = back.l2_distance(&direct.snapshots()[i]);
        t.push(vec![
            direct.times()[i].into(),
            last.into(),
            r1.mass[i].into(),
            r2.mass[i].into(),
        ]);
    }
    Ok(Outcome {
        tables: vec![t],
        summary: vec![
            ("final_difference".into(), last),
            ("mass_drift_gdnls".into(), r1.mass_drift()),
            ("mass_drift_dnls".into(), r2.mass_drift()),
        ],
        checks: vec![
            Check::new("gauge_equivalence", last < 1e-5, format!("{last:e} < 1e-5")),
            mass_check(&r1),
            mass_check(&r2),
        ],
    })
}

fn run_ineq(
    ens: &ProbeEnsemble,
    pairs_grid: GridSpec,
    pairs: usize,
    probes: &[ProbeKind],
    horizon: f64,
    seed: u64,
) -> Result<Outcome, CoreError> {
    let mut main = Table::new(
        "",
        &[
            "inequality",
            "q",
            "r",
            "p",
            "s",
            "horizon",
            "members",
            "worst_ratio",
            "worst_member",
            "admissible",
        ],
    );
    let mut ratios = Table::new(
        "ratios",
        &["inequality", "q", "r", "p", "s", "member", "ratio"],
    );
    let mut summary = Vec::new();
    let mut checks = Vec::new();
    for probe in probes {
        let (report, q, r, p, s): (ProbeReport, _, _, _, _) = match *probe {
            ProbeKind::Strichartz { q, r } => (
                strichartz_probe(ens, q, r, horizon)?,
                Some(q),
                Some(r),
                None,
                None,
            ),
            ProbeKind::Smoothing => (smoothing_probe(ens, horizon)?, None, None, None, None),
            ProbeKind::Maximal { p, s } => (
                maximal_probe(ens, p, s, horizon)?,
                None,
                None,
                Some(p),
                Some(s),
            ),
            ProbeKind::Leibniz { s } => {
                let input = gaussian_pairs(pairs_grid, seed, pairs)?;
                (
                    leibniz_probe(&input, s, LEIBNIZ_EXPONENTS)?,
                    None,
                    None,
                    Some(LEIBNIZ_EXPONENTS.p),
                    Some(s),
                )
            }
        };
        let label = probe_label(probe);
        main.push(vec![
            report.inequality_id.into(),
            q.into(),
            r.into(),
            p.into(),
            s.into(),
            if matches!(probe, ProbeKind::Leibniz { .. }) {
                Cell::Empty
            } else {
                horizon.into()
            },
            report.ratios.len().into(),
            report.worst_ratio.into(),
            report.worst_member.into(),
            report.admissible.into(),
        ]);
        for (i, v) in report.ratios.iter().enumerate() {
            ratios.push(vec![
                report.inequality_id.into(),
                q.into(),
                r.into(),
                p.into(),
                s.into(),
                i.into(),
                (*v).into(),
            ]);
        }
        checks.push(Check::new(
            &format!("{label}_finite"),
            report.worst_ratio.is_finite(),
            format!("worst ratio {}", report.worst_ratio),
        ));
        if let ProbeKind::Strichartz { q, r } = *probe {
            if q.is_infinite() && r == 2.0 {
                let dev = report
                    .ratios
                    .iter()
                    .map(|x| (x - 1.0).abs())
                    .fold(0.0, f64::max);
                checks.push(Check::new(
                    "strichartz_inf_2_unitary",
                    dev < 1e-10,
                    format!("{dev:e} < 1e-10"),
                ));
            }
        }
        summary.push((label, report.worst_ratio));
    }
    Ok(Outcome {
        tables: vec![main, ratios],
        summary,
        checks,
    })
}

fn fmt_exp(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

/// Short name used for summary entries, e.g. `strichartz_4_inf`.
pub fn probe_label(p: &ProbeKind) -> String {
    match *p {
        ProbeKind::Strichartz { q, r } => format!("strichartz_{}_{}", fmt_exp(q), fmt_exp(r)),
        ProbeKind::Smoothing => "smoothing".into(),
        ProbeKind::Maximal { p, s } => format!("maximal_{}_{}", fmt_exp(p), s),
        ProbeKind::Leibniz { s } => format!("leibniz_{s}"),
    }
}

fn run_theorem1(
    sigma: f64,
    omega: f64,
    norm: EndpointNorm,
    points: &ScanPoints,
) -> Result<Outcome, CoreError> {
    let mut t = Table::new("", &["index", "alpha", "c", "value", "resolved"]);
    let mut values: Vec<Option<f64>> = Vec::new();
    let mut alphas = Vec::new();
    match points {
        ScanPoints::Endpoint(list) => {
            for &a in list {
                let p = SolitonParams::from_alpha(omega, a, sigma)?;
                values.push(Some(norm.evaluate(&p)?));
                alphas.push((a, p.c()));
            }
        }
        ScanPoints::Speeds(cs) => {
            if norm == EndpointNorm::CriticalHomogeneous {
                for e in hsc_scan_resolved(sigma, cs, omega)? {
                    values.push(e.value);
                }
            } else {
                for &c in cs {
                    values.push(Some(norm.evaluate(&SolitonParams::new(omega, c, sigma)?)?));
                }
            }
            for &c in cs {
                alphas.push(((4.0 * omega - c * c).sqrt(), c));
            }
        }
    }
    for (i, (v, (a, c))) in values.iter().zip(&alphas).enumerate() {
        t.push(vec![
            i.into(),
            (*a).into(),
            (*c).into(),
            (*v).into(),
            v.is_some().into(),
        ]);
    }
    let resolved: Vec<(f64, f64)> = values
        .iter()
        .zip(&alphas)
        .filter_map(|(v, (a, _))| v.map(|v| (*a, v)))
        .collect();
    let (min_at, min) =
        resolved.iter().fold(
            (f64::NAN, f64::INFINITY),
            |b, &(a, v)| if v < b.1 { (a, v) } else { b },
        );
    let mut summary = vec![("min_value".into(), min), ("min_alpha".into(), min_at)];
    if matches!(points, ScanPoints::Endpoint(_)) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = resolved.iter().copied().unzip();
        let (slope, _) = loglog_fit(&xs, &ys)?;
        summary.push(("loglog_slope".into(), slope));
    }
    let all_ok = values
        .iter()
        .all(|v| v.is_some_and(|v| v.is_finite() && v > 0.0));
    Ok(Outcome {
        tables: vec![t],
        summary,
        checks: vec![Check::new(
            "values_finite_positive",
            all_ok,
            "every entry resolved, finite and > 0",
        )],
    })
}
