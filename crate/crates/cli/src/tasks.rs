//! Execute a validated [`RunConfig`] into one or more output tables.
//!
//! Sweep points are computed in parallel (the operations are pure); rows are
//! always assembled in abscissa order, so the output is identical however
//! many workers run.

use rayon::prelude::*;

use cavern_core::{
    gamma_analytic, gamma_at, gamma_curve, gamma_memoryless_curve, gamma_ode_oracle,
    non_markovianity, pure_state_from_angles, ModelParams64, PropagatorCurve64, PureStateAngles,
    TimeGrid64,
};

use crate::config::{MethodChoice, ReservoirKind, RunConfig, SweepAxis, SweepConfig, TaskConfig};
use crate::emit::Table;
use crate::error::Result;
use crate::figures;

/// One output file: an optional panel suffix and its table.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub suffix: Option<&'static str>,
    pub table: Table,
}

impl Panel {
    pub fn single(table: Table) -> Vec<Panel> {
        vec![Panel {
            suffix: None,
            table,
        }]
    }
}

pub(crate) fn describe_model(config: &RunConfig) -> String {
    match config.model.kind {
        ReservoirKind::Lorentzian => format!(
            "omega={} theta={} reservoir=lorentzian gamma={}",
            config.model.omega,
            config.model.theta,
            config.model.gamma.expect("validated"),
        ),
        ReservoirKind::Memoryless => format!(
            "omega={} theta={} reservoir=memoryless",
            config.model.omega, config.model.theta
        ),
    }
}

pub(crate) fn base_meta(config: &RunConfig, table: &mut Table) {
    table.push_meta("tool", concat!("cavern ", env!("CARGO_PKG_VERSION")));
    table.push_meta("task", config.task_kind().name());
    table.push_meta("config-sha256", config.sha256());
}

/// Run the configured task. Call from inside a rayon pool to pin the worker
/// count; the output does not depend on it.
pub fn run_task(config: &RunConfig) -> Result<Vec<Panel>> {
    match config.task {
        TaskConfig::GammaCurve { method } => gamma_curve_task(config, method),
        TaskConfig::Series => series_task(config),
        TaskConfig::NonmarkovSweep { sweep } => nonmarkov_sweep_task(config, sweep),
        TaskConfig::UncertaintySurface {
            t,
            theta_points,
            phi_points,
        } => uncertainty_surface_task(config, t, theta_points, phi_points),
        TaskConfig::WmrSweep { t, m } => wmr_sweep_task(config, t, m.values()),
        TaskConfig::Figure { .. } => figures::build(config),
    }
}

fn curve_by_choice(
    method: MethodChoice,
    grid: &TimeGrid64,
    params: &ModelParams64,
) -> Result<PropagatorCurve64> {
    Ok(match method {
        MethodChoice::Auto => gamma_curve(grid, params)?,
        MethodChoice::Analytic => gamma_analytic(grid, params)?,
        MethodChoice::Oracle => gamma_ode_oracle(grid, params)?,
        MethodChoice::Memoryless => gamma_memoryless_curve(grid, 1.0, params.theta_ratio())?,
    })
}

fn gamma_curve_task(config: &RunConfig, method: MethodChoice) -> Result<Vec<Panel>> {
    let grid = config.grid.time_grid();
    let params = config.model.params();
    let curve = curve_by_choice(method, &grid, &params)?;
    let mut table = Table::new(vec!["t".into(), "gamma".into()]);
    base_meta(config, &mut table);
    table.push_meta("model", describe_model(config));
    table.push_meta("method-requested", method.name());
    table.push_meta("method", curve.method());
    for (t, g) in curve.iter() {
        table.push_row(vec![t, g]);
    }
    Ok(Panel::single(table))
}

fn series_task(config: &RunConfig) -> Result<Vec<Panel>> {
    let params = config.model.params();
    let records = cavern_core::time_series(
        &params,
        &config.initial.angles(),
        config.grid.t_max,
        config.grid.n_points,
    )?;
    let mut table = Table::new(
        ["t", "gamma", "D", "purity", "S_xz", "B_CP"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    base_meta(config, &mut table);
    table.push_meta("model", describe_model(config));
    table.push_meta(
        "initial",
        format!("theta={} phi={}", config.initial.theta, config.initial.phi),
    );
    for r in records {
        table.push_row(vec![
            r.t,
            r.gamma,
            r.trace_distance,
            r.purity,
            r.entropic_sum,
            r.bounds.coles_piani,
        ]);
    }
    Ok(Panel::single(table))
}

fn nonmarkov_sweep_task(config: &RunConfig, sweep: SweepConfig) -> Result<Vec<Panel>> {
    let theta_ratio = config.model.theta / config.model.omega;
    let t_max = config.grid.t_max;
    let dt = config.grid.dt();
    let xs = sweep.values();
    let ns: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let params = match sweep.axis {
                SweepAxis::GammaRatio => cavern_core::ModelParams::lorentzian(1.0, theta_ratio, x)?,
                SweepAxis::OmegaThetaRatio => cavern_core::ModelParams::memoryless(x, 1.0)?,
            };
            Ok(non_markovianity(&params, t_max, dt)?.n_value)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut table = Table::new(vec![sweep.axis.column().into(), "N".into()]);
    base_meta(config, &mut table);
    table.push_meta("model", describe_model(config));
    table.push_meta(
        "sweep",
        format!(
            "axis={} min={} max={} points={} log={}",
            sweep.axis.name(),
            sweep.min,
            sweep.max,
            sweep.points,
            sweep.log
        ),
    );
    table.push_meta("window", format!("t_max={t_max} dt={dt}"));
    for (x, n) in xs.into_iter().zip(ns) {
        table.push_row(vec![x, n]);
    }
    Ok(Panel::single(table))
}

fn uncertainty_surface_task(
    config: &RunConfig,
    t: f64,
    theta_points: usize,
    phi_points: usize,
) -> Result<Vec<Panel>> {
    let params = config.model.params();
    let gamma = gamma_at(t, &params)?;
    let mut table = Table::new(vec!["theta".into(), "phi".into(), "S_xz".into()]);
    base_meta(config, &mut table);
    table.push_meta("model", describe_model(config));
    table.push_meta("eval-time", t);
    table.push_meta("gamma-at-eval-time", gamma);
    for i in 0..theta_points {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (theta_points - 1) as f64;
        for j in 0..phi_points {
            let phi = std::f64::consts::PI * j as f64 / (phi_points - 1) as f64;
            let rho0 = pure_state_from_angles(&PureStateAngles::new(theta, phi));
            let rho = cavern_core::evolve(&rho0, gamma)?;
            table.push_row(vec![theta, phi, cavern_core::entropic_sum_xz(&rho)]);
        }
    }
    Ok(Panel::single(table))
}

fn wmr_sweep_task(config: &RunConfig, t: f64, m_values: Vec<f64>) -> Result<Vec<Panel>> {
    let params = config.model.params();
    let sweep =
        cavern_core::wmr_uncertainty_sweep(&params, &config.initial.angles(), t, &m_values)?;
    let mut table = Table::new(vec!["m".into(), "S_xz".into()]);
    base_meta(config, &mut table);
    table.push_meta("model", describe_model(config));
    table.push_meta(
        "initial",
        format!("theta={} phi={}", config.initial.theta, config.initial.phi),
    );
    table.push_meta("eval-time", t);
    for (m, s) in sweep {
        table.push_row(vec![m, s]);
    }
    Ok(Panel::single(table))
}
