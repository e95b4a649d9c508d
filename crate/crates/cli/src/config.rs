//! Run configuration: one JSON document, validated into [`RunConfig`].
//!
//! Every section is optional in the raw document; defaults are documented on
//! the fields. Unknown fields are rejected. `--set key=value` overrides are
//! applied to the JSON tree before deserialization, so they go through the
//! same validation as the file itself.

use std::f64::consts::{FRAC_PI_4, PI};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cavern_core::{ModelParams64, PureStateAngles64, TimeGrid64};

use crate::error::{AppError, Result};

/// Default horizon (dimensionless `omega * t`).
pub const DEFAULT_T_MAX: f64 = 100.0;
/// Default grid step.
pub const DEFAULT_DT: f64 = 1e-3;
/// Default initial-state polar angle.
pub const DEFAULT_THETA_ANGLE: f64 = FRAC_PI_4;
/// Default initial-state phase.
pub const DEFAULT_PHI: f64 = PI / 8.0;

// ---------------------------------------------------------------------------
// Raw (document-level) schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<RawModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<RawInitial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<RawGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<RawTask>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawModel {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reservoir: Option<RawReservoir>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawReservoir {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawInitial {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawGrid {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawTask {
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// Evaluation time for `uncertainty-surface`, `wmr-sweep` and the
    /// figure presets that need one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Propagator route for `gamma-curve`: auto | analytic | memoryless | oracle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RawSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<RawLinearGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<u8>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawLinearGrid {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

// ---------------------------------------------------------------------------
// Validated configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReservoirKind {
    Lorentzian,
    Memoryless,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSection {
    pub omega: f64,
    pub theta: f64,
    pub kind: ReservoirKind,
    /// Spectral width; present exactly for Lorentzian reservoirs.
    pub gamma: Option<f64>,
}

impl ModelSection {
    pub fn params(&self) -> ModelParams64 {
        match self.kind {
            ReservoirKind::Lorentzian => cavern_core::ModelParams::lorentzian(
                self.omega,
                self.theta,
                self.gamma.expect("validated lorentzian has gamma"),
            ),
            ReservoirKind::Memoryless => {
                cavern_core::ModelParams::memoryless(self.omega, self.theta)
            }
        }
        .expect("validated parameters construct")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialSection {
    pub theta: f64,
    pub phi: f64,
}

impl InitialSection {
    pub fn angles(&self) -> PureStateAngles64 {
        cavern_core::PureStateAngles::new(self.theta, self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSection {
    pub t_max: f64,
    pub n_points: usize,
}

impl GridSection {
    pub fn time_grid(&self) -> TimeGrid64 {
        cavern_core::TimeGrid::new(self.t_max, self.n_points).expect("validated grid constructs")
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.n_points - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Auto,
    Analytic,
    Memoryless,
    Oracle,
}

impl MethodChoice {
    pub fn name(&self) -> &'static str {
        match self {
            MethodChoice::Auto => "auto",
            MethodChoice::Analytic => "analytic",
            MethodChoice::Memoryless => "memoryless",
            MethodChoice::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Spectral width over atom-cavity coupling (Lorentzian model).
    GammaRatio,
    /// Atom-cavity over cavity-reservoir coupling (memoryless model).
    OmegaThetaRatio,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::GammaRatio => "gamma-ratio",
            SweepAxis::OmegaThetaRatio => "omega-theta-ratio",
        }
    }

    pub fn column(&self) -> &'static str {
        match self {
            SweepAxis::GammaRatio => "gamma_over_omega",
            SweepAxis::OmegaThetaRatio => "omega_over_theta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl SweepConfig {
    /// Abscissae in ascending order.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if self.log {
                    self.min * (self.max / self.min).powf(f)
                } else {
                    self.min + (self.max - self.min) * f
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl LinearGrid {
    pub fn values(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TaskConfig {
    GammaCurve {
        method: MethodChoice,
    },
    Series,
    NonmarkovSweep {
        sweep: SweepConfig,
    },
    UncertaintySurface {
        t: f64,
        theta_points: usize,
        phi_points: usize,
    },
    WmrSweep {
        t: f64,
        m: LinearGrid,
    },
    Figure {
        id: u8,
        t: f64,
        theta_points: usize,
        phi_points: usize,
        m: LinearGrid,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    GammaCurve,
    Series,
    NonmarkovSweep,
    UncertaintySurface,
    WmrSweep,
    Figure,
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::GammaCurve => "gamma-curve",
            TaskKind::Series => "series",
            TaskKind::NonmarkovSweep => "nonmarkov-sweep",
            TaskKind::UncertaintySurface => "uncertainty-surface",
            TaskKind::WmrSweep => "wmr-sweep",
            TaskKind::Figure => "figure",
        }
    }

    fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "gamma-curve" => TaskKind::GammaCurve,
            "series" => TaskKind::Series,
            "nonmarkov-sweep" => TaskKind::NonmarkovSweep,
            "uncertainty-surface" => TaskKind::UncertaintySurface,
            "wmr-sweep" => TaskKind::WmrSweep,
            "figure" => TaskKind::Figure,
            other => {
                return Err(AppError::Config(format!(
                    "task.type: unknown task `{other}`"
                )))
            }
        })
    }
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSection,
    pub initial: InitialSection,
    pub grid: GridSection,
    pub task: TaskConfig,
    pub output: PathBuf,
}

impl RunConfig {
    pub fn task_kind(&self) -> TaskKind {
        match self.task {
            TaskConfig::GammaCurve { .. } => TaskKind::GammaCurve,
            TaskConfig::Series => TaskKind::Series,
            TaskConfig::NonmarkovSweep { .. } => TaskKind::NonmarkovSweep,
            TaskConfig::UncertaintySurface { .. } => TaskKind::UncertaintySurface,
            TaskConfig::WmrSweep { .. } => TaskKind::WmrSweep,
            TaskConfig::Figure { .. } => TaskKind::Figure,
        }
    }

    /// Canonical JSON rendering; the same document parses back to `self`.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("config serializes")
    }

    /// SHA-256 over the canonical rendering minus the output path: the hash
    /// identifies the computation, so the same data written to two
    /// destinations carries the same provenance line.
    pub fn sha256(&self) -> String {
        let mut raw = self.to_raw();
        raw.output = None;
        let text = serde_json::to_string_pretty(&raw).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_raw(&self) -> RawConfig {
        let (kind, gamma) = match self.model.kind {
            ReservoirKind::Lorentzian => ("lorentzian", self.model.gamma),
            ReservoirKind::Memoryless => ("memoryless", None),
        };
        let task = match self.task {
            TaskConfig::GammaCurve { method } => RawTask {
                kind: Some("gamma-curve".into()),
                method: Some(method.name().into()),
                ..RawTask::default()
            },
            TaskConfig::Series => RawTask {
                kind: Some("series".into()),
                ..RawTask::default()
            },
            TaskConfig::NonmarkovSweep { sweep } => RawTask {
                kind: Some("nonmarkov-sweep".into()),
                sweep: Some(RawSweep {
                    axis: Some(sweep.axis.name().into()),
                    min: Some(sweep.min),
                    max: Some(sweep.max),
                    points: Some(sweep.points),
                    log: Some(sweep.log),
                }),
                ..RawTask::default()
            },
            TaskConfig::UncertaintySurface {
                t,
                theta_points,
                phi_points,
            } => RawTask {
                kind: Some("uncertainty-surface".into()),
                t: Some(t),
                theta_points: Some(theta_points),
                phi_points: Some(phi_points),
                ..RawTask::default()
            },
            TaskConfig::WmrSweep { t, m } => RawTask {
                kind: Some("wmr-sweep".into()),
                t: Some(t),
                m: Some(RawLinearGrid {
                    min: Some(m.min),
                    max: Some(m.max),
                    points: Some(m.points),
                }),
                ..RawTask::default()
            },
            TaskConfig::Figure {
                id,
                t,
                theta_points,
                phi_points,
                m,
            } => RawTask {
                kind: Some("figure".into()),
                figure: Some(id),
                t: Some(t),
                theta_points: Some(theta_points),
                phi_points: Some(phi_points),
                m: Some(RawLinearGrid {
                    min: Some(m.min),
                    max: Some(m.max),
                    points: Some(m.points),
                }),
                ..RawTask::default()
            },
        };
        RawConfig {
            model: Some(RawModel {
                omega: Some(self.model.omega),
                theta: Some(self.model.theta),
                reservoir: Some(RawReservoir {
                    kind: Some(kind.into()),
                    gamma,
                }),
            }),
            initial: Some(RawInitial {
                theta: Some(self.initial.theta),
                phi: Some(self.initial.phi),
            }),
            grid: Some(RawGrid {
                t_max: Some(self.grid.t_max),
                dt: None,
                n_points: Some(self.grid.n_points),
            }),
            task: Some(task),
            output: Some(self.output.display().to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing and validation
// ---------------------------------------------------------------------------

/// Apply `key=value` overrides onto the JSON tree. Values parse as JSON
/// scalars where possible and fall back to strings.
pub fn apply_sets(doc: &mut serde_json::Value, sets: &[String]) -> Result<()> {
    for entry in sets {
        let (path, value) = entry.split_once('=').ok_or_else(|| {
            AppError::Config(format!("--set `{entry}` is not of the form key=value"))
        })?;
        if path.is_empty() {
            return Err(AppError::Config(format!(
                "--set `{entry}` has an empty key"
            )));
        }
        let parsed: serde_json::Value = serde_json::from_str(value)
            .unwrap_or_else(|_| serde_json::Value::String(value.to_string()));
        let mut node = &mut *doc;
        let segments: Vec<&str> = path.split('.').collect();
        for (i, segment) in segments.iter().enumerate() {
            let serde_json::Value::Object(map) = node else {
                return Err(AppError::Config(format!(
                    "--set {path}: `{}` is not an object",
                    segments[..i].join(".")
                )));
            };
            if i + 1 == segments.len() {
                map.insert((*segment).to_string(), parsed.clone());
                break;
            }
            node = map
                .entry((*segment).to_string())
                .or_insert_with(|| serde_json::Value::Object(Default::default()));
        }
    }
    Ok(())
}

/// Parse a complete JSON document (task type included) into a validated run.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| AppError::Config(format!("malformed JSON: {e}")))?;
    parse_config_value(doc)
}

/// Parse a JSON tree into a validated run.
pub fn parse_config_value(doc: serde_json::Value) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_value(doc)
        .map_err(|e| AppError::Config(format!("invalid config: {e}")))?;
    validate(raw)
}

fn require_finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(AppError::Config(format!("{name}: {value} is not finite")))
    }
}

pub fn validate(raw: RawConfig) -> Result<RunConfig> {
    let kind_name = raw
        .task
        .as_ref()
        .and_then(|t| t.kind.clone())
        .ok_or_else(|| AppError::Config("task.type is required".into()))?;
    let kind = TaskKind::from_name(&kind_name)?;

    // -- model ---------------------------------------------------------
    let raw_model = raw.model.clone().unwrap_or_default();
    let omega = require_finite("model.omega", raw_model.omega.unwrap_or(1.0))?;
    if omega <= 0.0 {
        return Err(AppError::Config(format!(
            "model.omega: {omega} must be > 0"
        )));
    }
    let theta = require_finite("model.theta", raw_model.theta.unwrap_or(1.0))?;
    if theta < 0.0 {
        return Err(AppError::Config(format!(
            "model.theta: {theta} must be >= 0"
        )));
    }
    let reservoir_given = raw_model.reservoir.is_some();
    let raw_reservoir = raw_model.reservoir.unwrap_or_default();
    let kind_str = raw_reservoir
        .kind
        .clone()
        .unwrap_or_else(|| "lorentzian".into());
    let (reservoir_kind, gamma) = match kind_str.as_str() {
        "lorentzian" => {
            let gamma =
                require_finite("model.reservoir.gamma", raw_reservoir.gamma.unwrap_or(1.0))?;
            if gamma <= 0.0 {
                return Err(AppError::Config(format!(
                    "model.reservoir.gamma: {gamma} must be > 0"
                )));
            }
            (ReservoirKind::Lorentzian, Some(gamma))
        }
        "memoryless" => {
            if raw_reservoir.gamma.is_some() {
                return Err(AppError::Config(
                    "model.reservoir.gamma: not allowed for a memoryless reservoir".into(),
                ));
            }
            (ReservoirKind::Memoryless, None)
        }
        other => {
            return Err(AppError::Config(format!(
                "model.reservoir.kind: unknown kind `{other}` (lorentzian | memoryless)"
            )))
        }
    };
    let model = ModelSection {
        omega,
        theta,
        kind: reservoir_kind,
        gamma,
    };

    // -- initial state ---------------------------------------------------
    let raw_initial = raw.initial.unwrap_or_default();
    let initial = InitialSection {
        theta: require_finite(
            "initial.theta",
            raw_initial.theta.unwrap_or(DEFAULT_THETA_ANGLE),
        )?,
        phi: require_finite("initial.phi", raw_initial.phi.unwrap_or(DEFAULT_PHI))?,
    };

    // -- grid -------------------------------------------------------------
    let raw_grid = raw.grid.unwrap_or_default();
    let t_max = require_finite("grid.t_max", raw_grid.t_max.unwrap_or(DEFAULT_T_MAX))?;
    if t_max <= 0.0 {
        return Err(AppError::Config(format!("grid.t_max: {t_max} must be > 0")));
    }
    let n_points = match (raw_grid.dt, raw_grid.n_points) {
        (Some(_), Some(_)) => {
            return Err(AppError::Config(
                "grid: dt and n_points are mutually exclusive".into(),
            ))
        }
        (None, Some(n)) => {
            if n < 2 {
                return Err(AppError::Config(format!("grid.n_points: {n} must be >= 2")));
            }
            n
        }
        (dt, None) => {
            let dt = require_finite("grid.dt", dt.unwrap_or(DEFAULT_DT))?;
            if dt <= 0.0 {
                return Err(AppError::Config(format!("grid.dt: {dt} must be > 0")));
            }
            let intervals = (t_max / dt).round();
            if !(1.0..=2e7).contains(&intervals) {
                return Err(AppError::Config(format!(
                    "grid: t_max/dt = {intervals} out of range"
                )));
            }
            intervals as usize + 1
        }
    };
    let grid = GridSection { t_max, n_points };

    // -- task ----------------------------------------------------------
    let raw_task = raw.task.unwrap_or_default();
    let task = match kind {
        TaskKind::GammaCurve => {
            let method = match raw_task.method.as_deref().unwrap_or("auto") {
                "auto" => MethodChoice::Auto,
                "analytic" => MethodChoice::Analytic,
                "memoryless" => MethodChoice::Memoryless,
                "oracle" => MethodChoice::Oracle,
                other => {
                    return Err(AppError::Config(format!(
                        "task.method: unknown method `{other}`"
                    )))
                }
            };
            match (method, reservoir_kind) {
                (MethodChoice::Analytic | MethodChoice::Oracle, ReservoirKind::Memoryless) => {
                    return Err(AppError::Config(format!(
                        "task.method: `{}` requires a lorentzian reservoir",
                        method.name()
                    )))
                }
                (MethodChoice::Memoryless, ReservoirKind::Lorentzian) => {
                    return Err(AppError::Config(
                        "task.method: `memoryless` requires a memoryless reservoir".into(),
                    ))
                }
                _ => {}
            }
            TaskConfig::GammaCurve { method }
        }
        TaskKind::Series => TaskConfig::Series,
        TaskKind::NonmarkovSweep => {
            let raw_sweep = raw_task.sweep.unwrap_or_default();
            let axis = match raw_sweep.axis.as_deref().unwrap_or("gamma-ratio") {
                "gamma-ratio" => SweepAxis::GammaRatio,
                "omega-theta-ratio" => SweepAxis::OmegaThetaRatio,
                other => {
                    return Err(AppError::Config(format!(
                        "task.sweep.axis: unknown axis `{other}`"
                    )))
                }
            };
            match (axis, reservoir_kind) {
                (SweepAxis::GammaRatio, ReservoirKind::Memoryless) => {
                    return Err(AppError::Config(
                        "task.sweep.axis: gamma-ratio requires a lorentzian reservoir".into(),
                    ))
                }
                (SweepAxis::OmegaThetaRatio, ReservoirKind::Lorentzian) => {
                    return Err(AppError::Config(
                        "task.sweep.axis: omega-theta-ratio requires a memoryless reservoir".into(),
                    ))
                }
                _ => {}
            }
            let (def_min, def_max, def_points, def_log) = match axis {
                SweepAxis::GammaRatio => (0.1, 100.0, 30, true),
                SweepAxis::OmegaThetaRatio => (0.05, 1.0, 96, false),
            };
            let min = require_finite("task.sweep.min", raw_sweep.min.unwrap_or(def_min))?;
            let max = require_finite("task.sweep.max", raw_sweep.max.unwrap_or(def_max))?;
            let points = raw_sweep.points.unwrap_or(def_points);
            let log = raw_sweep.log.unwrap_or(def_log);
            if min.is_nan() || max.is_nan() || min >= max {
                return Err(AppError::Config(format!(
                    "task.sweep: min {min} must be < max {max}"
                )));
            }
            if log && min <= 0.0 {
                return Err(AppError::Config(
                    "task.sweep: log spacing needs min > 0".into(),
                ));
            }
            if min <= 0.0 {
                return Err(AppError::Config(
                    "task.sweep.min: ratios must be > 0".into(),
                ));
            }
            if points < 2 {
                return Err(AppError::Config(format!(
                    "task.sweep.points: {points} must be >= 2"
                )));
            }
            if grid.dt() > cavern_core::nonmarkov::MAX_DT + 1e-15 {
                return Err(AppError::Config(format!(
                    "grid.dt: {} too coarse for the backflow measure (max {})",
                    grid.dt(),
                    cavern_core::nonmarkov::MAX_DT
                )));
            }
            TaskConfig::NonmarkovSweep {
                sweep: SweepConfig {
                    axis,
                    min,
                    max,
                    points,
                    log,
                },
            }
        }
        TaskKind::UncertaintySurface => {
            let t = require_finite("task.t", raw_task.t.unwrap_or(10.0))?;
            if t < 0.0 {
                return Err(AppError::Config(format!("task.t: {t} must be >= 0")));
            }
            let theta_points = raw_task.theta_points.unwrap_or(61);
            let phi_points = raw_task.phi_points.unwrap_or(61);
            if theta_points < 2 || phi_points < 2 {
                return Err(AppError::Config(
                    "task.theta_points / task.phi_points must be >= 2".into(),
                ));
            }
            TaskConfig::UncertaintySurface {
                t,
                theta_points,
                phi_points,
            }
        }
        TaskKind::WmrSweep => {
            // the evaluation time and the reservoir variant shape the result
            // decisively, so they must be spelled out
            let t = raw_task.t.ok_or_else(|| {
                AppError::Config("task.t: required for wmr-sweep (evaluation time)".into())
            })?;
            let t = require_finite("task.t", t)?;
            if t < 0.0 {
                return Err(AppError::Config(format!("task.t: {t} must be >= 0")));
            }
            if !reservoir_given {
                return Err(AppError::Config(
                    "model.reservoir: must be explicit for wmr-sweep".into(),
                ));
            }
            let m = validate_m_grid(raw_task.m.unwrap_or_default())?;
            TaskConfig::WmrSweep { t, m }
        }
        TaskKind::Figure => {
            let id = raw_task
                .figure
                .ok_or_else(|| AppError::Config("task.figure: figure id is required".into()))?;
            if !(2..=8).contains(&id) {
                return Err(AppError::Config(format!(
                    "task.figure: {id} out of range (figures 2..8 only)"
                )));
            }
            // figures 3 and 4 compute the backflow measure on config.grid
            if (id == 3 || id == 4) && grid.dt() > cavern_core::nonmarkov::MAX_DT + 1e-15 {
                return Err(AppError::Config(format!(
                    "grid.dt: {} too coarse for the backflow sweep of figure {id} (max {})",
                    grid.dt(),
                    cavern_core::nonmarkov::MAX_DT
                )));
            }
            let t = require_finite("task.t", raw_task.t.unwrap_or(10.0))?;
            if t < 0.0 {
                return Err(AppError::Config(format!("task.t: {t} must be >= 0")));
            }
            let theta_points = raw_task.theta_points.unwrap_or(61);
            let phi_points = raw_task.phi_points.unwrap_or(61);
            if theta_points < 2 || phi_points < 2 {
                return Err(AppError::Config(
                    "task.theta_points / task.phi_points must be >= 2".into(),
                ));
            }
            let m = validate_m_grid(raw_task.m.unwrap_or_default())?;
            TaskConfig::Figure {
                id,
                t,
                theta_points,
                phi_points,
                m,
            }
        }
    };

    let output = PathBuf::from(raw.output.unwrap_or_else(|| default_output(kind)));
    if output.as_os_str().is_empty() {
        return Err(AppError::Config("output: must not be empty".into()));
    }

    Ok(RunConfig {
        model,
        initial,
        grid,
        task,
        output,
    })
}

fn validate_m_grid(raw: RawLinearGrid) -> Result<LinearGrid> {
    let min = require_finite("task.m.min", raw.min.unwrap_or(0.0))?;
    let max = require_finite("task.m.max", raw.max.unwrap_or(1.0))?;
    let points = raw.points.unwrap_or(101);
    if !(0.0..=1.0).contains(&min) || !(0.0..=1.0).contains(&max) || min.is_nan() || min >= max {
        return Err(AppError::Config(format!(
            "task.m: [{min}, {max}] must satisfy 0 <= min < max <= 1"
        )));
    }
    if points < 2 {
        return Err(AppError::Config(format!(
            "task.m.points: {points} must be >= 2"
        )));
    }
    Ok(LinearGrid { min, max, points })
}

fn default_output(kind: TaskKind) -> String {
    format!("{}.csv", kind.name())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> serde_json::Value {
        serde_json::from_str(text).unwrap()
    }

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config(r#"{"task": {"type": "series"}}"#).unwrap();
        assert_eq!(cfg.grid.t_max, DEFAULT_T_MAX);
        assert_eq!(cfg.grid.n_points, 100_001);
        assert!((cfg.grid.dt() - DEFAULT_DT).abs() < 1e-12);
        assert_eq!(cfg.model.omega, 1.0);
        assert_eq!(cfg.model.kind, ReservoirKind::Lorentzian);
        assert_eq!(cfg.initial.theta, DEFAULT_THETA_ANGLE);
        assert_eq!(cfg.output, PathBuf::from("series.csv"));
    }

    #[test]
    fn rejects_nonpositive_gamma_with_field_path() {
        let err = parse_config(
            r#"{"task": {"type": "series"},
                "model": {"reservoir": {"kind": "lorentzian", "gamma": -1.0}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("model.reservoir.gamma"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn rejects_out_of_range_figure() {
        let err = parse_config(r#"{"task": {"type": "figure", "figure": 9}}"#).unwrap_err();
        assert!(err.to_string().contains("task.figure"), "{err}");
        let err = parse_config(r#"{"task": {"type": "figure", "figure": 1}}"#).unwrap_err();
        assert!(err.to_string().contains("task.figure"), "{err}");
    }

    #[test]
    fn rejects_unknown_fields() {
        let err = parse_config(r#"{"task": {"type": "series"}, "modle": {}}"#).unwrap_err();
        assert!(err.to_string().contains("modle"), "{err}");
        let err =
            parse_config(r#"{"task": {"type": "series"}, "model": {"omga": 2.0}}"#).unwrap_err();
        assert!(err.to_string().contains("omga"), "{err}");
    }

    #[test]
    fn rejects_conflicting_grid_spec() {
        let err = parse_config(
            r#"{"task": {"type": "series"}, "grid": {"t_max": 1.0, "dt": 0.1, "n_points": 5}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("mutually exclusive"), "{err}");
    }

    #[test]
    fn wmr_sweep_requires_explicit_time_and_reservoir() {
        let err = parse_config(
            r#"{"task": {"type": "wmr-sweep"},
                "model": {"reservoir": {"kind": "memoryless"}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("task.t"), "{err}");

        let err = parse_config(r#"{"task": {"type": "wmr-sweep", "t": 10.0}}"#).unwrap_err();
        assert!(err.to_string().contains("model.reservoir"), "{err}");

        let cfg = parse_config(
            r#"{"task": {"type": "wmr-sweep", "t": 10.0},
                "model": {"theta": 3.0, "reservoir": {"kind": "memoryless"}}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.task, TaskConfig::WmrSweep { t, .. } if t == 10.0));
    }

    #[test]
    fn memoryless_reservoir_must_not_carry_gamma() {
        let err = parse_config(
            r#"{"task": {"type": "series"},
                "model": {"reservoir": {"kind": "memoryless", "gamma": 3.0}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("not allowed"), "{err}");
    }

    #[test]
    fn method_compatibility() {
        let err = parse_config(r#"{"task": {"type": "gamma-curve", "method": "memoryless"}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("task.method"), "{err}");
        let err = parse_config(
            r#"{"task": {"type": "gamma-curve", "method": "analytic"},
                "model": {"reservoir": {"kind": "memoryless"}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("lorentzian"), "{err}");
    }

    #[test]
    fn sweep_axis_model_consistency() {
        let err = parse_config(
            r#"{"task": {"type": "nonmarkov-sweep",
                          "sweep": {"axis": "omega-theta-ratio"}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("memoryless"), "{err}");

        let cfg = parse_config(
            r#"{"task": {"type": "nonmarkov-sweep"},
                "model": {"reservoir": {"kind": "lorentzian", "gamma": 1.0}}}"#,
        )
        .unwrap();
        match cfg.task {
            TaskConfig::NonmarkovSweep { sweep } => {
                assert_eq!(sweep.axis, SweepAxis::GammaRatio);
                assert_eq!(sweep.points, 30);
                assert!(sweep.log);
            }
            _ => panic!("wrong task"),
        }
    }

    #[test]
    fn set_overrides_reach_the_tree() {
        let mut value = doc(r#"{"task": {"type": "series"}}"#);
        apply_sets(
            &mut value,
            &[
                "model.omega=2.5".to_string(),
                "model.reservoir.kind=memoryless".to_string(),
                "grid.n_points=11".to_string(),
                "grid.t_max=5.0".to_string(),
            ],
        )
        .unwrap();
        let cfg = parse_config_value(value).unwrap();
        assert_eq!(cfg.model.omega, 2.5);
        assert_eq!(cfg.model.kind, ReservoirKind::Memoryless);
        assert_eq!(cfg.grid.n_points, 11);
    }

    #[test]
    fn set_rejects_malformed_entries() {
        let mut value = doc("{}");
        assert!(apply_sets(&mut value, &["oops".to_string()]).is_err());
        assert!(apply_sets(&mut value, &["=3".to_string()]).is_err());
    }

    #[test]
    fn round_trip_through_canonical_json() {
        for text in [
            r#"{"task": {"type": "series"}}"#,
            r#"{"task": {"type": "gamma-curve", "method": "oracle"}}"#,
            r#"{"task": {"type": "nonmarkov-sweep"}, "grid": {"t_max": 50.0}}"#,
            r#"{"task": {"type": "uncertainty-surface", "t": 7.5},
                "model": {"theta": 0.15, "reservoir": {"kind": "memoryless"}}}"#,
            r#"{"task": {"type": "wmr-sweep", "t": 10.0},
                "model": {"reservoir": {"kind": "memoryless"}}}"#,
            r#"{"task": {"type": "figure", "figure": 6},
                "model": {"theta": 0.15, "reservoir": {"kind": "memoryless"}}}"#,
        ] {
            let cfg = parse_config(text).unwrap();
            let reparsed = parse_config(&cfg.to_canonical_json()).unwrap();
            assert_eq!(cfg, reparsed);
            // and hashing is stable
            assert_eq!(cfg.sha256(), reparsed.sha256());
        }
    }

    #[test]
    fn sweep_values_are_sorted_and_spaced() {
        let sweep = SweepConfig {
            axis: SweepAxis::GammaRatio,
            min: 0.1,
            max: 100.0,
            points: 30,
            log: true,
        };
        let v = sweep.values();
        assert_eq!(v.len(), 30);
        assert!((v[0] - 0.1).abs() < 1e-15);
        assert!((v[29] - 100.0).abs() < 1e-12);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        // log spacing: constant ratio
        let r0 = v[1] / v[0];
        for w in v.windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-9);
        }
    }
}
