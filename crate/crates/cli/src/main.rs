use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cavern_cli::config::{apply_sets, parse_config_value, TaskKind};
use cavern_cli::error::AppError;
use cavern_cli::figures;

/// Decoherence, non-Markovianity and entropic-uncertainty datasets for an
/// atom coupled to a lossy cavity in a Lorentzian reservoir.
#[derive(Parser)]
#[command(name = "cavern", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file; omitted sections take documented defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output CSV path (panels of multi-panel figures get `_a`, `_b`, ...).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for parameter sweeps (default: all cores). The output
    /// bytes do not depend on this.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Override a config field, e.g. --set model.omega=2.0 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Also write each table as a JSON array next to the CSV.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the decoherence function on a time grid.
    GammaCurve,
    /// Joint time series: decoherence, trace distance, purity, entropic sum.
    Series,
    /// Backflow measure N over a coupling-ratio sweep.
    NonmarkovSweep,
    /// Entropic sum over the initial-state angles at a fixed time.
    UncertaintySurface,
    /// Entropic sum against weak-measurement strength at a fixed time.
    WmrSweep,
    /// Emit a bundled reference scenario (2..8), one CSV per panel.
    Figure {
        /// Scenario id.
        id: u8,
    },
}

impl Command {
    fn task_kind(&self) -> TaskKind {
        match self {
            Command::GammaCurve => TaskKind::GammaCurve,
            Command::Series => TaskKind::Series,
            Command::NonmarkovSweep => TaskKind::NonmarkovSweep,
            Command::UncertaintySurface => TaskKind::UncertaintySurface,
            Command::WmrSweep => TaskKind::WmrSweep,
            Command::Figure { .. } => TaskKind::Figure,
        }
    }
}

fn merge(base: &mut serde_json::Value, overlay: serde_json::Value) {
    match (base, overlay) {
        (serde_json::Value::Object(base_map), serde_json::Value::Object(overlay_map)) => {
            for (key, value) in overlay_map {
                match base_map.get_mut(&key) {
                    Some(slot) if slot.is_object() && value.is_object() => merge(slot, value),
                    _ => {
                        base_map.insert(key, value);
                    }
                }
            }
        }
        (base_slot, overlay) => *base_slot = overlay,
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    // Assemble the document: figure preset (if any) <- config file <- --set,
    // with the subcommand pinning the task type.
    let mut doc = match &cli.command {
        Command::Figure { id } => figures::preset_document(*id),
        _ => serde_json::json!({}),
    };
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|source| AppError::Io {
            path: path.clone(),
            source,
        })?;
        let user: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| AppError::Config(format!("malformed JSON in {}: {e}", path.display())))?;
        merge(&mut doc, user);
    }
    apply_sets(&mut doc, &cli.set)?;

    let kind = cli.command.task_kind();
    let task_slot = doc
        .as_object_mut()
        .expect("document root is an object")
        .entry("task")
        .or_insert_with(|| serde_json::json!({}));
    if !task_slot.is_object() {
        return Err(AppError::Config("task: must be an object".into()));
    }
    let task_map = task_slot.as_object_mut().expect("checked above");
    match task_map.get("type").and_then(|v| v.as_str()) {
        None => {
            task_map.insert("type".into(), serde_json::json!(kind.name()));
        }
        Some(existing) if existing == kind.name() => {}
        Some(existing) => {
            return Err(AppError::Config(format!(
                "task.type `{existing}` conflicts with subcommand `{}`",
                kind.name()
            )));
        }
    }
    if let Command::Figure { id } = &cli.command {
        task_map.insert("figure".into(), serde_json::json!(id));
    }
    if let Some(out) = &cli.out {
        doc.as_object_mut()
            .expect("document root is an object")
            .insert(
                "output".into(),
                serde_json::json!(out.display().to_string()),
            );
    }

    let config = parse_config_value(doc)?;

    let written = match cli.workers {
        Some(workers) => {
            if workers == 0 {
                return Err(AppError::Config("--workers must be >= 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| AppError::Config(format!("worker pool: {e}")))?;
            pool.install(|| cavern_cli::execute(&config, cli.json))?
        }
        None => cavern_cli::execute(&config, cli.json)?,
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
