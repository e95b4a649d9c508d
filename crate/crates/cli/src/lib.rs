//! Library side of the `cavern` command-line tool: configuration,
//! task execution, and deterministic emission. The binary in `main.rs` is a
//! thin argument-parsing shell over these modules.

pub mod config;
pub mod emit;
pub mod error;
pub mod figures;
pub mod tasks;

use std::path::{Path, PathBuf};

pub use config::{parse_config, parse_config_value, RunConfig, TaskKind};
pub use emit::{render_csv, render_json, write_table, Table};
pub use error::{AppError, Result};
pub use tasks::{run_task, Panel};

/// Output path for a panel: `out.csv` + suffix `a` gives `out_a.csv`.
pub fn panel_path(base: &Path, suffix: Option<&str>) -> PathBuf {
    match suffix {
        None => base.to_path_buf(),
        Some(suffix) => {
            let stem = base
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let ext = base
                .extension()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "csv".into());
            base.with_file_name(format!("{stem}_{suffix}.{ext}"))
        }
    }
}

/// Run a validated configuration and write every panel. Returns the paths
/// written, in emission order.
pub fn execute(config: &RunConfig, json_mirror: bool) -> Result<Vec<PathBuf>> {
    let panels = run_task(config)?;
    let mut written = Vec::with_capacity(panels.len());
    for panel in &panels {
        let path = panel_path(&config.output, panel.suffix);
        emit::write_table(&path, &panel.table, json_mirror)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_paths() {
        assert_eq!(
            panel_path(Path::new("out/figure2.csv"), Some("a")),
            PathBuf::from("out/figure2_a.csv")
        );
        assert_eq!(
            panel_path(Path::new("series.csv"), None),
            PathBuf::from("series.csv")
        );
        assert_eq!(
            panel_path(Path::new("data"), Some("b")),
            PathBuf::from("data_b.csv")
        );
    }
}
