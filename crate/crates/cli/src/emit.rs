//! Deterministic table emission: CSV with metadata lines, optional JSON
//! mirror, atomic write-then-rename.

use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use crate::error::{AppError, Result};

/// One output table: named columns, rows of floats, and provenance lines
/// that end up as `#`-prefixed metadata above the header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// 17 significant digits, `.` decimal separator; negative zero normalized.
pub fn format_value(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

/// Render the CSV bytes: `#` metadata lines, one header row, data rows,
/// `\n` line endings throughout.
pub fn render_csv(table: &Table) -> String {
    let mut out = String::new();
    for (key, value) in &table.meta {
        out.push_str("# ");
        out.push_str(key);
        out.push_str(": ");
        out.push_str(value);
        out.push('\n');
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let mut first = true;
        for &x in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format_value(x));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Render the rows as a JSON array of `{column: value}` objects.
pub fn render_json(table: &Table) -> String {
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|row| {
            let map: serde_json::Map<String, serde_json::Value> = table
                .columns
                .iter()
                .zip(row)
                .map(|(c, &x)| (c.clone(), serde_json::json!(x)))
                .collect();
            serde_json::Value::Object(map)
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::Value::Array(rows)).expect("rows serialize")
}

/// Write bytes through a same-directory temporary file and rename, so a
/// failed run leaves no partial output.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".{}.tmp", process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|source| AppError::Io {
        path: tmp.clone(),
        source,
    })?;
    fs::rename(&tmp, path).map_err(|source| {
        let _ = fs::remove_file(&tmp);
        AppError::Io {
            path: path.to_path_buf(),
            source,
        }
    })?;
    Ok(())
}

/// Write the CSV, and a `.json` mirror of the rows when requested.
pub fn write_table(path: &Path, table: &Table, json_mirror: bool) -> Result<()> {
    write_atomic(path, &render_csv(table))?;
    if json_mirror {
        let json_path = path.with_extension("json");
        write_atomic(&json_path, &render_json(table))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_17_significant_digits() {
        assert_eq!(format_value(1.0), "1.0000000000000000e0");
        assert_eq!(format_value(0.0), "0.0000000000000000e0");
        assert_eq!(format_value(-0.0), "0.0000000000000000e0");
        assert_eq!(format_value(0.5), "5.0000000000000000e-1");
        assert_eq!(format_value(-123.456), "-1.2345600000000000e2");
        // round-trips through parse
        for &x in &[1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, 6.02e23] {
            let s = format_value(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["t".into(), "gamma".into()]);
        t.push_meta("tool", "cavern 0.1.0");
        t.push_row(vec![0.0, 1.0]);
        t.push_row(vec![0.5, -0.25]);
        let csv = render_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# tool: cavern 0.1.0");
        assert_eq!(lines[1], "t,gamma");
        assert_eq!(lines[2], "0.0000000000000000e0,1.0000000000000000e0");
        assert_eq!(lines[3], "5.0000000000000000e-1,-2.5000000000000000e-1");
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn json_mirror_layout() {
        let mut t = Table::new(vec!["m".into(), "S_xz".into()]);
        t.push_row(vec![0.0, 1.25]);
        let parsed: serde_json::Value = serde_json::from_str(&render_json(&t)).unwrap();
        assert_eq!(parsed[0]["m"], serde_json::json!(0.0));
        assert_eq!(parsed[0]["S_xz"], serde_json::json!(1.25));
    }

    #[test]
    fn atomic_write_leaves_no_temp_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "data\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "data\n");
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().contains("tmp"))
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        let err = write_atomic(Path::new("/nonexistent-dir-xyz/out.csv"), "x").unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
