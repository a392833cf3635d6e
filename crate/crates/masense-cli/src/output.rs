//! Deterministic CSV and JSON artifact emission, plus trajectory-file
//! reading for commands that evaluate a previously designed trajectory.
//!
//! CSV layout: one `# masense <kind> v1` version line, a header line, then
//! comma-separated data with floats in scientific notation at 17 significant
//! digits so every f64 round-trips exactly.

use std::fs;
use std::path::{Path, PathBuf};

use masense_core::model::{SensingConfig, Trajectory1D, Trajectory2D};
use serde::Serialize;
use serde_json::Value;

use crate::config::{CliError, OutputFormat};

/// One CSV cell; `Empty` encodes positions a column does not define, such
/// as the velocity of the final snapshot.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Empty,
}

impl Cell {
    fn to_json(self) -> Value {
        match self {
            Cell::Int(i) => Value::from(i),
            Cell::Num(x) => Value::from(x),
            Cell::Empty => Value::Null,
        }
    }
}

/// 17 significant digits: enough to round-trip an f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One tabular artifact: a versioned kind tag, a header, and data rows.
pub struct DataArtifact {
    pub kind: &'static str,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

fn render_csv(artifact: &DataArtifact) -> String {
    let mut out = String::new();
    out.push_str("# masense ");
    out.push_str(artifact.kind);
    out.push_str(" v1\n");
    out.push_str(&artifact.header.join(","));
    out.push('\n');
    for row in &artifact.rows {
        let mut first = true;
        for cell in row {
            if !first {
                out.push(',');
            }
            first = false;
            match cell {
                Cell::Int(i) => out.push_str(&i.to_string()),
                Cell::Num(x) => out.push_str(&fmt_float(*x)),
                Cell::Empty => {}
            }
        }
        out.push('\n');
    }
    out
}

fn table_json(artifact: &DataArtifact) -> Value {
    serde_json::json!({
        "columns": artifact.header,
        "rows": artifact
            .rows
            .iter()
            .map(|row| row.iter().map(|c| c.to_json()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("write {}: {e}", path.display())))
}

fn to_pretty(value: &impl Serialize) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Io(format!("encode JSON: {e}")))
}

/// `run.csv` -> `run.<suffix>`, keeping the directory. Used for the JSON
/// report and any extra tables that ride along with the main CSV.
fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Writes a data-producing command's artifacts.
///
/// csv format: the main table at `out`, each extra table at
/// `<stem>.<name>.csv`, and the report at `<stem>.report.json`.
/// json format: a single document at `out` with the report fields plus
/// `data` (and `tables` when extra tables exist).
pub fn emit_data(
    out: &Path,
    format: OutputFormat,
    main: &DataArtifact,
    tables: &[(&'static str, DataArtifact)],
    mut report: Value,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => {
            write_text(out, &render_csv(main))?;
            for (name, table) in tables {
                write_text(&sidecar(out, &format!("{name}.csv")), &render_csv(table))?;
            }
            write_text(&sidecar(out, "report.json"), &to_pretty(&report)?)
        }
        OutputFormat::Json => {
            let obj = report.as_object_mut().expect("reports are JSON objects");
            obj.insert("data".to_string(), table_json(main));
            if !tables.is_empty() {
                let mut map = serde_json::Map::new();
                for (name, table) in tables {
                    map.insert((*name).to_string(), table_json(table));
                }
                obj.insert("tables".to_string(), Value::Object(map));
            }
            write_text(out, &to_pretty(&report)?)
        }
    }
}

/// Writes a report-only command's JSON to `out`, or to standard output when
/// no path was given.
pub fn emit_report(out: Option<&Path>, report: &Value) -> Result<(), CliError> {
    let text = to_pretty(report)?;
    match out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("read {}: {e}", path.display())))?;
    let mut lines = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("{}: no header line", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        let cells = line
            .split(',')
            .map(|c| {
                let c = c.trim();
                if c.is_empty() {
                    Ok(None)
                } else {
                    c.parse::<f64>()
                        .map(Some)
                        .map_err(|_| CliError::Config(format!("bad numeric cell `{c}`")))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if cells.len() != header.len() {
            return Err(CliError::Config(format!(
                "{}: row width disagrees with header",
                path.display()
            )));
        }
        rows.push(cells);
    }
    Ok((header, rows))
}

fn column(
    header: &[String],
    rows: &[Vec<Option<f64>>],
    name: &str,
) -> Result<Vec<Option<f64>>, CliError> {
    let idx = header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Config(format!("trajectory file lacks column {name}")))?;
    Ok(rows.iter().map(|r| r[idx]).collect())
}

fn dense(col: Vec<Option<f64>>, name: &str) -> Result<Vec<f64>, CliError> {
    col.into_iter()
        .map(|c| c.ok_or_else(|| CliError::Config(format!("column {name} has empty cells"))))
        .collect()
}

/// Velocity columns have one empty trailing cell (no velocity leaves the
/// final snapshot); empties anywhere else are malformed.
fn velocity(col: Vec<Option<f64>>, name: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::with_capacity(col.len().saturating_sub(1));
    let mut ended = false;
    for cell in col {
        match cell {
            Some(v) if !ended => values.push(v),
            None => ended = true,
            Some(_) => {
                return Err(CliError::Config(format!("column {name}: value after an empty cell")))
            }
        }
    }
    Ok(values)
}

pub fn read_traj1d(path: &Path, cfg: &SensingConfig) -> Result<Trajectory1D, CliError> {
    let (header, rows) = read_table(path)?;
    let x = dense(column(&header, &rows, "x_n")?, "x_n")?;
    let v = velocity(column(&header, &rows, "v_n")?, "v_n")?;
    Ok(Trajectory1D::new(x, v, cfg)?)
}

pub fn read_traj2d(path: &Path, cfg: &SensingConfig) -> Result<Trajectory2D, CliError> {
    let (header, rows) = read_table(path)?;
    let x = dense(column(&header, &rows, "x_n")?, "x_n")?;
    let y = dense(column(&header, &rows, "y_n")?, "y_n")?;
    let vx = velocity(column(&header, &rows, "vx_n")?, "vx_n")?;
    let vy = velocity(column(&header, &rows, "vy_n")?, "vy_n")?;
    Ok(Trajectory2D::new(x, y, vx, vy, cfg)?)
}
