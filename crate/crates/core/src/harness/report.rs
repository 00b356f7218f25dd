use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::sweep::ScenarioResult;
use crate::error::{Error, Result};

pub const CSV_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const PLOT_FILE: &str = "plot.gp";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
    /// gnuplot script drawing the CSV.
    Plot,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "plot" => Ok(ReportFormat::Plot),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub wall_time_s: f64,
    pub results_csv: String,
}

impl RunManifest {
    pub fn new(config: RunConfig, wall_time_s: f64) -> Self {
        Self {
            tool: "relay-sim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            wall_time_s,
            results_csv: CSV_FILE.into(),
        }
    }
}

pub fn write_csv(results: &[ScenarioResult], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in results {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// gnuplot script with one curve per strategy, sweep value on x and mean rate on y.
pub fn plot_script(results: &[ScenarioResult]) -> String {
    let mut strategies = Vec::new();
    for r in results {
        if !strategies.contains(&r.strategy) {
            strategies.push(r.strategy);
        }
    }
    let xlabel = results.first().map_or("sweep value", |r| r.sweep_var.tag());
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot {PLOT_FILE}");
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output \"rates.png\"");
    let _ = writeln!(s, "set xlabel \"{xlabel}\"");
    let _ = writeln!(s, "set ylabel \"average end-to-end rate (bits/s/Hz)\"");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set key outside right");
    let curves: Vec<String> = strategies
        .iter()
        .map(|st| {
            format!(
                "\"{CSV_FILE}\" every ::1 using 3:(strcol(1) eq \"{st}\" ? $4 : 1/0) with linespoints title \"{st}\""
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    s
}

/// Writes the requested artifacts into `out_dir`, creating it if needed.
pub fn emit_report(
    results: &[ScenarioResult],
    out_dir: &Path,
    formats: &[ReportFormat],
    manifest: &RunManifest,
) -> Result<Vec<PathBuf>> {
    if results.is_empty() {
        return Err(Error::Config("nothing to report".into()));
    }
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for format in formats {
        let path = match format {
            ReportFormat::Csv => {
                let p = out_dir.join(CSV_FILE);
                write_csv(results, &p)?;
                p
            }
            ReportFormat::Json => {
                let p = out_dir.join(MANIFEST_FILE);
                let text = serde_json::to_string_pretty(manifest).map_err(|e| Error::Io(e.into()))?;
                fs::write(&p, text + "\n")?;
                p
            }
            ReportFormat::Plot => {
                let p = out_dir.join(PLOT_FILE);
                fs::write(&p, plot_script(results))?;
                p
            }
        };
        written.push(path);
    }
    Ok(written)
}
