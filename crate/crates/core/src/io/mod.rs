//! Config files, snapshots, CSV time series and run reports.

mod snapshot;
mod timeseries;

use std::fs;
use std::path::{Path, PathBuf};

pub use snapshot::{Snapshot, MAGIC, VERSION};
pub use timeseries::{emit_timeseries, read_timeseries, timeseries_csv, TimeseriesRow, HEADER};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, Outcome};

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// TOML with dotted keys (`grid.L = "8pi"`) or tables. Absent keys take
/// defaults; unknown keys are rejected. The result is validated.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|s| line_column(text, s.start))
            .unwrap_or((0, 0));
        Error::ConfigSyntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// `key = value` lines, one per entry, for machine consumption.
pub fn ledger_text(outcome: &Outcome) -> String {
    let mut out = String::new();
    for (k, v) in &outcome.values {
        out.push_str(&format!("{k} = {v}\n"));
    }
    for c in &outcome.checks {
        out.push_str(&format!("{}.measured = {:.12e}\n", c.name, c.measured));
        out.push_str(&format!("{}.tolerance = {}\n", c.name, c.tolerance));
        out.push_str(&format!("{}.pass = {}\n", c.name, c.passed));
    }
    out.push_str(&format!("all_pass = {}\n", outcome.passed()));
    out
}

/// Writes `report.txt`, `ledger.txt`, `timeseries.csv` (if any rows) and
/// the snapshots into `dir`. Returns the written paths.
pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let report = dir.join("report.txt");
    write_atomic(&report, outcome.report.as_bytes())?;
    written.push(report);
    let ledger = dir.join("ledger.txt");
    write_atomic(&ledger, ledger_text(outcome).as_bytes())?;
    written.push(ledger);
    if !outcome.timeseries.is_empty() {
        let p = dir.join("timeseries.csv");
        emit_timeseries(&outcome.timeseries, &p)?;
        written.push(p);
    }
    for (name, snap) in &outcome.snapshots {
        let p = dir.join(name);
        snap.write(&p)?;
        written.push(p);
    }
    Ok(written)
}
