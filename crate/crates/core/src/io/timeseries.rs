use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{lp_norm, perturbation_diagnostics};
use crate::error::Result;
use crate::solver::SolverState;
use crate::spectral::VectorField;

pub const HEADER: [&str; 11] = [
    "t",
    "e0",
    "e1",
    "e2",
    "e3",
    "e0_low",
    "e0_high",
    "energy_total",
    "Linf_u",
    "Linf_b",
    "div_max",
];

/// One observer tick.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeseriesRow {
    pub t: f64,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e0_low: f64,
    pub e0_high: f64,
    pub energy_total: f64,
    #[serde(rename = "Linf_u")]
    pub linf_u: f64,
    #[serde(rename = "Linf_b")]
    pub linf_b: f64,
    pub div_max: f64,
}

impl TimeseriesRow {
    /// Perturbation energies relative to the heat flow of `(u0, b0)`, plus
    /// the structural quantities of the state.
    pub fn measure(state: &SolverState, u0: &VectorField, b0: &VectorField) -> Result<Self> {
        let d = perturbation_diagnostics(state, u0, b0, 3)?;
        let (du, db) = state.max_divergence();
        Ok(TimeseriesRow {
            t: state.t(),
            e0: d.energy[0],
            e1: d.energy[1],
            e2: d.energy[2],
            e3: d.energy[3],
            e0_low: d.energy_low[0],
            e0_high: d.energy_high[0],
            energy_total: state.energy(),
            linf_u: lp_norm(state.u(), f64::INFINITY)?,
            linf_b: lp_norm(state.b(), f64::INFINITY)?,
            div_max: du.max(db),
        })
    }
}

pub fn timeseries_csv(rows: &[TimeseriesRow]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn emit_timeseries(rows: &[TimeseriesRow], path: &Path) -> Result<()> {
    super::write_atomic(path, &timeseries_csv(rows)?)
}

pub fn read_timeseries(path: &Path) -> Result<Vec<TimeseriesRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
