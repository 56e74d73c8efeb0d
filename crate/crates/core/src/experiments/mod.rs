//! Config-driven pipelines: reconnection detection, global-bound scaling
//! sweeps, lemma verification and plain simulation runs.

mod bounds;
mod config;
mod lemmas;
mod reconnection;
mod simulate;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

pub use bounds::{run_global_bounds, BoundsCell, BoundsTable, GlobalBounds};
pub use config::{
    parse_pi_multiple, BoundsConfig, CensusConfig, DataConfig, ExperimentConfig, GridConfig,
    SolverConfig,
};
pub use lemmas::{run_lemma_checks, weighted_beltrami_minimum, LemmaChecks};
pub use reconnection::{paper_rho_law, run_reconnection, Reconnection, ReconnectionReport};
pub use simulate::{run_simulation, Simulate};

use crate::error::{Error, Result};
use crate::io::{Snapshot, TimeseriesRow};
use crate::solver::{simulate as run_solver, MhdParams, SolverState};
use crate::spectral::VectorField;

/// One measured quantity with its acceptance rule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: String,
    pub passed: bool,
    pub note: String,
}

impl Check {
    pub fn new(name: &str, measured: f64, tolerance: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.to_string(),
            measured,
            tolerance: tolerance.into(),
            passed,
            note: String::new(),
        }
    }

    pub fn at_most(name: &str, measured: f64, bound: f64) -> Self {
        Check::new(name, measured, format!("<= {bound:e}"), measured <= bound)
    }

    pub fn at_least(name: &str, measured: f64, bound: f64) -> Self {
        Check::new(name, measured, format!(">= {bound:e}"), measured >= bound)
    }

    pub fn within(name: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Check::new(
            name,
            measured,
            format!("in [{lo:e}, {hi:e}]"),
            measured >= lo && measured <= hi,
        )
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// Result of an experiment: a human-readable report, named values and
/// checks for the ledger, and optional series and snapshots.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub experiment: String,
    pub report: String,
    pub values: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub timeseries: Vec<TimeseriesRow>,
    pub snapshots: Vec<(String, Snapshot)>,
}

impl Outcome {
    pub fn new(experiment: &str) -> Self {
        Outcome {
            experiment: experiment.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn value(&mut self, key: &str, v: impl ToString) {
        self.values.push((key.to_string(), v.to_string()));
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Appends the checks table to the report text.
    pub(crate) fn append_check_table(&mut self) {
        if self.checks.is_empty() {
            return;
        }
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let _ = writeln!(self.report, "\nchecks:");
        for c in &self.checks {
            let _ = write!(
                self.report,
                "  [{}] {:w$}  measured {:.6e}  ({})",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance,
            );
            if !c.note.is_empty() {
                let _ = write!(self.report, "  {}", c.note);
            }
            let _ = writeln!(self.report);
        }
    }
}

/// A pipeline selected by name from the config or the command line.
pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, config: &ExperimentConfig) -> Result<Outcome>;
}

type Factory = fn() -> Box<dyn Experiment>;

pub struct ExperimentRegistry {
    factories: BTreeMap<String, Factory>,
}

impl ExperimentRegistry {
    pub fn with_builtins() -> Self {
        let mut r = ExperimentRegistry {
            factories: BTreeMap::new(),
        };
        r.register("reconnection", || Box::new(Reconnection));
        r.register("global-bounds", || Box::new(GlobalBounds));
        r.register("lemma-checks", || Box::new(LemmaChecks));
        r.register("simulate", || Box::new(Simulate));
        r
    }

    pub fn register(&mut self, name: &str, factory: Factory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn Experiment>> {
        self.factories
            .get(name)
            .map(|f| f())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "experiment mode",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<String> {
        self.factories.keys().cloned().collect()
    }
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

/// Structural invariants over a series of observer ticks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvariantSummary {
    /// `max div / (‖u‖∞ + ‖b‖∞)` over ticks.
    pub max_relative_divergence: f64,
    /// Largest relative energy increase between consecutive ticks (≤ 0 when
    /// the energy never grows).
    pub max_energy_increase: f64,
}

pub const DIVERGENCE_TOL: f64 = 1e-10;
pub const ENERGY_SLACK: f64 = 1e-12;

impl InvariantSummary {
    pub fn from_rows(rows: &[TimeseriesRow]) -> Self {
        let max_relative_divergence = rows
            .iter()
            .map(|r| {
                let scale = r.linf_u + r.linf_b;
                if scale > 0.0 {
                    r.div_max / scale
                } else {
                    r.div_max
                }
            })
            .fold(0.0, f64::max);
        let max_energy_increase = rows
            .windows(2)
            .map(|w| (w[1].energy_total - w[0].energy_total) / w[0].energy_total.max(f64::MIN_POSITIVE))
            .fold(f64::NEG_INFINITY, f64::max);
        InvariantSummary {
            max_relative_divergence,
            max_energy_increase: if rows.len() < 2 { 0.0 } else { max_energy_increase },
        }
    }

    pub fn holds(&self) -> bool {
        self.max_relative_divergence <= DIVERGENCE_TOL && self.max_energy_increase <= ENERGY_SLACK
    }

    pub fn checks(&self, prefix: &str) -> Vec<Check> {
        vec![
            Check::at_most(
                &format!("{prefix}.divergence"),
                self.max_relative_divergence,
                DIVERGENCE_TOL,
            ),
            Check::at_most(
                &format!("{prefix}.energy_increase"),
                self.max_energy_increase,
                ENERGY_SLACK,
            ),
        ]
    }
}

/// Runs `(u0, b0)` to `t_end` recording a [`TimeseriesRow`] at every tick.
pub fn simulate_with_series(
    u0: &VectorField,
    b0: &VectorField,
    params: MhdParams,
    t_end: f64,
    cadence: f64,
) -> Result<(SolverState, Vec<TimeseriesRow>)> {
    let mut rows = Vec::new();
    let mut observer = |s: &SolverState| {
        rows.push(TimeseriesRow::measure(s, u0, b0)?);
        Ok(())
    };
    let state = run_solver(
        u0.clone(),
        b0.clone(),
        params,
        t_end,
        Some((cadence, &mut observer)),
    )?;
    Ok((state, rows))
}
