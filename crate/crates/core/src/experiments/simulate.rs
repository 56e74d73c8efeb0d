use std::fmt::Write as _;

use super::{simulate_with_series, Experiment, ExperimentConfig, InvariantSummary, Outcome};
use crate::error::Result;
use crate::initial_data::{build_b0, build_u0};
use crate::io::Snapshot;
use crate::solver::SolverState;

/// Plain run of the configured data to `T` with a time series and the
/// initial and final snapshots.
pub struct Simulate;

impl Experiment for Simulate {
    fn name(&self) -> &'static str {
        "simulate"
    }

    fn description(&self) -> &'static str {
        "evolve the configured initial data to T, writing a time series and snapshots"
    }

    fn run(&self, config: &ExperimentConfig) -> Result<Outcome> {
        run_simulation(config)
    }
}

pub fn run_simulation(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let grid = config.grid()?;
    let data = config.initial_data();
    let u0 = build_u0(&data, grid)?;
    let b0 = build_b0(&data, grid)?;
    let params = config.mhd_params();
    let initial = SolverState::new(u0.clone(), b0.clone(), params.clone())?;
    let (state, rows) = simulate_with_series(&u0, &b0, params, data.time, config.solver.cadence)?;
    let inv = InvariantSummary::from_rows(&rows);

    let mut out = Outcome::new("simulate");
    let _ = writeln!(
        out.report,
        "simulate: L = {:.6}, n = {}, M = {}, rho = {:e}, N = {}, alpha = {}, eta = {}, T = {}",
        grid.length(),
        grid.n(),
        data.amplitude,
        data.rho,
        data.frequency,
        data.alpha,
        data.eta,
        data.time
    );
    let _ = writeln!(
        out.report,
        "steps = {}, ticks = {}, final energy = {:.9e}",
        state.step_count(),
        rows.len(),
        state.energy()
    );
    out.value("steps", state.step_count());
    out.value("ticks", rows.len());
    out.value("final_t", state.t());
    out.value("final_energy", format!("{:.12e}", state.energy()));
    out.checks.extend(inv.checks("invariants"));
    out.append_check_table();
    out.timeseries = rows;
    out.snapshots.push(("initial.snap".into(), Snapshot::from_state(&initial)));
    out.snapshots.push(("final.snap".into(), Snapshot::from_state(&state)));
    Ok(out)
}
