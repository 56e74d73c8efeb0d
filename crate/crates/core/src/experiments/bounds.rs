use std::fmt::Write as _;

use serde::Serialize;

use super::{Check, Experiment, ExperimentConfig, InvariantSummary, Outcome};
use crate::diagnostics::{least_squares_slope, perturbation_diagnostics};
use crate::error::{Error, Result};
use crate::initial_data::{build_b0, build_u0};
use crate::io::TimeseriesRow;
use crate::solver::{simulate, SolverState};

/// One `(ρ, N)` run of the sweep.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsCell {
    pub rho: f64,
    pub frequency: f64,
    /// `sup_t e_k(t)^{1/2}` for `k = 0..=r`.
    pub sup_sqrt_energy: Vec<f64>,
    /// `sup_t e_k^{1/2} / (ρ N^k)`; NaN when `ρ = 0`.
    pub constant: Vec<f64>,
    pub invariants: InvariantSummary,
    pub steps: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsTable {
    pub r: usize,
    pub cells: Vec<BoundsCell>,
    /// Per `N`: log-log slope of `sup_t e_0^{1/2}` against `ρ` (needs two
    /// positive `ρ`).
    pub rho_slopes: Vec<(f64, f64)>,
    /// Per `k`: `max C / min C` over cells with `ρ > 0`.
    pub constant_spread: Vec<f64>,
}

fn run_cell(config: &ExperimentConfig, rho: f64, frequency: f64) -> Result<BoundsCell> {
    let grid = config.grid()?;
    let mut data = config.initial_data();
    data.rho = rho;
    data.frequency = frequency;
    data.validate(&grid)?;
    let r = config.data.r;
    let u0 = build_u0(&data, grid)?;
    let b0 = build_b0(&data, grid)?;
    let mut sup = vec![0.0f64; r + 1];
    let mut rows = Vec::new();
    let mut observer = |s: &SolverState| {
        let d = perturbation_diagnostics(s, &u0, &b0, r.max(3))?;
        for (m, e) in sup.iter_mut().zip(&d.energy) {
            *m = m.max(e.sqrt());
        }
        let (du, db) = s.max_divergence();
        rows.push(TimeseriesRow {
            t: s.t(),
            e0: d.energy[0],
            e1: d.energy[1],
            e2: d.energy[2],
            e3: d.energy[3],
            e0_low: d.energy_low[0],
            e0_high: d.energy_high[0],
            energy_total: s.energy(),
            linf_u: s.u().max_abs(),
            linf_b: s.b().max_abs(),
            div_max: du.max(db),
        });
        Ok(())
    };
    let state = simulate(
        u0.clone(),
        b0.clone(),
        config.mhd_params(),
        data.time,
        Some((config.solver.cadence, &mut observer)),
    )?;
    let constant = sup
        .iter()
        .enumerate()
        .map(|(k, s)| {
            if rho > 0.0 {
                s / (rho * frequency.powi(k as i32))
            } else {
                f64::NAN
            }
        })
        .collect();
    log::info!("bounds cell rho = {rho:e}, N = {frequency}: sup e0^1/2 = {:.4e}", sup[0]);
    Ok(BoundsCell {
        rho,
        frequency,
        sup_sqrt_energy: sup,
        constant,
        invariants: InvariantSummary::from_rows(&rows),
        steps: state.step_count(),
    })
}

pub fn run_global_bounds(
    config: &ExperimentConfig,
    rho_list: &[f64],
    frequency_list: &[f64],
) -> Result<BoundsTable> {
    if rho_list.is_empty() || frequency_list.is_empty() {
        return Err(Error::Config("bounds.rho and bounds.N must be nonempty".into()));
    }
    let r = config.data.r;
    let mut cells = Vec::new();
    for &n in frequency_list {
        for &rho in rho_list {
            cells.push(run_cell(config, rho, n)?);
        }
    }
    let mut rho_slopes = Vec::new();
    for &n in frequency_list {
        let pts: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.frequency == n && c.rho > 0.0 && c.sup_sqrt_energy[0] > 0.0)
            .map(|c| (c.rho.ln(), c.sup_sqrt_energy[0].ln()))
            .collect();
        if pts.len() >= 2 {
            rho_slopes.push((n, least_squares_slope(&pts)?));
        }
    }
    let constant_spread = (0..=r)
        .map(|k| {
            let vals: Vec<f64> = cells
                .iter()
                .map(|c| c.constant[k])
                .filter(|v| v.is_finite() && *v > 0.0)
                .collect();
            if vals.is_empty() {
                f64::NAN
            } else {
                vals.iter().cloned().fold(0.0, f64::max) / vals.iter().cloned().fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    Ok(BoundsTable {
        r,
        cells,
        rho_slopes,
        constant_spread,
    })
}

impl BoundsTable {
    pub fn to_outcome(&self) -> Outcome {
        let mut out = Outcome::new("global-bounds");
        let rep = &mut out.report;
        let _ = writeln!(rep, "global bounds: sup_t e_k^1/2 and C_k = sup_t e_k^1/2 / (rho N^k)");
        let _ = write!(rep, "{:>10} {:>6}", "rho", "N");
        for k in 0..=self.r {
            let _ = write!(rep, " {:>12} {:>12}", format!("e{k}^1/2"), format!("C{k}"));
        }
        let _ = writeln!(rep);
        for c in &self.cells {
            let _ = write!(rep, "{:>10.3e} {:>6}", c.rho, c.frequency);
            for k in 0..=self.r {
                let _ = write!(rep, " {:>12.4e} {:>12.4e}", c.sup_sqrt_energy[k], c.constant[k]);
            }
            let _ = writeln!(rep);
        }
        for (n, s) in &self.rho_slopes {
            let _ = writeln!(out.report, "rho slope of sup e0^1/2 at N = {n}: {s:.4}");
            out.value(&format!("rho_slope.N{n}"), format!("{s:.12e}"));
            out.checks.push(Check::within(&format!("rho_slope.N{n}"), *s, 0.9, 1.1));
        }
        for (k, s) in self.constant_spread.iter().enumerate() {
            out.value(&format!("constant_spread.k{k}"), format!("{s:.12e}"));
            if s.is_finite() {
                out.checks.push(Check::at_most(&format!("constant_spread.k{k}"), *s, 2.0));
            }
        }
        for c in &self.cells {
            if c.rho == 0.0 {
                let worst = c.sup_sqrt_energy.iter().cloned().fold(0.0, f64::max);
                out.checks.push(
                    Check::at_most(&format!("zero_rho.N{}", c.frequency), worst, 0.0)
                        .with_note("u0 = b0 keeps the perturbation identically zero"),
                );
            }
            for ch in c.invariants.checks(&format!("invariants.rho{:e}.N{}", c.rho, c.frequency)) {
                out.checks.push(ch);
            }
        }
        out.append_check_table();
        out
    }
}

pub struct GlobalBounds;

impl Experiment for GlobalBounds {
    fn name(&self) -> &'static str {
        "global-bounds"
    }

    fn description(&self) -> &'static str {
        "sweep rho and N, fitting the rho-scaling and N^k growth of the perturbation energies"
    }

    fn run(&self, config: &ExperimentConfig) -> Result<Outcome> {
        config.validate()?;
        Ok(run_global_bounds(config, &config.bounds.rho, &config.bounds.frequency)?.to_outcome())
    }
}
