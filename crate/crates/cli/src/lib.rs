//! `mhd` command line: config-driven experiments plus snapshot inspection.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use mhd_core::diagnostics::{NormReport, DEFAULT_NORMS};
use mhd_core::experiments::{ExperimentConfig, ExperimentRegistry, Outcome};
use mhd_core::io::{ledger_text, parse_config, write_outcome, Snapshot};
use mhd_core::topology::{find_nulls, Classification, NullSearch, Region, DEFAULT_KERNEL};
use mhd_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mhd", version, about = "Resistive MHD reconnection experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plain time integration; writes the series and initial/final snapshots.
    Simulate(RunArgs),
    /// Null census at t = 0 and t = T.
    Reconnect(RunArgs),
    /// rho and N sweep of the perturbation energies.
    Bounds(RunArgs),
    /// Numerical verification of the analytic lemmas.
    CheckLemmas(RunArgs),
    /// Runs the experiment named by `mode` in the config.
    Run(RunArgs),
    /// Null census of a vector field stored in a snapshot.
    Nulls {
        snapshot: PathBuf,
        #[arg(long, default_value = "b")]
        field: String,
        /// Ball radius around the origin; the whole box when omitted.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value = DEFAULT_KERNEL)]
        kernel: String,
    },
    /// Lp, Sobolev and Besov norms of a vector field stored in a snapshot.
    Norms {
        snapshot: PathBuf,
        #[arg(long, default_value = "b")]
        field: String,
    },
    /// Lists the registered experiments.
    List,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    pub config: PathBuf,
    /// Overrides `out_dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_configuration() {
        EXIT_CONFIG
    } else {
        EXIT_RUNTIME
    }
}

/// Parses `argv` (including the program name), runs and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> mhd_core::Result<i32> {
    match cmd {
        Command::Simulate(a) => run_mode(&a, Some("simulate")),
        Command::Reconnect(a) => run_mode(&a, Some("reconnection")),
        Command::Bounds(a) => run_mode(&a, Some("global-bounds")),
        Command::CheckLemmas(a) => run_mode(&a, Some("lemma-checks")),
        Command::Run(a) => run_mode(&a, None),
        Command::Nulls {
            snapshot,
            field,
            radius,
            kernel,
        } => nulls(&snapshot, &field, radius, &kernel),
        Command::Norms { snapshot, field } => norms(&snapshot, &field),
        Command::List => {
            let reg = ExperimentRegistry::with_builtins();
            for name in reg.names() {
                let e = reg.create(&name)?;
                println!("{name:16} {}", e.description());
            }
            Ok(EXIT_OK)
        }
    }
}

fn load_config(path: &Path) -> mhd_core::Result<ExperimentConfig> {
    let cfg = parse_config(path)?;
    log::info!("config {} loaded", path.display());
    Ok(cfg)
}

fn run_mode(args: &RunArgs, mode: Option<&str>) -> mhd_core::Result<i32> {
    let cfg = load_config(&args.config)?;
    let name = mode.unwrap_or(&cfg.mode).to_string();
    let experiment = ExperimentRegistry::with_builtins().create(&name)?;
    let outcome = experiment.run(&cfg)?;
    let dir = args.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
    publish(&outcome, &dir)
}

fn publish(outcome: &Outcome, dir: &Path) -> mhd_core::Result<i32> {
    print!("{}", outcome.report);
    for p in write_outcome(outcome, dir)? {
        log::info!("wrote {}", p.display());
    }
    log::debug!("ledger:\n{}", ledger_text(outcome));
    Ok(if outcome.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn nulls(path: &Path, field: &str, radius: Option<f64>, kernel: &str) -> mhd_core::Result<i32> {
    let snap = Snapshot::read(path)?;
    let f = snap.vector(field)?;
    let mut search = NullSearch::in_region(radius.map_or(Region::WholeBox, Region::ball));
    search.kernel = kernel.to_string();
    let census = find_nulls(&f, &search)?;
    println!(
        "{field} at t = {}: {} nulls ({} hyperbolic, {} non-hyperbolic, {} unresolved)",
        snap.t,
        census.points.len(),
        census.hyperbolic_count(),
        census.count(Classification::NonHyperbolic),
        census.count(Classification::Unresolved)
    );
    for p in &census.points {
        let ev: Vec<String> = p
            .eigenvalues
            .iter()
            .map(|(re, im)| format!("{re:+.6}{im:+.6}i"))
            .collect();
        println!(
            "x = ({:+.6}, {:+.6}, {:+.6})  {}  |F| = {:.2e}  eigenvalues [{}]",
            p.x[0],
            p.x[1],
            p.x[2],
            p.classification,
            p.residual,
            ev.join(", ")
        );
    }
    Ok(EXIT_OK)
}

fn norms(path: &Path, field: &str) -> mhd_core::Result<i32> {
    let snap = Snapshot::read(path)?;
    let f = snap.vector(field)?;
    println!("{}", NormReport::compute(field, &f, &DEFAULT_NORMS)?);
    Ok(EXIT_OK)
}

/// Caps the global rayon pool at `MHD_THREADS` when set.
pub fn init_threads() {
    if let Some(n) = std::env::var("MHD_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("MHD_THREADS ignored: {e}");
            }
        }
    }
}
