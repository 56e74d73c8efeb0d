use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial_data::InitialDataParams;
use crate::solver::{DtPolicy, MhdParams, DEFAULT_SCHEME};
use crate::spectral::Grid;
use crate::topology::{NullSearch, Region, DEFAULT_KERNEL, HYPER_TOL, NEWTON_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Box side; accepts numbers or multiples of π such as `"8pi"`.
    #[serde(rename = "L", deserialize_with = "length_value")]
    pub length: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            length: 8.0 * PI,
            n: 128,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    #[serde(rename = "M")]
    pub amplitude: f64,
    pub rho: f64,
    #[serde(rename = "N")]
    pub frequency: f64,
    pub alpha: f64,
    #[serde(rename = "T")]
    pub time: f64,
    pub eta: f64,
    /// Highest derivative level of the perturbation energies.
    pub r: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        let p = InitialDataParams::default();
        DataConfig {
            amplitude: p.amplitude,
            rho: p.rho,
            frequency: p.frequency,
            alpha: p.alpha,
            time: p.time,
            eta: p.eta,
            r: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Fixed step; CFL-adaptive when absent.
    pub dt: Option<f64>,
    pub cfl_safety: f64,
    /// Observer interval in simulated time.
    pub cadence: f64,
    pub scheme: String,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: None,
            cfl_safety: 0.5,
            cadence: 0.01,
            scheme: DEFAULT_SCHEME.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CensusConfig {
    /// Census ball radius; `L/8` when absent.
    pub radius: Option<f64>,
    /// Ball for the C¹ comparison with `curl(ψW)`.
    pub comparison_radius: f64,
    pub newton_tol: f64,
    pub hyper_tol: f64,
    pub stride: usize,
    pub kernel: String,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            radius: None,
            comparison_radius: 2.0,
            newton_tol: NEWTON_TOL,
            hyper_tol: HYPER_TOL,
            stride: 1,
            kernel: DEFAULT_KERNEL.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsConfig {
    pub rho: Vec<f64>,
    #[serde(rename = "N")]
    pub frequency: Vec<f64>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            rho: vec![1e-2, 1e-3, 1e-4],
            frequency: vec![8.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub data: DataConfig,
    pub solver: SolverConfig,
    pub census: CensusConfig,
    pub bounds: BoundsConfig,
    /// Experiment name in the registry.
    pub mode: String,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: GridConfig::default(),
            data: DataConfig::default(),
            solver: SolverConfig::default(),
            census: CensusConfig::default(),
            bounds: BoundsConfig::default(),
            mode: "reconnection".to_string(),
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n, self.grid.length)
    }

    pub fn initial_data(&self) -> InitialDataParams {
        InitialDataParams {
            amplitude: self.data.amplitude,
            rho: self.data.rho,
            frequency: self.data.frequency,
            alpha: self.data.alpha,
            time: self.data.time,
            eta: self.data.eta,
        }
    }

    pub fn mhd_params(&self) -> MhdParams {
        MhdParams {
            eta: self.data.eta,
            dt_policy: match self.solver.dt {
                Some(dt) => DtPolicy::Fixed(dt),
                None => DtPolicy::Cfl {
                    safety: self.solver.cfl_safety,
                    max_dt: Some(self.solver.cadence),
                },
            },
            dealias: true,
            scheme: self.solver.scheme.clone(),
        }
    }

    pub fn census_radius(&self) -> f64 {
        self.census.radius.unwrap_or(self.grid.length / 8.0)
    }

    pub fn null_search(&self, radius: f64) -> NullSearch {
        NullSearch {
            region: Region::ball(radius),
            stride: self.census.stride,
            newton_tol: self.census.newton_tol,
            hyper_tol: self.census.hyper_tol,
            max_iterations: crate::topology::MAX_NEWTON_ITERATIONS,
            kernel: self.census.kernel.clone(),
        }
    }

    /// Checks every parameter rule; the message names the violated rule.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        self.initial_data().validate(&grid)?;
        self.mhd_params().validate()?;
        if !(self.solver.cadence > 0.0) {
            return Err(Error::Config("solver.cadence must be positive".into()));
        }
        let r = self.census_radius();
        if !(r > 0.0 && r < 0.5 * grid.length()) {
            return Err(Error::Config(format!(
                "census.radius must lie in (0, L/2), got {r}"
            )));
        }
        if !(self.census.comparison_radius > 0.0 && self.census.comparison_radius < 0.5 * grid.length())
        {
            return Err(Error::Config("census.comparison_radius must lie in (0, L/2)".into()));
        }
        if self.census.stride == 0 {
            return Err(Error::Config("census.stride must be positive".into()));
        }
        if self.data.r > 8 {
            return Err(Error::Config(format!("data.r = {} is too large (max 8)", self.data.r)));
        }
        Ok(())
    }
}

/// Number, or a string `"<c>pi"`, `"<c>π"`, `"<c>*pi"`.
fn length_value<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    struct V;
    impl Visitor<'_> for V {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or a multiple of pi such as \"8pi\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<f64, E> {
            parse_pi_multiple(v).ok_or_else(|| E::custom(format!("cannot read {v:?} as a length")))
        }
    }
    d.deserialize_any(V)
}

pub fn parse_pi_multiple(s: &str) -> Option<f64> {
    let t = s.trim();
    let coeff = ["pi", "π"]
        .iter()
        .find_map(|suffix| t.strip_suffix(suffix))
        .map(|c| {
            let c = c.trim_end();
            c.strip_suffix('*').unwrap_or(c).trim()
        });
    match coeff {
        Some("") => Some(PI),
        Some(c) => c.parse::<f64>().ok().map(|c| c * PI),
        None => t.parse::<f64>().ok(),
    }
}
