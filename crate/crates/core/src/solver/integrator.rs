//! Exponential time integrators for `∂_t û = -η|k|² û + N(û)`.
//!
//! Diffusion is integrated exactly through `e^{-η|k|²dt}`; the nonlinear
//! term is treated explicitly. Schemes are registered by name so configs
//! and the CLI can select them.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{nonlinear_rhs, SolverState};
use crate::error::{Error, Result};
use crate::spectral::{Grid, ScalarField, VectorField};

/// `(e^z - 1)/z`.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

/// `(e^z - 1 - z)/z²`, with a series near 0 to avoid cancellation.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 0.5 {
        // Σ z^j/(j+2)!
        let mut term = 0.5;
        let mut sum = 0.5;
        for j in 1..16 {
            term *= z / (j as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// A time integrator advances `(u, b)` by one step of size `dt`.
pub trait TimeIntegrator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Formal order of accuracy in `dt`.
    fn order(&self) -> usize;

    /// Returns the new spectral `(u, b)`.
    fn advance(&self, state: &SolverState, dt: f64) -> Result<(VectorField, VectorField)>;
}

struct Multipliers {
    decay: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

impl Multipliers {
    fn new(grid: Grid, eta: f64, dt: f64, need_phi2: bool) -> Self {
        let z: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| -eta * grid.mode(idx).k2() * dt)
            .collect();
        Multipliers {
            decay: z.par_iter().map(|z| z.exp()).collect(),
            phi1: z.par_iter().map(|z| phi1(*z)).collect(),
            phi2: if need_phi2 {
                z.par_iter().map(|z| phi2(*z)).collect()
            } else {
                Vec::new()
            },
        }
    }
}

/// Keeps the multipliers of the last `(grid, η, dt)`; fixed-step runs then
/// build them once.
#[derive(Default)]
struct MultiplierCache {
    last: Mutex<Option<((Grid, u64, u64), Arc<Multipliers>)>>,
}

impl MultiplierCache {
    fn get(&self, grid: Grid, eta: f64, dt: f64, need_phi2: bool) -> Arc<Multipliers> {
        let key = (grid, eta.to_bits(), dt.to_bits());
        let mut guard = self.last.lock().expect("multiplier cache poisoned");
        if let Some((k, m)) = guard.as_ref() {
            if *k == key && (!need_phi2 || !m.phi2.is_empty()) {
                return m.clone();
            }
        }
        let m = Arc::new(Multipliers::new(grid, eta, dt, need_phi2));
        *guard = Some((key, m.clone()));
        m
    }
}

fn combine(
    grid: Grid,
    base: &VectorField,
    terms: &[(&VectorField, &[f64], f64)],
    base_mult: Option<&[f64]>,
) -> VectorField {
    let base_c = base.spectral_coeffs();
    let term_c: Vec<_> = terms
        .iter()
        .map(|(f, m, s)| (f.spectral_coeffs(), *m, *s))
        .collect();
    let comp = |d: usize| {
        let out: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let mut v = base_c[d][idx];
                if let Some(m) = base_mult {
                    v *= m[idx];
                }
                for (c, m, s) in &term_c {
                    v += c[d][idx] * (m[idx] * s);
                }
                v
            })
            .collect();
        ScalarField::spectral_unchecked(grid, out)
    };
    VectorField::from_components([comp(0), comp(1), comp(2)])
}

/// First-order exponential Euler: `û₁ = E û₀ + dt φ₁ N(û₀)`.
#[derive(Default)]
pub struct ExponentialEuler {
    cache: MultiplierCache,
}

impl TimeIntegrator for ExponentialEuler {
    fn name(&self) -> &'static str {
        "etd1"
    }

    fn order(&self) -> usize {
        1
    }

    fn advance(&self, state: &SolverState, dt: f64) -> Result<(VectorField, VectorField)> {
        let grid = state.grid();
        let m = self.cache.get(grid, state.params().eta, dt, false);
        let (nu, nb) = nonlinear_rhs(state)?;
        let u = combine(grid, state.u(), &[(&nu, &m.phi1, dt)], Some(&m.decay));
        let b = combine(grid, state.b(), &[(&nb, &m.phi1, dt)], Some(&m.decay));
        Ok((u, b))
    }
}

/// Cox–Matthews ETD-RK2:
/// `a = E û + dt φ₁ N(û)`, `û₁ = a + dt φ₂ (N(a) - N(û))`.
#[derive(Default)]
pub struct EtdRk2 {
    cache: MultiplierCache,
}

impl TimeIntegrator for EtdRk2 {
    fn name(&self) -> &'static str {
        "etdrk2"
    }

    fn order(&self) -> usize {
        2
    }

    fn advance(&self, state: &SolverState, dt: f64) -> Result<(VectorField, VectorField)> {
        let grid = state.grid();
        let m = self.cache.get(grid, state.params().eta, dt, true);
        let (nu, nb) = nonlinear_rhs(state)?;
        let au = combine(grid, state.u(), &[(&nu, &m.phi1, dt)], Some(&m.decay));
        let ab = combine(grid, state.b(), &[(&nb, &m.phi1, dt)], Some(&m.decay));
        let stage = state.with_fields(au, ab);
        let (nu_a, nb_a) = nonlinear_rhs(&stage)?;
        let u = combine(
            grid,
            stage.u(),
            &[(&nu_a, &m.phi2, dt), (&nu, &m.phi2, -dt)],
            None,
        );
        let b = combine(
            grid,
            stage.b(),
            &[(&nb_a, &m.phi2, dt), (&nb, &m.phi2, -dt)],
            None,
        );
        Ok((u, b))
    }
}

type Factory = fn() -> Box<dyn TimeIntegrator>;

/// Name → integrator factory.
pub struct IntegratorRegistry {
    factories: BTreeMap<String, Factory>,
}

pub const DEFAULT_SCHEME: &str = "etdrk2";

impl IntegratorRegistry {
    pub fn empty() -> Self {
        IntegratorRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = IntegratorRegistry::empty();
        r.register("etdrk2", || Box::<EtdRk2>::default());
        r.register("etd1", || Box::<ExponentialEuler>::default());
        r
    }

    pub fn register(&mut self, name: &str, factory: Factory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn TimeIntegrator>> {
        self.factories
            .get(name)
            .map(|f| f())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "time integrator",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<String> {
        self.factories.keys().cloned().collect()
    }
}

impl Default for IntegratorRegistry {
    fn default() -> Self {
        IntegratorRegistry::with_builtins()
    }
}
