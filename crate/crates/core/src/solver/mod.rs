//! Incompressible resistive MHD with equal viscosity and resistivity:
//!
//! ```text
//! ∂t u + (u·∇)u + ∇p = η Δu + (b·∇)b
//! ∂t b + (u·∇)b      = η Δb + (b·∇)u
//! div u = div b = 0
//! ```
//!
//! Nonlinear terms are evaluated in divergence form with physical-space
//! products, 2/3-rule dealiasing and Leray projection; diffusion is exact.

mod integrator;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use integrator::{
    phi1, phi2, EtdRk2, ExponentialEuler, IntegratorRegistry, TimeIntegrator, DEFAULT_SCHEME,
};

use crate::error::{Error, Result};
use crate::spectral::{divergence, fft, Grid, ScalarField, VectorField};

/// Relative energy growth in a single step that aborts a run.
pub const ENERGY_GROWTH_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = safety · (L/n) / max(|u|+|b|)`, optionally capped.
    Cfl { safety: f64, max_dt: Option<f64> },
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Cfl {
            safety: 0.5,
            max_dt: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MhdParams {
    /// Resistivity, equal to the viscosity.
    pub eta: f64,
    pub dt_policy: DtPolicy,
    pub dealias: bool,
    /// Name of the time integrator in the [`IntegratorRegistry`].
    pub scheme: String,
}

impl Default for MhdParams {
    fn default() -> Self {
        MhdParams {
            eta: 1.0,
            dt_policy: DtPolicy::default(),
            dealias: true,
            scheme: DEFAULT_SCHEME.to_string(),
        }
    }
}

impl MhdParams {
    pub fn with_eta(eta: f64) -> Self {
        MhdParams {
            eta,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(Error::param(format!("η > 0 required, got {}", self.eta)));
        }
        match self.dt_policy {
            DtPolicy::Fixed(dt) if !(dt > 0.0) => {
                Err(Error::param(format!("fixed dt must be positive, got {dt}")))
            }
            DtPolicy::Cfl { safety, .. } if !(safety > 0.0 && safety <= 1.0) => Err(
                Error::param(format!("CFL safety must lie in (0, 1], got {safety}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Velocity and magnetic field at time `t`, both held spectrally.
#[derive(Clone, Debug)]
pub struct SolverState {
    u: VectorField,
    b: VectorField,
    t: f64,
    params: MhdParams,
    step_count: usize,
}

impl SolverState {
    pub fn new(u: VectorField, b: VectorField, params: MhdParams) -> Result<Self> {
        Self::at_time(u, b, 0.0, params)
    }

    pub fn at_time(u: VectorField, b: VectorField, t: f64, params: MhdParams) -> Result<Self> {
        if u.grid() != b.grid() {
            return Err(Error::Shape("u and b live on different grids".into()));
        }
        params.validate()?;
        Ok(SolverState {
            u: u.into_spectral(),
            b: b.into_spectral(),
            t,
            params,
            step_count: 0,
        })
    }

    pub(crate) fn with_fields(&self, u: VectorField, b: VectorField) -> SolverState {
        SolverState {
            u,
            b,
            t: self.t,
            params: self.params.clone(),
            step_count: self.step_count,
        }
    }

    pub fn u(&self) -> &VectorField {
        &self.u
    }

    pub fn b(&self) -> &VectorField {
        &self.b
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn params(&self) -> &MhdParams {
        &self.params
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn grid(&self) -> Grid {
        self.u.grid()
    }

    pub fn into_fields(self) -> (VectorField, VectorField) {
        (self.u, self.b)
    }

    /// `∫ |u|² + |b|²` by Parseval.
    pub fn energy(&self) -> f64 {
        spectral_energy(&self.u) + spectral_energy(&self.b)
    }

    /// Largest nodal `|div u|` and `|div b|`.
    pub fn max_divergence(&self) -> (f64, f64) {
        (divergence(&self.u).max_abs(), divergence(&self.b).max_abs())
    }

    /// Largest nodal `|u| + |b|`.
    pub fn max_speed(&self) -> f64 {
        let um = self.u.magnitude();
        let bm = self.b.magnitude();
        um.physical_values()
            .iter()
            .zip(bm.physical_values().iter())
            .fold(0.0f64, |m, (a, b)| m.max(a + b))
    }
}

/// `∫|f|²` from Fourier coefficients.
pub fn spectral_energy(f: &VectorField) -> f64 {
    let grid = f.grid();
    let coeffs = f.spectral_coeffs();
    let sum: f64 = coeffs
        .iter()
        .map(|c| c.par_iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum();
    sum / grid.volume()
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Unprojected nonlinear terms `(-(u·∇)u + (b·∇)b, -(u·∇)b + (b·∇)u)`,
/// computed as `-∂_j(u_i u_j - b_i b_j)` and `∂_j(u_i b_j - b_i u_j)`.
/// With `project`, the Leray projection is applied in the same pass.
fn nonlinear_terms(
    u: &VectorField,
    b: &VectorField,
    dealias_on: bool,
    project: bool,
) -> (VectorField, VectorField) {
    let grid = u.grid();
    let n = grid.n();
    let kd: Vec<f64> = (0..n).map(|i| grid.derivative_wavenumber(i)).collect();
    // 2/3 rule per axis; a mode is resolved when all three indices are kept.
    let keep: Vec<bool> = (0..n)
        .map(|i| !dealias_on || 3 * grid.signed_mode(i).unsigned_abs() as usize <= n)
        .collect();
    let masked = |f: &VectorField| -> [Vec<Complex64>; 3] {
        let c = f.spectral_coeffs();
        let one = |d: usize| {
            let mut v = c[d].to_vec();
            if dealias_on {
                v.par_chunks_mut(n).enumerate().for_each(|(row, line)| {
                    if keep[row % n] && keep[row / n] {
                        for (z, &k) in line.iter_mut().zip(&keep) {
                            if !k {
                                *z = Complex64::default();
                            }
                        }
                    } else {
                        line.fill(Complex64::default());
                    }
                });
            }
            v
        };
        [one(0), one(1), one(2)]
    };
    // Same transform pairing for u and b, so u = b gives identical nodal values.
    let uv = {
        let c = masked(u);
        fft::inverse_many(&grid, &[&c[0], &c[1], &c[2]])
    };
    let bv = {
        let c = masked(b);
        fft::inverse_many(&grid, &[&c[0], &c[1], &c[2]])
    };

    // Symmetric u_i u_j - b_i b_j in slots 0..6, antisymmetric
    // u_i b_j - b_i u_j in slots 6..9.
    let sym_pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    let anti_pairs = [(0, 1), (0, 2), (1, 2)];
    let mut products: Vec<Vec<f64>> = Vec::with_capacity(9);
    for &(i, j) in &sym_pairs {
        products.push(
            (0..grid.len())
                .into_par_iter()
                .map(|x| uv[i][x] * uv[j][x] - bv[i][x] * bv[j][x])
                .collect(),
        );
    }
    for &(i, j) in &anti_pairs {
        products.push(
            (0..grid.len())
                .into_par_iter()
                .map(|x| uv[i][x] * bv[j][x] - bv[i][x] * uv[j][x])
                .collect(),
        );
    }
    drop(uv);
    drop(bv);
    let refs: Vec<&[f64]> = products.iter().map(|p| p.as_slice()).collect();
    let hat = fft::forward_many(&grid, &refs);
    drop(products);

    let mut out: Vec<Vec<Complex64>> = (0..6).map(|_| vec![Complex64::default(); grid.len()]).collect();
    let [o0, o1, o2, o3, o4, o5] = &mut out[..] else {
        unreachable!()
    };
    (
        o0.par_chunks_mut(n),
        o1.par_chunks_mut(n),
        o2.par_chunks_mut(n),
        o3.par_chunks_mut(n),
        o4.par_chunks_mut(n),
        o5.par_chunks_mut(n),
    )
        .into_par_iter()
        .enumerate()
        .for_each(|(row, (r0, r1, r2, r3, r4, r5))| {
            let (j, l) = (row % n, row / n);
            if !(keep[j] && keep[l]) {
                return;
            }
            let (ky, kz) = (kd[j], kd[l]);
            for i in 0..n {
                if !keep[i] {
                    continue;
                }
                let idx = row * n + i;
                let k = [kd[i], ky, kz];
                let h = |s: usize| hat[s][idx];
                let (s00, s01, s02, s11, s12, s22) = (h(0), h(1), h(2), h(3), h(4), h(5));
                let (a01, a02, a12) = (h(6), h(7), h(8));
                // ru_i = -i k_j S_ij, rb_i = i k_j A_ij with A antisymmetric
                let mut ru = [
                    -I * (k[0] * s00 + k[1] * s01 + k[2] * s02),
                    -I * (k[0] * s01 + k[1] * s11 + k[2] * s12),
                    -I * (k[0] * s02 + k[1] * s12 + k[2] * s22),
                ];
                let mut rb = [
                    I * (k[1] * a01 + k[2] * a02),
                    I * (-k[0] * a01 + k[2] * a12),
                    I * (-k[0] * a02 - k[1] * a12),
                ];
                if project {
                    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    if k2 > 0.0 {
                        for r in [&mut ru, &mut rb] {
                            let dot = (r[0] * k[0] + r[1] * k[1] + r[2] * k[2]) / k2;
                            for d in 0..3 {
                                r[d] -= dot * k[d];
                            }
                        }
                    }
                }
                r0[i] = ru[0];
                r1[i] = ru[1];
                r2[i] = ru[2];
                r3[i] = rb[0];
                r4[i] = rb[1];
                r5[i] = rb[2];
            }
        });
    let mut it = out.into_iter().map(|v| ScalarField::spectral_unchecked(grid, v));
    let mut next = || it.next().expect("six components");
    let ru = [next(), next(), next()];
    let rb = [next(), next(), next()];
    (VectorField::from_components(ru), VectorField::from_components(rb))
}

/// Projected nonlinear right-hand sides
/// `(ℙ[-(u·∇)u + (b·∇)b], ℙ[-(u·∇)b + (b·∇)u])`, spectral.
pub fn nonlinear_rhs(state: &SolverState) -> Result<(VectorField, VectorField)> {
    if state.u.grid() != state.b.grid() {
        return Err(Error::Shape("u and b live on different grids".into()));
    }
    Ok(nonlinear_terms(
        &state.u,
        &state.b,
        state.params.dealias,
        true,
    ))
}

/// Same as [`nonlinear_rhs`] without the projection.
pub fn nonlinear_rhs_unprojected(state: &SolverState) -> (VectorField, VectorField) {
    nonlinear_terms(&state.u, &state.b, state.params.dealias, false)
}

/// Pressure from `-Δp = div((u·∇)u - (b·∇)b)`, zero mean.
pub fn recover_pressure(state: &SolverState) -> ScalarField {
    let (ru, _) = nonlinear_terms(&state.u, &state.b, state.params.dealias, false);
    let grid = state.grid();
    let c = ru.spectral_coeffs();
    let p = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let k = grid.mode(idx).kd;
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                Complex64::default()
            } else {
                -I * (k[0] * c[0][idx] + k[1] * c[1][idx] + k[2] * c[2][idx]) / k2
            }
        })
        .collect();
    ScalarField::spectral_unchecked(grid, p)
}

/// Observer callback invoked at fixed simulated-time intervals.
pub type ObserverFn<'a> = dyn FnMut(&SolverState) -> Result<()> + 'a;

/// Resolves the configured integrator once and drives it.
pub struct Solver {
    integrator: Box<dyn TimeIntegrator>,
}

impl Solver {
    pub fn new(params: &MhdParams) -> Result<Self> {
        Self::with_registry(params, &IntegratorRegistry::with_builtins())
    }

    pub fn with_registry(params: &MhdParams, registry: &IntegratorRegistry) -> Result<Self> {
        params.validate()?;
        Ok(Solver {
            integrator: registry.create(&params.scheme)?,
        })
    }

    pub fn integrator(&self) -> &dyn TimeIntegrator {
        self.integrator.as_ref()
    }

    /// Advances by exactly `dt`, aborting on non-finite values or energy growth.
    pub fn step(&self, state: &SolverState, dt: f64) -> Result<SolverState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param(format!("time step must be positive, got {dt}")));
        }
        let e0 = state.energy();
        let (u, b) = self.integrator.advance(state, dt)?;
        let next = SolverState {
            u,
            b,
            t: state.t + dt,
            params: state.params.clone(),
            step_count: state.step_count + 1,
        };
        let e1 = next.energy();
        if !e1.is_finite() {
            return Err(Error::BlowUp {
                t: next.t,
                steps: next.step_count,
                reason: "non-finite values".into(),
            });
        }
        if e1 > e0 * (1.0 + ENERGY_GROWTH_LIMIT) && e1 > f64::MIN_POSITIVE {
            return Err(Error::BlowUp {
                t: next.t,
                steps: next.step_count,
                reason: format!(
                    "energy grew from {e0:.6e} to {e1:.6e} (relative {:.3e}); dt too large?",
                    (e1 - e0) / e0.max(f64::MIN_POSITIVE)
                ),
            });
        }
        Ok(next)
    }

    /// Step size proposed by the policy for `state`, `None` if unbounded.
    pub fn proposed_dt(&self, state: &SolverState) -> Option<f64> {
        match state.params.dt_policy {
            DtPolicy::Fixed(dt) => Some(dt),
            DtPolicy::Cfl { safety, max_dt } => {
                let speed = state.max_speed();
                let cfl = if speed > 0.0 {
                    Some(safety * state.grid().spacing() / speed)
                } else {
                    None
                };
                match (cfl, max_dt) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                }
            }
        }
    }

    /// Steps to `t_end` exactly, shortening steps to land on observer
    /// times `t0, t0 + cadence, …` and on `t_end`. The observer also fires
    /// at `t_end`.
    pub fn simulate(
        &self,
        mut state: SolverState,
        t_end: f64,
        mut observer: Option<(f64, &mut ObserverFn<'_>)>,
    ) -> Result<SolverState> {
        let t0 = state.t;
        if t_end < t0 {
            return Err(Error::param(format!(
                "t_end = {t_end} precedes the current time {t0}"
            )));
        }
        let eps = 1e-12 * t_end.abs().max(1.0);
        if let Some((cadence, _)) = &observer {
            if !(*cadence > 0.0) {
                return Err(Error::param("observer cadence must be positive"));
            }
        }
        let mut tick: u64 = 0;
        if let Some((_, obs)) = observer.as_mut() {
            obs(&state)?;
            tick = 1;
        }
        while state.t < t_end - eps {
            let next_obs = observer
                .as_ref()
                .map(|(c, _)| t0 + tick as f64 * c)
                .unwrap_or(f64::INFINITY);
            let event = next_obs.min(t_end);
            let remaining = event - state.t;
            let (dt, lands) = match self.proposed_dt(&state) {
                Some(dt) if dt < remaining - eps => (dt, false),
                _ => (remaining, true),
            };
            let mut next = self.step(&state, dt)?;
            if lands {
                next.t = event;
            }
            state = next;
            if lands && (state.t - next_obs).abs() <= eps {
                tick += 1;
                if state.t < t_end - eps {
                    if let Some((_, obs)) = observer.as_mut() {
                        obs(&state)?;
                    }
                }
            }
        }
        if let Some((_, obs)) = observer.as_mut() {
            if t_end > t0 || tick == 0 {
                obs(&state)?;
            }
        }
        Ok(state)
    }
}

/// One step with the integrator named in the state's parameters.
pub fn step(state: &SolverState, dt: f64) -> Result<SolverState> {
    Solver::new(&state.params)?.step(state, dt)
}

/// Runs `u0, b0` to `t_end` with the integrator named in `params`.
pub fn simulate(
    u0: VectorField,
    b0: VectorField,
    params: MhdParams,
    t_end: f64,
    observer: Option<(f64, &mut ObserverFn<'_>)>,
) -> Result<SolverState> {
    let solver = Solver::new(&params)?;
    let state = SolverState::new(u0, b0, params)?;
    solver.simulate(state, t_end, observer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::make_beltrami;
    use crate::spectral::{gradient, heat_evolve, leray_project};
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::new(n, 2.0 * PI).unwrap()
    }

    fn fixed(dt: f64) -> MhdParams {
        MhdParams {
            dt_policy: DtPolicy::Fixed(dt),
            ..Default::default()
        }
    }

    fn smooth_field(g: Grid, phase: f64) -> VectorField {
        let v = VectorField::from_fn(g, move |x| {
            [
                (x[1] + phase).sin() + 0.3 * (2.0 * x[2]).cos(),
                (x[2] - phase).cos() + 0.2 * (x[0] + x[1]).sin(),
                (x[0] * 2.0 + phase).sin(),
            ]
        });
        leray_project(&v)
    }

    #[test]
    fn identical_fields_cancel_bitwise() {
        let g = grid(16);
        let u = smooth_field(g, 0.3);
        let state = SolverState::new(u.clone(), u, MhdParams::default()).unwrap();
        let (nu, nb) = nonlinear_rhs(&state).unwrap();
        for d in 0..3 {
            assert!(nu.component(d).as_spectral().unwrap().iter().all(|c| c.norm() == 0.0));
            assert!(nb.component(d).as_spectral().unwrap().iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn beltrami_self_interaction_is_a_gradient() {
        let g = grid(16);
        let bn = make_beltrami(2.0, g).unwrap();
        let zero = VectorField::zeros(g);
        let s = SolverState::new(zero.clone(), bn.clone(), MhdParams::default()).unwrap();
        let (nu, nb) = nonlinear_rhs(&s).unwrap();
        assert!(nu.max_abs() < 1e-10 && nb.max_abs() < 1e-10);
        let s = SolverState::new(bn, zero, MhdParams::default()).unwrap();
        let (nu, _) = nonlinear_rhs(&s).unwrap();
        assert!(nu.max_abs() < 1e-10);
    }

    #[test]
    fn pressure_vanishes_for_aligned_and_beltrami_states() {
        let g = grid(16);
        let u = smooth_field(g, 0.1);
        let s = SolverState::new(u.clone(), u, MhdParams::default()).unwrap();
        assert!(recover_pressure(&s).max_abs() == 0.0);
        let bn = make_beltrami(2.0, g).unwrap();
        let s = SolverState::new(bn, VectorField::zeros(g), MhdParams::default()).unwrap();
        assert!(recover_pressure(&s).max_abs() < 1e-10);
    }

    #[test]
    fn pressure_gradient_is_the_projected_out_part() {
        let g = grid(16);
        let s = SolverState::new(smooth_field(g, 0.4), smooth_field(g, 1.1), MhdParams::default())
            .unwrap();
        let (proj, _) = nonlinear_rhs(&s).unwrap();
        let (raw, _) = nonlinear_rhs_unprojected(&s);
        let grad_p = gradient(&recover_pressure(&s));
        let resid = &(&proj + &grad_p) - &raw;
        assert!(resid.max_abs() <= 1e-10 * raw.max_abs(), "{}", resid.max_abs());
    }

    #[test]
    fn beltrami_decays_exactly() {
        let g = grid(32);
        let bn = make_beltrami(2.0, g).unwrap();
        let out = simulate(VectorField::zeros(g), bn.clone(), fixed(1e-2), 0.1, None).unwrap();
        let want = heat_evolve(&bn, 0.1, 1.0).unwrap();
        let err = (out.b() - &want).max_abs() / want.max_abs();
        assert!(err < 1e-10, "{err}");
        assert!(out.u().max_abs() < 1e-12);
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = grid(16);
        let z = VectorField::zeros(g);
        let out = simulate(z.clone(), z, MhdParams::default(), 0.05, None).unwrap();
        assert_eq!(out.energy(), 0.0);
    }

    #[test]
    fn observer_cadence_and_t_end() {
        let g = grid(16);
        let u = smooth_field(g, 0.2).scaled(0.1);
        let b = smooth_field(g, 0.9).scaled(0.1);
        let mut times = Vec::new();
        let mut obs = |s: &SolverState| {
            times.push(s.t());
            Ok(())
        };
        let out = simulate(u, b, fixed(0.003), 0.1, Some((0.01, &mut obs))).unwrap();
        assert_eq!(times.len(), 11, "{times:?}");
        assert!((out.t() - 0.1).abs() < 1e-15);
        for (k, t) in times.iter().enumerate() {
            assert!((t - 0.01 * k as f64).abs() < 1e-12, "{times:?}");
        }
    }

    #[test]
    fn zero_horizon_returns_initial_state() {
        let g = grid(16);
        let u = smooth_field(g, 0.2);
        let mut calls = 0;
        let mut obs = |_: &SolverState| {
            calls += 1;
            Ok(())
        };
        let out = simulate(u.clone(), u.clone(), fixed(0.01), 0.0, Some((0.01, &mut obs))).unwrap();
        assert_eq!(out.step_count(), 0);
        assert_eq!((out.u() - &u.to_spectral()).max_abs(), 0.0);
        assert_eq!(calls, 1);
    }

    #[test]
    fn rejects_bad_steps_and_params() {
        let g = grid(16);
        let z = VectorField::zeros(g);
        let s = SolverState::new(z.clone(), z.clone(), MhdParams::default()).unwrap();
        assert!(step(&s, 0.0).is_err());
        assert!(SolverState::new(z.clone(), z.clone(), MhdParams::with_eta(0.0)).is_err());
        let bad = MhdParams {
            dt_policy: DtPolicy::Cfl { safety: 1.5, max_dt: None },
            ..Default::default()
        };
        assert!(SolverState::new(z.clone(), z, bad).is_err());
    }

    #[test]
    fn oversized_steps_abort() {
        let g = grid(16);
        let u = smooth_field(g, 0.2).scaled(40.0);
        let b = smooth_field(g, 1.3).scaled(40.0);
        let params = MhdParams {
            eta: 1e-3,
            ..fixed(0.5)
        };
        let err = simulate(u, b, params, 5.0, None).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }), "{err}");
    }
}
