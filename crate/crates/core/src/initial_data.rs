//! Explicit large initial data: a localized Beltrami field plus a small
//! Gaussian-windowed ABC-type perturbation prepared by backward heat flow.
//!
//! ```text
//! u0 = M curl(φ B_N)
//! b0 = M curl(φ B_N) + ρ e^{-ηTΔ} curl(ψ W)
//! φ = (1+|x|²)^{-α},  B_N = (sin N x3, cos N x3, 0)
//! ψ = e^{-|x|²/(8ηT)}, W = (cos x2, cos x3, cos x1)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{curl, Grid, ScalarField, VectorField};

/// Parameters of the initial data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDataParams {
    /// Velocity amplitude `M`.
    pub amplitude: f64,
    /// Perturbation amplitude `ρ`.
    pub rho: f64,
    /// Beltrami frequency `N`.
    pub frequency: f64,
    /// Window decay exponent `α`.
    pub alpha: f64,
    /// Target reconnection time `T`.
    pub time: f64,
    /// Resistivity (= viscosity) `η`.
    pub eta: f64,
}

impl Default for InitialDataParams {
    fn default() -> Self {
        InitialDataParams {
            amplitude: 1.0,
            rho: 1e-3,
            frequency: 8.0,
            alpha: 2.0,
            time: 0.1,
            eta: 1.0,
        }
    }
}

impl InitialDataParams {
    /// Checks the parameter rules, including compatibility with `grid`.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.alpha >= 1.5) {
            return Err(Error::param(format!(
                "α ≥ 3/2 required, got α = {}",
                self.alpha
            )));
        }
        if !(self.amplitude >= 0.0) {
            return Err(Error::param("M ≥ 0 required"));
        }
        if !(self.rho >= 0.0) {
            return Err(Error::param("ρ ≥ 0 required"));
        }
        if !(self.time > 0.0) {
            return Err(Error::param("T > 0 required"));
        }
        if !(self.eta > 0.0) {
            return Err(Error::param("η > 0 required"));
        }
        if !(self.frequency > 0.0) {
            return Err(Error::param("N > 0 required"));
        }
        if !grid.is_periodic_frequency(self.frequency) {
            return Err(Error::param(format!(
                "N·L/(2π) not an integer (N = {}, L = {})",
                self.frequency,
                grid.length()
            )));
        }
        if !grid.is_periodic_frequency(1.0) {
            return Err(Error::param(format!(
                "L/(2π) not an integer (L = {})",
                grid.length()
            )));
        }
        if self.frequency < 4.0 * self.alpha {
            return Err(Error::param(format!(
                "N ≥ 4α required, got N = {}, α = {}",
                self.frequency, self.alpha
            )));
        }
        if self.frequency < 8.0 * self.alpha {
            log::warn!(
                "N = {} is below the recommended margin 8α = {}",
                self.frequency,
                8.0 * self.alpha
            );
        }
        Ok(())
    }
}

fn check_beltrami_frequency(freq: f64, grid: &Grid) -> Result<()> {
    if freq == 0.0 || !freq.is_finite() {
        return Err(Error::param("Beltrami frequency must be nonzero"));
    }
    if !grid.is_periodic_frequency(freq) {
        return Err(Error::param(format!(
            "N·L/(2π) not an integer (N = {freq}, L = {})",
            grid.length()
        )));
    }
    Ok(())
}

/// `B_N = (sin N x3, cos N x3, 0)`.
pub fn make_beltrami(freq: f64, grid: Grid) -> Result<VectorField> {
    check_beltrami_frequency(freq, &grid)?;
    Ok(VectorField::from_fn(grid, move |x| {
        let (s, c) = (freq * x[2]).sin_cos();
        [s, c, 0.0]
    }))
}

/// `W = (cos x2, cos x3, cos x1)`; needs `L` to be a multiple of `2π`.
pub fn make_w(grid: Grid) -> Result<VectorField> {
    if !grid.is_periodic_frequency(1.0) {
        return Err(Error::param(format!(
            "L/(2π) not an integer (L = {})",
            grid.length()
        )));
    }
    Ok(VectorField::from_fn(grid, |x| [x[1].cos(), x[2].cos(), x[0].cos()]))
}

pub fn phi(alpha: f64, x: [f64; 3]) -> f64 {
    (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).powf(-alpha)
}

pub fn psi(eta: f64, time: f64, x: [f64; 3]) -> f64 {
    (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (8.0 * eta * time)).exp()
}

pub fn make_phi(alpha: f64, grid: Grid) -> ScalarField {
    ScalarField::from_fn(grid, move |x| phi(alpha, x))
}

pub fn make_psi(eta: f64, time: f64, grid: Grid) -> ScalarField {
    ScalarField::from_fn(grid, move |x| psi(eta, time, x))
}

/// Pointwise closed form `curl(φ B_N) = N φ B_N + ∇φ × B_N`.
pub fn curl_phi_beltrami_exact(alpha: f64, freq: f64, x: [f64; 3]) -> [f64; 3] {
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    let p = (1.0 + r2).powf(-alpha);
    let dp = -2.0 * alpha * (1.0 + r2).powf(-alpha - 1.0);
    let g = [dp * x[0], dp * x[1], dp * x[2]];
    let (s, c) = (freq * x[2]).sin_cos();
    let b = [s, c, 0.0];
    [
        freq * p * b[0] + g[1] * b[2] - g[2] * b[1],
        freq * p * b[1] + g[2] * b[0] - g[0] * b[2],
        freq * p * b[2] + g[0] * b[1] - g[1] * b[0],
    ]
}

/// Spectral curl of the sampled product `φ B_N` (spectral representation).
pub fn curl_phi_beltrami(alpha: f64, freq: f64, grid: Grid) -> Result<VectorField> {
    check_beltrami_frequency(freq, &grid)?;
    let prod = VectorField::from_fn(grid, move |x| {
        let p = phi(alpha, x);
        let (s, c) = (freq * x[2]).sin_cos();
        [p * s, p * c, 0.0]
    });
    Ok(curl(&prod))
}

/// `u0 = M curl(φ B_N)`, spectral representation.
pub fn build_u0(params: &InitialDataParams, grid: Grid) -> Result<VectorField> {
    params.validate(&grid)?;
    Ok(curl_phi_beltrami(params.alpha, params.frequency, grid)?.scaled(params.amplitude))
}

/// Continuum Fourier transform of `ψ` at wavevector `k`:
/// `(8πηT)^{3/2} e^{-2ηT|k|²}`.
pub fn analytic_ft_psi(eta: f64, time: f64, k: [f64; 3]) -> f64 {
    let s = eta * time;
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    (8.0 * PI * s).powf(1.5) * (-2.0 * s * k2).exp()
}

/// Fourier coefficients of `curl(ψW)` assembled in closed form: each
/// component of `ψW` is a pair of Gaussians shifted by `±e_j`, followed by
/// the curl symbol `ik×`. With `backward`, every mode is multiplied by
/// `e^{+ηT|k|²}`, which is the exact backward heat flow of the continuum
/// field; the product stays bounded because the Gaussians decay faster.
pub fn spectral_psiw_curl(eta: f64, time: f64, backward: bool, grid: Grid) -> Result<VectorField> {
    if !(eta > 0.0 && time > 0.0) {
        return Err(Error::param("η > 0 and T > 0 required"));
    }
    if !grid.is_periodic_frequency(1.0) {
        return Err(Error::param(format!(
            "L/(2π) not an integer (L = {})",
            grid.length()
        )));
    }
    let s = eta * time;
    let coeffs: Vec<[Complex64; 3]> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let mode = grid.mode(idx);
            let k = mode.k;
            let shifted = |axis: usize| {
                let mut plus = k;
                let mut minus = k;
                plus[axis] -= 1.0;
                minus[axis] += 1.0;
                0.5 * (analytic_ft_psi(eta, time, plus) + analytic_ft_psi(eta, time, minus))
            };
            // (ψW)^ = (ψ cos x2, ψ cos x3, ψ cos x1)^
            let mut pw = [shifted(1), shifted(2), shifted(0)];
            if backward {
                let amp = (s * mode.k2()).exp();
                pw.iter_mut().for_each(|v| *v *= amp);
            }
            let kd = mode.kd;
            let i = Complex64::new(0.0, 1.0);
            [
                i * (kd[1] * pw[2] - kd[2] * pw[1]),
                i * (kd[2] * pw[0] - kd[0] * pw[2]),
                i * (kd[0] * pw[1] - kd[1] * pw[0]),
            ]
        })
        .collect();
    let comp = |d: usize| coeffs.iter().map(|c| c[d]).collect::<Vec<_>>();
    VectorField::from_spectral(grid, [comp(0), comp(1), comp(2)])
}

/// `curl(ψW)` from the sampled product, for comparison with the closed form.
pub fn sampled_psiw_curl(eta: f64, time: f64, grid: Grid) -> Result<VectorField> {
    if !grid.is_periodic_frequency(1.0) {
        return Err(Error::param("L/(2π) not an integer"));
    }
    let prod = VectorField::from_fn(grid, move |x| {
        let p = psi(eta, time, x);
        [p * x[1].cos(), p * x[2].cos(), p * x[0].cos()]
    });
    Ok(curl(&prod))
}

/// The backward-heated perturbation profile `e^{-ηTΔ} curl(ψW)`.
pub fn perturbation_profile(params: &InitialDataParams, grid: Grid) -> Result<VectorField> {
    spectral_psiw_curl(params.eta, params.time, true, grid)
}

/// `b0 = u0 + ρ e^{-ηTΔ} curl(ψW)`, spectral representation.
pub fn build_b0(params: &InitialDataParams, grid: Grid) -> Result<VectorField> {
    let u0 = build_u0(params, grid)?;
    if params.rho == 0.0 {
        return Ok(u0);
    }
    let pert = perturbation_profile(params, grid)?;
    Ok(u0.axpy(params.rho, &pert))
}

/// Largest `ρ` for which `b0` provably has no zeros at the grid nodes
/// within `radius` of the origin:
/// `ρ* = min|u0| / (2 max|e^{-ηTΔ} curl(ψW)|)`.
pub fn rho_threshold(params: &InitialDataParams, grid: Grid, radius: f64) -> Result<f64> {
    let u0 = build_u0(params, grid)?;
    let pert = perturbation_profile(params, grid)?;
    let umag = u0.magnitude();
    let uvals = umag.physical_values();
    let min_u = grid
        .nodes()
        .filter(|(_, x)| x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= radius * radius)
        .fold(f64::INFINITY, |m, (idx, _)| m.min(uvals[idx]));
    let max_p = pert.max_abs();
    if max_p == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(min_u / (2.0 * max_p))
}
