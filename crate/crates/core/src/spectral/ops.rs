//! Spectral calculus on the periodic box: derivatives, Leray projection,
//! heat semigroup, frequency cutoffs and 2/3-rule dealiasing.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{Field, ScalarField, VectorField};
use super::grid::{Grid, Mode};
use crate::error::{Error, Result};

/// Modes whose backward-heat multiplier would exceed this are zeroed.
pub const DEFAULT_AMPLIFICATION_CAP: f64 = 1e12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn spectral_components(f: &VectorField) -> [Vec<Complex64>; 3] {
    let [x, y, z] = f.spectral_coeffs();
    [x.into_owned(), y.into_owned(), z.into_owned()]
}

fn vector_from(grid: Grid, c: [Vec<Complex64>; 3]) -> VectorField {
    let [x, y, z] = c;
    VectorField::from_components([
        ScalarField::spectral_unchecked(grid, x),
        ScalarField::spectral_unchecked(grid, y),
        ScalarField::spectral_unchecked(grid, z),
    ])
}

/// `∂f/∂x_axis`.
pub fn derivative(f: &ScalarField, axis: usize) -> ScalarField {
    f.apply_symbol(|m| I * m.kd[axis])
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let s = f.to_spectral();
    VectorField::from_components([derivative(&s, 0), derivative(&s, 1), derivative(&s, 2)])
}

pub fn divergence(f: &VectorField) -> ScalarField {
    let grid = f.grid();
    let [x, y, z] = f.spectral_coeffs();
    let out = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let m = grid.mode(idx);
            I * (m.kd[0] * x[idx] + m.kd[1] * y[idx] + m.kd[2] * z[idx])
        })
        .collect();
    ScalarField::spectral_unchecked(grid, out)
}

pub fn curl(f: &VectorField) -> VectorField {
    let grid = f.grid();
    let [x, y, z] = f.spectral_coeffs();
    let mut out = [
        vec![Complex64::default(); grid.len()],
        vec![Complex64::default(); grid.len()],
        vec![Complex64::default(); grid.len()],
    ];
    let [ox, oy, oz] = &mut out;
    ox.par_iter_mut()
        .zip(oy.par_iter_mut())
        .zip(oz.par_iter_mut())
        .enumerate()
        .for_each(|(idx, ((cx, cy), cz))| {
            let k = grid.mode(idx).kd;
            *cx = I * (k[1] * z[idx] - k[2] * y[idx]);
            *cy = I * (k[2] * x[idx] - k[0] * z[idx]);
            *cz = I * (k[0] * y[idx] - k[1] * x[idx]);
        });
    vector_from(grid, out)
}

pub fn laplacian<F: Field>(f: &F) -> F {
    f.multiply_modes(|m| -m.k2())
}

/// Spectral Jacobian `J[i][j] = ∂_j F_i`, all entries in spectral form.
pub fn jacobian_field(f: &VectorField) -> [[ScalarField; 3]; 3] {
    let s = f.to_spectral();
    let row = |i: usize| {
        let c = s.component(i);
        [derivative(c, 0), derivative(c, 1), derivative(c, 2)]
    };
    [row(0), row(1), row(2)]
}

/// Projection onto divergence-free fields, `(I - k kᵀ/|k|²)` per mode.
/// Modes with vanishing derivative wavevector (the mean) pass through.
pub fn leray_project(f: &VectorField) -> VectorField {
    let grid = f.grid();
    let mut c = spectral_components(f);
    let [x, y, z] = &mut c;
    x.par_iter_mut()
        .zip(y.par_iter_mut())
        .zip(z.par_iter_mut())
        .enumerate()
        .for_each(|(idx, ((cx, cy), cz))| {
            let k = grid.mode(idx).kd;
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 > 0.0 {
                let dot = (k[0] * *cx + k[1] * *cy + k[2] * *cz) / k2;
                *cx -= k[0] * dot;
                *cy -= k[1] * dot;
                *cz -= k[2] * dot;
            }
        });
    vector_from(grid, c)
}

/// Heat semigroup `e^{ητΔ}`. Backward flow (`ητ < 0`) is refused here; use
/// [`heat_evolve_capped`] for that.
pub fn heat_evolve<F: Field>(f: &F, tau: f64, eta: f64) -> Result<F> {
    if tau * eta < 0.0 {
        return Err(Error::BackwardHeat(tau * eta));
    }
    Ok(heat_forward(f, tau * eta))
}

/// Heat semigroup for either time direction. When running backward, modes
/// whose multiplier exceeds `cap` are zeroed.
pub fn heat_evolve_capped<F: Field>(f: &F, tau: f64, eta: f64, cap: f64) -> F {
    let s = tau * eta;
    if s >= 0.0 {
        return heat_forward(f, s);
    }
    let log_cap = cap.ln();
    f.multiply_modes(move |m| {
        let e = -s * m.k2();
        if e > log_cap {
            0.0
        } else {
            e.exp()
        }
    })
}

/// `e^{sΔ}` for diffusive time `s = ητ ≥ 0`.
pub(crate) fn heat_forward<F: Field>(f: &F, s: f64) -> F {
    debug_assert!(s >= 0.0);
    f.multiply_modes(move |m| (-s * m.k2()).exp())
}

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth radial cutoff: 1 on `|ξ| ≤ 1/2`, 0 on `|ξ| ≥ 1`, C^∞ between.
pub fn cutoff(xi: f64) -> f64 {
    let r = xi.abs();
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let a = bump(2.0 - 2.0 * r);
        let b = bump(2.0 * r - 1.0);
        a / (a + b)
    }
}

/// `P_{≤R}`: multiplier `χ(|k|/R)`.
pub fn freq_project_low<F: Field>(f: &F, radius: f64) -> F {
    assert!(radius > 0.0, "cutoff radius must be positive");
    f.multiply_modes(move |m| cutoff(m.k2().sqrt() / radius))
}

/// `P_{>R} = 1 - P_{≤R}`.
pub fn freq_project_high<F: Field>(f: &F, radius: f64) -> F {
    assert!(radius > 0.0, "cutoff radius must be positive");
    f.multiply_modes(move |m| 1.0 - cutoff(m.k2().sqrt() / radius))
}

/// Whether a mode survives the 2/3 rule (`max_j |m_j| ≤ n/3`).
pub fn is_resolved(mode: &Mode, n: usize) -> bool {
    3 * mode.max_abs_m() as usize <= n
}

pub fn dealias<F: Field>(f: &F) -> F {
    let n = f.grid().n();
    f.multiply_modes(move |m| if is_resolved(m, n) { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_diff(a: &VectorField, b: &VectorField) -> f64 {
        (a - b).max_abs()
    }

    fn beltrami(g: Grid, n: f64) -> VectorField {
        VectorField::from_fn(g, |x| [(n * x[2]).sin(), (n * x[2]).cos(), 0.0])
    }

    #[test]
    fn curl_of_beltrami_is_eigenfield() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let b = beltrami(g, 2.0);
        let c = curl(&b);
        assert!(max_diff(&c, &b.scaled(2.0)) < 1e-12);
        assert!(divergence(&b).max_abs() < 1e-12);
    }

    #[test]
    fn curl_of_w_has_plus_sign() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let w = VectorField::from_fn(g, |x| [x[1].cos(), x[2].cos(), x[0].cos()]);
        let want = VectorField::from_fn(g, |x| [x[2].sin(), x[0].sin(), x[1].sin()]);
        assert!(max_diff(&curl(&w), &want) < 1e-12);
    }

    #[test]
    fn curl_of_constant_vanishes() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let c = VectorField::from_fn(g, |_| [1.0, -2.0, 0.5]);
        assert!(curl(&c).max_abs() < 1e-12);
    }

    #[test]
    fn gradient_of_sine() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0].sin());
        let want = VectorField::from_fn(g, |x| [x[0].cos(), 0.0, 0.0]);
        assert!(max_diff(&gradient(&f), &want) < 1e-12);
    }

    #[test]
    fn jacobian_matches_centered_differences() {
        // e^{sin x1}: second-order finite differences converge like h^2
        let errs: Vec<f64> = [16usize, 32]
            .iter()
            .map(|&n| {
                let g = Grid::new(n, 2.0 * PI).unwrap();
                let f = VectorField::from_fn(g, |x| [x[0].sin().exp(), 0.0, 0.0]);
                let j = jacobian_field(&f);
                let dx = j[0][0].physical_values();
                let h = g.spacing();
                let mut err = 0.0f64;
                for (idx, x) in g.nodes() {
                    let fd = ((x[0] + h).sin().exp() - (x[0] - h).sin().exp()) / (2.0 * h);
                    err = err.max((dx[idx] - fd).abs());
                }
                err
            })
            .collect();
        let ratio = errs[0] / errs[1];
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn leray_kills_gradients_and_keeps_solenoidal() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let grad = VectorField::from_fn(g, |x| [x[0].cos(), 0.0, 0.0]);
        assert!(leray_project(&grad).max_abs() < 1e-12);
        let b = beltrami(g, 2.0);
        assert!(max_diff(&leray_project(&b), &b) < 1e-12);
    }

    #[test]
    fn leray_passes_zero_mode() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let c = VectorField::from_fn(g, |_| [1.0, 2.0, 3.0]);
        assert!(max_diff(&leray_project(&c), &c) < 1e-12);
    }

    #[test]
    fn heat_of_beltrami_decays_exponentially() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let b = beltrami(g, 2.0);
        let out = heat_evolve(&b, 0.3, 0.5).unwrap();
        let want = b.scaled((-0.5f64 * 0.3 * 4.0).exp());
        assert!(max_diff(&out, &want) < 1e-12);
        let same = heat_evolve(&b, 0.0, 1.0).unwrap();
        assert!(max_diff(&same, &b) < 1e-12);
    }

    #[test]
    fn backward_heat_needs_a_cap() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0].sin());
        assert!(matches!(heat_evolve(&f, -1.0, 1.0), Err(Error::BackwardHeat(_))));
        // a tight cap keeps roundoff in the high modes from being amplified
        let back = heat_evolve_capped(&f, -1.0, 1.0, 5.0);
        let want = f.scaled(1f64.exp());
        assert!((&back - &want).max_abs() < 1e-12);
        // the cap zeroes modes whose multiplier would exceed it
        let capped = heat_evolve_capped(&f, -1.0, 1.0, 2.0);
        assert!(capped.max_abs() < 1e-14);
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(cutoff(0.0), 1.0);
        assert_eq!(cutoff(0.5), 1.0);
        assert_eq!(cutoff(1.0), 0.0);
        assert_eq!(cutoff(3.0), 0.0);
        assert!((cutoff(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = cutoff(0.5 + 0.005 * i as f64);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn frequency_projections() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let b = beltrami(g, 2.0);
        let lo = freq_project_low(&b, 2.0);
        assert!(lo.max_abs() < 1e-14);
        let lo = freq_project_low(&b, 4.0);
        assert!(max_diff(&lo, &b) < 1e-12);
        let f = VectorField::from_fn(g, |x| [(x[0] + x[1]).sin(), (x[2] * 3.0).cos(), x[1].sin()]);
        let sum = &freq_project_low(&f, 3.0) + &freq_project_high(&f, 3.0);
        assert!(max_diff(&sum, &f) < 1e-12);
    }

    #[test]
    fn dealias_cuts_top_third() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let low = ScalarField::from_fn(g, |x| (5.0 * x[0]).cos() + (2.0 * x[1]).sin());
        let d = dealias(&low);
        assert!((&d - &low).max_abs() < 1e-12);
        let high = ScalarField::from_fn(g, |x| (7.0 * x[0]).cos());
        assert!(dealias(&high).max_abs() < 1e-12);
        let mixed = &low + &high;
        let once = dealias(&mixed);
        let twice = dealias(&once);
        assert!((&once - &twice).max_abs() == 0.0);
    }
}
