use std::f64::consts::PI;

use mhd_core::diagnostics::lp_norm;
use mhd_core::solver::spectral_energy;
use mhd_core::spectral::{
    curl, divergence, gradient, heat_evolve, leray_project, Grid, ScalarField, VectorField,
};
use proptest::prelude::*;

const N: usize = 16;

/// A few random Fourier modes with integer wavevectors `|m_j| ≤ 4`.
fn modes() -> impl Strategy<Value = Vec<([i32; 3], f64, f64)>> {
    prop::collection::vec(
        ([-4i32..=4, -4i32..=4, -4i32..=4], -1.0f64..1.0, 0.0f64..(2.0 * PI)),
        1..6,
    )
}

fn scalar(grid: Grid, modes: &[([i32; 3], f64, f64)]) -> ScalarField {
    let k0 = grid.fundamental();
    let modes = modes.to_vec();
    ScalarField::from_fn(grid, move |x| {
        modes
            .iter()
            .map(|(m, a, ph)| {
                let phase = k0 * (m[0] as f64 * x[0] + m[1] as f64 * x[1] + m[2] as f64 * x[2]);
                a * (phase + ph).cos()
            })
            .sum()
    })
}

fn vector(grid: Grid, m: &[Vec<([i32; 3], f64, f64)>; 3]) -> VectorField {
    VectorField::new(scalar(grid, &m[0]), scalar(grid, &m[1]), scalar(grid, &m[2])).unwrap()
}

fn grid() -> Grid {
    Grid::new(N, 3.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval_matches_quadrature(m in [modes(), modes(), modes()]) {
        let g = grid();
        let f = vector(g, &m);
        let quad = lp_norm(&f, 2.0).unwrap().powi(2);
        let spec = spectral_energy(&f);
        prop_assert!((quad - spec).abs() <= 1e-12 * quad.max(1.0));
    }

    #[test]
    fn curl_of_gradient_vanishes(m in modes()) {
        let g = grid();
        let f = scalar(g, &m);
        let scale = gradient(&f).max_abs().max(1.0);
        prop_assert!(curl(&gradient(&f)).max_abs() <= 1e-11 * scale);
    }

    #[test]
    fn leray_is_an_idempotent_projection_onto_solenoidal_fields(m in [modes(), modes(), modes()]) {
        let g = grid();
        let f = vector(g, &m);
        let p = leray_project(&f);
        let scale = f.max_abs().max(1.0) * g.nyquist_wavenumber();
        prop_assert!(divergence(&p).max_abs() <= 1e-11 * scale);
        prop_assert!((&leray_project(&p) - &p).max_abs() <= 1e-12 * f.max_abs().max(1.0));
        // gradients are removed entirely
        let grad = gradient(&scalar(g, &m[0]));
        prop_assert!(leray_project(&grad).max_abs() <= 1e-11 * grad.max_abs().max(1.0));
    }

    #[test]
    fn heat_is_a_semigroup(m in [modes(), modes(), modes()], s in 0.0f64..0.3, t in 0.0f64..0.3) {
        let g = grid();
        let f = vector(g, &m);
        let once = heat_evolve(&f, s + t, 0.7).unwrap();
        let twice = heat_evolve(&heat_evolve(&f, s, 0.7).unwrap(), t, 0.7).unwrap();
        prop_assert!((&once - &twice).max_abs() <= 1e-12 * f.max_abs().max(1.0));
        // and contracts L2
        prop_assert!(spectral_energy(&once) <= spectral_energy(&f) * (1.0 + 1e-14));
    }
}

#[test]
fn heat_of_a_single_mode_is_the_exact_decay() {
    let g = Grid::new(N, 2.0 * PI).unwrap();
    let f = ScalarField::from_fn(g, |x| (2.0 * x[0] - 3.0 * x[2]).sin());
    let t = 0.05;
    let got = heat_evolve(&f, t, 1.0).unwrap();
    let want = f.scaled((-13.0 * t).exp());
    assert!((&got - &want).max_abs() < 1e-14);
}
