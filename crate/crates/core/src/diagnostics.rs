//! Norms, perturbation energies, decay-rate fits and the caloric
//! `Ḃ^{-1}_{∞,∞}` estimate.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::SolverState;
use crate::spectral::{cutoff, fft, heat_evolve, Grid, Mode, ScalarField, VectorField};

/// Scalar or vector field seen as a list of scalar components; norms use
/// the pointwise Euclidean magnitude.
pub trait Components {
    fn grid(&self) -> Grid;
    fn parts(&self) -> Vec<&ScalarField>;
}

impl Components for ScalarField {
    fn grid(&self) -> Grid {
        ScalarField::grid(self)
    }

    fn parts(&self) -> Vec<&ScalarField> {
        vec![self]
    }
}

impl Components for VectorField {
    fn grid(&self) -> Grid {
        VectorField::grid(self)
    }

    fn parts(&self) -> Vec<&ScalarField> {
        self.components().iter().collect()
    }
}

fn nodal_magnitude_sq<F: Components + ?Sized>(f: &F) -> Vec<f64> {
    let grid = f.grid();
    let parts = f.parts();
    let values: Vec<_> = if parts.iter().all(|p| !p.is_spectral()) {
        parts.iter().map(|p| p.physical_values().into_owned()).collect()
    } else {
        let coeffs: Vec<_> = parts.iter().map(|p| p.spectral_coeffs()).collect();
        let refs: Vec<&[Complex64]> = coeffs.iter().map(|c| c.as_ref()).collect();
        fft::inverse_many(&grid, &refs)
    };
    let mut acc = vec![0.0; grid.len()];
    for v in &values {
        acc.par_iter_mut().zip(v.par_iter()).for_each(|(a, x)| *a += x * x);
    }
    acc
}

fn sum_sq_coeffs<F: Components + ?Sized>(f: &F, weight: impl Fn(&Mode) -> f64 + Sync) -> f64 {
    let grid = f.grid();
    let mut total = 0.0;
    for p in f.parts() {
        let c = p.spectral_coeffs();
        total += c
            .par_iter()
            .enumerate()
            .map(|(idx, z)| {
                let w = weight(&grid.mode(idx));
                if w == 0.0 {
                    0.0
                } else {
                    w * z.norm_sqr()
                }
            })
            .sum::<f64>();
    }
    total / grid.volume()
}

/// `(h³ Σ|f|^p)^{1/p}`, or the nodal maximum for `p = ∞`.
pub fn lp_norm<F: Components + ?Sized>(f: &F, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::param(format!("L^p needs p ≥ 1, got {p}")));
    }
    let mag2 = nodal_magnitude_sq(f);
    if p.is_infinite() {
        return Ok(mag2.par_iter().cloned().reduce(|| 0.0, f64::max).sqrt());
    }
    let h3 = f.grid().cell_volume();
    let sum: f64 = if p == 2.0 {
        mag2.par_iter().sum()
    } else {
        mag2.par_iter().map(|m| m.powf(p / 2.0)).sum()
    };
    Ok((h3 * sum).powf(1.0 / p))
}

/// `(Σ (1+|k|²)^k |f̂|² / L³)^{1/2}`.
pub fn hk_norm<F: Components + ?Sized>(f: &F, k: u32) -> f64 {
    sum_sq_coeffs(f, |m| (1.0 + m.k2()).powi(k as i32)).sqrt()
}

/// Homogeneous variant, weight `|k|^{2k}`.
pub fn hk_dot_norm<F: Components + ?Sized>(f: &F, k: u32) -> f64 {
    sum_sq_coeffs(f, |m| m.k2().powi(k as i32)).sqrt()
}

/// Multi-indices `α ∈ ℕ³` with `|α| ≤ k`.
pub fn multi_indices(k: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for order in 0..=k {
        for a in (0..=order).rev() {
            for b in (0..=order - a).rev() {
                out.push([a, b, order - a - b]);
            }
        }
    }
    out
}

fn derivative_symbol(alpha: [u32; 3], m: &Mode) -> Complex64 {
    let mag = m.kd[0].powi(alpha[0] as i32) * m.kd[1].powi(alpha[1] as i32) * m.kd[2].powi(alpha[2] as i32);
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ][((alpha[0] + alpha[1] + alpha[2]) % 4) as usize];
    i_pow * mag
}

/// `max_x (Σ_{|α|≤k} |∂^α f(x)|²)^{1/2}` with spectral derivatives.
pub fn wk_inf_norm<F: Components + ?Sized>(f: &F, k: u32) -> f64 {
    let grid = f.grid();
    let coeffs: Vec<_> = f.parts().iter().map(|p| p.spectral_coeffs()).collect();
    let mut acc = vec![0.0; grid.len()];
    for alpha in multi_indices(k) {
        let derived: Vec<Vec<Complex64>> = coeffs
            .iter()
            .map(|c| {
                c.par_iter()
                    .enumerate()
                    .map(|(idx, z)| z * derivative_symbol(alpha, &grid.mode(idx)))
                    .collect()
            })
            .collect();
        let refs: Vec<&[Complex64]> = derived.iter().map(|c| c.as_slice()).collect();
        for v in fft::inverse_many(&grid, &refs) {
            acc.par_iter_mut().zip(v.par_iter()).for_each(|(a, x)| *a += x * x);
        }
    }
    acc.into_par_iter().reduce(|| 0.0, f64::max).sqrt()
}

/// Number of points on the caloric time grid.
pub const BESOV_TIME_POINTS: usize = 200;

/// Log-spaced probe times `[1e-6 h², 10 L²]`.
pub fn besov_time_grid(grid: &Grid) -> Vec<f64> {
    let lo = (1e-6 * grid.spacing().powi(2)).ln();
    let hi = (10.0 * grid.length().powi(2)).ln();
    (0..BESOV_TIME_POINTS)
        .map(|i| (lo + (hi - lo) * i as f64 / (BESOV_TIME_POINTS - 1) as f64).exp())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BesovEstimate {
    pub value: f64,
    /// Maximizing probe time; near either end of the grid means undersampling.
    pub argmax_t: f64,
}

/// `sup_t √t ‖e^{t η Δ} f‖_{L^∞}` over [`besov_time_grid`].
///
/// Probe times are visited in decreasing order of the bound
/// `√t Σ_k |f̂(k)| e^{-tη|k|²} / L³`, and the scan stops once the bound
/// cannot beat the best value, so the result equals the full scan.
pub fn besov_neg1_inf_norm(f: &VectorField, eta_probe: f64) -> Result<BesovEstimate> {
    if !(eta_probe > 0.0) {
        return Err(Error::param("probe diffusivity must be positive"));
    }
    let grid = f.grid();
    let spectral = f.to_spectral();
    // Σ|f̂| grouped by |m|², so each bound costs one pass over the shells
    let shells = {
        let c = spectral.spectral_coeffs();
        let mut by_m2: BTreeMap<i64, f64> = BTreeMap::new();
        for idx in 0..grid.len() {
            let m = grid.mode(idx).m;
            let amp = (c[0][idx].norm_sqr() + c[1][idx].norm_sqr() + c[2][idx].norm_sqr()).sqrt();
            if amp > 0.0 {
                *by_m2.entry(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).or_default() += amp;
            }
        }
        let k0 = grid.fundamental();
        by_m2
            .into_iter()
            .map(|(m2, a)| (m2 as f64 * k0 * k0, a / grid.volume()))
            .collect::<Vec<_>>()
    };
    let times = besov_time_grid(&grid);
    let mut order: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| {
            let s: f64 = shells.iter().map(|(k2, a)| a * (-eta_probe * t * k2).exp()).sum();
            (t, t.sqrt() * s)
        })
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut best = BesovEstimate {
        value: 0.0,
        argmax_t: 0.0,
    };
    for (t, bound) in order {
        if bound <= best.value {
            break;
        }
        let evolved = heat_evolve(&spectral, t, eta_probe)?;
        let v = t.sqrt() * lp_norm(&evolved, f64::INFINITY)?;
        if v > best.value {
            best = BesovEstimate { value: v, argmax_t: t };
        }
    }
    Ok(best)
}

/// Energies of the perturbation `(v, h) = (u - e^{ηtΔ}u₀, b - e^{ηtΔ}b₀)`.
#[derive(Clone, Debug)]
pub struct PerturbationDiagnostics {
    pub t: f64,
    pub v: VectorField,
    pub h: VectorField,
    /// `e_k = Σ_{|α|≤k} ∫ |∂^α v|² + |∂^α h|²`, `k = 0..=r`.
    pub energy: Vec<f64>,
    /// Same with `P_{≤1}` applied first.
    pub energy_low: Vec<f64>,
    /// Same with `P_{>1}` applied first.
    pub energy_high: Vec<f64>,
    /// `e_k - e_k^{≤1} - e_k^{>1}`, from the overlap `2χ(1-χ)` of the smooth cutoff.
    pub cross: Vec<f64>,
}

/// Above this `r` spectral derivatives start amplifying near-Nyquist noise.
pub const MAX_RECOMMENDED_R: usize = 4;

/// `Σ_{|α|≤k} Π kd_j^{2α_j}` for `k = 0..=r`.
fn derivative_weights(m: &Mode, r: usize) -> Vec<f64> {
    let x = [m.kd[0] * m.kd[0], m.kd[1] * m.kd[1], m.kd[2] * m.kd[2]];
    // complete homogeneous symmetric polynomials h_j(x1,x2,x3)
    let mut h = vec![0.0; r + 1];
    for (j, hj) in h.iter_mut().enumerate() {
        for a in 0..=j {
            for b in 0..=j - a {
                let c = j - a - b;
                *hj += x[0].powi(a as i32) * x[1].powi(b as i32) * x[2].powi(c as i32);
            }
        }
    }
    let mut acc = 0.0;
    h.into_iter()
        .map(|hj| {
            acc += hj;
            acc
        })
        .collect()
}

pub fn perturbation_diagnostics(
    state: &SolverState,
    u0: &VectorField,
    b0: &VectorField,
    r: usize,
) -> Result<PerturbationDiagnostics> {
    let grid = state.grid();
    if u0.grid() != grid || b0.grid() != grid {
        return Err(Error::Shape("initial data and state live on different grids".into()));
    }
    if r > MAX_RECOMMENDED_R {
        log::warn!("energy level r = {r} exceeds {MAX_RECOMMENDED_R}; high derivatives amplify roundoff");
    }
    let eta = state.params().eta;
    let t = state.t();
    let v = state.u() - &heat_evolve(u0, t, eta)?;
    let h = state.b() - &heat_evolve(b0, t, eta)?;
    let vc = v.spectral_coeffs();
    let hc = h.spectral_coeffs();
    let zero = || vec![0.0; 4 * (r + 1)];
    let sums = (0..grid.len())
        .into_par_iter()
        .fold(zero, |mut acc, idx| {
            let mut s = 0.0;
            for d in 0..3 {
                s += vc[d][idx].norm_sqr() + hc[d][idx].norm_sqr();
            }
            if s == 0.0 {
                return acc;
            }
            let m = grid.mode(idx);
            let chi = cutoff(m.k2().sqrt());
            let (lo, hi, cr) = (chi * chi, (1.0 - chi) * (1.0 - chi), 2.0 * chi * (1.0 - chi));
            for (k, w) in derivative_weights(&m, r).into_iter().enumerate() {
                acc[k] += w * s;
                acc[r + 1 + k] += w * s * lo;
                acc[2 * (r + 1) + k] += w * s * hi;
                acc[3 * (r + 1) + k] += w * s * cr;
            }
            acc
        })
        .reduce(zero, |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        });
    let vol = grid.volume();
    let block = |i: usize| sums[i * (r + 1)..(i + 1) * (r + 1)].iter().map(|s| s / vol).collect();
    Ok(PerturbationDiagnostics {
        t,
        v,
        h,
        energy: block(0),
        energy_low: block(1),
        energy_high: block(2),
        cross: block(3),
    })
}

/// Least-squares slope of `ln value` against `ln t` over the points with
/// `t` inside `window` (all points when `None`).
pub fn decay_rate_fit(series: &[(f64, f64)], window: Option<(f64, f64)>) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| window.map_or(true, |(a, b)| *t >= a && *t <= b))
        .cloned()
        .collect();
    if pts.len() < 5 {
        return Err(Error::param(format!(
            "decay fit needs at least 5 points in the window, got {}",
            pts.len()
        )));
    }
    if let Some((t, v)) = pts.iter().find(|(t, v)| !(*t > 0.0 && *v > 0.0)) {
        return Err(Error::param(format!(
            "decay fit needs positive times and values, got ({t}, {v})"
        )));
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|(t, v)| (t.ln(), v.ln())).collect();
    least_squares_slope(&logs)
}

/// Slope of the least-squares line through `(x, y)` points.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> Result<f64> {
    if pts.len() < 2 {
        return Err(Error::param("a slope needs at least two points"));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::param("a slope needs distinct abscissae"));
    }
    Ok(sxy / sxx)
}

/// `‖e^{ηtΔ}f‖_{H^r} / ((1+(ηt)^{-r})^{1/2} ‖f‖_{L²})`; 0 for `f = 0`.
pub fn heat_smoothing_check<F>(f: &F, t: f64, eta: f64, r: u32) -> Result<f64>
where
    F: Components + crate::spectral::Field,
{
    if !(t > 0.0 && eta > 0.0) {
        return Err(Error::param("smoothing check needs t > 0 and η > 0"));
    }
    let l2 = hk_norm(f, 0);
    if l2 == 0.0 {
        return Ok(0.0);
    }
    let evolved = heat_evolve(f, t, eta)?;
    let s = eta * t;
    Ok(hk_norm(&evolved, r) / ((1.0 + s.powi(-(r as i32))).sqrt() * l2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum NormKind {
    Lp(f64),
    Hk(u32),
    HkDot(u32),
    WkInf(u32),
    BesovNeg1InfInf,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Lp(p) if p.is_infinite() => write!(f, "Linf"),
            NormKind::Lp(p) => write!(f, "L{p}"),
            NormKind::Hk(k) => write!(f, "H{k}"),
            NormKind::HkDot(k) => write!(f, "Hdot{k}"),
            NormKind::WkInf(k) => write!(f, "W{k}inf"),
            NormKind::BesovNeg1InfInf => write!(f, "Besov-1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormEntry {
    pub kind: NormKind,
    pub value: f64,
    /// Maximizing probe time for the Besov entry.
    pub argmax_t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub field: String,
    pub entries: Vec<NormEntry>,
}

/// Norms usually printed for a snapshot field.
pub const DEFAULT_NORMS: [NormKind; 9] = [
    NormKind::Lp(1.0),
    NormKind::Lp(2.0),
    NormKind::Lp(f64::INFINITY),
    NormKind::Hk(1),
    NormKind::Hk(2),
    NormKind::Hk(3),
    NormKind::WkInf(1),
    NormKind::WkInf(2),
    NormKind::BesovNeg1InfInf,
];

impl NormReport {
    pub fn compute(field: &str, f: &VectorField, kinds: &[NormKind]) -> Result<Self> {
        let entries = kinds
            .iter()
            .map(|&kind| {
                let (value, argmax_t) = match kind {
                    NormKind::Lp(p) => (lp_norm(f, p)?, None),
                    NormKind::Hk(k) => (hk_norm(f, k), None),
                    NormKind::HkDot(k) => (hk_dot_norm(f, k), None),
                    NormKind::WkInf(k) => (wk_inf_norm(f, k), None),
                    NormKind::BesovNeg1InfInf => {
                        let b = besov_neg1_inf_norm(f, 1.0)?;
                        (b.value, Some(b.argmax_t))
                    }
                };
                Ok(NormEntry {
                    kind,
                    value,
                    argmax_t,
                })
            })
            .collect::<Result<_>>()?;
        Ok(NormReport {
            field: field.to_string(),
            entries,
        })
    }

    pub fn get(&self, kind: NormKind) -> Option<f64> {
        self.entries.iter().find(|e| e.kind == kind).map(|e| e.value)
    }
}

impl fmt::Display for NormReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(f, "{}.{} = {:.9e}", self.field, e.kind, e.value)?;
            if let Some(t) = e.argmax_t {
                write!(f, "  (argmax t = {t:.4e})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::make_beltrami;
    use crate::solver::MhdParams;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn g(n: usize) -> Grid {
        Grid::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn lp_of_constants_and_sines() {
        let grid = g(16);
        let one = ScalarField::constant(grid, 1.0);
        for p in [1.0, 2.0, 3.0, 4.0, 6.0] {
            let want = (2.0 * PI).powf(3.0 / p);
            assert!((lp_norm(&one, p).unwrap() - want).abs() < 1e-12 * want);
        }
        let s = ScalarField::from_fn(grid, |x| x[0].sin());
        let want = (2.0 * PI).powf(1.5) / 2f64.sqrt();
        assert!((lp_norm(&s, 2.0).unwrap() - want).abs() < 1e-12 * want);
        assert!((hk_norm(&s, 0) - want).abs() < 1e-10 * want);
        assert!(lp_norm(&s, 0.5).is_err());
    }

    #[test]
    fn beltrami_norms() {
        let grid = g(32);
        let b = make_beltrami(2.0, grid).unwrap();
        assert!((lp_norm(&b, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        assert!((wk_inf_norm(&b, 1) - 5f64.sqrt()).abs() < 1e-10);
        assert!((wk_inf_norm(&b, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn h1_of_a_single_mode() {
        let grid = g(16);
        let s = ScalarField::from_fn(grid, |x| (2.0 * x[2]).sin());
        let want = 5f64.sqrt() * (2.0 * PI).powf(1.5) / 2f64.sqrt();
        assert!((hk_norm(&s, 1) - want).abs() < 1e-10 * want);
        assert_eq!(hk_norm(&ScalarField::zeros(grid), 3), 0.0);
    }

    #[test]
    fn constants_have_trivial_wk() {
        let grid = g(16);
        let c = ScalarField::constant(grid, -2.5);
        for k in 0..4 {
            assert!((wk_inf_norm(&c, k) - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn multi_index_counts() {
        // C(k+3, 3)
        assert_eq!(multi_indices(0).len(), 1);
        assert_eq!(multi_indices(1).len(), 4);
        assert_eq!(multi_indices(3).len(), 20);
    }

    #[test]
    fn besov_of_beltrami() {
        let n_freq = 4.0;
        let b = make_beltrami(n_freq, g(32)).unwrap();
        let est = besov_neg1_inf_norm(&b, 1.0).unwrap();
        let want = (-0.5f64).exp() / (n_freq * 2f64.sqrt());
        assert!((est.value - want).abs() < 0.02 * want, "{est:?} vs {want}");
        let t_star = 1.0 / (2.0 * n_freq * n_freq);
        assert!((est.argmax_t / t_star).ln().abs() < 0.2);
        let z = besov_neg1_inf_norm(&VectorField::zeros(g(16)), 1.0).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn exact_power_law_fit() {
        let series: Vec<_> = (1..=10).map(|i| (i as f64, (i as f64).powi(-2))).collect();
        assert!((decay_rate_fit(&series, None).unwrap() + 2.0).abs() < 1e-12);
        assert!(decay_rate_fit(&series[..4], None).is_err());
        assert!(decay_rate_fit(&series, Some((8.0, 10.0))).is_err());
    }

    fn random_field(grid: Grid, seed: u64, band: i64) -> VectorField {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for _ in 0..24 {
            let k = [
                rng.gen_range(-band..=band) as f64,
                rng.gen_range(-band..=band) as f64,
                rng.gen_range(-band..=band) as f64,
            ];
            let amp = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            terms.push((k, amp, rng.gen_range(0.0..2.0 * PI)));
        }
        VectorField::from_fn(grid, move |x| {
            let mut out = [0.0; 3];
            for (k, a, ph) in &terms {
                let s = (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + ph).cos();
                for d in 0..3 {
                    out[d] += a[d] * s;
                }
            }
            out
        })
    }

    #[test]
    fn smoothing_ratio_stays_below_two() {
        let grid = g(16);
        for seed in 0..4 {
            let f = random_field(grid, seed, 7);
            let ratio = heat_smoothing_check(&f, 0.01, 1.0, 2).unwrap();
            assert!(ratio <= 2.0, "{ratio}");
            assert!(heat_smoothing_check(&f, 50.0, 1.0, 2).unwrap() < 0.1);
        }
        assert_eq!(heat_smoothing_check(&VectorField::zeros(grid), 0.1, 1.0, 2).unwrap(), 0.0);
    }

    #[test]
    fn perturbation_energies() {
        let grid = g(16);
        let u0 = random_field(grid, 7, 3);
        let b0 = random_field(grid, 8, 3);
        let s = SolverState::new(u0.clone(), b0.clone(), MhdParams::default()).unwrap();
        let d = perturbation_diagnostics(&s, &u0, &b0, 3).unwrap();
        assert!(d.energy.iter().all(|e| *e == 0.0));

        // (u, b) = (u0 + w, b0) at t = 0: energies are those of w alone.
        let w = random_field(grid, 9, 5);
        let s = SolverState::new(&u0 + &w, b0.clone(), MhdParams::default()).unwrap();
        let d = perturbation_diagnostics(&s, &u0, &b0, 3).unwrap();
        let l2 = hk_norm(&w, 0);
        assert!((d.energy[0] - l2 * l2).abs() < 1e-10 * l2 * l2);
        for k in 0..=3 {
            if k > 0 {
                assert!(d.energy[k] >= d.energy[k - 1]);
            }
            let sum = d.energy_low[k] + d.energy_high[k] + d.cross[k];
            assert!((sum - d.energy[k]).abs() < 1e-12 * d.energy[k]);
            assert!(d.cross[k] >= 0.0);
        }
    }

    #[test]
    fn report_lists_requested_norms() {
        let b = make_beltrami(2.0, g(16)).unwrap();
        let r = NormReport::compute("b", &b, &[NormKind::Lp(2.0), NormKind::Hk(0)]).unwrap();
        let (a, c) = (r.get(NormKind::Lp(2.0)).unwrap(), r.get(NormKind::Hk(0)).unwrap());
        assert!((a - c).abs() < 1e-10 * a);
        assert!(r.to_string().contains("b.L2"));
    }
}
