//! Critical points of vector fields: Newton search on an interpolated
//! field, eigenvalue classification, and C¹ distances.

mod interp;

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub use interp::{Interpolator, InterpolatorRegistry, Lagrange, DEFAULT_KERNEL};

use crate::error::{Error, Result};
use crate::spectral::{fft, jacobian_field, Grid, VectorField};

pub const NEWTON_TOL: f64 = 1e-9;
pub const HYPER_TOL: f64 = 1e-4;
pub const MAX_NEWTON_ITERATIONS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Hyperbolic,
    NonHyperbolic,
    /// Within a factor 2 of the hyperbolicity threshold.
    Unresolved,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Hyperbolic => "hyperbolic",
            Classification::NonHyperbolic => "non-hyperbolic",
            Classification::Unresolved => "unresolved",
        })
    }
}

/// `hyperbolic` iff `min|Re λ| > tol·max|λ|`, with a factor-2 band around the
/// threshold reported as unresolved.
pub fn classify(eigenvalues: &[Complex64; 3], hyper_tol: f64) -> Classification {
    let radius = eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
    if radius == 0.0 {
        return Classification::NonHyperbolic;
    }
    let min_re = eigenvalues.iter().map(|l| l.re.abs()).fold(f64::INFINITY, f64::min);
    let threshold = hyper_tol * radius;
    if min_re > 2.0 * threshold {
        Classification::Hyperbolic
    } else if min_re >= 0.5 * threshold {
        Classification::Unresolved
    } else {
        Classification::NonHyperbolic
    }
}

pub fn eigenvalues(j: &Matrix3<f64>) -> [Complex64; 3] {
    let ev = j.complex_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2]];
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub x: [f64; 3],
    pub residual: f64,
    /// `J[i][j] = ∂_j F_i`.
    pub jacobian: [[f64; 3]; 3],
    pub eigenvalues: [(f64, f64); 3],
    pub classification: Classification,
}

impl CriticalPoint {
    fn new(x: [f64; 3], residual: f64, j: &Matrix3<f64>, hyper_tol: f64) -> Self {
        let ev = eigenvalues(j);
        CriticalPoint {
            x,
            residual,
            jacobian: [
                [j[(0, 0)], j[(0, 1)], j[(0, 2)]],
                [j[(1, 0)], j[(1, 1)], j[(1, 2)]],
                [j[(2, 0)], j[(2, 1)], j[(2, 2)]],
            ],
            eigenvalues: ev.map(|l| (l.re, l.im)),
            classification: classify(&ev, hyper_tol),
        }
    }

    pub fn eigenvalues_complex(&self) -> [Complex64; 3] {
        self.eigenvalues.map(|(re, im)| Complex64::new(re, im))
    }

    /// `min|Re λ| / max|λ|`.
    pub fn hyperbolicity_margin(&self) -> f64 {
        let ev = self.eigenvalues_complex();
        let radius = ev.iter().map(|l| l.norm()).fold(0.0, f64::max);
        if radius == 0.0 {
            return 0.0;
        }
        ev.iter().map(|l| l.re.abs()).fold(f64::INFINITY, f64::min) / radius
    }
}

/// A vector field and its nine spectral derivatives on the grid, ready for
/// off-grid evaluation.
pub struct FieldSampler {
    grid: Grid,
    /// Per node: `F_0..F_2` followed by `∂_j F_i` row-major.
    data: Vec<[f64; 12]>,
    kernel: Box<dyn Interpolator>,
}

impl FieldSampler {
    pub fn new(f: &VectorField, kernel: Box<dyn Interpolator>) -> Self {
        let grid = f.grid();
        let spec = f.to_spectral();
        let jac = jacobian_field(&spec);
        let mut data = vec![[0.0; 12]; grid.len()];
        {
            let c = spec.spectral_coeffs();
            let vals = fft::inverse_many(&grid, &[&c[0], &c[1], &c[2]]);
            for (d, v) in vals.iter().enumerate() {
                data.par_iter_mut().zip(v.par_iter()).for_each(|(slot, x)| slot[d] = *x);
            }
        }
        for (i, row) in jac.iter().enumerate() {
            let c: Vec<_> = row.iter().map(|s| s.spectral_coeffs()).collect();
            let vals = fft::inverse_many(&grid, &[&c[0], &c[1], &c[2]]);
            for (j, v) in vals.iter().enumerate() {
                let slot_idx = 3 + 3 * i + j;
                data.par_iter_mut().zip(v.par_iter()).for_each(|(slot, x)| slot[slot_idx] = *x);
            }
        }
        FieldSampler { grid, data, kernel }
    }

    pub fn with_kernel_name(f: &VectorField, kernel: &str) -> Result<Self> {
        Ok(Self::new(f, InterpolatorRegistry::with_builtins().create(kernel)?))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn kernel_name(&self) -> &'static str {
        self.kernel.name()
    }

    pub fn node_value(&self, idx: usize) -> [f64; 3] {
        let d = &self.data[idx];
        [d[0], d[1], d[2]]
    }

    /// Interpolated field and Jacobian at an arbitrary point (periodic).
    pub fn eval(&self, x: [f64; 3]) -> (Vector3<f64>, Matrix3<f64>) {
        let n = self.grid.n() as isize;
        let h = self.grid.spacing();
        let half = 0.5 * self.grid.length();
        let s = self.kernel.support();
        let first = self.kernel.first_offset();
        let mut w = [[0.0f64; 8]; 3];
        let mut base = [0isize; 3];
        for d in 0..3 {
            let pos = (x[d] + half) / h;
            let cell = pos.floor();
            base[d] = cell as isize + first;
            self.kernel.weights(pos - cell, &mut w[d][..s]);
        }
        let wrap = |i: isize| i.rem_euclid(n) as usize;
        let mut acc = [0.0f64; 12];
        for c in 0..s {
            let l = wrap(base[2] + c as isize);
            for b in 0..s {
                let j = wrap(base[1] + b as isize);
                let wbc = w[2][c] * w[1][b];
                let row = self.grid.index(0, j, l);
                for a in 0..s {
                    let i = wrap(base[0] + a as isize);
                    let wt = wbc * w[0][a];
                    let node = &self.data[row + i];
                    for (q, v) in acc.iter_mut().zip(node.iter()) {
                        *q += wt * v;
                    }
                }
            }
        }
        (
            Vector3::new(acc[0], acc[1], acc[2]),
            Matrix3::new(
                acc[3], acc[4], acc[5], acc[6], acc[7], acc[8], acc[9], acc[10], acc[11],
            ),
        )
    }
}

/// One-off evaluation with the default kernel; build a [`FieldSampler`] for
/// repeated queries.
pub fn eval_field_and_jacobian(f: &VectorField, x: [f64; 3]) -> (Vector3<f64>, Matrix3<f64>) {
    FieldSampler::new(f, Box::new(Lagrange::TRICUBIC)).eval(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Region {
    Ball { center: [f64; 3], radius: f64 },
    WholeBox,
}

impl Region {
    pub fn ball(radius: f64) -> Region {
        Region::Ball {
            center: [0.0; 3],
            radius,
        }
    }

    /// Periodic membership test.
    pub fn contains(&self, grid: &Grid, x: [f64; 3]) -> bool {
        match *self {
            Region::WholeBox => true,
            Region::Ball { center, radius } => periodic_distance(grid, x, center) <= radius,
        }
    }

    pub fn nodes(&self, grid: &Grid) -> Vec<usize> {
        (0..grid.len())
            .filter(|&idx| self.contains(grid, grid.node(idx)))
            .collect()
    }
}

pub fn periodic_distance(grid: &Grid, a: [f64; 3], b: [f64; 3]) -> f64 {
    let l = grid.length();
    (0..3)
        .map(|d| {
            let mut dx = (a[d] - b[d]).rem_euclid(l);
            if dx > 0.5 * l {
                dx -= l;
            }
            dx * dx
        })
        .sum::<f64>()
        .sqrt()
}

fn wrap_point(grid: &Grid, x: [f64; 3]) -> [f64; 3] {
    let l = grid.length();
    x.map(|c| (c + 0.5 * l).rem_euclid(l) - 0.5 * l)
}

#[derive(Clone, Debug, Serialize)]
pub struct NullSearch {
    pub region: Region,
    /// Seed at every `stride`-th node per axis.
    pub stride: usize,
    pub newton_tol: f64,
    pub hyper_tol: f64,
    pub max_iterations: usize,
    pub kernel: String,
}

impl NullSearch {
    pub fn in_region(region: Region) -> Self {
        NullSearch {
            region,
            stride: 1,
            newton_tol: NEWTON_TOL,
            hyper_tol: HYPER_TOL,
            max_iterations: MAX_NEWTON_ITERATIONS,
            kernel: DEFAULT_KERNEL.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NullCensus {
    pub points: Vec<CriticalPoint>,
    pub seeds: usize,
    /// Seeds whose Newton iteration failed or left the region.
    pub dropped_seeds: usize,
    /// `max|F|` over the region nodes.
    pub field_scale: f64,
}

impl NullCensus {
    pub fn count(&self, class: Classification) -> usize {
        self.points.iter().filter(|p| p.classification == class).count()
    }

    pub fn hyperbolic_count(&self) -> usize {
        self.count(Classification::Hyperbolic)
    }
}

fn newton(
    sampler: &FieldSampler,
    seed: [f64; 3],
    tol: f64,
    max_iter: usize,
) -> Option<([f64; 3], f64, Matrix3<f64>)> {
    let h = sampler.grid().spacing();
    let mut x = Vector3::from(seed);
    let (mut f, mut j) = sampler.eval(seed);
    for _ in 0..=max_iter {
        let r = f.norm();
        if r < tol {
            return Some((x.into(), r, j));
        }
        let mut dx = j.lu().solve(&(-f))?;
        let len = dx.norm();
        if !len.is_finite() {
            return None;
        }
        if len > h {
            dx *= h / len;
        }
        // backtrack until the residual decreases
        let mut accepted = false;
        for _ in 0..12 {
            let trial = x + dx;
            let (ft, jt) = sampler.eval(trial.into());
            if ft.norm() < r {
                x = trial;
                f = ft;
                j = jt;
                accepted = true;
                break;
            }
            dx *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    None
}

/// Damped Newton from every seed node in the region; converged points are
/// merged within half a cell and classified.
pub fn find_nulls(f: &VectorField, search: &NullSearch) -> Result<NullCensus> {
    if search.stride == 0 {
        return Err(Error::param("seed stride must be positive"));
    }
    let sampler = FieldSampler::with_kernel_name(f, &search.kernel)?;
    find_nulls_with(&sampler, search)
}

pub fn find_nulls_with(sampler: &FieldSampler, search: &NullSearch) -> Result<NullCensus> {
    let grid = sampler.grid();
    if let Region::Ball { radius, .. } = search.region {
        if !(radius > 0.0 && radius < 0.5 * grid.length()) {
            return Err(Error::param(format!(
                "census radius must lie in (0, L/2), got {radius}"
            )));
        }
    }
    let stride = search.stride.max(1);
    let region_nodes = search.region.nodes(&grid);
    let field_scale = region_nodes
        .iter()
        .map(|&idx| Vector3::from(sampler.node_value(idx)).norm())
        .fold(0.0, f64::max);
    let seeds: Vec<usize> = region_nodes
        .iter()
        .cloned()
        .filter(|&idx| grid.unravel(idx).iter().all(|i| i % stride == 0))
        .collect();
    if field_scale == 0.0 {
        // identically zero: no isolated nulls to report
        return Ok(NullCensus {
            points: Vec::new(),
            seeds: seeds.len(),
            dropped_seeds: seeds.len(),
            field_scale,
        });
    }
    let tol = search.newton_tol * field_scale;
    let results: Vec<Option<([f64; 3], f64, Matrix3<f64>)>> = seeds
        .par_iter()
        .map(|&idx| {
            newton(sampler, grid.node(idx), tol, search.max_iterations)
                .map(|(x, r, j)| (wrap_point(&grid, x), r, j))
                .filter(|(x, _, _)| search.region.contains(&grid, *x))
        })
        .collect();
    let dropped = results.iter().filter(|r| r.is_none()).count();
    let mut found: Vec<_> = results.into_iter().flatten().collect();
    found.sort_by(|a, b| {
        a.0[0]
            .total_cmp(&b.0[0])
            .then(a.0[1].total_cmp(&b.0[1]))
            .then(a.0[2].total_cmp(&b.0[2]))
    });
    let dedup_radius = 0.5 * grid.spacing();
    let mut kept: Vec<([f64; 3], f64, Matrix3<f64>)> = Vec::new();
    for p in found {
        match kept
            .iter_mut()
            .find(|q| periodic_distance(&grid, q.0, p.0) <= dedup_radius)
        {
            Some(q) if p.1 < q.1 => *q = p,
            Some(_) => {}
            None => kept.push(p),
        }
    }
    // report order robust to roundoff in the last digits
    let key = |x: &[f64; 3]| x.map(|c| (c / dedup_radius).round() as i64);
    kept.sort_by_key(|p| key(&p.0));
    let points = kept
        .into_iter()
        .map(|(x, r, j)| CriticalPoint::new(x, r, &j, search.hyper_tol))
        .collect();
    Ok(NullCensus {
        points,
        seeds: seeds.len(),
        dropped_seeds: dropped,
        field_scale,
    })
}

/// Closed-form Jacobian of `curl(ψW)` at the origin with its determinant and
/// eigenvalues.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticJacobian {
    pub matrix: [[f64; 3]; 3],
    pub determinant: f64,
    pub eigenvalues: [(f64, f64); 3],
}

pub fn analytic_jacobian_curl_psiw_origin(eta: f64, time: f64) -> Result<AnalyticJacobian> {
    let s = eta * time;
    if !(s > 0.0) {
        return Err(Error::param(format!("ηT > 0 required, got {s}")));
    }
    let c = 1.0 / (4.0 * s);
    let a = 4.0 * s + 1.0;
    let matrix = [
        [0.0, -c, a * c],
        [a * c, 0.0, -c],
        [-c, a * c, 0.0],
    ];
    let determinant = 1.0 + 3.0 / (4.0 * s) + 3.0 / (4.0 * s).powi(2);
    let im = 0.5 * 3f64.sqrt() * (1.0 + 1.0 / s + 1.0 / (4.0 * s * s)).sqrt();
    Ok(AnalyticJacobian {
        matrix,
        determinant,
        eigenvalues: [(1.0, 0.0), (-0.5, im), (-0.5, -im)],
    })
}

/// `max|F - G| + max‖∇F - ∇G‖_F` over region nodes.
pub fn c1_distance(f: &VectorField, g: &VectorField, region: Region) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::Shape("fields live on different grids".into()));
    }
    let grid = f.grid();
    let diff = f - g;
    let mask: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .map(|idx| region.contains(&grid, grid.node(idx)))
        .collect();
    let masked_max = |sq: &[f64]| {
        sq.par_iter()
            .zip(mask.par_iter())
            .filter(|(_, m)| **m)
            .map(|(v, _)| *v)
            .reduce(|| 0.0, f64::max)
            .sqrt()
    };
    let mut acc = vec![0.0; grid.len()];
    let add_sq = |acc: &mut Vec<f64>, vals: Vec<Vec<f64>>| {
        for v in vals {
            acc.par_iter_mut().zip(v.par_iter()).for_each(|(a, x)| *a += x * x);
        }
    };
    {
        let c = diff.spectral_coeffs();
        add_sq(&mut acc, fft::inverse_many(&grid, &[&c[0], &c[1], &c[2]]));
    }
    let c0 = masked_max(&acc);
    acc.iter_mut().for_each(|a| *a = 0.0);
    for row in jacobian_field(&diff).iter() {
        let c: Vec<_> = row.iter().map(|s| s.spectral_coeffs()).collect();
        add_sq(&mut acc, fft::inverse_many(&grid, &[&c[0], &c[1], &c[2]]));
    }
    Ok(c0 + masked_max(&acc))
}
