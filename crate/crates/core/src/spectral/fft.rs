//! Three-dimensional transforms between node samples and continuum-normalised
//! Fourier coefficients.
//!
//! Forward: `f̂(k) = Σ_x f(x) e^{-ik·x} (L/n)^3` with `x` the box-centred node
//! coordinates. Inverse: `f(x) = L^{-3} Σ_k f̂(k) e^{ik·x}`. The centring
//! contributes the sign `(-1)^{i+j+l}` on top of an index-based DFT.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

fn line_transforms(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    let rows_per_task = (4096 / n).max(1);
    data.par_chunks_mut(n * rows_per_task).for_each(|chunk| {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

/// Columns handled together when transforming along a strided axis.
const TILE: usize = 16;

#[derive(Clone, Copy)]
struct SharedPtr(*mut Complex64);
unsafe impl Send for SharedPtr {}
unsafe impl Sync for SharedPtr {}

/// Transforms the lines `base + s*stride` (s < n) for every base in
/// `0..stride` within each block of `n*stride` values: gathers TILE
/// adjacent lines, transforms them contiguously and scatters back.
fn strided_transforms(data: &mut [Complex64], n: usize, stride: usize, fft: &Arc<dyn Fft<f64>>) {
    let block = n * stride;
    let tile = TILE.min(stride);
    let tiles_per_block = stride.div_ceil(tile);
    let ptr = SharedPtr(data.as_mut_ptr());
    let len = data.len();
    (0..len / block * tiles_per_block).into_par_iter().for_each_init(
        || {
            (
                vec![Complex64::default(); tile * n],
                vec![Complex64::default(); fft.get_inplace_scratch_len()],
            )
        },
        |(buf, scratch), task| {
            let ptr = ptr;
            let offset = (task / tiles_per_block) * block;
            let c0 = (task % tiles_per_block) * tile;
            let width = tile.min(stride - c0);
            // SAFETY: each task touches the disjoint index set
            // {offset + c0 + b + s*stride : b < width, s < n}.
            let at = |b: usize, s: usize| offset + c0 + b + s * stride;
            for s in 0..n {
                for b in 0..width {
                    buf[b * n + s] = unsafe { *ptr.0.add(at(b, s)) };
                }
            }
            fft.process_with_scratch(&mut buf[..width * n], scratch);
            for s in 0..n {
                for b in 0..width {
                    unsafe { *ptr.0.add(at(b, s)) = buf[b * n + s] };
                }
            }
        },
    );
}

fn transform3(data: &mut [Complex64], n: usize, dir: Direction) {
    let p = plans(n);
    let fft = match dir {
        Direction::Forward => &p.forward,
        Direction::Inverse => &p.inverse,
    };
    line_transforms(data, n, fft);
    strided_transforms(data, n, n, fft);
    strided_transforms(data, n, n * n, fft);
}

/// `(-1)^{i+j+l}` for every node of a row `(j, l)`, applied with `scale`.
fn apply_centring(data: &mut [Complex64], n: usize, scale: f64) {
    data.par_chunks_mut(n).enumerate().for_each(|(row, line)| {
        let (j, l) = (row % n, row / n);
        let mut sign = if (j + l) % 2 == 0 { scale } else { -scale };
        for c in line {
            *c *= sign;
            sign = -sign;
        }
    });
}

/// Forward transform of complex samples (used for packed pairs).
fn forward_complex(grid: &Grid, mut data: Vec<Complex64>) -> Vec<Complex64> {
    transform3(&mut data, grid.n(), Direction::Forward);
    apply_centring(&mut data, grid.n(), grid.cell_volume());
    data
}

fn inverse_complex(grid: &Grid, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut data = coeffs.to_vec();
    apply_centring(&mut data, grid.n(), 1.0 / grid.volume());
    transform3(&mut data, grid.n(), Direction::Inverse);
    data
}

pub fn forward_real(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    assert_eq!(values.len(), grid.len());
    let data = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_complex(grid, data)
}

/// Transforms two real fields with a single complex transform.
pub fn forward_real_pair(grid: &Grid, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    assert_eq!(a.len(), grid.len());
    assert_eq!(b.len(), grid.len());
    let packed = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    let z = forward_complex(grid, packed);
    let half = Complex64::new(0.5, 0.0);
    let minus_half_i = Complex64::new(0.0, -0.5);
    let (fa, fb): (Vec<_>, Vec<_>) = (0..z.len())
        .into_par_iter()
        .map(|idx| {
            let zk = z[idx];
            let zm = z[grid.negate_flat(idx)].conj();
            ((zk + zm) * half, (zk - zm) * minus_half_i)
        })
        .unzip();
    (fa, fb)
}

/// Inverse transform keeping the real part. Returns the samples and the
/// largest discarded imaginary magnitude.
pub fn inverse_real(grid: &Grid, coeffs: &[Complex64]) -> (Vec<f64>, f64) {
    assert_eq!(coeffs.len(), grid.len());
    let z = inverse_complex(grid, coeffs);
    let residue = z.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    (z.into_iter().map(|c| c.re).collect(), residue)
}

/// Inverse of two Hermitian coefficient sets with one complex transform.
pub fn inverse_real_pair(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), grid.len());
    assert_eq!(b.len(), grid.len());
    let i = Complex64::new(0.0, 1.0);
    let packed: Vec<Complex64> = a.par_iter().zip(b).map(|(x, y)| *x + i * *y).collect();
    let z = inverse_complex(grid, &packed);
    z.into_iter().map(|c| (c.re, c.im)).unzip()
}

/// Forward transforms of several real fields, packed in pairs.
pub fn forward_many(grid: &Grid, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        match pair {
            [a, b] => {
                let (fa, fb) = forward_real_pair(grid, a, b);
                out.push(fa);
                out.push(fb);
            }
            [a] => out.push(forward_real(grid, a)),
            _ => unreachable!(),
        }
    }
    out
}

/// Inverse transforms of several Hermitian coefficient sets, packed in pairs.
pub fn inverse_many(grid: &Grid, coeffs: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(coeffs.len());
    for pair in coeffs.chunks(2) {
        match pair {
            [a, b] => {
                let (ra, rb) = inverse_real_pair(grid, a, b);
                out.push(ra);
                out.push(rb);
            }
            [a] => out.push(inverse_real(grid, a).0),
            _ => unreachable!(),
        }
    }
    out
}
