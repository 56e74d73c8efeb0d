use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic box `[-L/2, L/2)^3` sampled with `n` nodes per axis.
///
/// Storage is x-fastest: node `(i, j, l)` lives at `i + n*j + n*n*l`.
/// Mode index `i` maps to the signed integer `m` in `[-n/2, n/2 - 1]`
/// and to the wavenumber `(2π/L)·m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

/// One spectral mode with its wavevector.
///
/// `k` is the true wavevector (Nyquist entries keep `-(2π/L)(n/2)`); `kd`
/// is the one used by odd-order derivatives, where Nyquist entries are 0
/// so derivatives of real fields stay real.
#[derive(Clone, Copy, Debug)]
pub struct Mode {
    pub idx: usize,
    pub m: [i64; 3],
    pub k: [f64; 3],
    pub kd: [f64; 3],
}

impl Mode {
    pub fn k2(&self) -> f64 {
        self.k[0] * self.k[0] + self.k[1] * self.k[1] + self.k[2] * self.k[2]
    }

    pub fn kd2(&self) -> f64 {
        self.kd[0] * self.kd[0] + self.kd[1] * self.kd[1] + self.kd[2] * self.kd[2]
    }

    pub fn max_abs_m(&self) -> i64 {
        self.m.iter().map(|m| m.abs()).max().unwrap_or(0)
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n must be an even integer >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Grid { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of nodes, `n^3`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(3)
    }

    /// Lowest nonzero wavenumber `2π/L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn nyquist_wavenumber(&self) -> f64 {
        self.fundamental() * (self.n / 2) as f64
    }

    pub fn signed_mode(&self, i: usize) -> i64 {
        let h = self.n / 2;
        if i < h {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        self.fundamental() * self.signed_mode(i) as f64
    }

    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if self.is_nyquist(i) {
            0.0
        } else {
            self.wavenumber(i)
        }
    }

    /// Index of the mode `-k` for axis index `i`.
    pub fn negate_index(&self, i: usize) -> usize {
        (self.n - i) % self.n
    }

    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.spacing()
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        i + self.n * (j + self.n * l)
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    pub fn node(&self, idx: usize) -> [f64; 3] {
        let [i, j, l] = self.unravel(idx);
        [self.coord(i), self.coord(j), self.coord(l)]
    }

    /// Flat index of the mode `-k` for the mode at flat index `idx`.
    pub fn negate_flat(&self, idx: usize) -> usize {
        let [i, j, l] = self.unravel(idx);
        self.index(self.negate_index(i), self.negate_index(j), self.negate_index(l))
    }

    /// Whether a frequency `N` (in units of 1/length) is periodic on this box.
    pub fn is_periodic_frequency(&self, freq: f64) -> bool {
        let cycles = freq * self.length / (2.0 * PI);
        (cycles - cycles.round()).abs() < 1e-9 * cycles.abs().max(1.0)
    }

    pub fn mode(&self, idx: usize) -> Mode {
        let [i, j, l] = self.unravel(idx);
        Mode {
            idx,
            m: [self.signed_mode(i), self.signed_mode(j), self.signed_mode(l)],
            k: [self.wavenumber(i), self.wavenumber(j), self.wavenumber(l)],
            kd: [
                self.derivative_wavenumber(i),
                self.derivative_wavenumber(j),
                self.derivative_wavenumber(l),
            ],
        }
    }

    /// Iterate over all modes in storage order.
    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.len()).map(move |idx| self.mode(idx))
    }

    /// Iterate over node indices together with their coordinates.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, [f64; 3])> + '_ {
        (0..self.len()).map(move |idx| (idx, self.node(idx)))
    }

    /// The same grid shrunk by `factor` (node coordinates scale by `1/factor`).
    pub fn rescaled(&self, factor: f64) -> Result<Grid> {
        Grid::new(self.n, self.length / factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(9, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, -1.0).is_err());
        assert!(Grid::new(16, 2.0 * PI).is_ok());
    }

    #[test]
    fn wavenumbers_and_nyquist() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        assert_eq!(g.signed_mode(0), 0);
        assert_eq!(g.signed_mode(7), 7);
        assert_eq!(g.signed_mode(8), -8);
        assert_eq!(g.signed_mode(15), -1);
        assert!((g.wavenumber(8) + 8.0).abs() < 1e-14);
        assert!((g.nyquist_wavenumber() - 8.0).abs() < 1e-14);
        assert_eq!(g.derivative_wavenumber(8), 0.0);
        assert_eq!(g.negate_index(8), 8);
        assert_eq!(g.negate_index(0), 0);
        assert_eq!(g.negate_index(3), 13);
    }

    #[test]
    fn node_layout_is_x_fastest() {
        let g = Grid::new(8, 8.0).unwrap();
        assert_eq!(g.index(1, 0, 0), 1);
        assert_eq!(g.index(0, 1, 0), 8);
        assert_eq!(g.index(0, 0, 1), 64);
        assert_eq!(g.unravel(g.index(3, 5, 7)), [3, 5, 7]);
        assert_eq!(g.node(0), [-4.0, -4.0, -4.0]);
        assert_eq!(g.coord(4), 0.0);
    }

    #[test]
    fn periodic_frequency() {
        let g = Grid::new(16, 8.0 * PI).unwrap();
        assert!(g.is_periodic_frequency(7.5));
        assert!(g.is_periodic_frequency(0.25));
        assert!(!g.is_periodic_frequency(0.3));
    }
}
