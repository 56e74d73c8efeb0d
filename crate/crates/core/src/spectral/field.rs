use std::borrow::Cow;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft;
use super::grid::{Grid, Mode};
use crate::error::{Error, Result};

/// Relative imaginary residue above which spectral data is rejected as
/// non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

#[derive(Clone, Debug)]
enum FieldData {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// Real scalar field on a [`Grid`], held either as node samples or as
/// Fourier coefficients.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Grid,
    data: FieldData,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            data: FieldData::Physical(vec![0.0; grid.len()]),
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        ScalarField {
            grid,
            data: FieldData::Physical(vec![value; grid.len()]),
        }
    }

    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.node(idx)))
            .collect();
        ScalarField {
            grid,
            data: FieldData::Physical(values),
        }
    }

    pub fn from_physical(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(ScalarField {
            grid,
            data: FieldData::Physical(values),
        })
    }

    pub fn from_spectral(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(ScalarField {
            grid,
            data: FieldData::Spectral(coeffs),
        })
    }

    pub(crate) fn spectral_unchecked(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        ScalarField {
            grid,
            data: FieldData::Spectral(coeffs),
        }
    }

    pub(crate) fn physical_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField {
            grid,
            data: FieldData::Physical(values),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn representation(&self) -> Representation {
        match self.data {
            FieldData::Physical(_) => Representation::Physical,
            FieldData::Spectral(_) => Representation::Spectral,
        }
    }

    pub fn is_spectral(&self) -> bool {
        self.representation() == Representation::Spectral
    }

    pub fn to_spectral(&self) -> ScalarField {
        match &self.data {
            FieldData::Spectral(_) => self.clone(),
            FieldData::Physical(v) => {
                ScalarField::spectral_unchecked(self.grid, fft::forward_real(&self.grid, v))
            }
        }
    }

    pub fn into_spectral(self) -> ScalarField {
        match self.data {
            FieldData::Spectral(_) => self,
            FieldData::Physical(v) => {
                ScalarField::spectral_unchecked(self.grid, fft::forward_real(&self.grid, &v))
            }
        }
    }

    /// Converts to node samples, rejecting coefficient sets whose inverse
    /// has an imaginary part above [`HERMITIAN_TOL`] relative to the real part.
    pub fn to_physical(&self) -> Result<ScalarField> {
        match &self.data {
            FieldData::Physical(_) => Ok(self.clone()),
            FieldData::Spectral(c) => {
                let (values, residue) = fft::inverse_real(&self.grid, c);
                let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if residue > HERMITIAN_TOL * scale || (scale == 0.0 && residue > 0.0) {
                    return Err(Error::NotHermitian { residue, scale });
                }
                Ok(ScalarField::physical_unchecked(self.grid, values))
            }
        }
    }

    /// Node samples, transforming if needed. Spectral data produced by this
    /// crate is Hermitian by construction, so the imaginary residue is dropped.
    pub fn physical_values(&self) -> Cow<'_, [f64]> {
        match &self.data {
            FieldData::Physical(v) => Cow::Borrowed(v),
            FieldData::Spectral(c) => Cow::Owned(fft::inverse_real(&self.grid, c).0),
        }
    }

    pub fn spectral_coeffs(&self) -> Cow<'_, [Complex64]> {
        match &self.data {
            FieldData::Spectral(c) => Cow::Borrowed(c),
            FieldData::Physical(v) => Cow::Owned(fft::forward_real(&self.grid, v)),
        }
    }

    pub fn as_physical(&self) -> Option<&[f64]> {
        match &self.data {
            FieldData::Physical(v) => Some(v),
            FieldData::Spectral(_) => None,
        }
    }

    pub fn as_spectral(&self) -> Option<&[Complex64]> {
        match &self.data {
            FieldData::Spectral(c) => Some(c),
            FieldData::Physical(_) => None,
        }
    }

    pub fn into_physical_values(self) -> Vec<f64> {
        match self.data {
            FieldData::Physical(v) => v,
            FieldData::Spectral(c) => fft::inverse_real(&self.grid, &c).0,
        }
    }

    pub fn into_spectral_coeffs(self) -> Vec<Complex64> {
        match self.data {
            FieldData::Spectral(c) => c,
            FieldData::Physical(v) => fft::forward_real(&self.grid, &v),
        }
    }

    /// Multiplies each Fourier coefficient by a complex mode-dependent symbol.
    pub fn apply_symbol<F>(&self, symbol: F) -> ScalarField
    where
        F: Fn(&Mode) -> Complex64 + Sync,
    {
        let grid = self.grid;
        let coeffs = self.spectral_coeffs();
        let out = coeffs
            .par_iter()
            .enumerate()
            .map(|(idx, c)| *c * symbol(&grid.mode(idx)))
            .collect();
        ScalarField::spectral_unchecked(grid, out)
    }

    pub fn max_abs(&self) -> f64 {
        self.physical_values()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        let data = match &self.data {
            FieldData::Physical(v) => FieldData::Physical(v.iter().map(|x| x * c).collect()),
            FieldData::Spectral(s) => FieldData::Spectral(s.iter().map(|x| x * c).collect()),
        };
        ScalarField {
            grid: self.grid,
            data,
        }
    }

    /// `self + c * other`, in the representation of `self`.
    pub fn axpy(&self, c: f64, other: &ScalarField) -> ScalarField {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let data = match &self.data {
            FieldData::Physical(v) => {
                let w = other.physical_values();
                FieldData::Physical(v.iter().zip(w.iter()).map(|(a, b)| a + c * b).collect())
            }
            FieldData::Spectral(s) => {
                let w = other.spectral_coeffs();
                FieldData::Spectral(s.iter().zip(w.iter()).map(|(a, b)| a + b * c).collect())
            }
        };
        ScalarField {
            grid: self.grid,
            data,
        }
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scaled(rhs)
    }
}

/// Three scalar components sharing one grid and one representation.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: [ScalarField; 3],
}

impl VectorField {
    pub fn new(x: ScalarField, y: ScalarField, z: ScalarField) -> Result<Self> {
        let grid = x.grid();
        if y.grid() != grid || z.grid() != grid {
            return Err(Error::Shape("vector components on different grids".into()));
        }
        let rep = x.representation();
        let conv = |f: ScalarField| match rep {
            Representation::Physical if f.is_spectral() => f.to_physical(),
            Representation::Spectral => Ok(f.into_spectral()),
            _ => Ok(f),
        };
        Ok(VectorField {
            components: [x, conv(y)?, conv(z)?],
        })
    }

    pub(crate) fn from_components(components: [ScalarField; 3]) -> Self {
        debug_assert!(components.iter().all(|c| c.grid() == components[0].grid()));
        VectorField { components }
    }

    pub fn zeros(grid: Grid) -> Self {
        VectorField::from_components([
            ScalarField::zeros(grid),
            ScalarField::zeros(grid),
            ScalarField::zeros(grid),
        ])
    }

    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync,
    {
        let samples: Vec<[f64; 3]> = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.node(idx)))
            .collect();
        let comp =
            |d: usize| ScalarField::physical_unchecked(grid, samples.iter().map(|s| s[d]).collect());
        VectorField::from_components([comp(0), comp(1), comp(2)])
    }

    pub fn from_spectral(grid: Grid, coeffs: [Vec<Complex64>; 3]) -> Result<Self> {
        let [a, b, c] = coeffs;
        Ok(VectorField::from_components([
            ScalarField::from_spectral(grid, a)?,
            ScalarField::from_spectral(grid, b)?,
            ScalarField::from_spectral(grid, c)?,
        ]))
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid()
    }

    pub fn representation(&self) -> Representation {
        self.components[0].representation()
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.components
    }

    pub fn component(&self, d: usize) -> &ScalarField {
        &self.components[d]
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.components
    }

    pub fn to_spectral(&self) -> VectorField {
        if self.representation() == Representation::Spectral {
            return self.clone();
        }
        let grid = self.grid();
        let vals: Vec<&[f64]> = self
            .components
            .iter()
            .map(|c| c.as_physical().expect("physical component"))
            .collect();
        let mut out = fft::forward_many(&grid, &vals).into_iter();
        let mut next = || ScalarField::spectral_unchecked(grid, out.next().unwrap());
        VectorField::from_components([next(), next(), next()])
    }

    pub fn into_spectral(self) -> VectorField {
        if self.representation() == Representation::Spectral {
            self
        } else {
            self.to_spectral()
        }
    }

    /// Checked conversion to node samples (see [`ScalarField::to_physical`]).
    pub fn to_physical(&self) -> Result<VectorField> {
        let [x, y, z] = &self.components;
        Ok(VectorField::from_components([
            x.to_physical()?,
            y.to_physical()?,
            z.to_physical()?,
        ]))
    }

    /// Node samples of all three components (unchecked, paired transforms).
    pub fn physical_values(&self) -> [Cow<'_, [f64]>; 3] {
        if self.representation() == Representation::Physical {
            let [x, y, z] = &self.components;
            return [x.physical_values(), y.physical_values(), z.physical_values()];
        }
        let grid = self.grid();
        let coeffs: Vec<&[Complex64]> = self
            .components
            .iter()
            .map(|c| c.as_spectral().expect("spectral component"))
            .collect();
        let mut out = fft::inverse_many(&grid, &coeffs).into_iter();
        [
            Cow::Owned(out.next().unwrap()),
            Cow::Owned(out.next().unwrap()),
            Cow::Owned(out.next().unwrap()),
        ]
    }

    /// Same field in physical representation (unchecked conversion).
    pub fn to_physical_unchecked(&self) -> VectorField {
        let grid = self.grid();
        let [x, y, z] = self.physical_values();
        VectorField::from_components([
            ScalarField::physical_unchecked(grid, x.into_owned()),
            ScalarField::physical_unchecked(grid, y.into_owned()),
            ScalarField::physical_unchecked(grid, z.into_owned()),
        ])
    }

    pub fn spectral_coeffs(&self) -> [Cow<'_, [Complex64]>; 3] {
        let [x, y, z] = &self.components;
        if self.representation() == Representation::Spectral {
            return [x.spectral_coeffs(), y.spectral_coeffs(), z.spectral_coeffs()];
        }
        let grid = self.grid();
        let vals: Vec<&[f64]> = self
            .components
            .iter()
            .map(|c| c.as_physical().expect("physical component"))
            .collect();
        let mut out = fft::forward_many(&grid, &vals).into_iter();
        [
            Cow::Owned(out.next().unwrap()),
            Cow::Owned(out.next().unwrap()),
            Cow::Owned(out.next().unwrap()),
        ]
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let [x, y, z] = self.physical_values();
        let values = x
            .iter()
            .zip(y.iter())
            .zip(z.iter())
            .map(|((a, b), c)| (a * a + b * b + c * c).sqrt())
            .collect();
        ScalarField::physical_unchecked(self.grid(), values)
    }

    pub fn max_abs(&self) -> f64 {
        self.magnitude().max_abs()
    }

    pub fn scaled(&self, c: f64) -> VectorField {
        let [x, y, z] = &self.components;
        VectorField::from_components([x.scaled(c), y.scaled(c), z.scaled(c)])
    }

    pub fn axpy(&self, c: f64, other: &VectorField) -> VectorField {
        let [x, y, z] = &self.components;
        let [ox, oy, oz] = &other.components;
        VectorField::from_components([x.axpy(c, ox), y.axpy(c, oy), z.axpy(c, oz)])
    }

    pub fn map_components<F>(&self, f: F) -> VectorField
    where
        F: Fn(&ScalarField) -> ScalarField,
    {
        let [x, y, z] = &self.components;
        VectorField::from_components([f(x), f(y), f(z)])
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &VectorField {
    type Output = VectorField;
    fn mul(self, rhs: f64) -> VectorField {
        self.scaled(rhs)
    }
}

/// Operations shared by scalar and vector fields: anything that acts mode
/// by mode with a real multiplier.
pub trait Field: Clone + Send + Sync {
    fn grid(&self) -> Grid;

    fn to_spectral(&self) -> Self;

    /// Multiplies every Fourier coefficient by `mult(mode)`. The result is
    /// in spectral representation.
    fn multiply_modes<F>(&self, mult: F) -> Self
    where
        F: Fn(&Mode) -> f64 + Sync;
}

impl Field for ScalarField {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn to_spectral(&self) -> Self {
        ScalarField::to_spectral(self)
    }

    fn multiply_modes<F>(&self, mult: F) -> Self
    where
        F: Fn(&Mode) -> f64 + Sync,
    {
        self.apply_symbol(|m| Complex64::new(mult(m), 0.0))
    }
}

impl Field for VectorField {
    fn grid(&self) -> Grid {
        VectorField::grid(self)
    }

    fn to_spectral(&self) -> Self {
        VectorField::to_spectral(self)
    }

    fn multiply_modes<F>(&self, mult: F) -> Self
    where
        F: Fn(&Mode) -> f64 + Sync,
    {
        let grid = self.grid();
        let mults: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| mult(&grid.mode(idx)))
            .collect();
        let coeffs = self.spectral_coeffs();
        let mut it = coeffs.iter().map(|c| {
            let out = c.iter().zip(&mults).map(|(c, m)| c * m).collect();
            ScalarField::spectral_unchecked(grid, out)
        });
        VectorField::from_components([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_has_only_zero_mode() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let f = ScalarField::constant(g, 1.0).to_spectral();
        let c = f.as_spectral().unwrap();
        let vol = (2.0 * PI).powi(3);
        assert!((c[0] - Complex64::new(vol, 0.0)).norm() < 1e-10);
        assert!(c[1..].iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn round_trip_reproduces_samples() {
        let g = Grid::new(16, 5.0).unwrap();
        let f = ScalarField::from_fn(g, |x| (x[0] * 0.7).sin() * (-x[1] * x[1] / 4.0).exp() + x[2].cos());
        let back = f.to_spectral().to_physical().unwrap();
        let a = f.as_physical().unwrap();
        let b = back.as_physical().unwrap();
        let scale = f.max_abs();
        let err = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(err <= 1e-12 * scale, "err {err}");
    }

    #[test]
    fn non_hermitian_coefficients_are_rejected() {
        let g = Grid::new(8, 1.0).unwrap();
        let mut c = vec![Complex64::default(); g.len()];
        c[g.index(1, 0, 0)] = Complex64::new(1.0, 0.0);
        let f = ScalarField::from_spectral(g, c).unwrap();
        assert!(matches!(f.to_physical(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn vector_round_trip_uses_paired_transforms() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let v = VectorField::from_fn(g, |x| [x[0].sin(), (2.0 * x[1]).cos(), x[2].sin() * x[0].cos()]);
        let back = v.to_spectral().to_physical().unwrap();
        for d in 0..3 {
            let a = v.component(d).as_physical().unwrap();
            let b = back.component(d).as_physical().unwrap();
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn shape_errors() {
        let g = Grid::new(8, 1.0).unwrap();
        assert!(ScalarField::from_physical(g, vec![0.0; 7]).is_err());
        assert!(ScalarField::from_spectral(g, vec![Complex64::default(); 9]).is_err());
        let h = Grid::new(10, 1.0).unwrap();
        assert!(VectorField::new(ScalarField::zeros(g), ScalarField::zeros(h), ScalarField::zeros(g)).is_err());
    }
}
