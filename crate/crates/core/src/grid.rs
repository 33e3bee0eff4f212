//! Periodic rectangular grids and the fields sampled on them.
//!
//! Conventions used throughout the crate:
//!
//! * Axis `a` has `n_a` points at `x_j = -L_a/2 + j·h_a`, `h_a = L_a/n_a`.
//!   The box is `[-L_a/2, L_a/2)` with periodic wrap.
//! * Samples are stored row-major with axis 0 slowest.
//! * Integrals are Riemann sums `Σ f · Π h_a`, which coincide with the
//!   trapezoid rule on a periodic grid.
//! * [`Spectral::forward`] is the unnormalized DFT `F_k = Σ_x ψ_x e^{-ik·x}`
//!   applied along every axis, and [`Spectral::inverse`] carries the `1/N`.
//!   Parseval therefore reads `∫|ψ|² = (V/N²) Σ_k |F_k|²`.
//! * Wavenumbers follow DFT bin order: `2πj/L` for `j = 0..n/2-1`, then
//!   `j = -n/2..-1`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::FftPlan;

pub const MAX_DIMS: usize = 3;
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dims: usize,
    points: [usize; MAX_DIMS],
    lengths: [f64; MAX_DIMS],
}

/// Builds a grid, checking that `points` and `lengths` both have `dims` entries.
pub fn make_grid(dims: usize, points: &[usize], lengths: &[f64]) -> Result<GridSpec> {
    if !(1..=MAX_DIMS).contains(&dims) {
        return Err(Error::Dimension(dims));
    }
    if points.len() != dims || lengths.len() != dims {
        return Err(Error::invalid(
            "grid",
            "points and lengths must have one entry per dimension",
        ));
    }
    GridSpec::new(points, lengths)
}

impl GridSpec {
    pub fn new(points: &[usize], lengths: &[f64]) -> Result<Self> {
        let dims = points.len();
        if !(1..=MAX_DIMS).contains(&dims) {
            return Err(Error::Dimension(dims));
        }
        if lengths.len() != dims {
            return Err(Error::invalid(
                "grid",
                "points and lengths must have one entry per dimension",
            ));
        }
        let mut grid = GridSpec {
            dims,
            points: [1; MAX_DIMS],
            lengths: [1.0; MAX_DIMS],
        };
        for axis in 0..dims {
            let n = points[axis];
            if !n.is_multiple_of(2) || n < MIN_POINTS {
                return Err(Error::PointCount { axis, points: n });
            }
            let l = lengths[axis];
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Length { axis, length: l });
            }
            grid.points[axis] = n;
            grid.lengths[axis] = l;
        }
        Ok(grid)
    }

    /// Same point count and length on every axis.
    pub fn cubic(dims: usize, points: usize, length: f64) -> Result<Self> {
        if !(1..=MAX_DIMS).contains(&dims) {
            return Err(Error::Dimension(dims));
        }
        GridSpec::new(&[points; MAX_DIMS][..dims], &[length; MAX_DIMS][..dims])
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn points(&self) -> &[usize] {
        &self.points[..self.dims]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths[..self.dims]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.points[axis] as f64
    }

    /// Quadrature weight `Π h_a`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dims).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths().iter().product()
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.points().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coordinate(&self, axis: usize, index: usize) -> f64 {
        -0.5 * self.lengths[axis] + index as f64 * self.spacing(axis)
    }

    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis])
            .map(|j| self.coordinate(axis, j))
            .collect()
    }

    /// Whether `x` lies in the closed box `[-L/2, L/2]` on `axis`.
    pub fn contains(&self, axis: usize, x: f64) -> bool {
        let half = 0.5 * self.lengths[axis];
        (-half..=half).contains(&x)
    }

    /// Distance between consecutive samples along `axis` in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.points[axis + 1..self.dims].iter().product()
    }

    /// Per-axis indices of a flat sample index.
    pub fn unravel(&self, mut flat: usize) -> [usize; MAX_DIMS] {
        let mut idx = [0; MAX_DIMS];
        for axis in (0..self.dims).rev() {
            idx[axis] = flat % self.points[axis];
            flat /= self.points[axis];
        }
        idx
    }

    /// The one-dimensional grid along `axis`.
    pub fn axis_grid(&self, axis: usize) -> Result<GridSpec> {
        self.check_axis(axis)?;
        GridSpec::new(&[self.points[axis]], &[self.lengths[axis]])
    }

    pub fn wavenumbers(&self, axis: usize) -> Result<Vec<f64>> {
        self.check_axis(axis)?;
        Ok(dft_wavenumbers(self.points[axis], self.lengths[axis]))
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dims {
            Err(Error::Axis {
                axis,
                dims: self.dims,
            })
        } else {
            Ok(())
        }
    }

    /// Calls `f` with the coordinates of every sample, in storage order.
    pub fn for_each_point(&self, mut f: impl FnMut(usize, &[f64])) {
        let mut x = [0.0; MAX_DIMS];
        for flat in 0..self.len() {
            let idx = self.unravel(flat);
            for axis in 0..self.dims {
                x[axis] = self.coordinate(axis, idx[axis]);
            }
            f(flat, &x[..self.dims]);
        }
    }
}

pub fn wavenumbers(grid: &GridSpec, axis: usize) -> Result<Vec<f64>> {
    grid.wavenumbers(axis)
}

/// Angular wavenumbers of an `n`-point periodic axis of length `length`,
/// in DFT bin order.
pub fn dft_wavenumbers(n: usize, length: f64) -> Vec<f64> {
    let base = 2.0 * PI / length;
    (0..n)
        .map(|j| {
            let m = if j < n / 2 {
                j as f64
            } else {
                j as f64 - n as f64
            };
            base * m
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    values: Vec<f64>,
}

fn check_len(grid: &GridSpec, got: usize) -> Result<()> {
    let expected = grid.len();
    if got != expected {
        return Err(Error::SampleCount { expected, got });
    }
    Ok(())
}

impl ComplexField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        if let Some(i) = values
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        ComplexField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        grid.for_each_point(|_, x| values.push(f(x)));
        ComplexField::new(grid, values)
    }

    pub(crate) fn from_parts_unchecked(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ComplexField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn replace_values(&mut self, values: Vec<Complex64>) -> Result<()> {
        *self = ComplexField::new(self.grid, values)?;
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        ComplexField::new(self.grid, self.values.iter().map(|z| z * c).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn density(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_squared();
        if n2.is_nan() || n2 <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / libm::sqrt(n2);
        Ok(ComplexField {
            grid: self.grid,
            values: self.values.iter().map(|z| z * s).collect(),
        })
    }

    /// Max-norm distance to `other`.
    pub fn max_distance(&self, other: &ComplexField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `∫ conj(self) · other`.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.cell_volume())
    }
}

impl RealField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(RealField { grid, values })
    }

    pub fn constant(grid: GridSpec, value: f64) -> Result<Self> {
        RealField::new(grid, vec![value; grid.len()])
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        grid.for_each_point(|_, x| values.push(f(x)));
        RealField::new(grid, values)
    }

    pub(crate) fn from_parts_unchecked(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        RealField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn replace_values(&mut self, values: Vec<f64>) -> Result<()> {
        *self = RealField::new(self.grid, values)?;
        Ok(())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }
}

pub fn integrate(f: &RealField) -> f64 {
    f.integrate()
}

pub fn norm_squared(psi: &ComplexField) -> f64 {
    psi.norm_squared()
}

pub fn normalize(psi: &ComplexField) -> Result<ComplexField> {
    psi.normalize()
}

/// `∫|ψ|²` evaluated from the spectral coefficients via Parseval.
pub fn norm_squared_spectral(psi: &ComplexField) -> f64 {
    let grid = psi.grid();
    let hat = Spectral::new(grid).forward(psi);
    let n = grid.len() as f64;
    hat.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.volume() / (n * n)
}

pub fn forward_transform(psi: &ComplexField) -> ComplexField {
    Spectral::new(psi.grid()).forward(psi)
}

pub fn inverse_transform(psi_hat: &ComplexField) -> ComplexField {
    Spectral::new(psi_hat.grid()).inverse(psi_hat)
}

/// Reusable per-axis FFT plans and wavenumber tables for one grid.
#[derive(Debug, Clone)]
pub struct Spectral {
    grid: GridSpec,
    plans: Vec<FftPlan>,
    wavenumbers: Vec<Vec<f64>>,
}

impl Spectral {
    pub fn new(grid: &GridSpec) -> Self {
        let dims = grid.dims();
        Spectral {
            grid: *grid,
            plans: grid.points().iter().map(|&n| FftPlan::new(n)).collect(),
            wavenumbers: (0..dims)
                .map(|a| grid.wavenumbers(a).expect("axis in range"))
                .collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.wavenumbers[axis]
    }

    /// `|k|²` for every spectral bin, in storage order.
    pub fn k_squared(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.len());
        for flat in 0..self.grid.len() {
            let idx = self.grid.unravel(flat);
            let k2 = (0..self.grid.dims())
                .map(|a| {
                    let k = self.wavenumbers[a][idx[a]];
                    k * k
                })
                .sum();
            out.push(k2);
        }
        out
    }

    pub fn forward(&self, psi: &ComplexField) -> ComplexField {
        let mut values = psi.values().to_vec();
        self.forward_in_place(&mut values);
        ComplexField::from_parts_unchecked(self.grid, values)
    }

    pub fn inverse(&self, psi_hat: &ComplexField) -> ComplexField {
        let mut values = psi_hat.values().to_vec();
        self.inverse_in_place(&mut values);
        ComplexField::from_parts_unchecked(self.grid, values)
    }

    pub fn forward_in_place(&self, values: &mut [Complex64]) {
        for axis in 0..self.grid.dims() {
            self.transform_axis(values, axis, false);
        }
    }

    pub fn inverse_in_place(&self, values: &mut [Complex64]) {
        for axis in 0..self.grid.dims() {
            self.transform_axis(values, axis, true);
        }
        let scale = 1.0 / self.grid.len() as f64;
        values.iter_mut().for_each(|z| *z *= scale);
    }

    fn transform_axis(&self, values: &mut [Complex64], axis: usize, inverse: bool) {
        let plan = &self.plans[axis];
        let n = plan.len();
        let stride = self.grid.stride(axis);
        let run = |line: &mut [Complex64]| {
            if inverse {
                plan.inverse(line)
            } else {
                plan.forward(line)
            }
        };
        if stride == 1 {
            values.chunks_exact_mut(n).for_each(run);
            return;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for block in values.chunks_exact_mut(n * stride) {
            for offset in 0..stride {
                for (j, z) in line.iter_mut().enumerate() {
                    *z = block[offset + j * stride];
                }
                run(&mut line);
                for (j, z) in line.iter().enumerate() {
                    block[offset + j * stride] = *z;
                }
            }
        }
    }

    /// Spectral derivative of a real field along `axis`. The Nyquist bin is
    /// dropped so the result stays real.
    pub fn derivative(&self, f: &RealField, axis: usize) -> Result<RealField> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        self.grid.check_axis(axis)?;
        let mut values: Vec<Complex64> =
            f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut values);
        let n = self.grid.points()[axis];
        let stride = self.grid.stride(axis);
        let k = &self.wavenumbers[axis];
        for (flat, z) in values.iter_mut().enumerate() {
            let j = (flat / stride) % n;
            *z = if j == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                *z * Complex64::new(0.0, k[j])
            };
        }
        self.inverse_in_place(&mut values);
        Ok(RealField::from_parts_unchecked(
            self.grid,
            values.iter().map(|z| z.re).collect(),
        ))
    }

    /// `∫|∇ψ|²` from the spectral coefficients.
    pub fn gradient_norm_squared(&self, psi: &ComplexField) -> f64 {
        let hat = self.forward(psi);
        let n = self.grid.len() as f64;
        let sum: f64 = hat
            .values()
            .iter()
            .zip(self.k_squared())
            .map(|(z, k2)| k2 * z.norm_sqr())
            .sum();
        sum * self.grid.volume() / (n * n)
    }
}
