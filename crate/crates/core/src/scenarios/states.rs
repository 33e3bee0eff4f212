//! Initial states used by the scenarios.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::energy::PhysicalParams;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, RealField, Spectral};

/// A Gaussian wave packet `exp(-Σ(x-c)²/4σ² + i p·x)`, where `σ` is the
/// per-axis standard deviation of the density.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub sigma: f64,
    pub center: Vec<f64>,
    pub momentum: Vec<f64>,
}

impl Packet {
    pub fn centered(dims: usize, sigma: f64) -> Self {
        Packet {
            sigma,
            center: alloc::vec![0.0; dims],
            momentum: alloc::vec![0.0; dims],
        }
    }

    pub fn state(&self, grid: &GridSpec) -> Result<ComplexField> {
        let dims = grid.dims();
        if self.center.len() != dims || self.momentum.len() != dims {
            return Err(Error::invalid("packet", "center and momentum need one entry per axis"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::invalid("sigma", "must be positive"));
        }
        let w = 1.0 / (4.0 * self.sigma * self.sigma);
        ComplexField::from_fn(*grid, |x| {
            let mut r2 = 0.0;
            let mut phase = 0.0;
            for ((&xa, &c), &p) in x.iter().zip(&self.center).zip(&self.momentum) {
                r2 += (xa - c) * (xa - c);
                phase += p * xa;
            }
            Complex64::from_polar(libm::exp(-w * r2), phase)
        })?
        .normalize()
    }
}

/// Per-axis Gausson exponent `α = 2m|kT|/ħ²` for `kT < 0`.
pub fn gausson_alpha(params: &PhysicalParams) -> Result<f64> {
    params.validate()?;
    if params.kt >= 0.0 {
        return Err(Error::invalid("kT", "Gausson needs kT < 0"));
    }
    Ok(2.0 * params.mass * params.kt.abs() / (params.hbar * params.hbar))
}

/// Normalized Gausson `∝ exp(-α Σ(x_a - c_a)²/2)`.
pub fn make_gausson(params: &PhysicalParams, grid: &GridSpec, center: &[f64]) -> Result<ComplexField> {
    let alpha = gausson_alpha(params)?;
    gaussian_with_exponent(grid, alpha, center)
}

pub(crate) fn gaussian_with_exponent(grid: &GridSpec, alpha: f64, center: &[f64]) -> Result<ComplexField> {
    if center.len() != grid.dims() {
        return Err(Error::invalid("center", "needs one coordinate per axis"));
    }
    ComplexField::from_fn(*grid, |x| {
        let r2: f64 = x
            .iter()
            .zip(center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum();
        Complex64::new(libm::exp(-0.5 * alpha * r2), 0.0)
    })?
    .normalize()
}

/// Closed-form energy of the normalized Gausson in `dims` dimensions with no
/// external potential: per axis `ħ²α/4m + kT(½ ln(α/π) - ½)`.
pub fn gausson_energy(params: &PhysicalParams, dims: usize) -> Result<f64> {
    let alpha = gausson_alpha(params)?;
    let per_axis = params.hbar * params.hbar * alpha / (4.0 * params.mass)
        + params.kt * (0.5 * libm::log(alpha / PI) - 0.5);
    Ok(dims as f64 * per_axis)
}

/// Residual oracle for a trial Gaussian `exp(-αx²/2)` in one dimension.
///
/// Evaluates the local energy `[-ħ²/2m ψ'' + kT ln|ψ|² ψ] / ψ` with a
/// spectral second derivative on `grid`, fits `a + b x²` over the core of
/// the packet and returns `b`. A stationary width makes `b` vanish; it does
/// not rely on any closed form for `α`.
pub fn gaussian_x2_residual(params: &PhysicalParams, alpha: f64, grid: &GridSpec) -> Result<f64> {
    if grid.dims() != 1 {
        return Err(Error::invalid("grid", "residual oracle is one-dimensional"));
    }
    let psi = RealField::from_fn(*grid, |x| libm::exp(-0.5 * alpha * x[0] * x[0]))?;
    let spectral = Spectral::new(grid);
    let d2 = spectral.derivative(&spectral.derivative(&psi, 0)?, 0)?;
    let reach = 2.0 / libm::sqrt(alpha);
    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (j, x) in grid.coordinates(0).into_iter().enumerate() {
        if x.abs() > reach {
            continue;
        }
        let p = psi.values()[j];
        let local = -params.hbar * params.hbar / (2.0 * params.mass) * d2.values()[j] / p
            + params.kt * libm::log(p * p);
        let u = x * x;
        n += 1.0;
        sx += u;
        sy += local;
        sxx += u * u;
        sxy += u * local;
    }
    if n < 3.0 {
        return Err(Error::invalid("grid", "too few points inside the packet core"));
    }
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// `A exp(i k·x)` with `k_a = 2π m_a / L_a`.
pub fn plane_wave(grid: &GridSpec, mode: &[i64], amplitude: Complex64) -> Result<ComplexField> {
    let k = plane_wave_vector(grid, mode)?;
    ComplexField::from_fn(*grid, |x| {
        let phase: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
        amplitude * Complex64::from_polar(1.0, phase)
    })
}

/// Wavevector of a grid-commensurate mode; rejects the Nyquist bin and beyond.
pub fn plane_wave_vector(grid: &GridSpec, mode: &[i64]) -> Result<Vec<f64>> {
    if mode.len() != grid.dims() {
        return Err(Error::invalid("mode_index", "needs one entry per axis"));
    }
    mode.iter()
        .enumerate()
        .map(|(a, &m)| {
            let half = (grid.points()[a] / 2) as i64;
            if m.abs() >= half {
                return Err(Error::invalid(
                    "mode_index",
                    alloc::format!("mode {m} on axis {a} is not resolved by {} points", grid.points()[a]),
                ));
            }
            Ok(TAU * m as f64 / grid.lengths()[a])
        })
        .collect()
}
