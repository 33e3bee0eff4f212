//! The averaged Hamiltonian and the entropy functional.
//!
//! Energies are reported in natural units with no additive offset. The
//! logarithm is taken of the bare density, so `-ln V` bounds are in units
//! where the reference density scale is 1.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, RealField, Spectral};

/// Below this density `ρ ln ρ` is taken as its limit, 0.
pub const DENSITY_EPSILON: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Zero,
    /// `½ m Σ ω_a² (x_a - c_a)²`
    Harmonic { omega: Vec<f64>, center: Vec<f64> },
    Sampled(RealField),
}

impl PotentialSpec {
    /// Samples the potential on `grid`.
    pub fn sample(&self, grid: &GridSpec, mass: f64) -> Result<RealField> {
        match self {
            PotentialSpec::Zero => RealField::constant(*grid, 0.0),
            PotentialSpec::Harmonic { omega, center } => {
                if omega.len() != grid.dims() || center.len() != grid.dims() {
                    return Err(Error::GridMismatch);
                }
                RealField::from_fn(*grid, |x| {
                    let s: f64 = (0..x.len())
                        .map(|a| {
                            let d = x[a] - center[a];
                            omega[a] * omega[a] * d * d
                        })
                        .sum();
                    0.5 * mass * s
                })
            }
            PotentialSpec::Sampled(field) => {
                if field.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                Ok(field.clone())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let PotentialSpec::Harmonic { omega, center } = self {
            if omega.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(Error::invalid("omega", "must be positive and finite"));
            }
            if center.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("center", "must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    /// Signed strength of the logarithmic term; zero gives the linear equation.
    pub kt: f64,
    pub potential: PotentialSpec,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            hbar: 1.0,
            mass: 1.0,
            kt: 0.0,
            potential: PotentialSpec::Zero,
        }
    }
}

impl PhysicalParams {
    /// Natural units (ħ = m = 1), no external potential.
    pub fn natural(kt: f64) -> Self {
        PhysicalParams {
            kt,
            ..Default::default()
        }
    }

    pub fn with_potential(mut self, potential: PotentialSpec) -> Self {
        self.potential = potential;
        self
    }

    pub fn with_kt(&self, kt: f64) -> Self {
        PhysicalParams {
            kt,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::invalid("hbar", "must be positive and finite"));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::invalid("mass", "must be positive and finite"));
        }
        if !self.kt.is_finite() {
            return Err(Error::invalid("kT", "must be finite"));
        }
        self.potential.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub external: f64,
    pub logarithmic: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(kinetic: f64, external: f64, logarithmic: f64) -> Self {
        EnergyBreakdown {
            kinetic,
            external,
            logarithmic,
            total: kinetic + external + logarithmic,
        }
    }
}

pub fn density(psi: &ComplexField) -> RealField {
    psi.density()
}

pub(crate) fn xlogx(rho: f64) -> f64 {
    if rho < DENSITY_EPSILON {
        0.0
    } else {
        rho * libm::log(rho)
    }
}

/// `ρ ln ρ`, continuously extended by `f(0) = 0`. Its minimum is `-1/e` at `ρ = 1/e`.
pub fn rho_log_rho(rho: f64) -> Result<f64> {
    if rho.is_nan() || rho < 0.0 {
        return Err(Error::NegativeDensity {
            index: 0,
            value: rho,
        });
    }
    Ok(xlogx(rho))
}

fn check_nonnegative(rho: &RealField) -> Result<()> {
    match rho.values().iter().position(|&v| v < 0.0) {
        Some(index) => Err(Error::NegativeDensity {
            index,
            value: rho.values()[index],
        }),
        None => Ok(()),
    }
}

/// `∫ ρ ln ρ`, without the kT prefactor.
pub fn entropy_functional(rho: &RealField) -> Result<f64> {
    check_nonnegative(rho)?;
    Ok(rho.values().iter().map(|&r| xlogx(r)).sum::<f64>() * rho.grid().cell_volume())
}

/// Minimum of `ρ ln ρ` over the grid and the density at which it occurs.
pub fn pointwise_bound_report(rho: &RealField) -> Result<(f64, f64)> {
    check_nonnegative(rho)?;
    let (min_value, argmin) = rho
        .values()
        .iter()
        .map(|&r| (xlogx(r), r))
        .fold((f64::INFINITY, f64::NAN), |best, cur| {
            if cur.0 < best.0 {
                cur
            } else {
                best
            }
        });
    debug_assert!(min_value >= -1.0 / E - 1e-14);
    Ok((min_value, argmin))
}

/// Evaluates the Hamiltonian average. Warns (does not fail) when `psi` is
/// not normalized, since scaled states are legitimate solutions.
pub fn energy(psi: &ComplexField, params: &PhysicalParams) -> Result<EnergyBreakdown> {
    params.validate()?;
    let n2 = psi.norm_squared();
    if (n2 - 1.0).abs() > 1e-8 {
        log::warn!("energy of a state with ∫|ψ|² = {n2}, expected 1");
    }
    let potential = params.potential.sample(psi.grid(), params.mass)?;
    Ok(energy_with(
        &Spectral::new(psi.grid()),
        psi,
        params,
        potential.values(),
    ))
}

pub(crate) fn energy_with(
    spectral: &Spectral,
    psi: &ComplexField,
    params: &PhysicalParams,
    potential: &[f64],
) -> EnergyBreakdown {
    let dv = psi.grid().cell_volume();
    let kinetic =
        params.hbar * params.hbar / (2.0 * params.mass) * spectral.gradient_norm_squared(psi);
    let (mut external, mut entropy) = (0.0, 0.0);
    for (z, v) in psi.values().iter().zip(potential) {
        let rho = z.norm_sqr();
        external += v * rho;
        entropy += xlogx(rho);
    }
    EnergyBreakdown::new(kinetic, external * dv, params.kt * entropy * dv)
}

/// Kinetic energy from forward differences, `Σ |ψ(x+h) - ψ(x)|²/h²`, which
/// equals the 3-point Laplacian form on a periodic grid. Second-order
/// accurate; used to cross-check the spectral value.
pub fn kinetic_energy_finite_difference(psi: &ComplexField, params: &PhysicalParams) -> f64 {
    let grid = psi.grid();
    let values = psi.values();
    let mut sum = 0.0;
    for axis in 0..grid.dims() {
        let n = grid.points()[axis];
        let stride = grid.stride(axis);
        let h = grid.spacing(axis);
        for (flat, z) in values.iter().enumerate() {
            let j = (flat / stride) % n;
            let next = if j + 1 == n {
                flat - j * stride
            } else {
                flat + stride
            };
            sum += (values[next] - z).norm_sqr() / (h * h);
        }
    }
    params.hbar * params.hbar / (2.0 * params.mass) * sum * grid.cell_volume()
}

fn density_gradient(psi: &ComplexField) -> Vec<RealField> {
    let spectral = Spectral::new(psi.grid());
    let rho = psi.density();
    (0..psi.grid().dims())
        .map(|a| spectral.derivative(&rho, a).expect("same grid, axis in range"))
        .collect()
}

/// `∫ -kT ∇ρ`, the net force exerted by the logarithmic term.
pub fn log_force_total(psi: &ComplexField, params: &PhysicalParams) -> Vec<f64> {
    let dims = psi.grid().dims();
    if params.kt == 0.0 {
        return vec![0.0; dims];
    }
    density_gradient(psi)
        .iter()
        .map(|g| -params.kt * g.integrate())
        .collect()
}

/// `∫ (x - c) × (-kT ∇ρ)`: three components in 3D, one (the z component)
/// in 2D, none in 1D.
pub fn log_torque_total(
    psi: &ComplexField,
    params: &PhysicalParams,
    center: &[f64],
) -> Result<Vec<f64>> {
    let grid = *psi.grid();
    let dims = grid.dims();
    if center.len() != dims {
        return Err(Error::invalid("center", "needs one coordinate per axis"));
    }
    for (axis, &c) in center.iter().enumerate() {
        if !grid.contains(axis, c) {
            return Err(Error::CenterOutside { axis, value: c });
        }
    }
    let components = match dims {
        1 => 0,
        2 => 1,
        _ => 3,
    };
    if params.kt == 0.0 || dims == 1 {
        return Ok(vec![0.0; components]);
    }
    let grad = density_gradient(psi);
    // r × F with F = -kT ∇ρ, accumulated pointwise
    let mut torque = [0.0; 3];
    grid.for_each_point(|i, x| {
        let mut r = [0.0; 3];
        let mut f = [0.0; 3];
        for a in 0..dims {
            r[a] = x[a] - center[a];
            f[a] = -params.kt * grad[a].values()[i];
        }
        torque[0] += r[1] * f[2] - r[2] * f[1];
        torque[1] += r[2] * f[0] - r[0] * f[2];
        torque[2] += r[0] * f[1] - r[1] * f[0];
    });
    let dv = grid.cell_volume();
    Ok(match dims {
        2 => vec![torque[2] * dv],
        _ => torque.iter().map(|t| t * dv).collect(),
    })
}
