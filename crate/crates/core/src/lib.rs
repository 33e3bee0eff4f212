//! Numerics for the logarithmic nonlinear Schrödinger equation
//!
//! ```text
//! [ -ħ²/2m Δ + V + kT ln(Ψ*Ψ) ] Ψ = iħ ∂Ψ/∂t
//! ```
//!
//! on a periodic box in one to three dimensions. The crate is `no_std`
//! (it needs `alloc`) and is split by concern:
//!
//! * [`grid`]: periodic grids, sampled fields, quadrature and spectral transforms.
//! * [`energy`]: the averaged Hamiltonian, the entropy functional `∫ρ ln ρ`,
//!   and the integrated force and torque of the logarithmic term.
//! * [`propagator`]: Strang split-step evolution in real and imaginary time.
//! * [`varmin`]: constrained minimization of the entropy functional on the
//!   probability simplex and the volume bounds it certifies.
//! * [`scenarios`]: end-to-end experiments producing [`ScenarioReport`]s.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod energy;
pub mod fft;
pub mod grid;
pub mod propagator;
pub mod scenarios;
pub mod varmin;

pub use num_complex::Complex64;

pub use crate::energy::{EnergyBreakdown, PhysicalParams, PotentialSpec};
pub use crate::error::{Error, Result};
pub use crate::grid::{ComplexField, GridSpec, RealField, Spectral};
pub use crate::propagator::{EvolutionConfig, Mode, Propagator, Trajectory};
pub use crate::scenarios::{ScenarioReport, ScenarioSpec};
pub use crate::varmin::{DensityVector, MinimizationResult, MinimizerConfig};
