//! Strang split-step evolution.
//!
//! One step is `K(dt/2) ∘ N(dt) ∘ K(dt/2)` where `K` multiplies each Fourier
//! mode by `exp(-iħ|k|²t/2m)` and `N` multiplies each sample by
//! `exp(-i(V + kT ln ρ)t/ħ)`. Both are exact flows of their sub-equations:
//! `N` leaves `|ψ|` untouched pointwise, so the density inside the logarithm
//! is the same at the start and end of the substep.
//!
//! Imaginary time replaces `dt` by `-i dτ` in every factor and projects the
//! state back to unit norm after each step.
//!
//! `ln ρ` is evaluated as `ln(max(ρ, density_floor))`. The floor only
//! touches samples with `ρ < density_floor` (default `1e-30`), i.e.
//! amplitudes below `1e-15`; there it caps the phase rotation rate at
//! `|kT| ln(1/floor)/ħ ≈ 69 |kT|/ħ` instead of letting it diverge.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::energy::{energy_with, EnergyBreakdown, PhysicalParams};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, Spectral};

pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    RealTime,
    ImaginaryTime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    pub mode: Mode,
    pub density_floor: f64,
    pub record_every: usize,
}

impl EvolutionConfig {
    /// Real-time evolution recording every step.
    pub fn new(dt: f64, steps: usize) -> Self {
        EvolutionConfig {
            dt,
            steps,
            mode: Mode::RealTime,
            density_floor: DEFAULT_DENSITY_FLOOR,
            record_every: 1,
        }
    }

    pub fn imaginary(mut self) -> Self {
        self.mode = Mode::ImaginaryTime;
        self
    }

    pub fn record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", "must be positive and finite"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        if !(self.density_floor.is_finite() && self.density_floor > 0.0) {
            return Err(Error::invalid("density_floor", "must be positive and finite"));
        }
        if self.record_every == 0 || self.record_every > self.steps {
            return Err(Error::invalid("record_every", "must be in 1..=steps"));
        }
        Ok(())
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn record_count(&self) -> usize {
        1 + self.steps / self.record_every
    }
}

/// Observables sampled at step 0 and then every `record_every` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub norm_series: Vec<f64>,
    pub energy_series: Vec<EnergyBreakdown>,
    /// `⟨x_a⟩` per record, one entry per axis.
    pub center_series: Vec<Vec<f64>>,
    /// `⟨x_a²⟩ - ⟨x_a⟩²` per record, one entry per axis.
    pub variance_series: Vec<Vec<f64>>,
    pub final_state: ComplexField,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sum of the per-axis variances at each record.
    pub fn total_variance(&self) -> Vec<f64> {
        self.variance_series.iter().map(|v| v.iter().sum()).collect()
    }
}

/// What an observer sees at each recorded time.
pub struct Record<'a> {
    pub index: usize,
    pub step: usize,
    pub time: f64,
    pub state: &'a ComplexField,
}

/// Density-weighted mean and variance along every axis. Normalizes by
/// `∫ρ`, so scaled states give the same answer.
pub fn moments(psi: &ComplexField) -> (Vec<f64>, Vec<f64>) {
    let grid = psi.grid();
    let dims = grid.dims();
    let mut total = 0.0;
    let mut first = [0.0; 3];
    let mut second = [0.0; 3];
    grid.for_each_point(|i, x| {
        let rho = psi.values()[i].norm_sqr();
        total += rho;
        for a in 0..dims {
            first[a] += rho * x[a];
            second[a] += rho * x[a] * x[a];
        }
    });
    let mean: Vec<f64> = (0..dims).map(|a| first[a] / total).collect();
    let var = (0..dims)
        .map(|a| second[a] / total - mean[a] * mean[a])
        .collect();
    (mean, var)
}

/// Precomputed operators for one grid and parameter set.
#[derive(Debug, Clone)]
pub struct Propagator {
    params: PhysicalParams,
    spectral: Spectral,
    k_squared: Vec<f64>,
    potential: Vec<f64>,
}

impl Propagator {
    pub fn new(grid: &GridSpec, params: &PhysicalParams) -> Result<Self> {
        params.validate()?;
        let potential = params.potential.sample(grid, params.mass)?.into_values();
        let spectral = Spectral::new(grid);
        let k_squared = spectral.k_squared();
        Ok(Propagator {
            params: params.clone(),
            spectral,
            k_squared,
            potential,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.spectral.grid()
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn check_grid(&self, psi: &ComplexField) -> Result<()> {
        if psi.grid() != self.grid() {
            Err(Error::GridMismatch)
        } else {
            Ok(())
        }
    }

    /// Kinetic flow for half of `dt`: each mode gets `exp(-iħ|k|²dt/4m)`
    /// (real time) or `exp(-ħ|k|²dt/4m)` (imaginary time).
    pub fn kinetic_half_step(&self, psi: &mut ComplexField, dt: f64, mode: Mode) {
        let values = psi.values_mut();
        self.spectral.forward_in_place(values);
        let c = self.params.hbar * dt / (4.0 * self.params.mass);
        for (z, &k2) in values.iter_mut().zip(&self.k_squared) {
            *z *= decay_or_phase(c * k2, mode);
        }
        self.spectral.inverse_in_place(values);
    }

    /// Potential plus logarithmic flow for the full `dt`.
    ///
    /// In real time this is the phase `exp(-i(V + kT ln ρ)dt/ħ)`, exact
    /// because `ρ` is invariant along the flow. In imaginary time `ρ` is not
    /// invariant: `u = ln ρ` obeys `du/dτ = -2(V + kT u)/ħ`, which is solved
    /// in closed form so the substep stays exact.
    pub fn potential_log_step(&self, psi: &mut ComplexField, dt: f64, mode: Mode, floor: f64) {
        let kt = self.params.kt;
        let hbar = self.params.hbar;
        match mode {
            Mode::RealTime => {
                let c = dt / hbar;
                for (z, &v) in psi.values_mut().iter_mut().zip(&self.potential) {
                    let mut w = v;
                    if kt != 0.0 {
                        w += kt * libm::log(z.norm_sqr().max(floor));
                    }
                    *z *= decay_or_phase(c * w, mode);
                }
            }
            Mode::ImaginaryTime => {
                // u(τ) - u0 = (kT u0 + V) · g,  g = expm1(-2kTτ/ħ) / kT
                let x = kt * dt / hbar;
                let g = if x.abs() < 1e-8 {
                    -2.0 * dt / hbar * (1.0 - x)
                } else {
                    libm::expm1(-2.0 * x) / kt
                };
                for (z, &v) in psi.values_mut().iter_mut().zip(&self.potential) {
                    let u0 = libm::log(z.norm_sqr().max(floor));
                    *z *= libm::exp(0.5 * (kt * u0 + v) * g);
                }
            }
        }
    }

    /// One Strang step of signed length `dt`. Imaginary-time steps are
    /// renormalized to unit norm.
    pub fn step_by(&self, psi: &mut ComplexField, dt: f64, mode: Mode, floor: f64) {
        self.kinetic_half_step(psi, dt, mode);
        self.potential_log_step(psi, dt, mode, floor);
        self.kinetic_half_step(psi, dt, mode);
        if mode == Mode::ImaginaryTime {
            let n2 = psi.norm_squared();
            let s = 1.0 / libm::sqrt(n2);
            psi.values_mut().iter_mut().for_each(|z| *z *= s);
        }
    }

    pub fn step(&self, psi: &ComplexField, cfg: &EvolutionConfig) -> Result<ComplexField> {
        self.check_grid(psi)?;
        let mut out = psi.clone();
        self.step_by(&mut out, cfg.dt, cfg.mode, cfg.density_floor);
        if !out.is_finite() {
            return Err(Error::NumericalAbort { step: 1 });
        }
        Ok(out)
    }

    /// Applies `steps` steps of signed length `dt` in place.
    pub fn advance(
        &self,
        psi: &mut ComplexField,
        dt: f64,
        steps: usize,
        mode: Mode,
        floor: f64,
    ) -> Result<()> {
        self.check_grid(psi)?;
        for step in 1..=steps {
            self.step_by(psi, dt, mode, floor);
            if !psi.is_finite() {
                return Err(Error::NumericalAbort { step });
            }
        }
        Ok(())
    }

    pub fn energy(&self, psi: &ComplexField) -> EnergyBreakdown {
        energy_with(&self.spectral, psi, &self.params, &self.potential)
    }

    pub fn evolve(&self, psi0: &ComplexField, cfg: &EvolutionConfig) -> Result<Trajectory> {
        self.evolve_observed(psi0, cfg, |_| {})
    }

    /// Like [`Propagator::evolve`], additionally handing every recorded
    /// state to `observer`.
    pub fn evolve_observed(
        &self,
        psi0: &ComplexField,
        cfg: &EvolutionConfig,
        mut observer: impl FnMut(&Record<'_>),
    ) -> Result<Trajectory> {
        cfg.validate()?;
        self.check_grid(psi0)?;
        let n2 = psi0.norm_squared();
        match cfg.mode {
            Mode::RealTime if (n2 - 1.0).abs() > 1e-8 => {
                log::debug!("real-time evolution of a state with ∫|ψ|² = {n2}");
            }
            Mode::ImaginaryTime if n2.is_nan() || n2 <= 0.0 => return Err(Error::ZeroNorm),
            _ => {}
        }

        let records = cfg.record_count();
        let mut traj = Trajectory {
            times: Vec::with_capacity(records),
            norm_series: Vec::with_capacity(records),
            energy_series: Vec::with_capacity(records),
            center_series: Vec::with_capacity(records),
            variance_series: Vec::with_capacity(records),
            final_state: psi0.clone(),
        };
        let mut psi = psi0.clone();
        if cfg.mode == Mode::ImaginaryTime {
            psi = psi.normalize()?;
        }
        let mut record = |traj: &mut Trajectory, psi: &ComplexField, step: usize| {
            let time = step as f64 * cfg.dt;
            let (mean, var) = moments(psi);
            traj.times.push(time);
            traj.norm_series.push(psi.norm_squared());
            traj.energy_series.push(self.energy(psi));
            traj.center_series.push(mean);
            traj.variance_series.push(var);
            observer(&Record {
                index: traj.times.len() - 1,
                step,
                time,
                state: psi,
            });
        };
        record(&mut traj, &psi, 0);
        for step in 1..=cfg.steps {
            self.step_by(&mut psi, cfg.dt, cfg.mode, cfg.density_floor);
            if !psi.is_finite() {
                return Err(Error::NumericalAbort { step });
            }
            if step % cfg.record_every == 0 {
                record(&mut traj, &psi, step);
            }
        }
        traj.final_state = psi;
        Ok(traj)
    }
}

fn decay_or_phase(theta: f64, mode: Mode) -> Complex64 {
    match mode {
        Mode::RealTime => Complex64::new(libm::cos(theta), -libm::sin(theta)),
        Mode::ImaginaryTime => Complex64::new(libm::exp(-theta), 0.0),
    }
}

pub fn kinetic_half_step(psi: &ComplexField, params: &PhysicalParams, dt: f64) -> Result<ComplexField> {
    let mut out = psi.clone();
    Propagator::new(psi.grid(), params)?.kinetic_half_step(&mut out, dt, Mode::RealTime);
    Ok(out)
}

pub fn potential_log_step(
    psi: &ComplexField,
    params: &PhysicalParams,
    dt: f64,
    density_floor: f64,
) -> Result<ComplexField> {
    let mut out = psi.clone();
    Propagator::new(psi.grid(), params)?.potential_log_step(
        &mut out,
        dt,
        Mode::RealTime,
        density_floor,
    );
    Ok(out)
}

pub fn step(psi: &ComplexField, params: &PhysicalParams, cfg: &EvolutionConfig) -> Result<ComplexField> {
    cfg.validate()?;
    Propagator::new(psi.grid(), params)?.step(psi, cfg)
}

pub fn evolve(psi0: &ComplexField, params: &PhysicalParams, cfg: &EvolutionConfig) -> Result<Trajectory> {
    Propagator::new(psi0.grid(), params)?.evolve(psi0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::energy::PotentialSpec;
    use crate::grid::make_grid;
    use core::f64::consts::{E, PI};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gaussian(grid: GridSpec, sigma: f64, x0: f64, k: f64) -> ComplexField {
        ComplexField::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum::<f64>() - x[0] * x[0] + (x[0] - x0).powi(2);
            Complex64::from_polar((-r2 / (4.0 * sigma * sigma)).exp(), k * x[0])
        })
        .unwrap()
        .normalize()
        .unwrap()
    }

    fn plane_wave(grid: GridSpec, mode: i32, amp: f64) -> ComplexField {
        let k = 2.0 * PI * mode as f64 / grid.lengths()[0];
        ComplexField::from_fn(grid, |x| Complex64::from_polar(amp, k * x[0])).unwrap()
    }

    #[test]
    fn kinetic_half_step_examples() {
        let g = make_grid(1, &[16], &[2.0 * PI]).unwrap();
        let params = PhysicalParams::natural(0.0);
        let constant = ComplexField::new(g, vec![Complex64::new(0.3, 0.1); 16]).unwrap();
        let out = kinetic_half_step(&constant, &params, 0.7).unwrap();
        assert!(out.max_distance(&constant).unwrap() < 1e-15);

        // two half steps of dt rotate mode k by -ħk²dt/2m
        let (k, dt) = (3.0, 0.37);
        let psi = plane_wave(g, 3, 1.0);
        let once = kinetic_half_step(&psi, &params, dt).unwrap();
        let twice = kinetic_half_step(&once, &params, dt).unwrap();
        let want = psi.scaled(Complex64::from_polar(1.0, -k * k * dt / 2.0)).unwrap();
        assert!(twice.max_distance(&want).unwrap() < 1e-13);

        let r = gaussian(g, 0.5, 0.3, 2.0);
        let stepped = kinetic_half_step(&r, &params, 0.05).unwrap();
        assert!((stepped.norm_squared() - r.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn potential_log_step_examples() {
        let g = make_grid(1, &[16], &[4.0]).unwrap();
        let psi = gaussian(g, 0.5, 0.0, 1.0);
        let same = potential_log_step(&psi, &PhysicalParams::natural(0.0), 0.3, 1e-30).unwrap();
        assert_eq!(same, psi);

        let unit = ComplexField::new(g, vec![Complex64::new(1.0, 0.0); 16]).unwrap();
        let out = potential_log_step(&unit, &PhysicalParams::natural(2.0), 0.3, 1e-30).unwrap();
        assert!(out.max_distance(&unit).unwrap() < 1e-15);

        // |A|² = e, kT = 1, dt = 1: phase e^{-i ln e} = e^{-i}
        let plane = plane_wave(g, 1, E.sqrt());
        let out = potential_log_step(&plane, &PhysicalParams::natural(1.0), 1.0, 1e-30).unwrap();
        let want = plane.scaled(Complex64::from_polar(1.0, -1.0)).unwrap();
        assert!(out.max_distance(&want).unwrap() < 1e-14);

        let rho_before = psi.density();
        let out = potential_log_step(&psi, &PhysicalParams::natural(-0.7), 0.2, 1e-30).unwrap();
        for (a, b) in out.density().values().iter().zip(rho_before.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn free_single_mode_is_exact_for_any_dt() {
        let g = make_grid(1, &[32], &[2.0 * PI]).unwrap();
        let psi0 = plane_wave(g, 2, 1.0).normalize().unwrap();
        for dt in [0.01, 0.5, 3.0] {
            let cfg = EvolutionConfig::new(dt, 7);
            let traj = evolve(&psi0, &PhysicalParams::natural(0.0), &cfg).unwrap();
            let t = cfg.total_time();
            let want = psi0.scaled(Complex64::from_polar(1.0, -4.0 * t / 2.0)).unwrap();
            assert!(traj.final_state.max_distance(&want).unwrap() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_stays_plane_wave() {
        let g = make_grid(1, &[32], &[2.0]).unwrap();
        for kt in [-0.5, 0.5, 2.0] {
            let psi0 = plane_wave(g, 3, 1.7);
            let p = Propagator::new(&g, &PhysicalParams::natural(kt)).unwrap();
            let mut psi = psi0.clone();
            p.advance(&mut psi, 0.01, 200, Mode::RealTime, 1e-30).unwrap();
            for z in psi.values() {
                assert!((z.norm() - 1.7).abs() < 1e-10 * 1.7);
            }
        }
    }

    #[test]
    fn forward_then_backward_returns() {
        let g = make_grid(1, &[64], &[16.0]).unwrap();
        let params = PhysicalParams::natural(0.8)
            .with_potential(PotentialSpec::Harmonic { omega: vec![0.3], center: vec![0.5] });
        let p = Propagator::new(&g, &params).unwrap();
        let psi0 = gaussian(g, 1.0, -1.0, 1.5);
        let mut psi = psi0.clone();
        let n = 200;
        p.advance(&mut psi, 0.01, n, Mode::RealTime, 1e-30).unwrap();
        p.advance(&mut psi, -0.01, n, Mode::RealTime, 1e-30).unwrap();
        assert!(psi.max_distance(&psi0).unwrap() <= n as f64 * 1e-10);
    }

    #[test]
    fn norm_is_conserved_in_real_time() {
        let g = make_grid(2, &[16, 16], &[10.0, 10.0]).unwrap();
        let p = Propagator::new(&g, &PhysicalParams::natural(-1.0)).unwrap();
        let cfg = EvolutionConfig::new(0.01, 100).record_every(10);
        let traj = p.evolve(&gaussian(g, 1.0, 0.5, 1.0), &cfg).unwrap();
        assert_eq!(traj.len(), 11);
        for (i, n) in traj.norm_series.iter().enumerate() {
            assert!((n - 1.0).abs() <= (1 + 10 * i) as f64 * 1e-12);
        }
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn free_gaussian_spreads_per_closed_form() {
        let g = make_grid(1, &[512], &[80.0]).unwrap();
        let sigma0 = 1.0;
        let cfg = EvolutionConfig::new(0.01, 400).record_every(40);
        let traj = evolve(&gaussian(g, sigma0, 0.0, 0.0), &PhysicalParams::natural(0.0), &cfg).unwrap();
        for (t, v) in traj.times.iter().zip(&traj.variance_series) {
            let want = sigma0 * sigma0 + (t / (2.0 * sigma0)).powi(2);
            assert!(((v[0] - want) / want).abs() < 1e-6, "t = {t}: {} vs {want}", v[0]);
        }
    }

    #[test]
    fn gausson_keeps_its_width() {
        // kT = -1/2, ħ = m = 1: α = 1, so ψ ∝ exp(-x²/2), variance 1/2
        let g = make_grid(1, &[128], &[20.0]).unwrap();
        let psi0 = gaussian(g, 1.0 / 2f64.sqrt(), 0.0, 0.0);
        let cfg = EvolutionConfig::new(1e-3, 2000).record_every(200);
        let traj = evolve(&psi0, &PhysicalParams::natural(-0.5), &cfg).unwrap();
        let v0 = traj.variance_series[0][0];
        for v in &traj.variance_series {
            assert!(((v[0] - v0) / v0).abs() < 1e-6);
        }
    }

    #[test]
    fn gausson_is_an_imaginary_time_fixed_point() {
        let g = make_grid(1, &[128], &[20.0]).unwrap();
        let psi0 = gaussian(g, 1.0 / 2f64.sqrt(), 0.0, 0.0);
        let p = Propagator::new(&g, &PhysicalParams::natural(-0.5)).unwrap();
        let cfg = EvolutionConfig::new(1e-3, 1).imaginary();
        let next = p.step(&psi0, &cfg).unwrap();
        let d = next.max_distance(&psi0).unwrap();
        assert!(d < 1e-8, "{d}");
    }

    #[test]
    fn imaginary_time_energy_is_monotone() {
        let g = make_grid(1, &[128], &[20.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bumps: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(0.5..1.5), rng.gen_range(0.2..1.0)))
            .collect();
        let psi0 = ComplexField::from_fn(g, |x| {
            let v: f64 = bumps.iter().map(|(c, w, a)| a * (-(x[0] - c).powi(2) / (2.0 * w * w)).exp()).sum();
            Complex64::new(v, 0.0)
        })
        .unwrap();
        let cfg = EvolutionConfig::new(1e-2, 500).imaginary();
        let traj = evolve(&psi0, &PhysicalParams::natural(-0.5), &cfg).unwrap();
        for w in traj.energy_series.windows(2) {
            assert!(w[1].total <= w[0].total + 1e-12, "{} -> {}", w[0].total, w[1].total);
        }
        for n in &traj.norm_series {
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn imaginary_log_substep_is_an_exact_flow() {
        // exact flows compose: two half steps equal one full step
        let g = make_grid(1, &[32], &[10.0]).unwrap();
        let params = PhysicalParams::natural(-0.8)
            .with_potential(PotentialSpec::Harmonic { omega: vec![0.7], center: vec![0.2] });
        let p = Propagator::new(&g, &params).unwrap();
        let psi0 = gaussian(g, 1.1, 0.3, 0.0).scaled(Complex64::new(1.7, 0.0)).unwrap();
        let mut once = psi0.clone();
        p.potential_log_step(&mut once, 0.3, Mode::ImaginaryTime, 1e-30);
        let mut twice = psi0.clone();
        p.potential_log_step(&mut twice, 0.15, Mode::ImaginaryTime, 1e-30);
        p.potential_log_step(&mut twice, 0.15, Mode::ImaginaryTime, 1e-30);
        assert!(once.max_distance(&twice).unwrap() < 1e-13);

        // kT → 0 limit is the plain decay exp(-V dτ)
        let p0 = Propagator::new(&g, &params.with_kt(1e-12)).unwrap();
        let mut a = psi0.clone();
        p0.potential_log_step(&mut a, 0.3, Mode::ImaginaryTime, 1e-30);
        let v = params.potential.sample(&g, 1.0).unwrap();
        for ((za, z0), vv) in a.values().iter().zip(psi0.values()).zip(v.values()) {
            assert!((za - z0 * (-vv * 0.3).exp()).norm() < 1e-11);
        }
    }

    #[test]
    fn imaginary_time_blow_up_aborts_with_step() {
        let g = make_grid(1, &[64], &[20.0]).unwrap();
        let psi0 = gaussian(g, 0.7, 0.0, 0.0);
        let cfg = EvolutionConfig::new(20.0, 5).imaginary();
        let err = evolve(&psi0, &PhysicalParams::natural(-1.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::NumericalAbort { step: 1 }), "{err:?}");
    }

    #[test]
    fn config_validation() {
        assert!(EvolutionConfig::new(0.0, 1).validate().is_err());
        assert!(EvolutionConfig::new(0.1, 0).validate().is_err());
        assert!(EvolutionConfig::new(0.1, 5).record_every(6).validate().is_err());
        let mut c = EvolutionConfig::new(0.1, 5);
        c.density_floor = 0.0;
        assert!(c.validate().is_err());
        assert_eq!(EvolutionConfig::new(0.1, 10).record_every(3).record_count(), 4);
    }

    #[test]
    fn energy_drift_is_second_order() {
        let g = make_grid(1, &[128], &[24.0]).unwrap();
        let params = PhysicalParams::natural(0.5)
            .with_potential(PotentialSpec::Harmonic { omega: vec![0.5], center: vec![0.0] });
        let psi0 = gaussian(g, 1.3, 0.5, 0.5);
        let drift = |dt: f64| {
            let cfg = EvolutionConfig::new(dt, (2.0 / dt).round() as usize);
            let traj = evolve(&psi0, &params, &cfg).unwrap();
            let e0 = traj.energy_series[0].total;
            traj.energy_series.iter().map(|e| (e.total - e0).abs()).fold(0.0, f64::max)
        };
        let d: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&dt| drift(dt)).collect();
        std::println!("energy drift {d:?}");
        for w in d.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn state_error_is_second_order() {
        let g = make_grid(1, &[128], &[24.0]).unwrap();
        for kt in [0.5, -0.5] {
            let p = Propagator::new(&g, &PhysicalParams::natural(kt)).unwrap();
            let psi0 = gaussian(g, 1.0, 0.0, 1.0);
            let total = 1.0;
            let run = |dt: f64| {
                let mut psi = psi0.clone();
                p.advance(&mut psi, dt, (total / dt).round() as usize, Mode::RealTime, 1e-30).unwrap();
                psi
            };
            let dts = [0.04, 0.02, 0.01];
            let reference = run(dts[2] / 16.0);
            let errs: Vec<f64> = dts.iter().map(|&dt| run(dt).max_distance(&reference).unwrap()).collect();
            for w in errs.windows(2) {
                let ratio = w[0] / w[1];
                assert!((3.0..=5.0).contains(&ratio), "kT {kt}: ratio {ratio} {errs:?}");
            }
        }
    }
}
