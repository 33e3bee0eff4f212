//! The built-in property suite run by `lognls check`.
//!
//! Each check exercises one claim end to end on a default grid and reports
//! its worst discrepancy against a fixed tolerance.

use std::f64::consts::{E, FRAC_PI_3, TAU};
use std::fmt;

use lognls_core::energy::{log_force_total, log_torque_total, pointwise_bound_report, rho_log_rho};
use lognls_core::scenarios::{self, gaussian_x2_residual, gausson_alpha, Factor, Packet};
use lognls_core::{
    Complex64, ComplexField, EvolutionConfig, GridSpec, MinimizerConfig, Mode, PhysicalParams,
    PotentialSpec, Propagator, RealField, Result,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::runner::parallel_map;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {}. {}: {}", self.id, self.name, self.detail)
    }
}

type CheckFn = fn() -> Result<(bool, String)>;

pub const CHECKS: [(u8, &str, CheckFn); 9] = [
    (1, "pointwise bound ρ ln ρ ≥ -1/e", pointwise_bound),
    (2, "sharp volume bound -ln V", sharp_volume_bound),
    (3, "crude volume bound -V/e", crude_volume_bound),
    (4, "zero net force and torque", force_and_torque),
    (5, "scaling covariance", scaling_covariance),
    (6, "factorization", factorization),
    (7, "plane-wave dispersion", plane_waves),
    (8, "Gausson stationarity and spreading order", gausson),
    (9, "integrator hygiene", hygiene),
];

pub fn run_check(id: u8) -> CheckResult {
    let (id, name, f) = CHECKS
        .iter()
        .copied()
        .find(|c| c.0 == id)
        .expect("check ids are 1 to 9");
    let (pass, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        id,
        name,
        pass,
        detail,
    }
}

pub fn run_all(threads: usize) -> Vec<CheckResult> {
    let ids: Vec<u8> = CHECKS.iter().map(|c| c.0).collect();
    parallel_map(&ids, threads, |&id| run_check(id))
}

fn verdict(worst: f64, tol: f64, label: &str) -> (bool, String) {
    (worst <= tol, format!("{label} {worst:.3e} (tolerance {tol:.0e})"))
}

fn join(parts: Vec<(bool, String)>) -> (bool, String) {
    let pass = parts.iter().all(|p| p.0);
    let text: Vec<String> = parts.into_iter().map(|p| p.1).collect();
    (pass, text.join("; "))
}

fn pointwise_bound() -> Result<(bool, String)> {
    let floor = -1.0 / E;
    let grid = GridSpec::cubic(1, 1000, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut lowest = f64::INFINITY;
    for field in 0..1000 {
        let values: Vec<f64> = (0..1000)
            .map(|_| match field % 3 {
                0 => rng.gen_range(0.0..1.0),
                1 => 10f64.powf(rng.gen_range(-300.0..3.0)),
                _ => 1.0 / E + rng.gen_range(-1e-3..1e-3),
            })
            .collect();
        let (min, _) = pointwise_bound_report(&RealField::new(grid, values)?)?;
        lowest = lowest.min(min);
    }
    let at_extremum = (rho_log_rho(1.0 / E)? - floor).abs();
    Ok(join(vec![
        verdict((floor - lowest).max(0.0), 1e-14, "violation over 1e6 samples"),
        verdict(at_extremum, 1e-15, "error at ρ = 1/e"),
    ]))
}

fn bound_sweep() -> Result<lognls_core::ScenarioReport> {
    scenarios::run_energy_bound_sweep(&[1.0, E, 8.0, 100.0], 64, 10, &MinimizerConfig::default())
}

fn sharp_volume_bound() -> Result<(bool, String)> {
    let r = bound_sweep()?;
    let d = &r.discrepancies;
    Ok(join(vec![
        verdict(d["minimizer_gap"], 1e-8, "minimizer gap to -ln V"),
        verdict(d["unconverged_runs"], 0.0, "unconverged runs"),
        verdict(d["sharp_bound_violation"], 1e-8, "sharp bound violation"),
    ]))
}

fn crude_volume_bound() -> Result<(bool, String)> {
    let r = bound_sweep()?;
    let d = &r.discrepancies;
    Ok(join(vec![
        verdict(d["crude_bound_violation"], 1e-8, "crude bound violation"),
        verdict(d["crude_above_sharp"], 0.0, "crude above sharp"),
    ]))
}

/// A sum of two Gaussian bumps with random centres, widths, momenta and
/// complex weights, well inside the box.
fn random_packet(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<ComplexField> {
    let dims = grid.dims();
    let bumps: Vec<(Vec<f64>, f64, Vec<f64>, Complex64)> = (0..2)
        .map(|_| {
            let c = (0..dims).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let w = rng.gen_range(0.8..1.4);
            let k = (0..dims).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let a = Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..TAU));
            (c, w, k, a)
        })
        .collect();
    ComplexField::from_fn(*grid, |x| {
        bumps
            .iter()
            .map(|(c, w, k, a)| {
                let mut r2 = 0.0;
                let mut phase = 0.0;
                for i in 0..dims {
                    r2 += (x[i] - c[i]).powi(2);
                    phase += k[i] * x[i];
                }
                a * Complex64::from_polar((-r2 / (2.0 * w * w)).exp(), phase)
            })
            .sum()
    })?
    .normalize()
}

fn force_and_torque() -> Result<(bool, String)> {
    let grids = [
        GridSpec::cubic(1, 128, 24.0)?,
        GridSpec::cubic(2, 64, 24.0)?,
        GridSpec::cubic(3, 32, 20.0)?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut force, mut torque) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let grid = &grids[i % 3];
        let psi = random_packet(grid, &mut rng)?;
        let kt = rng.gen_range(0.1..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let params = PhysicalParams::natural(kt);
        let scale = kt.abs() * psi.density().max() * grid.volume();
        for f in log_force_total(&psi, &params) {
            force = force.max(f.abs() / scale);
        }
        for _ in 0..3 {
            let center: Vec<f64> = (0..grid.dims()).map(|_| rng.gen_range(-5.0..5.0)).collect();
            for t in log_torque_total(&psi, &params, &center)? {
                torque = torque.max(t.abs() / scale);
            }
        }
    }
    Ok(join(vec![
        verdict(force, 1e-10, "|force|/(|kT| max ρ V)"),
        verdict(torque, 1e-10, "|torque|/(|kT| max ρ V)"),
    ]))
}

fn scaling_covariance() -> Result<(bool, String)> {
    let grid = GridSpec::cubic(1, 128, 20.0)?;
    let params = PhysicalParams::natural(0.7);
    let cfg = EvolutionConfig::new(1e-3, 100);
    let packet = Packet {
        sigma: 1.0,
        center: vec![0.5],
        momentum: vec![0.8],
    };
    let (mut density, mut phase) = (0.0f64, 0.0f64);
    for c in [
        Complex64::new(2.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::from_polar(2.0, FRAC_PI_3),
    ] {
        let (r, _) = scenarios::run_scaling_covariance(&grid, &params, &cfg, c, &packet)?;
        density = density.max(r.discrepancies["density_relative_error"]);
        phase = phase.max(r.discrepancies["phase_error"]);
    }
    Ok(join(vec![
        verdict(density, 1e-8, "density error / (|c|² max ρ)"),
        verdict(phase, 1e-6, "phase error [rad]"),
    ]))
}

fn factorization() -> Result<(bool, String)> {
    let grid = GridSpec::new(&[64, 48], &[16.0, 12.0])?;
    let params = PhysicalParams::natural(-0.5).with_potential(PotentialSpec::Harmonic {
        omega: vec![0.5, 0.8],
        center: vec![0.0, 0.5],
    });
    let x = Factor::Gaussian(Packet {
        sigma: 1.0,
        center: vec![-0.5],
        momentum: vec![1.0],
    });
    let y = Factor::Gausson { center: 0.0 };
    let cfg = EvolutionConfig::new(1e-3, 100);
    let (r, _) = scenarios::run_factorization(&grid, &params, &cfg, &x, &y)?;
    Ok(verdict(r.discrepancies["factorization_error"], 1e-8, "max |ψ - φx⊗φy|"))
}

fn plane_waves() -> Result<(bool, String)> {
    let grid = GridSpec::cubic(1, 64, TAU)?;
    let cfg = EvolutionConfig::new(1e-3, 1000);
    let (mut omega, mut flat) = (0.0f64, 0.0f64);
    for (k, a2, kt) in [(1, 1.0, 1.0), (1, E, 1.0), (2, E * E, -0.5)] {
        let amplitude = Complex64::new(f64::sqrt(a2), 0.0);
        let (r, _) = scenarios::run_plane_wave(&grid, &PhysicalParams::natural(kt), &cfg, &[k], amplitude)?;
        omega = omega.max(r.discrepancies["omega_relative_error"]);
        flat = flat.max(r.discrepancies["flatness"]);
    }
    Ok(join(vec![
        verdict(omega, 1e-8, "ω relative error"),
        verdict(flat, 1e-10, "flatness std/mean of |ψ|"),
    ]))
}

fn gausson() -> Result<(bool, String)> {
    let params = PhysicalParams::natural(-0.5);
    let alpha = gausson_alpha(&params)?;
    let residual = gaussian_x2_residual(&params, alpha, &GridSpec::cubic(1, 256, 24.0)?)?;

    let grid = GridSpec::cubic(1, 128, 24.0)?;
    let cfg = EvolutionConfig::new(1e-3, 10_000).record_every(100);
    let (r, _) = scenarios::run_gausson_stationarity(&grid, &params, &cfg, &[0.0])?;
    let drift = r.discrepancies["density_drift"];
    let twin = r.measured["twin_density_drift"];

    let wide = GridSpec::cubic(1, 1024, 160.0)?;
    let packet = Packet::centered(1, (0.5 / alpha).sqrt());
    let (s, _) = scenarios::run_spreading(&wide, &PhysicalParams::natural(0.0), &cfg, &[0.5, 0.0, -0.5], &packet)?;
    Ok(join(vec![
        verdict(residual, 1e-12, "x² residual"),
        verdict(drift, 1e-6, "density drift over T = 10"),
        (twin > 1e-3, format!("kT = +1/2 twin drift {twin:.3e} (needs > 1e-3)")),
        verdict(s.discrepancies["ordering_violation"], 1e-12, "ordering violation"),
        verdict(s.discrepancies["final_margin_shortfall"], 0.0, "final margin shortfall"),
    ]))
}

fn hygiene() -> Result<(bool, String)> {
    let grid = GridSpec::cubic(1, 128, 24.0)?;
    let params = PhysicalParams::natural(0.5).with_potential(PotentialSpec::Harmonic {
        omega: vec![0.5],
        center: vec![0.0],
    });
    let psi0 = Packet {
        sigma: 1.3,
        center: vec![0.5],
        momentum: vec![0.5],
    }
    .state(&grid)?;
    let prop = Propagator::new(&grid, &params)?;
    let floor = lognls_core::propagator::DEFAULT_DENSITY_FLOOR;

    let mut psi = psi0.clone();
    let n0 = psi.norm_squared();
    let mut norm_drift = 0.0f64;
    for _ in 0..100 {
        prop.advance(&mut psi, 1e-3, 100, Mode::RealTime, floor)?;
        norm_drift = norm_drift.max((psi.norm_squared() - n0).abs());
    }

    let energy_drift = |dt: f64| -> Result<f64> {
        let cfg = EvolutionConfig::new(dt, (2.0 / dt).round() as usize);
        let traj = prop.evolve(&psi0, &cfg)?;
        let e0 = traj.energy_series[0].total;
        Ok(traj.energy_series.iter().map(|e| (e.total - e0).abs()).fold(0.0, f64::max))
    };
    let drifts = [energy_drift(0.02)?, energy_drift(0.01)?, energy_drift(0.005)?];
    let ratios = [drifts[0] / drifts[1], drifts[1] / drifts[2]];
    let ratio_ok = ratios.iter().all(|r| (3.5..=4.5).contains(r));

    let mut psi = psi0.clone();
    prop.advance(&mut psi, 1e-3, 1000, Mode::RealTime, floor)?;
    prop.advance(&mut psi, -1e-3, 1000, Mode::RealTime, floor)?;
    let round_trip = psi.max_distance(&psi0)?;

    Ok(join(vec![
        verdict(norm_drift, 1e-10, "norm drift over 1e4 steps"),
        (
            ratio_ok,
            format!("energy error ratios {:.3}, {:.3} (need 3.5 to 4.5)", ratios[0], ratios[1]),
        ),
        verdict(round_trip, 1e-8, "forward-backward error after 1e3 steps"),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_checks_pass() {
        for id in [5, 6, 7] {
            let r = run_check(id);
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn display_leads_with_the_verdict() {
        let r = CheckResult {
            id: 3,
            name: "x",
            pass: false,
            detail: "d".into(),
        };
        assert_eq!(r.to_string(), "[FAIL] 3. x: d");
    }
}
