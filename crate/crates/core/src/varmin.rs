//! Constrained minimization of `∫ρ ln ρ` over normalized densities.
//!
//! Stationarity of `S = ∫[ρ ln ρ + λ(ρ - 1/V)]` gives `ln ρ + 1 + λ = 0` on
//! the support, so the minimizer is the uniform density and the minimum is
//! `-ln V`. [`minimize_entropy`] reaches it numerically with entropic mirror
//! descent, `ρ ← ρ·exp(-η(ln ρ + 1))` followed by renormalization, i.e.
//! `ρ ← ρ^{1-η}/Z`. Iterates stay positive and normalized by construction,
//! and for `0 < η ≤ 1` the objective never increases.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::E;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::xlogx;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField};

/// Points with `ρ ≤ SUPPORT_CUTOFF / V` are treated as outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityVector {
    grid: GridSpec,
    values: Vec<f64>,
}

impl DensityVector {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let field = RealField::new(grid, values)?;
        if let Some(index) = field.values().iter().position(|&v| v < 0.0) {
            return Err(Error::NegativeDensity {
                index,
                value: field.values()[index],
            });
        }
        Ok(DensityVector {
            grid,
            values: field.into_values(),
        })
    }

    /// Scales `values` to unit mass.
    pub fn normalized(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let mut rho = DensityVector::new(grid, values)?;
        let mass = rho.mass();
        if mass.is_nan() || mass <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        rho.values.iter_mut().for_each(|v| *v /= mass);
        Ok(rho)
    }

    pub fn uniform(grid: GridSpec) -> Self {
        DensityVector {
            grid,
            values: alloc::vec![1.0 / grid.volume(); grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn is_normalized(&self) -> bool {
        (self.mass() - 1.0).abs() <= 1e-10
    }

    /// `∫ρ ln ρ`.
    pub fn entropy(&self) -> f64 {
        self.values.iter().map(|&r| xlogx(r)).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn to_field(&self) -> RealField {
        RealField::from_parts_unchecked(self.grid, self.values.clone())
    }

    fn support_cutoff(&self) -> f64 {
        SUPPORT_CUTOFF / self.grid.volume()
    }

    fn support_logs(&self) -> impl Iterator<Item = f64> + '_ {
        let cutoff = self.support_cutoff();
        self.values
            .iter()
            .filter(move |&&r| r > cutoff)
            .map(|&r| libm::log(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerConfig {
    pub max_iters: usize,
    /// KKT residual threshold.
    pub tolerance: f64,
    /// Mirror-descent step `η`, in `(0, 1]`.
    pub step_size: f64,
    pub seed: u64,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        MinimizerConfig {
            max_iters: 1000,
            tolerance: 1e-8,
            step_size: 0.5,
            seed: 0,
        }
    }
}

impl MinimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be at least 1"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance", "must be positive"));
        }
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return Err(Error::invalid("step_size", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizationResult {
    pub rho_star: DensityVector,
    /// `∫ρ ln ρ` at `rho_star`.
    pub value: f64,
    pub lambda: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the start and after every iteration.
    pub objective_history: Vec<f64>,
}

/// `S = ∫[ρ ln ρ + λ(ρ - 1/V)]`.
pub fn lagrangian(rho: &DensityVector, lambda: f64) -> f64 {
    let inv_v = 1.0 / rho.grid.volume();
    rho.values
        .iter()
        .map(|&r| xlogx(r) + lambda * (r - inv_v))
        .sum::<f64>()
        * rho.grid.cell_volume()
}

/// Least-squares multiplier for the stationarity equation: `-1 - mean(ln ρ)`
/// over the support.
pub fn multiplier_estimate(rho: &DensityVector) -> f64 {
    let (sum, count) = rho
        .support_logs()
        .fold((0.0, 0usize), |(s, c), l| (s + l, c + 1));
    if count == 0 {
        return f64::NAN;
    }
    -1.0 - sum / count as f64
}

/// `max |ln ρ + 1 + λ|` over the support.
pub fn kkt_residual(rho: &DensityVector, lambda: f64) -> f64 {
    rho.support_logs()
        .map(|l| (l + 1.0 + lambda).abs())
        .fold(0.0, f64::max)
}

/// `(-1/e)·V`, the bound from `ρ ln ρ ≥ -1/e` alone.
pub fn crude_bound(grid: &GridSpec) -> f64 {
    -grid.volume() / E
}

/// `-ln V`, the minimum over normalized densities.
pub fn sharp_bound(grid: &GridSpec) -> f64 {
    -libm::log(grid.volume())
}

/// A strictly positive normalized density with log-uniform samples.
pub fn random_density(grid: &GridSpec, seed: u64) -> DensityVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| libm::exp(rng.gen_range(-2.0..2.0)))
        .collect();
    DensityVector::normalized(*grid, values).expect("positive samples")
}

pub fn minimize_entropy(grid: &GridSpec, cfg: &MinimizerConfig) -> Result<MinimizationResult> {
    minimize_entropy_from(random_density(grid, cfg.seed), cfg)
}

pub fn minimize_entropy_from(
    start: DensityVector,
    cfg: &MinimizerConfig,
) -> Result<MinimizationResult> {
    cfg.validate()?;
    let mut rho = DensityVector::normalized(start.grid, start.values)?;
    let dv = rho.grid.cell_volume();
    let keep = 1.0 - cfg.step_size;
    let mut history = alloc::vec![rho.entropy()];
    let mut lambda = multiplier_estimate(&rho);
    let mut residual = kkt_residual(&rho, lambda);
    let mut iterations = 0;
    let mut logs: Vec<f64> = Vec::with_capacity(rho.values.len());

    while residual > cfg.tolerance && iterations < cfg.max_iters {
        // ρ^{1-η} in the log domain, renormalized; zeros stay zero
        logs.clear();
        logs.extend(rho.values.iter().map(|&r| {
            if r > 0.0 {
                keep * libm::log(r)
            } else {
                f64::NEG_INFINITY
            }
        }));
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = logs.iter().map(|&l| libm::exp(l - top)).sum::<f64>() * dv;
        for (r, &l) in rho.values.iter_mut().zip(&logs) {
            *r = libm::exp(l - top) / z;
        }
        iterations += 1;
        history.push(rho.entropy());
        lambda = multiplier_estimate(&rho);
        residual = kkt_residual(&rho, lambda);
    }

    Ok(MinimizationResult {
        value: rho.entropy(),
        converged: residual <= cfg.tolerance,
        rho_star: rho,
        lambda,
        kkt_residual: residual,
        iterations,
        objective_history: history,
    })
}

/// A fixed, seeded family of normalized densities meant to probe the
/// volume bounds from awkward directions.
pub fn adversarial_densities(grid: &GridSpec, seed: u64) -> Vec<(String, DensityVector)> {
    let n = grid.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut push = |name: &str, values: Vec<f64>| {
        if let Ok(rho) = DensityVector::normalized(*grid, values) {
            out.push((String::from(name), rho));
        }
    };

    let mut spike = alloc::vec![0.0; n];
    spike[0] = 1.0;
    push("spike_first", spike);
    let mut spike = alloc::vec![0.0; n];
    spike[n / 2 + 1] = 1.0;
    push("spike_interior", spike);
    push(
        "two_level",
        (0..n).map(|i| if i < n / 2 { 1.0 } else { 0.0 }).collect(),
    );
    push(
        "two_level_unequal",
        (0..n).map(|i| if i % 4 == 0 { 3.0 } else { 1.0 }).collect(),
    );
    push("ramp", (0..n).map(|i| i as f64).collect());
    push(
        "random_uniform",
        (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
    );
    push(
        "random_heavy_tail",
        (0..n)
            .map(|_| {
                let u: f64 = rng.gen_range(0.0..1.0);
                u * u * u * u * u * u * u * u
            })
            .collect(),
    );
    push(
        "random_sparse",
        (0..n)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    rng.gen_range(0.0..1.0)
                } else {
                    0.0
                }
            })
            .collect(),
    );
    push(
        "near_uniform",
        (0..n).map(|_| 1.0 + 1e-3 * rng.gen_range(-1.0..1.0)).collect(),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use alloc::vec;
    use proptest::prelude::*;

    fn grid_with_volume(v: f64) -> GridSpec {
        make_grid(1, &[64], &[v]).unwrap()
    }

    #[test]
    fn lagrangian_examples() {
        let g = grid_with_volume(8.0);
        let uniform = DensityVector::uniform(g);
        for lambda in [-3.0, 0.0, 0.5, 10.0] {
            assert!((lagrangian(&uniform, lambda) + 8f64.ln()).abs() < 1e-14);
        }
        assert!(lagrangian(&DensityVector::uniform(grid_with_volume(1.0)), 1.0).abs() < 1e-15);
        let g1 = grid_with_volume(1.0);
        let doubled = DensityVector::new(g1, vec![2.0; 64]).unwrap();
        assert!((lagrangian(&doubled, 0.0) - 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn kkt_residual_examples() {
        let g = grid_with_volume(8.0);
        let uniform = DensityVector::uniform(g);
        assert!(kkt_residual(&uniform, -1.0 + 8f64.ln()) < 1e-15);
        assert!((multiplier_estimate(&uniform) - (-1.0 + 8f64.ln())).abs() < 1e-14);
        let u1 = DensityVector::uniform(grid_with_volume(1.0));
        assert_eq!(kkt_residual(&u1, 0.0), 1.0);

        // no λ makes a nonuniform density stationary
        let rho = random_density(&g, 4);
        let best = (0..=4000)
            .map(|i| -5.0 + i as f64 * 0.0025)
            .map(|l| kkt_residual(&rho, l))
            .fold(f64::INFINITY, f64::min);
        assert!(best > 0.1);
        assert!(kkt_residual(&rho, multiplier_estimate(&rho)) >= best - 0.0025);
    }

    #[test]
    fn support_excludes_empty_cells() {
        let g = grid_with_volume(2.0);
        let rho = DensityVector::normalized(g, (0..64).map(|i| if i < 32 { 1.0 } else { 0.0 }).collect()).unwrap();
        // uniform on its own support: stationary with λ = -1 - ln(1)
        assert!(kkt_residual(&rho, -1.0) < 1e-15);
    }

    #[test]
    fn minimizer_examples() {
        let cfg = MinimizerConfig::default();
        let r = minimize_entropy(&grid_with_volume(1.0), &cfg).unwrap();
        assert!(r.converged);
        assert!(r.value.abs() < 1e-8);
        assert!(r.rho_star.values().iter().all(|v| (v - 1.0).abs() < 1e-6));

        let r = minimize_entropy(&grid_with_volume(E), &cfg).unwrap();
        assert!((r.value + 1.0).abs() < 1e-8);

        let g8 = grid_with_volume(8.0);
        for seed in 0..10 {
            let r = minimize_entropy(&g8, &MinimizerConfig { seed, ..cfg }).unwrap();
            assert!(r.converged && r.kkt_residual <= cfg.tolerance);
            assert!(r.value >= -8f64.ln() - 1e-12 && r.value <= -8f64.ln() + 1e-8, "{}", r.value);
            let u = 1.0 / 8.0;
            assert!(r.rho_star.values().iter().all(|v| ((v - u) / u).abs() < 1e-6));
        }
    }

    #[test]
    fn uniform_start_needs_no_iterations() {
        let g = grid_with_volume(3.0);
        let r = minimize_entropy_from(DensityVector::uniform(g), &MinimizerConfig::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.converged);
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = grid_with_volume(8.0);
        let cfg = MinimizerConfig { max_iters: 2, step_size: 0.1, ..Default::default() };
        let r = minimize_entropy(&g, &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
        assert!(r.kkt_residual > cfg.tolerance);
    }

    #[test]
    fn config_is_validated() {
        let g = grid_with_volume(8.0);
        for cfg in [
            MinimizerConfig { max_iters: 0, ..Default::default() },
            MinimizerConfig { tolerance: 0.0, ..Default::default() },
            MinimizerConfig { step_size: 1.5, ..Default::default() },
        ] {
            assert!(minimize_entropy(&g, &cfg).is_err());
        }
        assert!(DensityVector::new(g, vec![-1.0; 64]).is_err());
        assert_eq!(DensityVector::normalized(g, vec![0.0; 64]), Err(Error::ZeroNorm));
    }

    #[test]
    fn crude_bound_examples() {
        let g8 = grid_with_volume(8.0);
        assert!((crude_bound(&g8) + 8.0 / E).abs() < 1e-15);
        assert!(crude_bound(&g8) <= sharp_bound(&g8));
        assert!((crude_bound(&g8) - -2.943).abs() < 1e-3);
        assert_eq!(crude_bound(&grid_with_volume(E)), -1.0);
        assert_eq!(sharp_bound(&grid_with_volume(E)), -1.0);
        assert_eq!(crude_bound(&grid_with_volume(1.0)), -1.0 / E);
        assert_eq!(sharp_bound(&grid_with_volume(1.0)), 0.0);
    }

    #[test]
    fn spike_entropy_is_log_of_cell_density() {
        // all mass in one of 64 cells on V = 8: ∫ρ ln ρ = ln(n/V) = ln 8
        let g = grid_with_volume(8.0);
        let (_, spike) = adversarial_densities(&g, 0).into_iter().find(|(n, _)| n == "spike_first").unwrap();
        assert!((spike.entropy() - 8f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn second_order_growth_around_the_minimum() {
        let g = grid_with_volume(4.0);
        let n = g.len();
        let perturb: Vec<f64> = (0..n).map(|i| libm::cos(2.0 * core::f64::consts::PI * 3.0 * i as f64 / n as f64)).collect();
        let gaps: Vec<(f64, f64)> = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
            .iter()
            .map(|&eps| {
                let values = perturb.iter().map(|p| 0.25 * (1.0 + eps * p)).collect();
                let rho = DensityVector::normalized(g, values).unwrap();
                (eps, rho.entropy() + 4f64.ln())
            })
            .collect();
        // gap ≈ c ε², fitted through the origin
        let c = gaps.iter().map(|(e, d)| e * e * d).sum::<f64>() / gaps.iter().map(|(e, _)| e.powi(4)).sum::<f64>();
        assert!(c > 0.0);
        for (eps, gap) in gaps {
            assert!(gap > 0.0);
            assert!((gap / (c * eps * eps) - 1.0).abs() < 0.02);
        }
    }

    proptest! {
        #[test]
        fn iterates_stay_feasible_and_descend(seed in any::<u64>(), step in 0.05f64..=1.0, length in 0.5f64..120.0) {
            let g = make_grid(1, &[32], &[length]).unwrap();
            let cfg = MinimizerConfig { seed, step_size: step, max_iters: 400, ..Default::default() };
            let r = minimize_entropy(&g, &cfg).unwrap();
            prop_assert!(r.rho_star.values().iter().all(|&v| v >= 0.0));
            prop_assert!((r.rho_star.mass() - 1.0).abs() <= 1e-10);
            for w in r.objective_history.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
            prop_assert!(r.converged);
            prop_assert!((r.value - sharp_bound(&g)).abs() <= 1e-8);
        }

        #[test]
        fn bound_chain_holds(seed in any::<u64>(), length in 0.1f64..200.0) {
            let g = make_grid(1, &[64], &[length]).unwrap();
            let mut family = adversarial_densities(&g, seed);
            family.push((String::from("random"), random_density(&g, seed)));
            for (name, rho) in family {
                let h = rho.entropy();
                prop_assert!(h >= sharp_bound(&g) - 1e-10, "{}", name);
                prop_assert!(h >= crude_bound(&g) - 1e-10, "{}", name);
                if name != "near_uniform" {
                    prop_assert!(h > sharp_bound(&g) + 1e-9, "{} sits on the bound", name);
                }
            }
        }
    }
}
