//! Self-check suite backing the `verify` command.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{ground_state, uniform_grid};
use crate::error::Result;
use crate::estimators::{
    expected_sqrt_lower_bound, expected_sqrt_poisson, spade_exact_mse, spade_mse_upper_bound,
    verify_sqrt_inequality, EstimatorKind,
};
use crate::model::{fisher_direct, fisher_direct_quadratic_bound, ImagingConfig, QuadraticFisherBound, Separation};
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

/// Runs every check; `seed` drives the randomized ones.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        CheckOutcome::from_result("sqrt-inequality", sqrt_inequality(seed, 100_000)),
        CheckOutcome::from_result("expected-sqrt-bound", expected_sqrt_bound()),
        CheckOutcome::from_result("spade-ml-guarantee", spade_guarantee()),
        CheckOutcome::from_result("oscillator-eigenvalue", oscillator_eigenvalue()),
        CheckOutcome::from_result("quadratic-dominance", quadratic_dominance()),
    ]
}

fn sqrt_inequality(seed: u64, samples: usize) -> Result<(bool, String)> {
    let mut rng = substream(seed, &[0x5157]);
    let mut failures = 0usize;
    for _ in 0..samples {
        let x = 100.0 * rng.random::<f64>();
        if !verify_sqrt_inequality(x)? {
            failures += 1;
        }
    }
    for x in [0.0, 1.0, 100.0] {
        if !verify_sqrt_inequality(x)? {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("{samples} random x in [0, 100], {failures} violations")))
}

fn expected_sqrt_bound() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for mu in [0.1, 1.0, 10.0, 100.0, 1e4] {
        let e = expected_sqrt_poisson(mu)?;
        let lb = expected_sqrt_lower_bound(mu);
        ok &= e >= lb;
        parts.push(format!("mu={mu}: {e:.6} >= {lb:.6}"));
    }
    Ok((ok, parts.join("; ")))
}

fn spade_guarantee() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for photons in [10u64, 100, 1000, 10_000] {
        let cfg = ImagingConfig::new(1.0, photons)?;
        let bound = spade_mse_upper_bound(&cfg);
        for &t in &uniform_grid(10.0, 400) {
            let mse = spade_exact_mse(&cfg, Separation::new(t)?, EstimatorKind::SpadeMl)?;
            worst = worst.max(mse / bound);
        }
    }
    Ok((worst <= 1.0, format!("max MSE·L/(16σ²) = {worst:.6}")))
}

fn oscillator_eigenvalue() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for photons in [10u64, 100, 1000] {
        let cfg = ImagingConfig::new(1.0, photons)?;
        let g = ground_state(&QuadraticFisherBound(cfg), 10.0, 8192)?;
        let exact = 3.0 * (photons as f64).sqrt() / std::f64::consts::SQRT_2;
        let rel = (g.lambda / exact - 1.0).abs();
        ok &= rel < 2e-3;
        parts.push(format!("L={photons}: λ={:.6} vs {exact:.6} (rel {rel:.2e})", g.lambda));
    }
    Ok((ok, parts.join("; ")))
}

fn quadratic_dominance() -> Result<(bool, String)> {
    let cfg = ImagingConfig::new(1.0, 100)?;
    let limit = cfg.shot_noise_information();
    let mut worst_quantum: f64 = 0.0;
    let mut worst_quadratic: f64 = 0.0;
    for &t in &uniform_grid(10.0, 200) {
        let theta = Separation::new(t)?;
        let j = fisher_direct(&cfg, theta)?;
        worst_quantum = worst_quantum.max(j / limit);
        let q = fisher_direct_quadratic_bound(&cfg, theta);
        if q > 0.0 {
            worst_quadratic = worst_quadratic.max(j / q);
        } else if j > 0.0 {
            worst_quadratic = f64::INFINITY;
        }
    }
    let ok = worst_quantum <= 1.0 + 1e-6 && worst_quadratic <= 1.0 + 1e-6;
    Ok((
        ok,
        format!("max J/J_spade = {worst_quantum:.8}, max J/J_quadratic = {worst_quadratic:.8}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_all(2024) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
