//! Separation estimators and exact risk evaluation for SPADE.
//!
//! SPADE is summarized by a Poisson statistic `Y` with mean
//! `μ = Lθ² / (16σ²)`; its maximum-likelihood estimate is `4σ √(Y/L)`.
//! Direct imaging records `L` photon positions and is estimated by
//! maximizing the two-Gaussian mixture likelihood over `θ ≥ 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::model::{ImagingConfig, Separation};

/// Largest Poisson mean accepted by the exact summations.
pub const MAX_POISSON_MEAN: f64 = 1e9;

/// Absolute tolerance of the direct-imaging likelihood search, in σ.
pub const DIRECT_ML_TOL: f64 = 1e-6;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpadeOutcome(pub u64);

/// Photon arrival positions from one direct-imaging measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectSample {
    positions: Vec<f64>,
}

impl DirectSample {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("photon positions must be finite"));
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EstimatorKind {
    SpadeMl,
    SpadeModifiedMl,
    DirectMl,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [
        EstimatorKind::SpadeMl,
        EstimatorKind::SpadeModifiedMl,
        EstimatorKind::DirectMl,
    ];

    /// Stable index used to address random substreams.
    pub fn index(self) -> u64 {
        match self {
            EstimatorKind::SpadeMl => 0,
            EstimatorKind::SpadeModifiedMl => 1,
            EstimatorKind::DirectMl => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::SpadeMl => "spade-ml",
            EstimatorKind::SpadeModifiedMl => "spade-modified-ml",
            EstimatorKind::DirectMl => "direct-ml",
        }
    }

    pub fn is_spade(self) -> bool {
        !matches!(self, EstimatorKind::DirectMl)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "spade-ml" | "spademl" | "spade" => Ok(EstimatorKind::SpadeMl),
            "spade-modified-ml" | "spademodifiedml" | "modified-ml" | "spade-mml" => {
                Ok(EstimatorKind::SpadeModifiedMl)
            }
            "direct-ml" | "directml" | "direct" => Ok(EstimatorKind::DirectMl),
            _ => Err(Error::invalid(format!("unknown estimator '{s}'"))),
        }
    }
}

/// `4σ √(y/L)`.
pub fn spade_ml(y: SpadeOutcome, cfg: &ImagingConfig) -> Separation {
    Separation::new_unchecked(4.0 * cfg.sigma() * (y.0 as f64 / cfg.photons_f64()).sqrt())
}

/// Maximum likelihood, except that `y = 0` maps to `2σ/√L`.
pub fn spade_modified_ml(y: SpadeOutcome, cfg: &ImagingConfig) -> Separation {
    if y.0 == 0 {
        Separation::new_unchecked(2.0 * cfg.sigma() / cfg.photons_f64().sqrt())
    } else {
        spade_ml(y, cfg)
    }
}

/// Applies a SPADE estimator to an outcome.
pub fn spade_estimate(kind: EstimatorKind, y: SpadeOutcome, cfg: &ImagingConfig) -> Result<Separation> {
    match kind {
        EstimatorKind::SpadeMl => Ok(spade_ml(y, cfg)),
        EstimatorKind::SpadeModifiedMl => Ok(spade_modified_ml(y, cfg)),
        EstimatorKind::DirectMl => Err(Error::invalid("direct-ml is not a SPADE estimator")),
    }
}

/// `log cosh z` without overflow.
fn log_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Log-likelihood `Σ ln f(xᵢ|θ)` of a direct-imaging sample.
pub fn direct_log_likelihood(sample: &DirectSample, cfg: &ImagingConfig, theta: Separation) -> f64 {
    let s = cfg.sigma();
    let t = theta.value() / s;
    let n = sample.len() as f64;
    let base: f64 = sample
        .positions
        .iter()
        .map(|&x| crate::model::log_normal_density(x / s))
        .sum();
    base - n * s.ln() + reduced_log_likelihood(&scaled(sample, s), t)
}

fn scaled(sample: &DirectSample, sigma: f64) -> Vec<f64> {
    sample.positions.iter().map(|x| x / sigma).collect()
}

/// The θ-dependent part of the log-likelihood at `t = θ/σ`:
/// `Σ log cosh(uᵢ t/2) − L t²/8`.
fn reduced_log_likelihood(u: &[f64], t: f64) -> f64 {
    let h = 0.5 * t;
    u.iter().map(|&x| log_cosh(x * h)).sum::<f64>() - u.len() as f64 * t * t / 8.0
}

/// Direct-imaging maximum-likelihood separation on `[0, theta_max]`.
///
/// With `uᵢ = xᵢ/σ` the score divided by `t` is
/// `Σ (uᵢ/2) tanh(uᵢ t/2)/t − L/4`, which is strictly decreasing in `t > 0`,
/// so the likelihood is unimodal on `t ≥ 0`. Its maximizer is `0` when
/// `Σ uᵢ² ≤ L` and otherwise lies below `2 mean|uᵢ|`, where the score turns
/// negative. Golden-section search over that bracket then finds the global
/// maximum to within [`DIRECT_ML_TOL`]·σ. Ties go to the smaller separation.
pub fn direct_ml(sample: &DirectSample, cfg: &ImagingConfig, theta_max: f64) -> Result<Separation> {
    if sample.is_empty() {
        return Err(Error::invalid("direct-imaging sample is empty"));
    }
    if !(theta_max.is_finite() && theta_max > 0.0) {
        return Err(Error::invalid(format!("theta_max must be positive, got {theta_max}")));
    }
    let s = cfg.sigma();
    let u = scaled(sample, s);
    let n = u.len() as f64;

    let second_moment: f64 = u.iter().map(|x| x * x).sum();
    if second_moment <= n {
        return Ok(Separation::ZERO);
    }
    let mean_abs = u.iter().map(|x| x.abs()).sum::<f64>() / n;
    let upper = (theta_max / s).min(2.0 * mean_abs);
    if !(upper > 0.0) {
        return Ok(Separation::ZERO);
    }

    let ll = |t: f64| reduced_log_likelihood(&u, t);
    let t_star = golden_section_max(&ll, 0.0, upper, DIRECT_ML_TOL);

    let mut best = (0.0, ll(0.0));
    for t in [t_star, upper] {
        let v = ll(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    Ok(Separation::new_unchecked(best.0 * s))
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - INV_GOLDEN * (hi - lo);
    let mut x2 = lo + INV_GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Summation window `[lo, hi]` for a Poisson mean: twelve standard
/// deviations plus a margin on each side, leaving tail mass below 1e-12.
pub fn poisson_window(mu: f64) -> (u64, u64) {
    let sd = mu.sqrt();
    let lo = ((mu - 12.0 * sd).floor() - 20.0).max(0.0) as u64;
    let hi = (mu + 12.0 * sd).ceil() as u64 + 30;
    (lo, hi)
}

fn check_mean(mu: f64) -> Result<()> {
    if !mu.is_finite() || mu > MAX_POISSON_MEAN {
        return Err(Error::invalid(format!(
            "Poisson mean {mu} exceeds the supported maximum {MAX_POISSON_MEAN}"
        )));
    }
    Ok(())
}

/// `E f(Y)` for `Y ~ Poisson(mu)` over the truncation window.
fn poisson_expectation<F: Fn(u64) -> f64>(mu: f64, f: F) -> f64 {
    if mu == 0.0 {
        return f(0);
    }
    let (lo, hi) = poisson_window(mu);
    let ln_mu = mu.ln();
    (lo..=hi)
        .map(|y| {
            let yf = y as f64;
            (yf * ln_mu - mu - ln_gamma(yf + 1.0)).exp() * f(y)
        })
        .sum()
}

/// SPADE Poisson mean `Lθ² / (16σ²)`.
pub fn spade_mean(cfg: &ImagingConfig, theta: Separation) -> f64 {
    let r = theta.value() / cfg.sigma();
    cfg.photons_f64() * r * r / 16.0
}

/// Exact mean-square error of a SPADE estimator by Poisson summation.
pub fn spade_exact_mse(cfg: &ImagingConfig, theta: Separation, kind: EstimatorKind) -> Result<f64> {
    if !kind.is_spade() {
        return Err(Error::invalid(format!("{kind} is not a SPADE estimator")));
    }
    let mu = spade_mean(cfg, theta);
    check_mean(mu)?;
    let t = theta.value();
    Ok(poisson_expectation(mu, |y| {
        let est = match kind {
            EstimatorKind::SpadeModifiedMl => spade_modified_ml(SpadeOutcome(y), cfg),
            _ => spade_ml(SpadeOutcome(y), cfg),
        };
        (est.value() - t).powi(2)
    }))
}

/// `16σ²/L`: guaranteed ceiling on the SPADE maximum-likelihood risk.
pub fn spade_mse_upper_bound(cfg: &ImagingConfig) -> f64 {
    16.0 * cfg.sigma() * cfg.sigma() / cfg.photons_f64()
}

/// Checks `√x ≥ 1 + (x−1)/2 − (x−1)²/2`.
pub fn verify_sqrt_inequality(x: f64) -> Result<bool> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("x must be finite and nonnegative, got {x}")));
    }
    let d = x - 1.0;
    let rhs = 1.0 + 0.5 * d - 0.5 * d * d;
    // The two sides touch at x = 0 and x = 1; allow for rounding there.
    Ok(x.sqrt() >= rhs - 4.0 * f64::EPSILON * rhs.abs().max(1.0))
}

/// `E √Y` for `Y ~ Poisson(mu)`.
pub fn expected_sqrt_poisson(mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("Poisson mean must be positive, got {mu}")));
    }
    check_mean(mu)?;
    Ok(poisson_expectation(mu, |y| (y as f64).sqrt()))
}

/// Lower bound `√μ − 1/(2√μ)` on `E √Y`.
pub fn expected_sqrt_lower_bound(mu: f64) -> f64 {
    mu.sqrt() - 0.5 / mu.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(sigma: f64, photons: u64) -> ImagingConfig {
        ImagingConfig::new(sigma, photons).unwrap()
    }

    fn sep(t: f64) -> Separation {
        Separation::new(t).unwrap()
    }

    #[test]
    fn spade_ml_values() {
        let c = cfg(1.0, 100);
        assert_eq!(spade_ml(SpadeOutcome(0), &c).value(), 0.0);
        assert_relative_eq!(spade_ml(SpadeOutcome(25), &c).value(), 2.0);
        assert_relative_eq!(spade_ml(SpadeOutcome(100), &c).value(), 4.0);
    }

    #[test]
    fn modified_ml_values() {
        let c = cfg(1.0, 100);
        assert_relative_eq!(spade_modified_ml(SpadeOutcome(0), &c).value(), 0.2);
        assert_eq!(spade_modified_ml(SpadeOutcome(25), &c), spade_ml(SpadeOutcome(25), &c));
        assert_relative_eq!(spade_modified_ml(SpadeOutcome(0), &cfg(1.0, 4)).value(), 1.0);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in EstimatorKind::ALL {
            assert_eq!(k.name().parse::<EstimatorKind>().unwrap(), k);
        }
        assert!("bayes".parse::<EstimatorKind>().is_err());
    }

    #[test]
    fn direct_ml_all_at_centroid() {
        let c = cfg(1.0, 5);
        let s = DirectSample::new(vec![0.0; 5]).unwrap();
        assert_eq!(direct_ml(&s, &c, 10.0).unwrap().value(), 0.0);
    }

    #[test]
    fn direct_ml_symmetric_pair() {
        let c = cfg(1.0, 2);
        let s = DirectSample::new(vec![3.0, -3.0]).unwrap();
        let est = direct_ml(&s, &c, 10.0).unwrap().value();
        let ll = |t: f64| direct_log_likelihood(&s, &c, sep(t));
        let grid_best = (0..=1_000_000)
            .map(|i| 10.0 * i as f64 / 1e6)
            .fold((0.0, f64::NEG_INFINITY), |b, t| {
                let v = ll(t);
                if v > b.1 { (t, v) } else { b }
            });
        assert!((est - grid_best.0).abs() < 1e-3, "{est} vs {}", grid_best.0);
    }

    #[test]
    fn direct_ml_interior_max_ignores_theta_max() {
        let c = cfg(1.0, 6);
        let s = DirectSample::new(vec![1.9, -2.1, 1.4, -1.2, 2.5, -0.3]).unwrap();
        let a = direct_ml(&s, &c, 10.0).unwrap().value();
        let b = direct_ml(&s, &c, 20.0).unwrap().value();
        assert!(a > 0.0 && a < 5.0);
        assert_eq!(a, b);
    }

    #[test]
    fn direct_ml_clipped_at_theta_max() {
        let c = cfg(1.0, 2);
        let s = DirectSample::new(vec![30.0, -30.0]).unwrap();
        assert_eq!(direct_ml(&s, &c, 10.0).unwrap().value(), 10.0);
    }

    #[test]
    fn direct_ml_input_errors() {
        let c = cfg(1.0, 1);
        let empty = DirectSample::new(vec![]).unwrap();
        assert!(matches!(direct_ml(&empty, &c, 1.0), Err(Error::InvalidInput(_))));
        let one = DirectSample::new(vec![0.5]).unwrap();
        assert!(direct_ml(&one, &c, 0.0).is_err());
        assert!(DirectSample::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn direct_log_likelihood_matches_profile() {
        let c = cfg(1.7, 3);
        let s = DirectSample::new(vec![0.4, -2.0, 3.3]).unwrap();
        for t in [0.0, 0.9, 4.0] {
            let direct: f64 = s
                .positions()
                .iter()
                .map(|&x| crate::model::intensity_profile(&c, sep(t), x).ln())
                .sum();
            assert_relative_eq!(direct_log_likelihood(&s, &c, sep(t)), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn exact_mse_at_zero() {
        let c = cfg(1.0, 100);
        assert_eq!(spade_exact_mse(&c, sep(0.0), EstimatorKind::SpadeMl).unwrap(), 0.0);
        let m = spade_exact_mse(&c, sep(0.0), EstimatorKind::SpadeModifiedMl).unwrap();
        assert_relative_eq!(m, 0.04, max_relative = 1e-15);
    }

    #[test]
    fn exact_mse_large_mean() {
        let c = cfg(1.0, 100);
        let m = spade_exact_mse(&c, sep(4.0), EstimatorKind::SpadeMl).unwrap();
        // scipy Poisson-pmf summation over the same window
        assert_relative_eq!(m, 0.04017739938833108, max_relative = 1e-9);
    }

    #[test]
    fn exact_mse_rejects_direct_and_huge_mean() {
        let c = cfg(1.0, 100);
        assert!(spade_exact_mse(&c, sep(1.0), EstimatorKind::DirectMl).is_err());
        assert!(spade_exact_mse(&c, sep(1e5), EstimatorKind::SpadeMl).is_err());
    }

    #[test]
    fn upper_bound_values() {
        assert_relative_eq!(spade_mse_upper_bound(&cfg(1.0, 100)), 0.16);
        assert_eq!(spade_mse_upper_bound(&cfg(1.0, 16)), 1.0);
        let c = cfg(0.7, 33);
        assert_relative_eq!(spade_mse_upper_bound(&c), 4.0 * crate::bounds::spade_minimax_bound(&c));
    }

    #[test]
    fn sqrt_inequality_points() {
        assert!(verify_sqrt_inequality(1.0).unwrap());
        assert!(verify_sqrt_inequality(0.0).unwrap());
        assert!(verify_sqrt_inequality(4.0).unwrap());
        assert!(verify_sqrt_inequality(-1.0).is_err());
    }

    #[test]
    fn expected_sqrt_values() {
        // scipy Poisson-pmf summation
        assert_relative_eq!(expected_sqrt_poisson(100.0).unwrap(), 9.987444562691758, max_relative = 1e-10);
        assert_relative_eq!(expected_sqrt_poisson(1.0).unwrap(), 0.7731926563792859, max_relative = 1e-12);
        assert!(expected_sqrt_poisson(100.0).unwrap() >= 9.95);
        assert!(expected_sqrt_poisson(1.0).unwrap() >= 0.5);
        assert!(expected_sqrt_poisson(4.0).unwrap() < expected_sqrt_poisson(9.0).unwrap());
        assert!(expected_sqrt_poisson(0.0).is_err());
        assert!(expected_sqrt_poisson(-2.0).is_err());
    }

    #[test]
    fn window_covers_mean() {
        for mu in [0.01, 1.0, 50.0, 1e6] {
            let (lo, hi) = poisson_window(mu);
            assert!((lo as f64) < mu && (hi as f64) > mu);
        }
        assert_eq!(poisson_window(1.0).0, 0);
    }
}
