//! Poisson sampling: sequential-search inversion for small means and
//! Hörmann's transformed rejection with squeeze (PTRS) for large ones.

use rand::Rng;
use statrs::function::gamma::ln_gamma;

/// Means at or above this use transformed rejection.
pub const REJECTION_THRESHOLD: f64 = 10.0;

/// Draws `Y ~ Poisson(mu)`. `mu` must be finite and nonnegative.
pub fn sample_poisson<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> u64 {
    debug_assert!(mu.is_finite() && mu >= 0.0);
    if mu <= 0.0 {
        0
    } else if mu < REJECTION_THRESHOLD {
        inversion(mu, rng)
    } else {
        transformed_rejection(mu, rng)
    }
}

fn inversion<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-mu).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mu / k as f64;
        if p == 0.0 {
            // cdf stalled below u through rounding; the remaining mass is
            // negligible.
            break;
        }
        cdf += p;
    }
    k
}

fn transformed_rejection<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> u64 {
    let slam = mu.sqrt();
    let loglam = mu.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);

    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mu + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mu + k * loglam - ln_gamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn pmf(mu: f64, k: u64) -> f64 {
        (-mu + k as f64 * mu.ln() - ln_gamma(k as f64 + 1.0)).exp()
    }

    /// Pearson statistic against the exact pmf over bins holding ≥ 5 expected
    /// counts; tails are lumped.
    fn chi_square(mu: f64, draws: usize, seed: u64) -> (f64, usize) {
        let mut rng = substream(seed, &[0]);
        let top = (mu + 12.0 * mu.sqrt() + 30.0) as usize;
        let mut counts = vec![0usize; top + 1];
        for _ in 0..draws {
            let y = sample_poisson(mu, &mut rng) as usize;
            counts[y.min(top)] += 1;
        }
        let n = draws as f64;
        let (mut stat, mut bins) = (0.0, 0usize);
        let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
        for k in 0..=top {
            obs_acc += counts[k] as f64;
            exp_acc += n * pmf(mu, k as u64);
            if exp_acc >= 5.0 {
                stat += (obs_acc - exp_acc).powi(2) / exp_acc;
                bins += 1;
                obs_acc = 0.0;
                exp_acc = 0.0;
            }
        }
        (stat, bins)
    }

    #[test]
    fn zero_mean() {
        let mut rng = substream(1, &[]);
        assert!((0..100).all(|_| sample_poisson(0.0, &mut rng) == 0));
    }

    #[test]
    fn matches_pmf_both_regimes() {
        for (i, &mu) in [0.3, 2.5, 9.9, 10.0, 37.0, 400.0].iter().enumerate() {
            let (stat, bins) = chi_square(mu, 200_000, 11 + i as u64);
            let dof = (bins - 1) as f64;
            // roughly a 5σ upper tail of the chi-square distribution
            let limit = dof + 5.0 * (2.0 * dof).sqrt() + 5.0;
            assert!(stat < limit, "mu={mu}: chi2={stat} over {bins} bins");
        }
    }

    #[test]
    fn mean_and_variance_large_mu() {
        let mu = 1e4;
        let mut rng = substream(3, &[]);
        let n = 100_000;
        let ys: Vec<f64> = (0..n).map(|_| sample_poisson(mu, &mut rng) as f64).collect();
        let mean = ys.iter().sum::<f64>() / n as f64;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - mu).abs() < 4.0 * (mu / n as f64).sqrt());
        assert!((var / mu - 1.0).abs() < 0.03);
    }
}
