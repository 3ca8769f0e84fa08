//! Monte Carlo risk estimation.
//!
//! Every trial draws from its own substream addressed by
//! `(kind, theta index, trial)`, and per-trial results are reduced in trial
//! order, so a sweep is bit-identical for any number of rayon workers.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::PriorDensity;
use crate::error::{Error, Result};
use crate::estimators::{direct_ml, spade_estimate, spade_mean, DirectSample, EstimatorKind, SpadeOutcome};
use crate::model::{ImagingConfig, Separation};
use crate::poisson::sample_poisson;
use crate::rng::{derive_seed, substream, Stream};

pub const DEFAULT_TRIALS: u64 = 5000;
pub const DEFAULT_THETA_POINTS: usize = 61;
/// Default sweep range `[0, 6σ]`.
pub const DEFAULT_THETA_SIGMAS: f64 = 6.0;
/// Default upper limit of the direct-imaging likelihood search, in σ.
pub const DEFAULT_SEARCH_SIGMAS: f64 = 10.0;

/// Stream-path tag separating Bayes-risk draws from sweep draws.
const BAYES_TAG: u64 = 0xBA7E5;

/// Parameters of one risk sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub cfg: ImagingConfig,
    pub theta_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub kinds: Vec<EstimatorKind>,
    /// Upper end of the direct-imaging likelihood search.
    pub search_max: f64,
}

impl SweepConfig {
    pub fn new(
        cfg: ImagingConfig,
        theta_grid: Vec<f64>,
        trials: u64,
        seed: u64,
        kinds: Vec<EstimatorKind>,
    ) -> Result<Self> {
        let sw = Self {
            search_max: DEFAULT_SEARCH_SIGMAS * cfg.sigma(),
            cfg,
            theta_grid,
            trials,
            seed,
            kinds,
        };
        sw.validate()?;
        Ok(sw)
    }

    /// Default protocol: 61 points on `[0, 6σ]`, 5000 trials.
    pub fn with_defaults(cfg: ImagingConfig, seed: u64, kinds: Vec<EstimatorKind>) -> Result<Self> {
        let grid = linspace(0.0, DEFAULT_THETA_SIGMAS * cfg.sigma(), DEFAULT_THETA_POINTS);
        Self::new(cfg, grid, DEFAULT_TRIALS, seed, kinds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.theta_grid.is_empty() {
            return Err(Error::invalid("theta grid is empty"));
        }
        if self.theta_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::invalid("theta grid values must be finite and nonnegative"));
        }
        if self.theta_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("theta grid must be increasing"));
        }
        if self.kinds.is_empty() {
            return Err(Error::invalid("no estimators selected"));
        }
        if !(self.search_max.is_finite() && self.search_max > 0.0) {
            return Err(Error::invalid("search_max must be positive"));
        }
        Ok(())
    }
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| if i + 1 == n { hi } else { lo + h * i as f64 }).collect()
        }
    }
}

/// Simulated risk of one estimator across separations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseCurve {
    pub kind: EstimatorKind,
    pub theta: Vec<f64>,
    pub mse: Vec<f64>,
    pub std_err: Vec<f64>,
    /// Mean estimate minus θ.
    pub bias: Vec<f64>,
    pub trials: u64,
}

impl MseCurve {
    /// `L · MSE / (4σ²)`, the risk relative to the SPADE limit.
    pub fn normalized(&self, cfg: &ImagingConfig) -> Vec<f64> {
        let scale = cfg.photons_f64() / (4.0 * cfg.sigma() * cfg.sigma());
        self.mse.iter().map(|m| m * scale).collect()
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Draws the SPADE statistic `Y ~ Poisson(Lθ²/(16σ²))`.
pub fn sample_spade<R: Rng + ?Sized>(cfg: &ImagingConfig, theta: Separation, rng: &mut R) -> SpadeOutcome {
    SpadeOutcome(sample_poisson(spade_mean(cfg, theta), rng))
}

/// Draws `L` photon positions: a fair coin picks the source at `±θ/2`, then
/// a normal displacement of standard deviation σ.
pub fn sample_direct<R: Rng + ?Sized>(cfg: &ImagingConfig, theta: Separation, rng: &mut R) -> DirectSample {
    let half = 0.5 * theta.value();
    let s = cfg.sigma();
    let positions = (0..cfg.photons())
        .map(|_| {
            let centre = if rng.random::<bool>() { half } else { -half };
            let z: f64 = rng.sample(StandardNormal);
            centre + s * z
        })
        .collect();
    DirectSample::new(positions).expect("sampled positions are finite")
}

/// One simulated measurement followed by estimation.
fn estimate_once(sw: &SweepConfig, kind: EstimatorKind, theta: Separation, rng: &mut Stream) -> Result<f64> {
    let est = match kind {
        EstimatorKind::DirectMl => {
            let sample = sample_direct(&sw.cfg, theta, rng);
            direct_ml(&sample, &sw.cfg, sw.search_max)?
        }
        spade => spade_estimate(spade, sample_spade(&sw.cfg, theta, rng), &sw.cfg)?,
    };
    Ok(est.value())
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    mse: f64,
    std_err: f64,
    bias: f64,
}

/// Reduces per-trial errors in order.
fn moments(errors: &[f64]) -> Moments {
    let n = errors.len() as f64;
    let bias = errors.iter().sum::<f64>() / n;
    if errors.windows(2).all(|w| w[0] * w[0] == w[1] * w[1]) {
        // Deterministic outcome: report it without summation rounding.
        return Moments { mse: errors[0] * errors[0], std_err: 0.0, bias };
    }
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / n;
    let var = errors.iter().map(|e| (e * e - mse).powi(2)).sum::<f64>() / (n - 1.0);
    Moments { mse, std_err: (var / n).sqrt(), bias }
}

fn run_point(sw: &SweepConfig, kind: EstimatorKind, ti: usize) -> Result<Moments> {
    let theta = Separation::new(sw.theta_grid[ti])?;
    let errors = (0..sw.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(sw.seed, &[kind.index(), ti as u64, trial]);
            estimate_once(sw, kind, theta, &mut rng)
                .map(|est| est - theta.value())
                .map_err(|e| Error::Simulation {
                    kind: kind.name().to_string(),
                    theta: theta.value(),
                    trial,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(moments(&errors))
}

/// Simulated MSE, standard error and bias for every kind and grid point.
pub fn mse_sweep(sw: &SweepConfig) -> Result<Vec<MseCurve>> {
    sw.validate()?;
    sw.kinds
        .iter()
        .map(|&kind| {
            let points = (0..sw.theta_grid.len())
                .into_par_iter()
                .map(|ti| run_point(sw, kind, ti))
                .collect::<Result<Vec<_>>>()?;
            Ok(MseCurve {
                kind,
                theta: sw.theta_grid.clone(),
                mse: points.iter().map(|m| m.mse).collect(),
                std_err: points.iter().map(|m| m.std_err).collect(),
                bias: points.iter().map(|m| m.bias).collect(),
                trials: sw.trials,
            })
        })
        .collect()
}

/// Worst grid point of a risk curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupMse {
    pub theta: f64,
    pub mse: f64,
    pub std_err: f64,
}

/// Grid maximizer of the MSE; ties go to the smaller θ.
pub fn sup_mse(curve: &MseCurve) -> Result<SupMse> {
    if curve.is_empty() || curve.mse.len() != curve.theta.len() {
        return Err(Error::invalid("risk curve is empty or malformed"));
    }
    let mut best = 0;
    for i in 1..curve.mse.len() {
        if curve.mse[i] > curve.mse[best] {
            best = i;
        }
    }
    Ok(SupMse {
        theta: curve.theta[best],
        mse: curve.mse[best],
        std_err: curve.std_err[best],
    })
}

/// Inverse-CDF sampler for a gridded prior, linear within each cell.
struct PriorSampler<'a> {
    grid: &'a [f64],
    cdf: Vec<f64>,
}

impl<'a> PriorSampler<'a> {
    fn new(prior: &'a PriorDensity) -> Self {
        Self { grid: prior.grid(), cdf: prior.cdf() }
    }

    fn quantile(&self, u: f64) -> f64 {
        let total = *self.cdf.last().unwrap();
        let target = u * total;
        let i = self.cdf.partition_point(|&c| c <= target).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (g0, g1) = (self.grid[i - 1], self.grid[i]);
        if c1 > c0 {
            g0 + (g1 - g0) * ((target - c0) / (c1 - c0)).clamp(0.0, 1.0)
        } else {
            g0
        }
    }
}

/// Monte Carlo Bayes risk of one estimator under a prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesRisk {
    pub kind: EstimatorKind,
    pub risk: f64,
    pub std_err: f64,
}

/// Bayes risk `∫ p MSE` estimated with `sw.trials` prior draws per kind;
/// `sw.theta_grid` is not used.
pub fn bayes_risk_mc(sw: &SweepConfig, prior: &PriorDensity) -> Result<Vec<BayesRisk>> {
    sw.validate()?;
    let sampler = PriorSampler::new(prior);
    sw.kinds
        .iter()
        .map(|&kind| {
            let errors = (0..sw.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = substream(sw.seed, &[BAYES_TAG, kind.index(), trial]);
                    let theta = Separation::new(sampler.quantile(rng.random::<f64>()))?;
                    estimate_once(sw, kind, theta, &mut rng)
                        .map(|est| est - theta.value())
                        .map_err(|e| Error::Simulation {
                            kind: kind.name().to_string(),
                            theta: theta.value(),
                            trial,
                            source: Box::new(e),
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            let m = moments(&errors);
            Ok(BayesRisk { kind, risk: m.mse, std_err: m.std_err })
        })
        .collect()
}

/// Separation grid used at each photon number of a scaling study.
///
/// The worst case of the SPADE estimators sits at `θ ~ σ/√L` and that of
/// direct imaging at `θ ≲ σ L^{-1/4}`, so a fixed grid would under-resolve
/// the peak at large `L`. Each kind's grid therefore spans
/// `[0, extent · σ · L^{-exponent}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledGrid {
    pub points: usize,
    pub extent: f64,
    pub exponent: f64,
}

impl ScaledGrid {
    pub const SPADE: ScaledGrid = ScaledGrid { points: 41, extent: 16.0, exponent: 0.5 };
    pub const DIRECT: ScaledGrid = ScaledGrid { points: 25, extent: 6.0, exponent: 0.25 };

    pub fn for_kind(kind: EstimatorKind) -> Self {
        if kind.is_spade() {
            Self::SPADE
        } else {
            Self::DIRECT
        }
    }

    pub fn grid(&self, cfg: &ImagingConfig) -> Vec<f64> {
        let hi = self.extent * cfg.sigma() * cfg.photons_f64().powf(-self.exponent);
        linspace(0.0, hi, self.points)
    }
}

/// Settings shared by every photon number of a scaling study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPlan {
    pub sigma: f64,
    pub photons: Vec<u64>,
    pub kinds: Vec<EstimatorKind>,
    pub trials: u64,
    pub seed: u64,
    /// Overrides the per-kind point count of [`ScaledGrid`].
    pub theta_points: Option<usize>,
}

/// Worst-case risk against photon number, with a log-log fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub kind: EstimatorKind,
    pub photons: Vec<u64>,
    pub sup_theta: Vec<f64>,
    pub sup_mse: Vec<f64>,
    pub sup_std_err: Vec<f64>,
    /// Fitted `d ln sup-MSE / d ln L`.
    pub slope: f64,
    pub intercept: f64,
}

/// Ordinary least squares `y = intercept + slope · x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("line fit needs at least two paired points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("line fit needs distinct x values"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Runs a risk sweep per photon number and fits the log-log slope of the
/// worst-case risk for each estimator.
pub fn scaling_sweep(plan: &ScalingPlan) -> Result<Vec<ScalingResult>> {
    if plan.photons.len() < 3 {
        return Err(Error::invalid("scaling study needs at least 3 photon numbers"));
    }
    if plan.photons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("photon numbers must be strictly increasing"));
    }
    if plan.kinds.is_empty() {
        return Err(Error::invalid("no estimators selected"));
    }

    plan.kinds
        .iter()
        .map(|&kind| {
            let mut grid_rule = ScaledGrid::for_kind(kind);
            if let Some(points) = plan.theta_points {
                grid_rule.points = points;
            }
            let mut sups = Vec::with_capacity(plan.photons.len());
            for &photons in &plan.photons {
                let cfg = ImagingConfig::new(plan.sigma, photons)?;
                let sw = SweepConfig::new(
                    cfg,
                    grid_rule.grid(&cfg),
                    plan.trials,
                    derive_seed(plan.seed, &[photons]),
                    vec![kind],
                )?;
                let curve = mse_sweep(&sw)?.pop().expect("one curve per kind");
                sups.push(sup_mse(&curve)?);
            }
            if sups.iter().any(|s| !(s.mse > 0.0)) {
                return Err(Error::numerical(format!("{kind}: worst-case risk is zero")));
            }
            let lx: Vec<f64> = plan.photons.iter().map(|&l| (l as f64).ln()).collect();
            let ly: Vec<f64> = sups.iter().map(|s| s.mse.ln()).collect();
            let (slope, intercept) = fit_line(&lx, &ly)?;
            Ok(ScalingResult {
                kind,
                photons: plan.photons.clone(),
                sup_theta: sups.iter().map(|s| s.theta).collect(),
                sup_mse: sups.iter().map(|s| s.mse).collect(),
                sup_std_err: sups.iter().map(|s| s.std_err).collect(),
                slope,
                intercept,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::spade_exact_mse;

    fn cfg(sigma: f64, photons: u64) -> ImagingConfig {
        ImagingConfig::new(sigma, photons).unwrap()
    }

    fn sep(t: f64) -> Separation {
        Separation::new(t).unwrap()
    }

    #[test]
    fn spade_sample_at_zero() {
        let mut rng = substream(1, &[]);
        assert!((0..1000).all(|_| sample_spade(&cfg(1.0, 100), sep(0.0), &mut rng).0 == 0));
    }

    #[test]
    fn spade_sample_mean() {
        let c = cfg(1.0, 100);
        let mut rng = substream(5, &[]);
        let n = 100_000;
        let total: u64 = (0..n).map(|_| sample_spade(&c, sep(4.0), &mut rng).0).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 100.0).abs() < 1.0, "{mean}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = cfg(1.0, 16);
        let a = sample_direct(&c, sep(1.0), &mut substream(9, &[2, 3]));
        let b = sample_direct(&c, sep(1.0), &mut substream(9, &[2, 3]));
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        let y1 = sample_spade(&c, sep(3.0), &mut substream(9, &[4]));
        let y2 = sample_spade(&c, sep(3.0), &mut substream(9, &[4]));
        assert_eq!(y1, y2);
    }

    #[test]
    fn direct_sample_moments() {
        let draws = 100_000;
        for &(theta, photons) in &[(0.0, 4u64), (3.0, 4)] {
            let c = cfg(1.5, photons);
            let mut rng = substream(21, &[]);
            let xs: Vec<f64> = (0..draws)
                .flat_map(|_| sample_direct(&c, sep(theta), &mut rng).positions().to_vec())
                .collect();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let expected_var = 1.5f64.powi(2) + theta * theta / 4.0;
            assert!(mean.abs() < 3.0 * expected_var.sqrt() / n.sqrt());
            // var of the sample variance ≈ (μ4 − σ⁴)/n
            let m4 = {
                let s2: f64 = 2.25;
                let a = theta / 2.0;
                a.powi(4) + 6.0 * a * a * s2 + 3.0 * s2 * s2
            };
            let se = ((m4 - expected_var.powi(2)) / n).sqrt();
            assert!((var - expected_var).abs() < 3.0 * se, "{var} vs {expected_var}");
        }
    }

    #[test]
    fn sweep_at_zero_separation() {
        let c = cfg(1.0, 100);
        let sw = SweepConfig::new(
            c,
            vec![0.0],
            200,
            3,
            vec![EstimatorKind::SpadeMl, EstimatorKind::SpadeModifiedMl],
        )
        .unwrap();
        let curves = mse_sweep(&sw).unwrap();
        assert_eq!(curves[0].mse[0], 0.0);
        assert_eq!(curves[0].std_err[0], 0.0);
        assert!((curves[1].mse[0] - 0.04).abs() <= 1e-16);
        assert_eq!(curves[1].std_err[0], 0.0);
        assert!((curves[1].normalized(&c)[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_matches_exact_at_large_mean() {
        let c = cfg(1.0, 100);
        let sw = SweepConfig::new(c, vec![4.0], 5000, 17, vec![EstimatorKind::SpadeMl]).unwrap();
        let curve = &mse_sweep(&sw).unwrap()[0];
        let exact = spade_exact_mse(&c, sep(4.0), EstimatorKind::SpadeMl).unwrap();
        assert!((curve.mse[0] - exact).abs() <= 3.0 * curve.std_err[0]);
    }

    #[test]
    fn sweep_is_independent_of_worker_count() {
        let c = cfg(1.0, 20);
        let sw = SweepConfig::new(c, linspace(0.0, 3.0, 4), 64, 99, EstimatorKind::ALL.to_vec()).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mse_sweep(&sw).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn sweep_validation() {
        let c = cfg(1.0, 10);
        assert!(SweepConfig::new(c, vec![0.0], 0, 1, vec![EstimatorKind::SpadeMl]).is_err());
        assert!(SweepConfig::new(c, vec![], 10, 1, vec![EstimatorKind::SpadeMl]).is_err());
        assert!(SweepConfig::new(c, vec![1.0, 0.5], 10, 1, vec![EstimatorKind::SpadeMl]).is_err());
        assert!(SweepConfig::new(c, vec![0.0], 10, 1, vec![]).is_err());
        let d = SweepConfig::with_defaults(c, 1, vec![EstimatorKind::SpadeMl]).unwrap();
        assert_eq!(d.theta_grid.len(), 61);
        assert_eq!(*d.theta_grid.last().unwrap(), 6.0);
        assert_eq!(d.trials, 5000);
    }

    #[test]
    fn sup_tie_breaks_to_smaller_theta() {
        let curve = MseCurve {
            kind: EstimatorKind::SpadeMl,
            theta: vec![0.0, 1.0, 2.0],
            mse: vec![1.0, 1.0, 1.0],
            std_err: vec![0.1, 0.2, 0.3],
            bias: vec![0.0; 3],
            trials: 1,
        };
        let s = sup_mse(&curve).unwrap();
        assert_eq!(s.theta, 0.0);
        assert_eq!(s.std_err, 0.1);
        let empty = MseCurve { theta: vec![], mse: vec![], std_err: vec![], bias: vec![], ..curve };
        assert!(sup_mse(&empty).is_err());
    }

    #[test]
    fn prior_quantile_inverts_cdf() {
        let prior = crate::bounds::HermitePrior::new(1.0).unwrap().tabulate(10.0, 2001).unwrap();
        let sampler = PriorSampler::new(&prior);
        assert_eq!(sampler.quantile(0.0), 0.0);
        assert!(sampler.quantile(1.0) <= 10.0);
        // median of the chi distribution with 3 degrees of freedom
        assert!((sampler.quantile(0.5) - 1.5381722).abs() < 1e-3);
    }

    #[test]
    fn narrow_prior_matches_point_risk() {
        let c = cfg(1.0, 100);
        let prior = PriorDensity::from_fn(linspace(0.0, 2.0, 2001), |t| {
            (-0.5 * ((t - 1.0) / 0.005).powi(2)).exp()
        })
        .unwrap();
        let sw = SweepConfig::new(c, vec![1.0], 20000, 8, vec![EstimatorKind::SpadeMl]).unwrap();
        let risk = bayes_risk_mc(&sw, &prior).unwrap()[0];
        let exact = spade_exact_mse(&c, sep(1.0), EstimatorKind::SpadeMl).unwrap();
        assert!((risk.risk - exact).abs() < 3.0 * risk.std_err + 1e-3, "{} vs {exact}", risk.risk);
    }

    #[test]
    fn fit_line_recovers_slope() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (s, i) = fit_line(&x, &y).unwrap();
        assert!((s + 0.5).abs() < 1e-14 && (i - 2.0).abs() < 1e-14);
        assert!(fit_line(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn scaling_requires_three_increasing_photon_numbers() {
        let plan = ScalingPlan {
            sigma: 1.0,
            photons: vec![10, 20],
            kinds: vec![EstimatorKind::SpadeMl],
            trials: 10,
            seed: 1,
            theta_points: None,
        };
        assert!(scaling_sweep(&plan).is_err());
        let plan = ScalingPlan { photons: vec![10, 30, 20], ..plan };
        assert!(scaling_sweep(&plan).is_err());
    }

    #[test]
    fn scaled_grid_shrinks_with_photons() {
        let g1 = ScaledGrid::SPADE.grid(&cfg(1.0, 100));
        let g2 = ScaledGrid::SPADE.grid(&cfg(1.0, 400));
        assert!((g1.last().unwrap() / g2.last().unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(ScaledGrid::for_kind(EstimatorKind::DirectMl), ScaledGrid::DIRECT);
    }
}
