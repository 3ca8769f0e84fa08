//! Bayesian Cramér-Rao lower bounds on the worst-case mean-square error.
//!
//! For any prior `p` vanishing at the ends of its domain,
//! `sup_θ MSE(θ) ≥ ∫ p MSE ≥ 1 / K[p]` with `K[p] = ∫ p J + j[p]` and
//! `j[p] = ∫ p (d ln p / dθ)²`. Writing `p = q²` turns `K` into the energy
//! `∫ q² J + 4 (q')²` of a wavefunction in the potential `J`, so the best
//! prior is the ground state of `-4 q'' + J q = λ q`.
//!
//! All prior integrals use the trapezoid rule on a uniform grid. Because
//! priors vanish at both endpoints, the discrete `K[p]` equals the Rayleigh
//! quotient of the same three-point operator used by [`ground_state`], so the
//! discrete ground state is the exact minimizer over priors on that grid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_increasing, FisherModel, ImagingConfig, InformationProfile, Scheme};
use crate::tridiag::SymTridiagonal;

/// Minimum number of grid points for derivative-based prior functionals.
pub const MIN_PRIOR_POINTS: usize = 16;

/// Minimum grid size accepted by [`ground_state`].
pub const MIN_EIGEN_POINTS: usize = 64;

/// Default eigenproblem domain, in units of σ.
pub const DEFAULT_DOMAIN_SIGMAS: f64 = 10.0;

/// Default eigenproblem grid size.
pub const DEFAULT_GRID_POINTS: usize = 8192;

const NORMALIZATION_TOL: f64 = 1e-8;
const UNIFORM_TOL: f64 = 1e-9;

/// A prior density sampled on a grid, zero at both endpoints and normalized
/// under the trapezoid rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorDensity {
    grid: Vec<f64>,
    density: Vec<f64>,
}

impl PriorDensity {
    /// Validates an already normalized density.
    pub fn new(grid: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        Self::check_shape(&grid, &density)?;
        let mass = trapezoid(&grid, &density);
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid(format!("prior integrates to {mass}, not 1")));
        }
        Ok(Self { grid, density })
    }

    /// Rescales `density` to unit mass. Endpoints must already be zero.
    pub fn normalized(grid: Vec<f64>, mut density: Vec<f64>) -> Result<Self> {
        Self::check_shape(&grid, &density)?;
        let mass = trapezoid(&grid, &density);
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid("prior has no mass"));
        }
        density.iter_mut().for_each(|d| *d /= mass);
        Self::new(grid, density)
    }

    /// Builds `p = q²` from an amplitude, forcing the endpoints to zero.
    pub fn from_amplitude(grid: Vec<f64>, amplitude: &[f64]) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::invalid("amplitude and grid differ in length"));
        }
        let mut density: Vec<f64> = amplitude.iter().map(|q| q * q).collect();
        pin_endpoints(&mut density);
        Self::normalized(grid, density)
    }

    /// Tabulates `f` on `grid`, zeroes the endpoints and normalizes.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Vec<f64>, f: F) -> Result<Self> {
        let mut density: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
        pin_endpoints(&mut density);
        Self::normalized(grid, density)
    }

    fn check_shape(grid: &[f64], density: &[f64]) -> Result<()> {
        if grid.len() < 3 {
            return Err(Error::invalid("prior grid needs at least 3 points"));
        }
        if grid.len() != density.len() {
            return Err(Error::invalid("grid and density differ in length"));
        }
        check_increasing(grid)?;
        if grid[0] < 0.0 {
            return Err(Error::invalid("prior grid must lie in θ ≥ 0"));
        }
        if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("prior density must be finite and nonnegative"));
        }
        if density[0] != 0.0 || density[density.len() - 1] != 0.0 {
            return Err(Error::invalid("prior density must vanish at both endpoints"));
        }
        Ok(())
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// `q = √p`.
    pub fn amplitude(&self) -> Vec<f64> {
        self.density.iter().map(|p| p.sqrt()).collect()
    }

    /// Grid step, or an error when the grid is not uniform.
    pub fn uniform_step(&self) -> Result<f64> {
        uniform_step(&self.grid)
    }

    /// Cumulative distribution at the grid points (trapezoid rule).
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.grid.len());
        out.push(0.0);
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.grid[i] - self.grid[i - 1]) * (self.density[i] + self.density[i - 1]);
            out.push(acc);
        }
        out
    }
}

fn pin_endpoints(density: &mut [f64]) {
    if let Some(first) = density.first_mut() {
        *first = 0.0;
    }
    if let Some(last) = density.last_mut() {
        *last = 0.0;
    }
}

pub(crate) fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1]))
        .sum()
}

fn uniform_step(grid: &[f64]) -> Result<f64> {
    let n = grid.len();
    if n < 2 {
        return Err(Error::invalid("grid needs at least 2 points"));
    }
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let tol = UNIFORM_TOL * grid[n - 1].abs().max(grid[0].abs()).max(h);
    let uniform = grid
        .iter()
        .enumerate()
        .all(|(i, &t)| (t - (grid[0] + h * i as f64)).abs() <= tol);
    if !uniform {
        return Err(Error::invalid("grid spacing must be uniform"));
    }
    Ok(h)
}

/// `n` equally spaced points on `[0, a]`.
pub fn uniform_grid(a: f64, n: usize) -> Vec<f64> {
    let h = a / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { a } else { h * i as f64 }).collect()
}

/// Lowest-order odd Hermite-Gaussian prior
/// `p(θ) = √(2/π) θ² / w³ · exp(-θ² / 2w²)` on `θ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitePrior {
    w: f64,
}

impl HermitePrior {
    pub fn new(w: f64) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::invalid(format!("Hermite prior width must be positive, got {w}")));
        }
        Ok(Self { w })
    }

    /// The width minimizing the Bayesian information under the quadratic
    /// Fisher bound.
    pub fn optimal(cfg: &ImagingConfig) -> Self {
        Self { w: optimal_w(cfg) }
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn density(&self, theta: f64) -> f64 {
        hermite_prior_density(self, theta)
    }

    /// Samples on `[0, a]` with `n` points; the tail beyond `a` is dropped
    /// and the remainder renormalized.
    pub fn tabulate(&self, a: f64, n: usize) -> Result<PriorDensity> {
        if !(a > 0.0) || n < 3 {
            return Err(Error::invalid("need a > 0 and at least 3 points"));
        }
        PriorDensity::from_fn(uniform_grid(a, n), |t| self.density(t))
    }

    /// `j[p] = 3 / w²`.
    pub fn prior_information_exact(&self) -> f64 {
        3.0 / (self.w * self.w)
    }
}

pub fn hermite_prior_density(hp: &HermitePrior, theta: f64) -> f64 {
    let w = hp.w;
    let r = theta / w;
    (2.0 / std::f64::consts::PI).sqrt() * r * r / w * (-0.5 * r * r).exp()
}

/// `w = σ (8/L)^{1/4}`, i.e. `w² = σ² √(8/L)`.
pub fn optimal_w(cfg: &ImagingConfig) -> f64 {
    cfg.sigma() * (8.0 / cfg.photons_f64()).powf(0.25)
}

/// Prior information `j[p] = ∫ p (d ln p/dθ)² dθ = ∫ 4 (dq/dθ)² dθ`, with
/// `q = √p` differenced cell by cell.
pub fn prior_information(p: &PriorDensity) -> Result<f64> {
    if p.grid.len() < MIN_PRIOR_POINTS {
        return Err(Error::invalid(format!(
            "prior grid too coarse: {} points, need at least {MIN_PRIOR_POINTS}",
            p.grid.len()
        )));
    }
    let h = p.uniform_step()?;
    let q = p.amplitude();
    Ok(kinetic_energy(&q, h))
}

fn kinetic_energy(q: &[f64], h: f64) -> f64 {
    4.0 * q.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h
}

/// Bayesian (Van Trees) information `K[p] = ∫ p J dθ + j[p]`.
pub fn bayesian_information<J: InformationProfile + ?Sized>(p: &PriorDensity, j: &J) -> Result<f64> {
    let info = j.information_on(&p.grid)?;
    if info.len() != p.grid.len() {
        return Err(Error::invalid("information profile does not match the prior grid"));
    }
    if info.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::invalid("Fisher information must be finite and nonnegative"));
    }
    let weighted: Vec<f64> = p.density.iter().zip(&info).map(|(a, b)| a * b).collect();
    Ok(trapezoid(&p.grid, &weighted) + prior_information(p)?)
}

/// `4σ²/L`: the SPADE minimax bound, also the quantum limit for any
/// image-plane measurement.
pub fn spade_minimax_bound(cfg: &ImagingConfig) -> f64 {
    4.0 * cfg.sigma() * cfg.sigma() / cfg.photons_f64()
}

/// `√2 σ² / (3 √L)`: the direct-imaging minimax bound from the Hermite prior
/// and the quadratic Fisher bound.
pub fn direct_minimax_bound_closed(cfg: &ImagingConfig) -> f64 {
    std::f64::consts::SQRT_2 * cfg.sigma() * cfg.sigma() / (3.0 * cfg.photons_f64().sqrt())
}

/// Ground state of `-4 q'' + J q = λ q` on `[0, a]` with `q(0) = q(a) = 0`.
#[derive(Debug, Clone)]
pub struct GroundState {
    /// Minimized Bayesian information.
    pub lambda: f64,
    pub grid: Vec<f64>,
    /// Nonnegative amplitude with `∫ q² dθ = 1`, zero at both ends.
    pub amplitude: Vec<f64>,
}

impl GroundState {
    /// The optimal prior `p = q²`.
    pub fn prior(&self) -> Result<PriorDensity> {
        PriorDensity::from_amplitude(self.grid.clone(), &self.amplitude)
    }

    /// The tightest Bayesian bound `1/λ` on this domain.
    pub fn bound(&self) -> f64 {
        1.0 / self.lambda
    }
}

/// Solves the variational eigenproblem on `n` uniform points spanning
/// `[0, a]` with a three-point Laplacian.
pub fn ground_state<J: InformationProfile + ?Sized>(j: &J, a: f64, n: usize) -> Result<GroundState> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::invalid(format!("domain length must be positive, got {a}")));
    }
    if n < MIN_EIGEN_POINTS {
        return Err(Error::invalid(format!(
            "eigenproblem grid needs at least {MIN_EIGEN_POINTS} points, got {n}"
        )));
    }
    let grid = uniform_grid(a, n);
    let h = a / (n - 1) as f64;
    let info = j.information_on(&grid)?;
    if info.len() != n {
        return Err(Error::invalid("information profile does not match the grid"));
    }
    if let Some(bad) = info.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::invalid(format!(
            "Fisher information must be finite and nonnegative, got {bad}"
        )));
    }

    let kinetic = 4.0 / (h * h);
    let diag: Vec<f64> = info[1..n - 1].iter().map(|v| 2.0 * kinetic + v).collect();
    let off = vec![-kinetic; n - 3];
    let matrix = SymTridiagonal::new(diag, off)?;
    let lambda = matrix.smallest_eigenvalue()?;
    let interior = matrix.lowest_eigenvector(lambda)?;

    let mut amplitude = Vec::with_capacity(n);
    amplitude.push(0.0);
    amplitude.extend(interior.iter().map(|v| v.max(0.0)));
    amplitude.push(0.0);
    let norm = (h * amplitude.iter().map(|q| q * q).sum::<f64>()).sqrt();
    amplitude.iter_mut().for_each(|q| *q /= norm);

    Ok(GroundState { lambda, grid, amplitude })
}

/// Method labels used in [`BoundReport::k_values`].
pub const LABEL_CLOSED_SPADE: &str = "closed_spade";
pub const LABEL_CLOSED_DIRECT: &str = "closed_direct";
pub const LABEL_EIGENSOLVER_DIRECT: &str = "eigensolver_direct";

/// Minimax lower bounds for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub config: ImagingConfig,
    /// Eigenproblem domain `[0, domain]`.
    pub domain: f64,
    pub grid_n: usize,
    pub spade_bound: f64,
    pub direct_closed_bound: f64,
    pub direct_numeric_bound: f64,
    pub k_values: BTreeMap<String, f64>,
}

/// Closed-form bounds plus the eigensolver bound with the exact
/// direct-imaging information.
pub fn bound_report(cfg: &ImagingConfig, a: f64, n: usize) -> Result<BoundReport> {
    let spade_k = cfg.shot_noise_information();
    let direct_k = 3.0 * cfg.photons_f64().sqrt() / (std::f64::consts::SQRT_2 * cfg.sigma().powi(2));
    let ground = ground_state(&FisherModel { cfg: *cfg, scheme: Scheme::Direct }, a, n)?;

    let mut k_values = BTreeMap::new();
    k_values.insert(LABEL_CLOSED_SPADE.to_string(), spade_k);
    k_values.insert(LABEL_CLOSED_DIRECT.to_string(), direct_k);
    k_values.insert(LABEL_EIGENSOLVER_DIRECT.to_string(), ground.lambda);

    Ok(BoundReport {
        config: *cfg,
        domain: a,
        grid_n: n,
        spade_bound: spade_minimax_bound(cfg),
        direct_closed_bound: direct_minimax_bound_closed(cfg),
        direct_numeric_bound: ground.bound(),
        k_values,
    })
}
