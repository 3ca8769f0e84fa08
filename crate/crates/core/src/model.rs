//! Imaging model: configuration, image-plane intensity and Fisher information.
//!
//! Two equal-brightness incoherent sources sit at `±θ/2` around a known
//! centroid at the origin. Each photon lands at a position drawn from the
//! Gaussian PSF (intensity standard deviation `σ`) centered on one of the two
//! sources. Internally every length is expressed in units of `σ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Relative tolerance of the direct-imaging Fisher integral.
pub const FISHER_REL_TOL: f64 = 1e-8;

/// Normalized separation beyond which the overlap term, of order
/// `exp(−t²/8)`, underflows and the direct information equals `L / (4σ²)`.
const RESOLVED_SEPARATION: f64 = 80.0;

/// Half-width of the Fisher integration window beyond the sources, in σ.
const FISHER_TAIL: f64 = 10.0;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// PSF width and detected photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImagingConfig {
    sigma: f64,
    photons: u64,
}

impl ImagingConfig {
    pub fn new(sigma: f64, photons: u64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        let s2 = sigma * sigma;
        if !(s2.is_normal() && s2.recip().is_normal()) {
            return Err(Error::invalid(format!("sigma {sigma:e} is outside the representable range")));
        }
        if photons == 0 {
            return Err(Error::invalid("photon number must be at least 1"));
        }
        Ok(Self { sigma, photons })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn photons(&self) -> u64 {
        self.photons
    }

    /// `L` as a float.
    pub fn photons_f64(&self) -> f64 {
        self.photons as f64
    }

    /// The shot-noise information level `L / (4σ²)`.
    pub fn shot_noise_information(&self) -> f64 {
        self.photons_f64() / (4.0 * self.sigma * self.sigma)
    }

    /// Same PSF width, different photon number.
    pub fn with_photons(&self, photons: u64) -> Result<Self> {
        Self::new(self.sigma, photons)
    }
}

/// A nonnegative source separation `θ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Separation(f64);

impl Separation {
    pub const ZERO: Separation = Separation(0.0);

    pub fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::invalid(format!(
                "separation must be finite and nonnegative, got {theta}"
            )));
        }
        Ok(Self(theta))
    }

    /// Caller guarantees `theta` is finite and nonnegative.
    pub(crate) fn new_unchecked(theta: f64) -> Self {
        debug_assert!(theta.is_finite() && theta >= 0.0);
        Self(theta)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Measurement scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    Direct,
    Spade,
}

fn std_normal(u: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * u * u).exp()
}

/// Image-plane intensity `f(x|θ) = ½ g(x − θ/2) + ½ g(x + θ/2)`, with `g` the
/// normal density of standard deviation σ.
pub fn intensity_profile(cfg: &ImagingConfig, theta: Separation, x: f64) -> f64 {
    let s = cfg.sigma;
    let u = x / s;
    let h = 0.5 * theta.0 / s;
    0.5 * (std_normal(u - h) + std_normal(u + h)) / s
}

/// Quantum-limited SPADE information `L / (4σ²)`, independent of θ.
pub fn fisher_spade(cfg: &ImagingConfig) -> f64 {
    cfg.shot_noise_information()
}

/// Fisher information of one photon for direct imaging at normalized
/// separation `t = θ/σ`, with σ = 1.
fn direct_information_per_photon(t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    if t >= RESOLVED_SEPARATION {
        return Ok(0.25);
    }
    let h = 0.5 * t;
    // ∂f/∂t = ½ f (u tanh(uh) − h), which avoids the cancellation in the
    // difference of the two shifted Gaussian terms at small t.
    let integrand = |u: f64| {
        let f = 0.5 * (std_normal(u - h) + std_normal(u + h));
        let r = u * (u * h).tanh() - h;
        0.25 * f * r * r
    };
    let half = h + FISHER_TAIL;
    quadrature::integrate(integrand, -half, half, FISHER_REL_TOL)
}

/// Direct-imaging Fisher information `L ∫ (∂f/∂θ)² / f dx`.
///
/// Exactly zero at θ = 0, approaching `L / (4σ²)` for θ ≫ σ.
pub fn fisher_direct(cfg: &ImagingConfig, theta: Separation) -> Result<f64> {
    let per_photon = direct_information_per_photon(theta.0 / cfg.sigma)?;
    Ok(cfg.photons_f64() * per_photon / (cfg.sigma * cfg.sigma))
}

/// Quadratic upper bound `Lθ² / (8σ⁴)` on the direct-imaging information,
/// tight near θ = 0.
pub fn fisher_direct_quadratic_bound(cfg: &ImagingConfig, theta: Separation) -> f64 {
    let s2 = cfg.sigma * cfg.sigma;
    cfg.photons_f64() * theta.0 * theta.0 / (8.0 * s2 * s2)
}

/// Fisher information for either scheme.
pub fn fisher(cfg: &ImagingConfig, theta: Separation, scheme: Scheme) -> Result<f64> {
    match scheme {
        Scheme::Spade => Ok(fisher_spade(cfg)),
        Scheme::Direct => fisher_direct(cfg, theta),
    }
}

/// Cramér-Rao bound value; zero information yields [`CrbValue::Unbounded`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrbValue {
    Finite(f64),
    Unbounded,
}

impl CrbValue {
    pub fn as_f64(self) -> f64 {
        match self {
            CrbValue::Finite(v) => v,
            CrbValue::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, CrbValue::Unbounded)
    }
}

/// `1 / J(θ)`, valid only for unbiased estimators.
pub fn crb(cfg: &ImagingConfig, theta: Separation, scheme: Scheme) -> Result<CrbValue> {
    let j = fisher(cfg, theta, scheme)?;
    if j > 0.0 {
        Ok(CrbValue::Finite(1.0 / j))
    } else {
        Ok(CrbValue::Unbounded)
    }
}

/// Fisher information sampled on a separation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherCurve {
    scheme: Scheme,
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl FisherCurve {
    pub fn new(scheme: Scheme, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::invalid("grid and values differ in length"));
        }
        if grid.is_empty() {
            return Err(Error::invalid("Fisher curve needs at least one point"));
        }
        check_increasing(&grid)?;
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("Fisher information must be finite and nonnegative"));
        }
        Ok(Self { scheme, grid, values })
    }

    /// Evaluates the scheme's information on `grid`.
    pub fn tabulate(cfg: &ImagingConfig, scheme: Scheme, grid: &[f64]) -> Result<Self> {
        let values = grid
            .iter()
            .map(|&t| fisher(cfg, Separation::new(t)?, scheme))
            .collect::<Result<Vec<_>>>()?;
        Self::new(scheme, grid.to_vec(), values)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub(crate) fn check_increasing(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("grid values must be finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid must be strictly increasing"));
    }
    Ok(())
}

/// Anything that can supply Fisher information values on a separation grid.
pub trait InformationProfile {
    fn information_on(&self, grid: &[f64]) -> Result<Vec<f64>>;
}

impl<F> InformationProfile for F
where
    F: Fn(f64) -> f64,
{
    fn information_on(&self, grid: &[f64]) -> Result<Vec<f64>> {
        Ok(grid.iter().map(|&t| self(t)).collect())
    }
}

impl InformationProfile for FisherCurve {
    fn information_on(&self, grid: &[f64]) -> Result<Vec<f64>> {
        let same = self.grid.len() == grid.len()
            && self
                .grid
                .iter()
                .zip(grid)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0));
        if !same {
            return Err(Error::invalid(
                "Fisher curve grid does not match the requested domain",
            ));
        }
        Ok(self.values.clone())
    }
}

/// The exact information of a measurement scheme.
#[derive(Debug, Clone, Copy)]
pub struct FisherModel {
    pub cfg: ImagingConfig,
    pub scheme: Scheme,
}

impl InformationProfile for FisherModel {
    fn information_on(&self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.iter()
            .map(|&t| fisher(&self.cfg, Separation::new(t)?, self.scheme))
            .collect()
    }
}

/// The quadratic bound `Lθ² / (8σ⁴)` as an information profile.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticFisherBound(pub ImagingConfig);

impl InformationProfile for QuadraticFisherBound {
    fn information_on(&self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.iter()
            .map(|&t| Ok(fisher_direct_quadratic_bound(&self.0, Separation::new(t)?)))
            .collect()
    }
}

/// Normal density helper shared with the estimators.
pub(crate) fn log_normal_density(u: f64) -> f64 {
    -0.5 * u * u - 0.5 * (2.0 * PI).ln()
}
