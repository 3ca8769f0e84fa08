//! Minimax resolution limits for estimating the separation of two
//! incoherent point sources.
//!
//! The crate covers four layers:
//!
//! - [`model`]: the one-dimensional Gaussian imaging model and the Fisher
//!   information of direct imaging and spatial-mode demultiplexing (SPADE).
//! - [`bounds`]: Bayesian Cramér-Rao (Van Trees) lower bounds on the
//!   worst-case mean-square error, in closed form and through the
//!   ground state of the variational eigenproblem.
//! - [`estimators`]: the SPADE maximum-likelihood estimator, its modified
//!   variant, the direct-imaging maximum-likelihood estimator, and exact
//!   Poisson-sum risk evaluation.
//! - [`simulate`]: reproducible Monte Carlo risk curves, worst-case risk,
//!   Bayes risk and photon-number scaling fits.
//!
//! All lengths are in the same unit as the PSF width `sigma`; information
//! values are in inverse squared length units.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod model;
pub mod poisson;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ImagingConfig, Scheme, Separation};
