//! Simulation and inference for skew Brownian motion observed on a uniform
//! time grid: exact path sampling, likelihood-based estimation of the
//! skewness parameter, its fourth-root-of-n limit distribution, and the
//! Monte Carlo studies built on top of them.

pub mod error;
pub mod habitat;
pub mod htest;
pub mod io;
pub mod ks;
pub mod likelihood;
pub mod limit;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod special;
pub mod stats;
pub mod studies;

pub use error::{Error, Result};
pub use ks::KsResult;
pub use likelihood::{mle, DerivativeStack, EstimateReport};
pub use quad::QuadResult;
pub use rng::RngStream;
pub use sim::{simulate_path, GridPath, SbmParams};
