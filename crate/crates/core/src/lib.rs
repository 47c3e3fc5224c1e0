//! Mean-reverting stochastic volatility models and the statistics used to
//! discriminate between them on daily price data.
//!
//! The library covers the full pipeline: price ingestion and detrended
//! log returns ([`series`]), the two variance SDEs with their stationary
//! laws and simulators ([`models`]), closed-form return densities in
//! product and joint-probability form ([`dist`]), maximum-likelihood
//! fitting with KS and likelihood-ratio comparison ([`inference`]), and
//! moment-ratio relaxation analysis ([`moments`]).

pub mod dist;
pub mod inference;
pub mod models;
pub mod moments;
mod optim;
pub mod quad;
pub mod series;

pub use dist::{DistKind, DistributionSpec};
pub use inference::FitResult;
pub use models::{Family, ModelParams, VariancePath};
pub use series::{PriceSeries, ReturnSample};
