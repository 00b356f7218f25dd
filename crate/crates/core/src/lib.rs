//! Achievable rates and transmit-design optimization for a two-path alternate
//! relaying network in which each relay may send an improper Gaussian signal.
//!
//! - [`model`]: per-hop, per-path and end-to-end rates.
//! - [`rootfind`]: real roots of low-degree polynomials and stationary points.
//! - [`popt`]: optimal relay power for a fixed circularity coefficient.
//! - [`copt`]: optimal circularity coefficient for a fixed relay power.
//! - [`joint`]: coordinate descent, exhaustive grid search and baselines.
//! - `harness` (feature `harness`): Monte Carlo sweeps and reports.

pub mod copt;
pub mod error;
pub mod joint;
pub mod model;
pub mod popt;
pub mod rootfind;

#[cfg(feature = "harness")]
pub mod harness;

pub use error::{Error, Result};
pub use joint::{coordinate_descent, grid_search, CdConfig, OptimizerResult, Strategy, StrategySettings};
pub use model::{total_rate, ChannelGains, Path, RateBreakdown, SignalDesign, SystemParams};
