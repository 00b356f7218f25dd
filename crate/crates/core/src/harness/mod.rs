//! Monte Carlo evaluation over Rayleigh fading, run configuration and report
//! output.

pub mod config;
pub mod fading;
pub mod report;
pub mod sweep;

pub use config::{ConfigOverlay, RunConfig};
pub use fading::{draw_gains, FadingConfig};
pub use report::{emit_report, ReportFormat, RunManifest};
pub use sweep::{run_sweep, simulate_point, ScenarioResult, Sweep, SweepVar, TrialRecord};
