//! Sweep driver for the Gaussian memory-channel calculus in `gmem-core`:
//! TOML configs, parallel capacity sweeps, transition detection, and CSV or
//! JSON output.

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{ModelSection, SweepSpec};
pub use output::{Format, Report};
pub use sweep::{detect_transition, evaluate_point, run_sweep, SweepRow, Transition};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {0}: {1}")]
    Read(String, String),
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}
