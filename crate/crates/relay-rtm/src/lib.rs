//! Monte Carlo sweeps, configuration files and the `relay-rtm` command line
//! on top of [`relay_rtm_core`].

pub mod cli;
pub mod config;
pub mod explain;
pub mod montecarlo;
pub mod output;

pub use config::{parse_config, ConfigError, RunConfig};
pub use montecarlo::{run_sweep, sample_channels, CurvePoint, SweepAxis, SweepError, SweepSpec};
pub use relay_rtm_core as core;
