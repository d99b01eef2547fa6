//! Config loading, parallel sweeps and CSV output on top of `obf-core`.

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{parse_config, ConfigError, SystemParams};
pub use output::{emit_csv, OutputError};
pub use sweep::{run_sweep, SweepError, SweepRow};
