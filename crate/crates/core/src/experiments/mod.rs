//! Configuration, initial data, experiment drivers and file formats.

pub mod commands;
pub mod config;
pub mod init;
pub mod io;
pub mod oracle;
pub mod run;

pub use config::{ExperimentConfig, InitSpec};
pub use init::make_initial_data;
pub use io::{read_checkpoint, read_series, write_checkpoint, write_series, TimeSeriesRecord};
pub use run::{fit_series, run_experiment, run_in_memory, RunOutcome, RunSummary};
