//! Library side of the `volclust` command: configuration and the run
//! orchestrator, exposed so tests can drive a run without a subprocess.

pub mod config;
pub mod run;

pub use config::{parse_experiments, ConfigFile, Experiment, InputSpec, RunConfig};
pub use run::{run_analysis, RunOutcome};
