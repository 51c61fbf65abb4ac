//! Command-line driver for `lupi-svm`: training, prediction, evaluation,
//! grid tuning, synthetic data generation and timing benchmarks.

pub mod args;
pub mod bench;
pub mod commands;
pub mod error;
pub mod model_file;
pub mod timing;
pub mod tune;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, CliResult};
