//! Experiment harness: space generators, function families, configs and reports.

pub mod config;
pub mod functions;
pub mod generators;
pub mod report;
pub mod runner;

pub use config::*;
pub use functions::*;
pub use generators::*;
pub use report::*;
pub use runner::*;
