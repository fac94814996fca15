//! File formats, synthetic data, the multi-model runner and reporting for
//! `barforest-core`, plus the `barforest` command line.

pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod runner;
pub mod synth;

pub use config::RunConfig;
pub use error::{Error, Result};
