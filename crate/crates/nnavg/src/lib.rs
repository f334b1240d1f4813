//! Files, experiment driver and command line for `nnavg-core`.
//!
//! A run loads a long-format panel CSV (or generates a synthetic one),
//! forecasts every series one step ahead at every time with all requested
//! methods, cross-validates the neighbourhood size on the training period,
//! scores the test period and writes JSON and CSV reports.

pub mod config;
pub mod csv_io;
pub mod error;
pub mod experiment;
pub mod report;

pub use config::ExperimentConfig;
pub use error::IoError;
