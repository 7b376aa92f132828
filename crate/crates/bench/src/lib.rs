//! Experiment harness for the `freud` operators: configuration, convergence sweeps,
//! rate verdicts, grid export and a recurrence-table cache.

pub mod cache;
pub mod config;
pub mod experiment;
pub mod export;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] freud::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;
