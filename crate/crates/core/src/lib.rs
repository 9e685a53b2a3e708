//! Rule-set advising policies for simulated human-AI decision teams.
//!
//! The pipeline, end to end:
//!
//! 1. [`data`] builds or loads a tabular dataset and binarizes it into
//!    threshold-predicate columns.
//! 2. [`human`] simulates a human partner: per-instance decisions,
//!    deterministic accept/reject behavior towards contradicting advice,
//!    and calibrated confidence.
//! 3. [`discretion`] learns (or perfectly knows) the probability that the
//!    human accepts a contradicting recommendation.
//! 4. [`rules`] mines candidate rules over the predicate columns.
//! 5. [`objective`] scores a rule set by discretion-weighted team decision
//!    loss plus reconciliation cost.
//! 6. [`learner`] searches the candidate space with simulated annealing
//!    and exposes the deployment advisor, plus baseline search modes.
//! 7. [`eval`] simulates deployed teams, runs seeded sweeps, and emits
//!    plot-ready CSV records.

pub mod bitset;
pub mod data;
pub mod discretion;
pub mod eval;
pub mod human;
pub mod learner;
pub mod objective;
pub mod rules;

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("invalid data: {0}")]
    Data(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("csv parse error at row {row}, column {column}: {message}")]
    CsvCell {
        row: usize,
        column: String,
        message: String,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("mining produced zero candidates; lower min_support_fraction")]
    NoCandidates,
    #[error("row {0} matched by no behavior region")]
    UncoveredRow(usize),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
