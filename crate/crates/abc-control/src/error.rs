//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The special-function engine could not certify the requested
    /// absolute tolerance; both candidate values are carried so the
    /// caller can inspect the disagreement.
    #[error("accuracy failure at z = {z}: series candidate {series:e}, asymptotic candidate {asymptotic:e}")]
    Accuracy { z: f64, series: f64, asymptotic: f64 },

    /// Malformed or mismatched time grid.
    #[error("grid error: {0}")]
    Grid(String),

    /// Inconsistent problem setup (mismatched bases, bad config keys).
    #[error("configuration error: {0}")]
    Config(String),

    /// A stated precondition does not hold (e.g. a test function that
    /// must vanish at the final time).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Non-finite values produced where finite ones are required.
    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
