use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown wavelet `{0}` (expected haar or db2..db20)")]
    UnknownWavelet(String),

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("invalid number of levels: {0}")]
    InvalidLevels(String),

    #[error("empty input signal")]
    EmptyInput,

    #[error("coefficient pyramid shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("exponent s = {0} is outside (0, 1]")]
    InvalidExponent(f64),

    #[error("invalid interval or scale: {0}")]
    InvalidInterval(String),

    #[error("density support [{lo}, {hi}] exceeds the sampling domain [0, {limit}]")]
    DomainOverflow { lo: f64, hi: f64, limit: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("density does not integrate to one (mass = {0})")]
    NotNormalized(f64),

    #[error("marginals are not balanced: source mass {source_mass}, target mass {target_mass}")]
    UnbalancedMarginals { source_mass: f64, target_mass: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid distance configuration: {0}")]
    InvalidConfig(String),

    #[error("embeddings were computed with different configurations ({left} vs {right})")]
    ConfigMismatch { left: String, right: String },

    #[error("cannot fit a normalization constant: every wavelet value is zero")]
    DegenerateFit,

    #[error("pair ({i}, {j}): {source}")]
    Pair {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("row (param = {param}, s = {s}): {source}")]
    Row {
        param: f64,
        s: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_exponent(s: f64) -> Result<()> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(s))
    }
}
