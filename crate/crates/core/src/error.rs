use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A quantity lies outside the domain where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The photon truncation was too small for the evolved state.
    #[error(
        "photon cutoff {cutoff} too small: {weight:e} squared amplitude on the truncation boundary"
    )]
    Cutoff { cutoff: usize, weight: f64 },

    /// Couplings, decay rate, or experiment configuration are invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// A state or operator argument violates a precondition.
    #[error("input error: {0}")]
    Input(String),

    /// Evolution produced non-finite amplitudes.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Attaches the sweep grid point to a numerical failure.
    pub fn at_point(self, point: impl std::fmt::Display) -> Self {
        match self {
            Error::Numerical(msg) => Error::Numerical(format!("{msg} (at {point})")),
            Error::Cutoff { .. } | Error::Domain(_) => {
                Error::Numerical(format!("{self} (at {point})"))
            }
            other => other,
        }
    }

    /// True for failures that arise while evaluating the physics rather than
    /// while reading the configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::Cutoff { .. } | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
