use thiserror::Error;

use crate::subspace::SubspaceLabel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two states or parameter sets live in different invariant blocks.
    #[error("block mismatch: {left} vs {right}")]
    LabelMismatch {
        left: SubspaceLabel,
        right: SubspaceLabel,
    },

    /// A series or iteration hit its cap before converging.
    #[error("{what} did not converge after {iterations} steps (last value {partial})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        partial: f64,
    },

    /// The primary and validation quadrature rules disagree.
    #[error("radial quadrature did not converge: moment {moment} deviates by {deviation:e}")]
    Quadrature { moment: usize, deviation: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
