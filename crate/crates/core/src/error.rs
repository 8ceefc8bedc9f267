use thiserror::Error;

use crate::grid::Space;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("configuration error: {0}")]
    Configuration(String),

    /// The sampled function does not vanish at the grid edges.
    #[error(
        "grid truncation: edge magnitude {edge:.3e} exceeds {tolerance:.1e} relative to peak {peak:.3e}"
    )]
    GridTruncation {
        edge: f64,
        peak: f64,
        tolerance: f64,
    },

    /// No closed form exists for this system in the requested space; obtain it
    /// by transforming the position-space closed form instead.
    #[error("no closed form for {system} in {space:?} space; use the transform route")]
    NotClosedForm { system: &'static str, space: Space },

    /// The parameter combination lies outside the closed-form cases.
    #[error("no closed form: {0}")]
    NoClosedForm(String),

    #[error("not provided in closed form: {0}")]
    NotProvided(String),

    #[error("no saturation law for {0}")]
    NoSaturationLaw(&'static str),

    #[error("basis truncation: tail mass {tail:.3e} exceeds {tolerance:.1e}; try n_max >= {suggested_n_max}")]
    Truncation {
        tail: f64,
        tolerance: f64,
        suggested_n_max: usize,
    },

    #[error("insufficient stencil: index {n0} needs neighbours in a spectrum of length {len}")]
    InsufficientStencil { n0: usize, len: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
