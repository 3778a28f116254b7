use thiserror::Error;

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerics,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("failed to parse scenario: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("{what} did not converge (residual {residual:.3e})")]
    NonConvergent { what: String, residual: f64 },

    #[error("phonon correlation tail not settled at tau_max (residual {residual:.3e})")]
    TailNotConverged { residual: f64 },

    #[error("waveguide spectral density has no non-negative branch (worst value {worst:.3e} of peak)")]
    Branch { worst: f64 },

    #[error("steady state is singular: Gamma_pol^2 + Delta^2 - gamma_cd^2 = {denominator:.3e}")]
    Singular { denominator: f64 },

    #[error("rate `{name}` is negative ({value:.3e} ueV)")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("Bloch oracle failed: {reason} (residual {residual:.3e})")]
    Oracle { reason: String, residual: f64 },

    #[error("at delta_xL = {delta_xl} meV: {source}")]
    AtDetuning {
        delta_xl: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("at T = {temperature} K: {source}")]
    AtTemperature {
        temperature: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.into(), reason: reason.into() }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_)
            | Error::InvalidParameter { .. }
            | Error::Config(_)
            | Error::Parse(_)
            | Error::Branch { .. } => ErrorKind::Config,
            Error::NonConvergent { .. }
            | Error::TailNotConverged { .. }
            | Error::Singular { .. }
            | Error::NegativeRate { .. }
            | Error::Oracle { .. } => ErrorKind::Numerics,
            Error::AtDetuning { source, .. } | Error::AtTemperature { source, .. } => source.kind(),
            Error::Io(_) => ErrorKind::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
