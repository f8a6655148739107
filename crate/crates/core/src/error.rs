use thiserror::Error;

/// Errors raised by the estimators, mechanisms and experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("insufficient samples: {bound} requires at least {needed}, got {got}")]
    InsufficientSamples { bound: &'static str, needed: usize, got: usize },

    #[error("{0} is not supported for budget flavor {1}")]
    UnsupportedFlavor(&'static str, &'static str),

    #[error("budget flavors cannot be combined: {0} and {1}")]
    FlavorMismatch(&'static str, &'static str),

    #[error("moment of order {k} diverges for tail exponent {shape}")]
    DivergentMoment { k: f64, shape: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate direction: the two points coincide")]
    DegenerateDirection,

    #[error("candidate grid has {size} points, above the cap of {cap}; use a smaller dimension")]
    GridTooLarge { size: f64, cap: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("sample-size search failed: no n up to {cap} reached success rate {target}")]
    SearchFailed { cap: usize, target: f64 },

    #[error("exponent fit failed: {0}")]
    Fit(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for errors caused by the caller's configuration or parameters
    /// rather than by the environment.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be finite and positive, got {value}")))
    }
}

pub(crate) fn ensure_open_unit(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must lie in (0, 1), got {value}")))
    }
}
