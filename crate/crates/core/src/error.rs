use alloc::string::String;

/// Errors raised by the numerical core.
///
/// `Domain` covers physics preconditions (an unconfined sector has no
/// discrete spectrum, a non-positive velocity has no oscillator frequency).
/// `Argument` covers malformed numerical requests.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("grid too narrow: need |y| up to {required} oscillator lengths, grid reaches {actual}")]
    GridTooNarrow { required: f64, actual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// True for physics-domain violations, as opposed to malformed arguments.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_))
    }
}
