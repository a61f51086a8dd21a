use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("gamma pole in numerator at l = {l} (argument {arg})")]
    NumeratorPole { l: usize, arg: f64 },
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },
    #[error("series evaluation failed: {0}")]
    Series(String),
    #[error("sign calibration failed: {0}")]
    Calibration(String),
    #[error("argument outside validated radius: |t| = {t} > {limit}")]
    OutsideRadius { t: f64, limit: f64 },
    #[error("line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
