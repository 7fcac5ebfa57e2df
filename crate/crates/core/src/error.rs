use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty system")]
    EmptySystem,

    #[error("invalid system size n = {n}: {reason}")]
    InvalidSize { n: usize, reason: &'static str },

    #[error("departure leaves empty system or is undefined (n = {n})")]
    DepartureUndefined { n: usize },

    #[error("invalid probability {name} = {value}: {reason}")]
    InvalidProbability {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("non-unique fixed point: the map has a line of fixed points at p = 0")]
    NonUniqueFixedPoint,

    #[error("agent index {index} out of range for system of size {n}")]
    InvalidIndex { index: usize, n: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("non-finite moment at t = {t}")]
    NonFinite { t: u64 },

    #[error("misaligned series: {0}")]
    Misaligned(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidProbability {
            name,
            value,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}

pub(crate) fn check_positive_probability(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0 && value <= 1.0) {
        return Err(Error::InvalidProbability {
            name,
            value,
            reason: "must lie in (0, 1]",
        });
    }
    Ok(())
}

pub(crate) fn check_sigma2(value: f64) -> Result<()> {
    if !(value.is_finite() && value >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma2",
            value,
            reason: "must be finite and non-negative",
        });
    }
    Ok(())
}
