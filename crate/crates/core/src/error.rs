use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("no remerging path of weight <= {d_max} found; raise the weight cap")]
    CapTooSmall { d_max: usize },

    #[error("brute-force decoding of {0} message bits refused (limit is {max})", max = crate::codec::BRUTE_FORCE_MAX_BITS)]
    TooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
