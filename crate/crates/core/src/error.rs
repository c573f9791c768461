use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A bounded search ran out of budget; the message reports how far it got.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// The gluing construction could not accommodate the requested delta.
    /// `max_delta` is the largest value for which the internal inequalities held.
    #[error("delta {delta} too large for the gluing construction; largest workable delta is about {max_delta}")]
    DeltaTooLarge { delta: f64, max_delta: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
