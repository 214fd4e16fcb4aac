use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("distribution has no atoms")]
    Empty,
    #[error("negative probability {0}")]
    NegativeProbability(String),
    #[error("total probability mass is zero")]
    ZeroMass,
    #[error("value is not a comparable number: {0}")]
    NotComparable(String),
    #[error("level {0} outside its domain {1}")]
    LevelOutOfRange(String, &'static str),
    #[error("irrelevant threshold {0}: conditioning event has probability zero")]
    IrrelevantThreshold(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("support of size {size} exceeds the limit of {limit} atoms")]
    SupportTooLarge { size: usize, limit: usize },
    #[error("input not comonotone: atoms ({0}) and ({1}) are discordant")]
    NotComonotone(String, String),
    #[error("root bracketing failed: {0}")]
    Bracket(String),
    #[error("malformed input: {0}")]
    Input(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
