use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared coordinate `{0}`")]
    Undeclared(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("invalid parameter index {index} for signature ({r}|{s})")]
    InvalidIndex { index: u16, r: u16, s: u16 },
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("degenerate metric: det g = {0:e}")]
    Degenerate(f64),
    #[error("non-positive jacobian {0:e}")]
    Orientation(f64),
    #[error("non-finite sample at ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("missing jet entry {0}")]
    MissingJet(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("property failed: {0}")]
    Property(String),
}

impl Error {
    /// Process exit code for the failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::Undeclared(_) | Error::Parity(_) | Error::Signature(_) | Error::Config(_) => 2,
            Error::Property(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
