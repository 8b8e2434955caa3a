use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A function was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    #[error("malformed trace: {0}")]
    MalformedTrace(String),

    #[error("malformed environment: {0}")]
    MalformedEnvironment(String),

    #[error("round {got} recorded out of order (expected {expected})")]
    OutOfOrderRound { expected: u64, got: u64 },

    #[error("policy expects {policy} arms but environment has {environment}")]
    ArmCountMismatch { policy: usize, environment: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("search for {what} exceeded cap {cap}")]
    ScanOverflow { what: &'static str, cap: u64 },

    #[error("run {run}: {source}")]
    Run {
        run: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad user input rather than runtime failures.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config { .. } | Error::Domain(_) => true,
            Error::Run { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
