use std::fmt;

/// Command failure, classified for the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Input could not be parsed.
    Parse(anyhow::Error),
    /// Input parsed but violates a precondition.
    Invalid(anyhow::Error),
    /// A statistic is degenerate and `--strict` was given.
    Degenerate(String),
    Other(anyhow::Error),
}

impl Failure {
    pub fn invalid(msg: impl fmt::Display) -> Self {
        Failure::Invalid(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Invalid(_) => 3,
            Failure::Degenerate(_) => 4,
            Failure::Other(_) => 1,
        }
    }

    /// Wraps a library error with context, keeping its classification.
    pub fn from_core(err: cojump::Error, context: impl fmt::Display) -> Self {
        use cojump::Error as E;
        let wrapped = |e: cojump::Error| anyhow::Error::new(e).context(context.to_string());
        match err {
            e if e.is_parse_error() => Failure::Parse(wrapped(e)),
            e @ E::Io(_) => Failure::Other(wrapped(e)),
            E::Degenerate(msg) => Failure::Degenerate(format!("{context}: {msg}")),
            e => Failure::Invalid(wrapped(e)),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Parse(e) | Failure::Invalid(e) | Failure::Other(e) => write!(f, "{e:#}"),
            Failure::Degenerate(msg) => write!(f, "degenerate statistic: {msg}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Other(e.into())
    }
}

pub trait CoreContext<T> {
    fn ctx(self, context: impl fmt::Display) -> Result<T, Failure>;
}

impl<T> CoreContext<T> for cojump::Result<T> {
    fn ctx(self, context: impl fmt::Display) -> Result<T, Failure> {
        self.map_err(|e| Failure::from_core(e, context))
    }
}
