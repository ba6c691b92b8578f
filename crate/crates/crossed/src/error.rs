use std::sync::OnceLock;

/// Errors raised by constructors and operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Invalid(String),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("size cap exceeded: {what} has {size} elements (cap {cap})")]
    SizeCap {
        what: String,
        size: usize,
        cap: usize,
    },
    #[error("out of range: {0}")]
    Range(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) => 2,
            Error::Parse { .. } => 3,
            Error::SizeCap { .. } => 4,
            Error::Range(_) | Error::Unknown { .. } => 5,
        }
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

/// Largest finite group (or materialized set) accepted; `CK_SIZE_CAP` overrides the default 4096.
pub fn size_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("CK_SIZE_CAP")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(4096)
    })
}

pub(crate) fn check_cap(what: &str, size: usize) -> Result<()> {
    let cap = size_cap();
    if size > cap {
        return Err(Error::SizeCap {
            what: what.to_string(),
            size,
            cap,
        });
    }
    Ok(())
}
