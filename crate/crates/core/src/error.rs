use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Process exit codes shared by the CLI and the C ABI. Values are stable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(i32)]
pub enum ExitCode {
    Success = 0,
    /// A differential check found a mismatch, or reasoning failed.
    Mismatch = 1,
    Usage = 2,
    Unsupported = 3,
    Unstratifiable = 4,
    CapExceeded = 5,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        SyntaxError { line, column, message: message.into() }
    }
}

/// Failure of any of the text readers. The two classes map to distinct exit
/// codes.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(SyntaxError),
    #[error("unsupported feature at {line}:{column}: {feature}")]
    Unsupported { line: usize, column: usize, feature: String },
}

impl ParseError {
    pub fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax(SyntaxError::new(line, column, message))
    }

    pub fn unsupported(line: usize, column: usize, feature: impl Into<String>) -> Self {
        ParseError::Unsupported { line, column, feature: feature.into() }
    }

    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax(e) => (e.line, e.column),
            ParseError::Unsupported { line, column, .. } => (*line, *column),
        }
    }
}

impl From<SyntaxError> for ParseError {
    fn from(e: SyntaxError) -> Self {
        ParseError::Syntax(e)
    }
}

/// CONSTRUCT template variables that no solution can bind.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidationError {
    pub unbindable: BTreeSet<String>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.unbindable.iter().map(|v| format!("unbindable template variable ?{v}")).collect();
        f.write_str(&names.join("; "))
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Translate(#[from] crate::translate::TranslateError),
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
    #[error(transparent)]
    Prove(#[from] crate::prover::ProveError),
    #[error(transparent)]
    Eval(#[from] crate::algebra::EvalError),
    #[error("cannot serialize: {0}")]
    Serialize(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn exit_code(&self) -> ExitCode {
        use crate::engine::EngineError;
        use crate::prover::ProveError;
        match self {
            Error::Parse(ParseError::Syntax(_)) => ExitCode::Usage,
            Error::Parse(ParseError::Unsupported { .. }) => ExitCode::Unsupported,
            Error::Validation(_) | Error::Usage(_) | Error::Io { .. } | Error::Serialize(_) => ExitCode::Usage,
            Error::Translate(_) => ExitCode::Usage,
            Error::Engine(EngineError::Unstratifiable { .. }) => ExitCode::Unstratifiable,
            Error::Engine(EngineError::IterationCap { .. }) => ExitCode::CapExceeded,
            Error::Engine(EngineError::UnsupportedPattern(_)) => ExitCode::Unsupported,
            Error::Engine(EngineError::MalformedResult(_)) => ExitCode::Mismatch,
            Error::Prove(ProveError::UnsupportedRule { .. }) => ExitCode::Unsupported,
            Error::Prove(ProveError::DepthLimit { .. }) => ExitCode::CapExceeded,
            Error::Eval(crate::algebra::EvalError::CapExceeded { .. }) => ExitCode::CapExceeded,
            Error::Eval(_) => ExitCode::Usage,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
