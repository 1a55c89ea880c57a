use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input is not well-formed JSON. `offset` is a byte offset into the
    /// parsed text; `line` is the 1-based NDJSON line when known.
    #[error("{}parse error at byte {offset}: {message}", line_prefix(*.line))]
    Parse {
        line: Option<usize>,
        offset: usize,
        message: String,
    },

    /// Well-formed JSON that does not match the report schema.
    #[error("{}schema error: {message}", line_prefix(*.line))]
    Schema { line: Option<usize>, message: String },

    #[error("duplicate sample ids: {}", .0.join(", "))]
    DuplicateSamples(Vec<String>),

    #[error("column {position} ({direction}) of vendor {vendor} is empty")]
    UndefinedColumn {
        vendor: String,
        position: usize,
        direction: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("nothing to train: co-occurrence matrix is empty")]
    NothingToTrain,

    #[error("token {0:?} is not in the vocabulary")]
    UnknownToken(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("state version mismatch: {0}")]
    VersionMismatch(String),

    #[error("{path}: line {line}: {message}")]
    Csv {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn line_prefix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach a 1-based input line number to parse and schema errors.
    pub(crate) fn at_line(self, n: usize) -> Self {
        match self {
            Error::Parse {
                offset, message, ..
            } => Error::Parse {
                line: Some(n),
                offset,
                message,
            },
            Error::Schema { message, .. } => Error::Schema {
                line: Some(n),
                message,
            },
            other => other,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Process exit code for the command line front end:
    /// 1 usage/config, 2 data, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Invariant(_) => 3,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
