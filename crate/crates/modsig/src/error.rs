use std::path::PathBuf;

/// Errors produced by graph construction, model fitting, testing, and I/O.
///
/// Exit-code mapping for the command-line tool: usage errors map to 2,
/// degenerate test configurations to 4, everything else to 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("self-loop on node {node:?} is not allowed{}", fmt_line(*.line))]
    SelfLoop { node: String, line: Option<u64> },

    #[error("edge {u:?} -- {v:?} has invalid weight {weight}{}: weights must be finite and non-negative", fmt_line(*.line))]
    InvalidWeight {
        u: String,
        v: String,
        weight: f64,
        line: Option<u64>,
    },

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("duplicate node label {label:?}")]
    DuplicateLabel { label: String },

    #[error("unknown node {label:?}{}", fmt_ctx(.context))]
    UnknownNode { label: String, context: String },

    #[error("node {node:?} has no value for covariate column {column:?}")]
    MissingCovariate { node: String, column: String },

    #[error("covariate column {column:?} not found; available columns: {available:?}")]
    UnknownColumn {
        column: String,
        available: Vec<String>,
    },

    #[error("length mismatch: {what} has {got} entries but the graph has {expected} nodes")]
    LengthMismatch {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph has no edges: degree-based quantities are undefined")]
    EdgelessGraph,

    #[error("node {label:?} is isolated (degree 0): its degree parameter is not identifiable")]
    IsolatedNode { label: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate test: {0}")]
    DegenerateTest(String),

    #[error("{context}: weights must be non-negative integers for count models, found {weight}")]
    NonIntegerWeight { context: String, weight: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("usage error: {0}")]
    Usage(String),
}

fn fmt_line(line: Option<u64>) -> String {
    match line {
        Some(l) => format!(" (line {l})"),
        None => String::new(),
    }
}

fn fmt_ctx(context: &str) -> String {
    if context.is_empty() {
        String::new()
    } else {
        format!(" ({context})")
    }
}

impl Error {
    /// Process exit code for the CLI: 2 usage, 4 degenerate test, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::DegenerateTest(_) => 4,
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
