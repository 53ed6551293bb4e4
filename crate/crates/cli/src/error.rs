use serde::Serialize;
use thiserror::Error;

use parima::ErrorClass;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] parima::Error),
    #[error("malformed CSV at line {line}: {reason}")]
    MalformedCsv { line: u64, reason: String },
    #[error("duplicate row for timestamp {timestamp:?}{}", group.as_ref().map(|g| format!(" in group {g:?}")).unwrap_or_default())]
    DuplicateKey { timestamp: String, group: Option<String> },
    #[error("column {0:?} not found in the input header")]
    UnknownColumn(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    BadJson { path: String, message: String },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Self::Core(e) => e.class(),
            Self::MalformedCsv { .. } | Self::DuplicateKey { .. } | Self::UnknownColumn(_) => ErrorClass::Data,
            Self::Usage(_) | Self::BadJson { .. } => ErrorClass::Usage,
            // unreadable input or unwritable output; either way the invocation needs fixing
            Self::Io { .. } => ErrorClass::Usage,
        }
    }

    pub fn kind(&self) -> String {
        match self {
            Self::Core(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
            }
            Self::MalformedCsv { .. } => "MalformedCsv".into(),
            Self::DuplicateKey { .. } => "DuplicateKey".into(),
            Self::UnknownColumn(_) => "UnknownColumn".into(),
            Self::Usage(_) => "Usage".into(),
            Self::Io { .. } => "Io".into(),
            Self::BadJson { .. } => "BadConfig".into(),
        }
    }
}

pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Usage => 2,
        ErrorClass::Data => 3,
        ErrorClass::Numerical => 4,
    }
}

fn class_name(class: ErrorClass) -> &'static str {
    match class {
        ErrorClass::Usage => "usage",
        ErrorClass::Data => "data",
        ErrorClass::Numerical => "numerical",
    }
}

#[derive(Serialize)]
pub struct ErrorReport {
    pub class: &'static str,
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl ErrorReport {
    pub fn new(class: ErrorClass, kind: String, message: String) -> Self {
        Self {
            class: class_name(class),
            kind,
            message,
            exit_code: exit_code(class),
        }
    }
}

impl From<&CliError> for ErrorReport {
    fn from(e: &CliError) -> Self {
        Self::new(e.class(), e.kind(), e.to_string())
    }
}
