use std::fmt;

/// Failure of a CLI command, with its exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad configuration or input file; exit status 2.
    Config { field: String, detail: String },
    /// Solver or metric failure; exit status 3.
    Numeric {
        module: &'static str,
        detail: String,
    },
    /// File system failure; exit status 1.
    Io { path: String, detail: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, detail } => write!(f, "config error in `{field}`: {detail}"),
            CliError::Numeric { module, detail } => write!(f, "[{module}] {detail}"),
            CliError::Io { path, detail } => write!(f, "i/o error on {path}: {detail}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<sectorcav::Error> for CliError {
    fn from(e: sectorcav::Error) -> Self {
        use sectorcav::Error as E;
        match e {
            E::InvalidParameter { field, detail } => CliError::Config {
                field: field.to_string(),
                detail,
            },
            E::Excitation(detail) => CliError::Config {
                field: "excitation".into(),
                detail,
            },
            E::Schema { .. } => CliError::Config {
                field: "pattern".into(),
                detail: e.to_string(),
            },
            E::Io { path, detail } => CliError::Io { path, detail },
            other => CliError::Numeric {
                module: other.module(),
                detail: other.to_string(),
            },
        }
    }
}
