use thiserror::Error;

/// Errors raised by the numeric kernels and data model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of a function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// Argument outside the supported accuracy box.
    #[error("range error in {func}: {detail}")]
    Range { func: &'static str, detail: String },

    /// An iterative method failed to converge.
    #[error("{method} did not converge: {detail}")]
    Convergence {
        method: &'static str,
        detail: String,
    },

    /// Invalid geometry, feed or solver parameter.
    #[error("invalid parameter `{field}`: {detail}")]
    InvalidParameter { field: &'static str, detail: String },

    /// Mode solver found fewer roots than requested.
    #[error(
        "mode solver found {found} of {wanted} roots for n = {n} (v = {order}) below x = {ceiling}"
    )]
    MissingRoots {
        n: usize,
        order: f64,
        found: usize,
        wanted: usize,
        ceiling: f64,
    },

    /// Pattern grid cannot be re-indexed or combined as requested.
    #[error("grid incompatibility: {0}")]
    Grid(String),

    /// Pattern file does not follow the CSV schema.
    #[error("pattern schema violation{}: {detail}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Schema { line: Option<usize>, detail: String },

    /// Excitation set is malformed or refers to an unknown preset.
    #[error("excitation error: {0}")]
    Excitation(String),

    /// Metric cannot be evaluated on the given input.
    #[error("metric error in {metric}: {detail}")]
    Metric {
        metric: &'static str,
        detail: String,
    },

    #[error("i/o error on {path}: {detail}")]
    Io { path: String, detail: String },
}

impl Error {
    /// Name of the module the error originates from.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Domain { func, .. } | Error::Range { func, .. } => {
                if func.starts_with("bessel") {
                    "specfun"
                } else {
                    "cavity"
                }
            }
            Error::Convergence { method, .. } => {
                if method.starts_with("bessel") {
                    "specfun"
                } else if method.starts_with("quadrature") {
                    "radiator"
                } else {
                    "cavity"
                }
            }
            Error::InvalidParameter { .. } | Error::MissingRoots { .. } => "cavity",
            Error::Grid(_) | Error::Schema { .. } | Error::Io { .. } => "radiator",
            Error::Excitation(_) => "synthesis",
            Error::Metric { .. } => "metrics",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
