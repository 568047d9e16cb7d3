use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value fell outside the domain of a formula, e.g. `a < 1/m` when inverting.
    #[error("domain error{}: {msg}", at_time(*.t))]
    Domain { t: Option<f64>, msg: String },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("degenerate Wronskian ({0:e})")]
    DegenerateWronskian(f64),

    #[error("integration stopped at t = {t}: {msg}")]
    Singularity { t: f64, msg: String },

    #[error("quadrature did not converge (estimated error {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("t = {t} outside validity interval [{start}, {end}]")]
    OutsideValidity { t: f64, start: f64, end: f64 },

    #[error("invalid config at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("objective is not unimodal on the bracket ({} scan points attached)", .scan.len())]
    NonUnimodal { scan: Vec<(f64, f64)> },

    #[error("invariant check failed: {0}")]
    Check(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn at_time(t: Option<f64>) -> String {
    t.map(|t| format!(" at t = {t}")).unwrap_or_default()
}

impl Error {
    pub(crate) fn domain(t: impl Into<Option<f64>>, msg: impl Into<String>) -> Self {
        Error::Domain { t: t.into(), msg: msg.into() }
    }

    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { path: path.into(), msg: msg.into() }
    }

    /// CLI exit code: 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io(_) | Error::Csv(_) => 1,
            Error::OutsideValidity { .. } | Error::Constraint(_) => 1,
            _ => 2,
        }
    }
}
