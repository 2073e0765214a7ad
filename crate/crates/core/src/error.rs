use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A single broken constraint found while validating a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.constraint)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario:\n{}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("configuration file: {0}")]
    ConfigFile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, achieved error {achieved:e})"
    )]
    QuadratureBudget {
        estimate: f64,
        achieved: f64,
        subdivisions: usize,
    },

    #[error("integrand does not decay towards infinity: {0}")]
    NonDecaying(String),

    #[error("derivative of order {requested} requested but only {available} supplied")]
    DerivativeOrder { requested: usize, available: usize },

    #[error("finite-difference step underflowed at s = {0:e}")]
    StepUnderflow(f64),

    #[error("all {trials} trials discarded: {cause}")]
    AllDiscarded { trials: u64, cause: &'static str },

    #[error("unbounded rate: {0}")]
    Unbounded(String),

    #[error("at R_p = {rp_m} m, omega_s = {omega_s}: {source}")]
    GridPoint {
        rp_m: f64,
        omega_s: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerical engines, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::QuadratureBudget { .. }
            | Error::NonDecaying(_)
            | Error::DerivativeOrder { .. }
            | Error::StepUnderflow(_)
            | Error::AllDiscarded { .. }
            | Error::Unbounded(_) => true,
            Error::GridPoint { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}
