use thiserror::Error;

/// Every failure mode of the library.
///
/// [`Error::name`] gives a stable identifier that the command line echoes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("argument {0} lies on the branch cut [1, +inf)")]
    BranchCut(String),
    #[error("series did not converge within {max_terms} terms ({context})")]
    Convergence { max_terms: usize, context: String },
    #[error("degenerate hypergeometric parameters: {0}")]
    DegenerateParams(String),
    #[error("signature ({0}, {1}, {2}) is not hyperbolic: 1/n1 + 1/n2 + 1/n3 >= 1")]
    NotHyperbolic(i64, i64, i64),
    #[error("elliptic order {0} is too small; orders must be at least 3")]
    OrderTooSmall(i64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("denominator vanishes: {0}")]
    ZeroDenominator(String),
    #[error("non-finite result: {0}")]
    NonFinite(String),
    #[error("point {0} lies outside the fundamental triangle")]
    OutsideFundamentalDomain(String),
    #[error("Newton inversion did not converge after {iterations} iterations (best residual {best_residual:e})")]
    NoConvergence { iterations: usize, best_residual: f64 },
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::Pole(_) => "PoleError",
            Error::BranchCut(_) => "BranchCutError",
            Error::Convergence { .. } => "ConvergenceError",
            Error::DegenerateParams(_) => "DegenerateParams",
            Error::NotHyperbolic(..) => "NotHyperbolic",
            Error::OrderTooSmall(_) => "OrderTooSmall",
            Error::Domain(_) => "DomainError",
            Error::ZeroDenominator(_) => "ZeroDenominator",
            Error::NonFinite(_) => "NonFinite",
            Error::OutsideFundamentalDomain(_) => "OutsideFundamentalDomain",
            Error::NoConvergence { .. } => "NoConvergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
