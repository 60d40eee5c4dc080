use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("summation range too large: {len} terms exceeds the limit of {limit}")]
    RangeTooLarge { len: u64, limit: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("box {0} not found")]
    NotFound(u64),

    /// The three-square seed does not leave a positive-width strip.
    #[error("seed infeasible for t = {t}: strip width {strip_width} is not positive")]
    SeedInfeasible { t: f64, strip_width: f64 },

    #[error("brute-force verification limited to {limit} rectangles, got {got}")]
    GuardExceeded { got: usize, limit: usize },
}
