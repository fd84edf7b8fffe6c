use thiserror::Error;

/// Errors raised anywhere in the descent pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(String),
    #[error("valuation of zero is infinite")]
    ZeroValuation,
    #[error("expected a nonzero value")]
    Zero,
    #[error("mismatched quadratic fields: d = {0} and d = {1}")]
    MismatchedField(String, String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("prime {0} is inert in Q(sqrt({1}))")]
    InertPrime(String, String),
    #[error("singular curve: {0}")]
    Singular(String),
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("curve has no rational 2-torsion point")]
    NoTwoTorsion,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Tag an error with the pipeline stage that produced it.
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True when the failure is a mathematical inconclusive result rather than bad input.
    pub fn is_inconclusive(&self) -> bool {
        match self {
            Error::Inconclusive(_) => true,
            Error::Stage { source, .. } => source.is_inconclusive(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
