use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error(
        "signature must be (1,ρ−1) (Hodge index): found {positive} positive, \
         {negative} negative, {zero} null directions"
    )]
    Signature {
        positive: usize,
        negative: usize,
        zero: usize,
    },

    #[error("invalid surface data: {0}")]
    InvalidSurface(String),

    #[error("invalid quotient data: {0}")]
    InvalidQuotient(String),

    #[error("polarization is not ample")]
    NotAmple,

    #[error("ch0 < 0 is not a sheaf class")]
    NegativeRank,

    #[error("ch0 = 0: slope-type quotient undefined")]
    ZeroRank,

    #[error("Le Potier value unknown: {0}")]
    Unknown(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Budget and certification failures share a CLI exit code.
    pub fn is_budget_or_certification(&self) -> bool {
        matches!(
            self,
            Error::Budget(_) | Error::Certification(_) | Error::Unknown(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
