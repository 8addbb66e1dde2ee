use thiserror::Error;

/// Everything that can go wrong when building a field descriptor or
/// evaluating a residue symbol outside its domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("EllNotPrime: ell = {0} is not a prime")]
    EllNotPrime(i64),
    #[error("EllNotFiveMod8: ell = {0} is prime but not congruent to 5 mod 8")]
    EllNotFiveMod8(u64),
    #[error("NNotPositive: n = {0} must be a positive integer")]
    NNotPositive(i64),
    #[error("NotSquarefree: {n} is divisible by {prime}^2")]
    NotSquarefree { n: u64, prime: u64 },
    #[error("NotCoprime: n = {n} shares the factor {ell} with ell")]
    NotCoprime { n: u64, ell: u64 },
    #[error("NotQuadraticResidue: {a} is not a nonzero square mod {p}")]
    NotQuadraticResidue { a: i64, p: u64 },
}

impl Error {
    /// Short machine-readable name of the violated hypothesis.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EllNotPrime(_) => "EllNotPrime",
            Error::EllNotFiveMod8(_) => "EllNotFiveMod8",
            Error::NNotPositive(_) => "NNotPositive",
            Error::NotSquarefree { .. } => "NotSquarefree",
            Error::NotCoprime { .. } => "NotCoprime",
            Error::NotQuadraticResidue { .. } => "NotQuadraticResidue",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
