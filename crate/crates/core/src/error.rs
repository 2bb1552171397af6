use thiserror::Error;

/// Every domain failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group literal: {0}")]
    ParseGroup(String),
    #[error("invalid element literal: {0}")]
    ParseElement(String),
    #[error("element has {got} coordinates, group has {expected} factors")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("group orders must be positive")]
    ZeroOrder,
    #[error("group of order {0} is too large for exhaustive enumeration")]
    GroupTooLarge(u64),
    #[error("matrix is not a well-defined homomorphism")]
    IllDefinedHomomorphism,
    #[error("the given elements do not generate the group")]
    NotGenerating,
    #[error("the generating set is not minimal: generator {0} is redundant")]
    NotMinimal(usize),
    #[error("no adapted basis found for the given generators")]
    NoAdaptedBasis,
    #[error("the given elements are not a direct-sum basis of the group")]
    InvalidBasis,
    #[error("ramification data needs at least one marked point")]
    NoMarkedPoints,
    #[error("operation requires base genus 1, got {0}")]
    BaseGenus(u64),
    #[error("ramification elements do not sum to zero, so no cover exists")]
    Unbalanced,
    #[error("ramification data is not totally ramified")]
    NotTotallyRamified,
    #[error("moduli space is empty (k = n = {0})")]
    EmptyModuli(usize),
    #[error("invalid range: k = {k} must satisfy 0 <= k < n = {n}")]
    InvalidRange { n: usize, k: usize },
    #[error("torsion vector is degenerate (all entries zero)")]
    DegenerateVector,
    #[error("invalid torsion vector: {0}")]
    InvalidVector(String),
    #[error("state space of size {size} exceeds the bound {bound}")]
    StateSpaceTooLarge { size: u128, bound: u64 },
    #[error("negative rank: {extra} removed divisors exceed {boundary} boundary divisors")]
    NegativeRank { boundary: u64, extra: u64 },
    #[error("genus must be at least 2, got {0}")]
    InvalidGenus(u64),
    #[error("genus {0} is too large for the closed-form tables")]
    GenusTooLarge(u64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
