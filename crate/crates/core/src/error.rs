use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator {index} is not orthogonal (max |UᵀU - I| = {deviation:e})")]
    NonOrthogonalGenerator { index: usize, deviation: f64 },

    #[error("group closure exceeds the cap of {cap} elements")]
    ClosureExceedsCap { cap: usize },

    #[error("ambient dimension must be at least 1, got {dim}")]
    DegenerateDimension { dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("window index {index} out of range (p = {count})")]
    WindowIndexOutOfRange { index: usize, count: usize },

    #[error("rank index {index} out of range (N = {order})")]
    RankOutOfRange { index: usize, order: usize },

    #[error("window {index} has zero norm")]
    ZeroWindow { index: usize },

    #[error("invalid selector: {0}")]
    InvalidSelector(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("subset enumeration needs {count} candidates, above the cap of {cap}")]
    EnumerationTooLarge { count: f64, cap: f64 },

    #[error("every sampled pair was equivalent under the group action")]
    AllPairsEquivalent,

    #[error("no full-rank projection found after {attempts} attempts")]
    GenericityFailure { attempts: usize },

    #[error("kernel of the projection meets subspace {member} (c = {coefficient:e})")]
    KernelIntersectsFamily { member: usize, coefficient: f64 },

    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),
}
