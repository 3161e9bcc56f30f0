use thiserror::Error;

use crate::poly::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised anywhere in the certificate chain.
///
/// Most variants mean a check that is expected to hold did not; they carry
/// enough context to find the offending object.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("linear system has no solution")]
    NoSolution,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("input is not a nonzero homogeneous cubic in x1..x6: {0}")]
    NotHomogeneousCubic(String),
    #[error("prerequisite failed: {0}")]
    PrerequisiteFailed(String),
    #[error("homomorphism violates syzygy {syzygy}")]
    SyzygyViolation { syzygy: usize },
    #[error("deformation round trip failed at generator {generator}: {reason}")]
    RoundTripFailure { generator: usize, reason: String },
    #[error("candidate basis does not span the deformed algebra: {0}")]
    BasisFailure(String),
    #[error("lift construction failed: {0}")]
    LiftFailure(String),
    #[error("chain-level obstruction disagrees with closed form at H_{k}")]
    FormulaMismatch { k: usize },
    #[error("no extension over the square-zero product for partial {partial}: {reason}")]
    ExtensionFailure { partial: usize, reason: String },
    #[error("obstruction kernel mismatch: {0}")]
    KernelMismatch(String),
    #[error("annihilator of the obstruction kernel is not the degree-2 perp: {0}")]
    AnnihilatorMismatch(String),
    #[error("polynomial identity failed: {0}")]
    IdentityFailure(String),
    #[error("product perp mismatch in degree {degree}")]
    DegreeMismatch { degree: u32 },
    #[error("relative freeness failed at t0 = {t0}, degree {degree}: {reason}")]
    FreenessFailure { t0: String, degree: u32, reason: String },
    #[error("fiber rank check failed at t0 = {t0}: {reason}")]
    RankFailure { t0: String, reason: String },
}
