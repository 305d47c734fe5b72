use thiserror::Error;

/// Failures raised by the library.
///
/// `DegenerateCrossing` is kept separate from input errors because callers
/// (the CLI in particular) treat it as a numerical abort rather than a
/// malformed request.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("frame has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("subspace is not isotropic (defect {defect:.3e})")]
    NotIsotropic { defect: f64 },

    #[error("matrix is not symplectic (defect {defect:.3e})")]
    NotSymplectic { defect: f64 },

    #[error("matrix is not orthogonal (defect {defect:.3e})")]
    NotOrthogonal { defect: f64 },

    #[error("subspaces are not transverse: {0}")]
    NotTransverse(String),

    #[error("empty intersection at t = {t}: no crossing form to evaluate")]
    NoIntersection { t: f64 },

    #[error(
        "degenerate crossing at t = {t} (eigenvalues {eigenvalues:?}); \
         perturb the path or its endpoints, the index is homotopy invariant"
    )]
    DegenerateCrossing { t: f64, eigenvalues: Vec<f64> },

    #[error("crossings closer than the time tolerance near t = {t}")]
    UnresolvedCluster { t: f64 },

    #[error("partition point t = {t} is a crossing instant; nudge epsilon")]
    DegeneratePartition { t: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("symplectic defect target {target:.3e} not reached (achieved {achieved:.3e})")]
    DefectUnreachable { target: f64, achieved: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for aborts caused by a non-regular crossing or partition point.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateCrossing { .. }
                | Error::UnresolvedCluster { .. }
                | Error::DegeneratePartition { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
