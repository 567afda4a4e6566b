//! Error taxonomy shared by all modules.
//!
//! Two classes matter to callers: *input* errors (malformed data, bad
//! parameters, unknown labels — the CLI maps these to exit code 2) and
//! *diagnostic* errors carrying a witness of a failed certificate (exit
//! code 1 territory).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Matrix/label shape disagreement or window-length mismatch.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A distance entry is NaN, infinite, or negative at ingestion.
    #[error("invalid distance entry at ({i},{j}): {value}")]
    InvalidEntry { i: usize, j: usize, value: f64 },

    /// A point label that does not belong to the space.
    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    /// A space or operation parameter outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Malformed pool/space JSON or a sequence that leaves the carrier.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The metric-identification quotient failed its post-hoc certificate.
    /// Carries the witnessing triple or pair and the size of the breach.
    #[error("quotient certificate failure: {0}")]
    Certificate(CertificateFailure),

    /// A documented operation precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors the CLI reports as exit code 2 (bad input),
    /// false for diagnostic findings (exit code 1).
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Certificate(_))
    }
}

/// Witness for a quotient that is not a metric space within tolerance,
/// or whose class distances drift from the underlying pairwise limits.
#[derive(Debug, Clone, serde::Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CertificateFailure {
    TriangleExcess { i: usize, j: usize, k: usize, excess: f64 },
    RepresentationDrift { class_a: usize, class_b: usize, drift: f64 },
}

impl std::fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CertificateFailure::TriangleExcess { i, j, k, excess } => write!(
                f,
                "triangle inequality violated by {excess:.3e} on quotient triple ({i},{j},{k})"
            ),
            CertificateFailure::RepresentationDrift { class_a, class_b, drift } => write!(
                f,
                "quotient distance drifts {drift:.3e} from the estimated limit between classes {class_a} and {class_b}"
            ),
        }
    }
}
