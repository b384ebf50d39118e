use core::fmt;

/// Errors reported by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Fewer than two channels.
    TooFewChannels { m: usize },
    /// A loss probability outside the open unit interval (index in caller order).
    ProbabilityOutOfRange { index: usize, value: f64 },
    /// A single-erasure weight underflowed below the representable floor.
    DegenerateWeights { index: usize, value: f64 },
    /// Ambient dimension outside `1..=m`.
    InvalidDimension { n: usize, m: usize },
    /// Erasure order outside its allowed range.
    InvalidOrder { r: usize, m: usize },
    /// Exact enumeration would visit more subsets than the cap.
    EnumerationTooLarge { subsets: u128, cap: u128 },
    /// Two inputs that must have equal length do not.
    LengthMismatch { expected: usize, found: usize },
    /// A precondition on a scalar argument failed.
    InvalidArgument(&'static str),
    /// Matrix expected positive semidefinite has a clearly negative eigenvalue.
    NotPsd { min_eigenvalue: f64 },
    /// Matrix expected positive definite is singular or nearly so.
    NearSingular { min_eigenvalue: f64 },
    /// Jacobi sweeps exhausted before the off-diagonal mass vanished.
    NoConvergence { sweeps: usize },
    /// Vectors do not form a frame (fail to span, or ragged rows).
    NotAFrame(&'static str),
    /// A prescribed squared norm exceeds one.
    NormAboveOne { index: usize, value: f64 },
    /// A prescribed squared norm is zero or numerically so.
    NormTooSmall { index: usize, value: f64 },
    /// Prescribed squared norms do not sum to the dimension.
    NormSumMismatch { sum: f64, n: usize },
    /// An exact formula that needs a Parseval frame got something else.
    NotParseval { residual: f64 },
    /// Monte Carlo asked for zero trials.
    ZeroTrials,
    /// Conditioning accepted no trial.
    NoAcceptedTrials { trials: u64, r: usize },
    /// The index scan found no admissible position although condition (H) fails.
    IndexScanFailed,
}

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TooFewChannels { m } => write!(f, "need at least 2 channels, got {m}"),
            Error::ProbabilityOutOfRange { index, value } => {
                write!(f, "p[{}]={:?} outside (0,1)", index + 1, value)
            }
            Error::DegenerateWeights { index, value } => write!(
                f,
                "single-erasure weight of channel {} underflows ({value:e} < 1e-300)",
                index + 1
            ),
            Error::InvalidDimension { n, m } => {
                write!(f, "dimension n={n} must satisfy 1 <= n <= m={m}")
            }
            Error::InvalidOrder { r, m } => write!(f, "erasure order r={r} out of range for m={m}"),
            Error::EnumerationTooLarge { subsets, cap } => {
                write!(f, "enumeration of {subsets} subsets exceeds cap {cap}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::InvalidArgument(msg) => f.write_str(msg),
            Error::NotPsd { min_eigenvalue } => {
                write!(
                    f,
                    "matrix is not PSD (smallest eigenvalue {min_eigenvalue:e})"
                )
            }
            Error::NearSingular { min_eigenvalue } => write!(
                f,
                "matrix is singular or nearly so (smallest eigenvalue {min_eigenvalue:e})"
            ),
            Error::NoConvergence { sweeps } => {
                write!(f, "Jacobi iteration did not converge in {sweeps} sweeps")
            }
            Error::NotAFrame(msg) => write!(f, "not a frame: {msg}"),
            Error::NormAboveOne { index, value } => write!(
                f,
                "squared norm a[{}]={value:?} exceeds 1; no Parseval frame has this profile",
                index + 1
            ),
            Error::NormTooSmall { index, value } => {
                write!(f, "squared norm a[{}]={value:?} is below 1e-12", index + 1)
            }
            Error::NormSumMismatch { sum, n } => write!(
                f,
                "squared norms sum to {sum:?} but a Parseval frame in dimension {n} needs {n}"
            ),
            Error::NotParseval { residual } => {
                write!(f, "frame is not Parseval (residual {residual:e})")
            }
            Error::ZeroTrials => f.write_str("trials must be at least 1"),
            Error::NoAcceptedTrials { trials, r } => {
                write!(f, "no trial out of {trials} had exactly {r} erasures")
            }
            Error::IndexScanFailed => {
                f.write_str("internal error: condition (H) fails but the index scan is empty")
            }
        }
    }
}

impl core::error::Error for Error {}
