//! Error type shared by all modules of the crate.

/// Errors produced by system validation, numerical kernels, the level-set
/// solver, and the experiment generators.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Matrix dimensions are inconsistent with a state-space realization.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix entry is NaN or infinite.
    #[error("non-finite entry in matrix {name} at ({row}, {col})")]
    NonFinite {
        name: &'static str,
        row: usize,
        col: usize,
    },

    /// The state matrix is not Hurwitz within the requested margin.
    #[error("system is not stable within margin: spectral abscissa {abscissa:.6e} > -{margin:.6e}")]
    NotStable { abscissa: f64, margin: f64 },

    /// The resolvent (iωI - A) is numerically rank deficient, which signals
    /// an eigenvalue of A at iω.
    #[error("resolvent iωI - A is singular at ω = {omega}")]
    SingularResolvent { omega: f64 },

    /// The dense eigenvalue decomposition did not converge.
    #[error("eigenvalue decomposition failed to converge")]
    EigenFailure,

    /// Cholesky factorization of NᴴN failed; the regularization is too small
    /// or the caller passed a rank-deficient denominator matrix.
    #[error("NᴴN is not positive definite")]
    NotPositiveDefinite,

    /// The coefficient matrix of the Hamiltonian construction is singular at
    /// the requested level; the regularization must be nudged.
    #[error("coefficient matrix is singular at gamma = {gamma:.6e} (sigma_min/norm = {ratio:.3e})")]
    SingularDcal { gamma: f64, ratio: f64 },

    /// Every regularization retry produced a singular coefficient matrix.
    #[error(
        "regularization retries exhausted after {tries} attempts (sigma_min ratios: {history:?})"
    )]
    RegularizationFailed { tries: usize, history: Vec<f64> },

    /// The level-set iteration hit its iteration cap. The best certified
    /// interval found so far is reported.
    #[error("iteration cap {max_iters} reached with interval [{lower:.9e}, {upper:.9e}]")]
    MaxIterationsExceeded {
        max_iters: usize,
        lower: f64,
        upper: f64,
    },

    /// Crossing frequencies were found but no midpoint evaluation raised the
    /// lower bound; the eigenvalue classification is likely spurious.
    #[error(
        "level-set iteration stagnated at lower bound {lower:.9e} with {n_crossings} crossings"
    )]
    StagnationDetected { lower: f64, n_crossings: usize },

    /// A random system generator could not satisfy its postconditions.
    #[error("system generation failed: {0}")]
    GenerationFailed(String),

    /// A plant file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Underlying I/O failure while reading or writing plant files.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
