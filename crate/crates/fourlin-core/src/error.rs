//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by grid construction, transforms, fitting, and the
/// verification harnesses.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// `N^d` does not fit the platform's addressable size.
    GridOverflow { d: usize, n: usize },
    /// A grid spec parameter was zero or otherwise unusable.
    InvalidGridSpec(String),
    /// Per-axis index outside `0..N` or a mode outside the representable
    /// signed range.
    IndexOutOfRange(String),
    /// Two fields that must share a `GridSpec` do not.
    SpecMismatch { expected: (usize, usize), got: (usize, usize) },
    /// A field contained NaN or infinite entries.
    NonFiniteInput,
    /// The naive-summation oracle was asked for more points than its cap.
    OracleCapExceeded { points: usize, cap: usize },
    /// A spectrum that must be Hermitian (conjugate-symmetric) is not, so a
    /// real field cannot be produced.
    SymmetryViolation { max_imag: f64, tolerance: f64 },
    /// Operator modes collide on the requested grid (`N <= 2K`).
    ResolutionTooCoarse { n: usize, k: usize },
    /// Truncation level exceeds what the grid can represent.
    TruncationTooLarge { k: usize, n: usize },
    /// A dataset with zero pairs was supplied.
    EmptyDataset,
    /// Coarse grid size does not divide the fine grid size.
    NonDivisorRestriction { fine: usize, coarse: usize },
    /// A relative-MSE target had zero norm; carries the pair index.
    ZeroNormTarget { index: usize },
    /// The SGD loop failed to make progress at its minimal step size.
    NonConvergence { objective: f64, epochs_run: usize },
    /// The lattice tail sum diverges (`2s <= d`).
    DivergentSum { s: u32, d: usize },
    /// A parameter violated a documented precondition.
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::GridOverflow { d, n } => {
                write!(f, "grid of {n}^{d} points overflows the addressable size")
            }
            Error::InvalidGridSpec(msg) => write!(f, "invalid grid spec: {msg}"),
            Error::IndexOutOfRange(msg) => write!(f, "index out of range: {msg}"),
            Error::SpecMismatch { expected, got } => write!(
                f,
                "grid spec mismatch: expected d={} N={}, got d={} N={}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::NonFiniteInput => write!(f, "input contains non-finite values"),
            Error::OracleCapExceeded { points, cap } => {
                write!(f, "naive oracle cap exceeded: {points} points > cap {cap}")
            }
            Error::SymmetryViolation { max_imag, tolerance } => write!(
                f,
                "spectrum is not conjugate-symmetric: imaginary residue {max_imag:e} exceeds {tolerance:e}"
            ),
            Error::ResolutionTooCoarse { n, k } => {
                write!(f, "grid size N={n} too coarse for operator truncation K={k} (need N > 2K)")
            }
            Error::TruncationTooLarge { k, n } => {
                write!(f, "truncation K={k} not representable on a grid of size N={n}")
            }
            Error::EmptyDataset => write!(f, "dataset is empty"),
            Error::NonDivisorRestriction { fine, coarse } => {
                write!(f, "coarse grid {coarse} does not divide fine grid {fine}")
            }
            Error::ZeroNormTarget { index } => {
                write!(f, "target field at index {index} has zero norm; relative error undefined")
            }
            Error::NonConvergence { objective, epochs_run } => write!(
                f,
                "projected SGD failed to converge (objective {objective:e} after {epochs_run} epochs)"
            ),
            Error::DivergentSum { s, d } => {
                write!(f, "lattice tail sum diverges for 2s <= d (s={s}, d={d})")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
