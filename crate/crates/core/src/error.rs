//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by instance handling, solvers, and statistics.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A graph violated a structural invariant (indices, weights, duplicates).
    InvalidGraph(String),
    /// GML text could not be parsed; carries the 1-based offending line.
    GmlParse { line: usize, reason: String },
    /// An instance name did not follow the naming scheme.
    NameParse(String),
    /// A vertex count exceeded the configured enumeration cap.
    EnumerationCap { n: usize, cap: usize },
    /// A qubit count exceeded the configured simulation cap.
    SimulationCap { n: usize, cap: usize },
    /// The SDP solve did not reach the requested tolerance.
    NonConvergence { iters: u64, residual: f64 },
    /// A numeric contract was violated (e.g. inner product far outside [-1, 1]).
    Numeric(String),
    /// An argument was outside its documented range.
    InvalidParam(String),
    /// Two sequences that must agree in length did not.
    LengthMismatch { expected: usize, got: usize },
    /// Instance generation ran out of attempts; counts rejections per guard.
    GenerationExhausted {
        attempts: u64,
        rejected_gw_alpha: u64,
        rejected_percentile: u64,
        rejected_count: u64,
        failed_solve: u64,
    },
    /// Connected Watts-Strogatz regeneration ran out of tries.
    ConnectivityExhausted { tries: u32 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGraph(reason) => write!(f, "invalid graph: {reason}"),
            Error::GmlParse { line, reason } => {
                write!(f, "GML parse error at line {line}: {reason}")
            }
            Error::NameParse(reason) => write!(f, "invalid instance name: {reason}"),
            Error::EnumerationCap { n, cap } => write!(
                f,
                "refusing to enumerate 2^{} cuts (n = {n} exceeds cap {cap}); \
                 raise the cap explicitly if this runtime is intended",
                n.saturating_sub(1)
            ),
            Error::SimulationCap { n, cap } => write!(
                f,
                "refusing to simulate {n} qubits (cap {cap}); raise the cap explicitly \
                 if this memory use is intended"
            ),
            Error::NonConvergence { iters, residual } => write!(
                f,
                "SDP solve did not converge within {iters} iterations (residual {residual:e})"
            ),
            Error::Numeric(reason) => write!(f, "numeric error: {reason}"),
            Error::InvalidParam(reason) => write!(f, "invalid parameter: {reason}"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            Error::GenerationExhausted {
                attempts,
                rejected_gw_alpha,
                rejected_percentile,
                rejected_count,
                failed_solve,
            } => write!(
                f,
                "no instance passed the guards within {attempts} attempts \
                 (rejections: gw-expectation {rejected_gw_alpha}, \
                 hardness-percentile {rejected_percentile}, cut-count {rejected_count}, \
                 unconverged solves {failed_solve})"
            ),
            Error::ConnectivityExhausted { tries } => {
                write!(f, "no connected graph produced within {tries} tries")
            }
        }
    }
}

impl core::error::Error for Error {}
