use num_complex::Complex64;
use thiserror::Error;

/// Failures raised by the numerical pipelines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("exceptional point on loop near theta={theta:.6} (|disc|={disc_abs:.3e})")]
    EpOnLoop { theta: f64, disc_abs: f64 },

    #[error("bands {0} and {1} degenerate along the path")]
    DegenerateBands(usize, usize),

    #[error("tangential crossing between bands {i} and {j} at theta={theta:.6}")]
    TangentialCrossing { theta: f64, i: usize, j: usize },

    #[error("crossing maps to non-adjacent positions {k} and {l}")]
    NonAdjacentCrossing { k: usize, l: usize },

    #[error("conjugacy search exhausted words of length <= {bound} without a decision")]
    Inconclusive { bound: usize },

    #[error("phase step {step:.3} rad exceeds the unwrapping guard after refinement")]
    PhaseStepTooLarge { step: f64 },

    #[error("winding {value:.4} is not close to an integer")]
    NonIntegerWinding { value: f64 },

    #[error("no degenerate eigenvalue cluster at the requested point")]
    NotAnEp,

    #[error("continuation stalled at alpha={alpha:.6}")]
    ContinuationStalled { alpha: f64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("metric degenerate at t={t:.4}: min eig(M - I) = {min_eig:.3e}")]
    MetricDegenerate { t: f64, min_eig: f64 },

    #[error("eigenvalue sum vanishes at the solution")]
    Degenerate,

    #[error("{} distinct eigenvalue triples fit the ratios equally well", .0.len())]
    Ambiguous(Vec<[Complex64; 3]>),

    #[error("jacobian rank {rank} < {needed}: measurement set insufficient")]
    RankDeficient { rank: usize, needed: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
