use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no edge of the cell changes sign")]
    NoInterface,
    #[error("edge restriction of the interpolant is identically zero")]
    DegenerateEdge,
    #[error("denominator of the rational profile vanishes inside [{eta0}, {eta1}]")]
    PoleInRange { eta0: f64, eta1: f64 },
    #[error("cell could not be resolved after perturbation")]
    Unresolved,
    #[error("closed form is numerically degenerate for this frame")]
    DegenerateDenominator,
    #[error("atan2 is undefined at the origin")]
    BothZero,
    #[error("cell cannot be split into elementary pieces")]
    NotSplittable,
    #[error("shape does not fit in the unit domain: {0}")]
    SpecOutOfDomain(String),
    #[error("extent {extent} minus one is not divisible by 2^{levels}")]
    NotDivisible { extent: usize, levels: u32 },
    #[error("parse error at line {line}, token {token}: {message}")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("normalising sum is zero")]
    DivideByZero,
    #[error("convergence fit needs at least two distinct resolutions with positive errors")]
    DegenerateFit,
    #[error("fine grid is not {levels} refinements of the coarse grid")]
    IncompatibleLevels { levels: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
