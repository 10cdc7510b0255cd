use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cross product needs 3-component vectors (got {dim}); use hodge_complement for other dimensions")]
    CrossDimension { dim: usize },

    #[error("degenerate direction: norm {norm:e} is below the zero threshold")]
    DegenerateDirection { norm: f64 },

    #[error("rank deficient input: numerical rank {rank}, need {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("empty time series")]
    EmptySeries,

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("index {index} has no central-difference neighbours in a series of {len} samples")]
    BoundaryIndex { index: usize, len: usize },

    #[error("matrix is not orthonormal: max |M*M^T - I| = {violation:e}")]
    NotOrthonormal { violation: f64 },

    #[error("matrix is not skew-symmetric: max |M + M^T| = {violation:e}")]
    NotSkewSymmetric { violation: f64 },

    #[error("Frenet frame is undefined at this sample (speed {s_dot:e})")]
    UndefinedFrame { s_dot: f64 },

    #[error(
        "frame vector f_{vector} flips sign between samples {sample} and {}; align frame signs before differentiating",
        sample + 1
    )]
    SignFlip { vector: usize, sample: usize },

    #[error("unknown scenario '{name}'; valid names: E1, E2, E3, E4, E5, E6, SIX")]
    UnknownScenario { name: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
