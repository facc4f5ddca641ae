use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice half-side n must be > 1, got {0}")]
    DegenerateLattice(usize),

    #[error("vertex ({x}, {y}) out of range for side {side}")]
    VertexOutOfRange { x: i64, y: i64, side: usize },

    #[error("vertex index {index} out of range for {num_vertices} vertices")]
    IndexOutOfRange { index: usize, num_vertices: usize },

    #[error("unknown tessellation label {0:?}; expected one of 00, 01, 10, 11")]
    BadLabel(String),

    #[error("ordering must be a permutation of 00, 01, 10, 11; got {0}")]
    BadOrdering(String),

    #[error("global sign must be +1 or -1, got {0}")]
    BadSign(i32),

    #[error("lattice mismatch: state has {state} vertices, operator expects {expected}")]
    LatticeMismatch { state: usize, expected: usize },

    #[error("dense operator with {requested} vertices exceeds the cap of {cap}")]
    DenseCapExceeded { requested: usize, cap: usize },

    #[error("degenerate reduced eigenvector at (k, l) = ({k}, {l})")]
    DegenerateEigenvector { k: usize, l: usize },

    #[error("momentum ({k}, {l}) out of range for n = {n}")]
    MomentumOutOfRange { k: usize, l: usize, n: usize },

    #[error("no sign change of the secular function found in ({lo}, {hi})")]
    NoRoot { lo: f64, hi: f64 },

    #[error("eigendecomposition failed to converge")]
    EigenFailed,

    #[error("degenerate fit: need at least 2 distinct abscissae, got {0}")]
    DegenerateFit(usize),

    #[error("invalid angle {0:?}")]
    BadAngle(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
