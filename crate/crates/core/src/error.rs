use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("molecule contains no ATOM/HETATM records")]
    EmptyMolecule,

    #[error("atom {serial}: {reason}")]
    InvalidAtom { serial: i64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate bounding box: zero extent along axis {axis}")]
    DegenerateBox { axis: usize },

    #[error("no grid point satisfies |phi - c| <= {band}; use a finer grid or a larger band")]
    EmptySelection { band: f64 },

    #[error("parameter vector has length {got}, expected {expected}")]
    ParameterLength { expected: usize, got: usize },

    #[error("pruning with tolerance {tol} removes every basis")]
    AllPruned { tol: f64 },

    #[error("every basis was pruned at iteration {iteration}")]
    ModelCollapsed { iteration: usize },

    #[error("objective became non-finite at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },

    #[error("the field never crosses isovalue {isovalue} inside the grid")]
    EmptyMesh { isovalue: f64 },

    #[error("model document: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
