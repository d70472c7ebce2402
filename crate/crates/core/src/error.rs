use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate triangle: {0}")]
    DegenerateTriangle(String),
    #[error("perimeter {perimeter} is not below 2π/√κ = {limit}")]
    PerimeterTooLarge { perimeter: f64, limit: f64 },
    #[error("glued edges ({t0},{e0}) and ({t1},{e1}) have lengths {l0} and {l1}")]
    EdgeLengthMismatch {
        t0: usize,
        e0: usize,
        t1: usize,
        e1: usize,
        l0: f64,
        l1: f64,
    },
    #[error("edge ({0},{1}) is not glued to any partner")]
    UnmatchedEdge(usize, usize),
    #[error("non-manifold gluing: {0}")]
    NonManifoldGluing(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("multiplicities ({0},{1},{2}) do not define a spherical triangle group")]
    NotSpherical(u32, u32, u32),
    #[error("inconsistent region: {0}")]
    InconsistentRegion(String),
    #[error("lines {0} and {1} coincide")]
    DuplicateLines(usize, usize),
    #[error("orbifold structure is not admissible: {0}")]
    NotAdmissible(String),
    #[error("arrangement is not one of the named arrangements")]
    NotNamedArrangement,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
