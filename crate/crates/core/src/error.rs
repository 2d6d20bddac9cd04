use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate element: |delta| = {delta:e} below tolerance {tol:e}")]
    DegenerateElement { delta: f64, tol: f64 },

    #[error("derivatives of the asymptotic field are singular at the crack tip")]
    TipSingularity,

    #[error("enrichment layout: {0}")]
    EnrichmentLayout(String),

    #[error("mesh generation: {0}")]
    MeshGeneration(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("point ({x}, {y}) lies outside the mesh")]
    PointOutsideMesh { x: f64, y: f64 },

    #[error("singular system, unconstrained rigid modes: {modes:?}")]
    ConstraintDeficiency { modes: Vec<String> },

    #[error("solver: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
