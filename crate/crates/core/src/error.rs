use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("velocity field is not Dirichlet: {0}")]
    NotDirichlet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Initial data do not satisfy a hypothesis of the local existence result.
    #[error("initial data violate hypothesis: {0}")]
    Hypothesis(String),

    #[error("linear solve failed after {iterations} iterations (relative residual {residual:.3e}): {reason}")]
    LinearSolve {
        iterations: usize,
        residual: f64,
        reason: String,
    },

    /// `alpha + eps^2 sigma` left the admissible band at some node.
    #[error("density band violated at node {node:?}, step {step:?}: alpha + eps^2*sigma = {value} outside [{lower}, {upper}]")]
    DensityBand {
        node: [usize; 3],
        step: Option<usize>,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("pressure law evaluated outside its range at density {density}: {reason}")]
    PressureRange { density: f64, reason: String },

    #[error("characteristic left the domain at node {node:?} (excursion {excursion:.3e} cells)")]
    Departure { node: [usize; 3], excursion: f64 },

    #[error("singular local stress system at node {node:?}")]
    SingularStress { node: [usize; 3] },

    #[error("fixed-point iteration did not converge in {iterations} iterations (last distance {distance:.3e}); try a shorter window T")]
    NoConvergence { iterations: usize, distance: f64 },

    #[error("uniqueness experiment rejected: delta = {delta} must stay below {threshold}")]
    DeltaTooLarge { delta: f64, threshold: f64 },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn at_step(self, step: usize) -> Self {
        match self {
            Error::DensityBand {
                node,
                value,
                lower,
                upper,
                ..
            } => Error::DensityBand {
                node,
                step: Some(step),
                value,
                lower,
                upper,
            },
            e @ Error::AtStep { .. } => e,
            e => Error::AtStep {
                step,
                source: Box::new(e),
            },
        }
    }

    /// Innermost error, looking through step annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
