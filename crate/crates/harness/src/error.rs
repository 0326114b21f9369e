use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}:{line}: {msg}")]
    Syntax {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] oldroyd_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),

    /// A monitored invariant failed on an otherwise completed run.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for bad configuration or violated hypotheses,
    /// 3 for non-convergence, 4 for invariant violations, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use oldroyd_core::Error as E;
        match self {
            HarnessError::Syntax { .. } | HarnessError::Config(_) => 2,
            HarnessError::Invariant(_) => 4,
            HarnessError::Core(e) => match e.root() {
                E::InvalidGrid(_)
                | E::InvalidParams(_)
                | E::InvalidArgument(_)
                | E::Hypothesis(_)
                | E::DeltaTooLarge { .. }
                | E::Parse(_) => 2,
                E::NoConvergence { .. } | E::LinearSolve { .. } => 3,
                E::DensityBand { .. }
                | E::PressureRange { .. }
                | E::Departure { .. }
                | E::SingularStress { .. } => 4,
                _ => 1,
            },
            HarnessError::Io { .. } | HarnessError::Csv(_) | HarnessError::Json(_) => 1,
        }
    }

    /// Short machine-readable name of the failed check, for the summary.
    pub fn kind(&self) -> &'static str {
        use oldroyd_core::Error as E;
        match self {
            HarnessError::Syntax { .. } => "config-syntax",
            HarnessError::Config(_) => "config",
            HarnessError::Invariant(_) => "invariant",
            HarnessError::Core(e) => match e.root() {
                E::Hypothesis(_) => "initial-data-hypothesis",
                E::InvalidParams(_) | E::InvalidGrid(_) | E::InvalidArgument(_) => "config",
                E::DeltaTooLarge { .. } => "delta-threshold",
                E::NoConvergence { .. } => "fixed-point-convergence",
                E::LinearSolve { .. } => "linear-solver-convergence",
                E::DensityBand { .. } => "density-band",
                E::PressureRange { .. } => "pressure-range",
                E::Departure { .. } => "characteristic-departure",
                E::SingularStress { .. } => "stress-solvability",
                _ => "internal",
            },
            HarnessError::Io { .. } | HarnessError::Csv(_) | HarnessError::Json(_) => "output",
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
