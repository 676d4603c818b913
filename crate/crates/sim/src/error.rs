use std::path::PathBuf;

/// Errors of the simulation front end. Each maps to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Numerics(#[from] quasi_landau_core::Error),
    #[error("time step {dt} too large; the largest allowed step is {max_dt}")]
    TimeStep { dt: f64, max_dt: f64 },
    #[error("support spill at t = {time}: norm {norm:e} reached the outer 5% of the y-range with the absorber off")]
    SupportSpill { time: f64, norm: f64 },
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

pub type Result<T> = std::result::Result<T, SimError>;

impl SimError {
    pub fn config(msg: impl Into<String>) -> Self {
        SimError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io { path: path.into(), source }
    }

    /// 2 for configuration problems, 3 for numerical preconditions, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 2,
            SimError::Numerics(quasi_landau_core::Error::Argument(_)) => 3,
            SimError::Numerics(_) | SimError::TimeStep { .. } | SimError::SupportSpill { .. } => 3,
            SimError::Io { .. } | SimError::Csv(_) | SimError::Json(_) => 1,
        }
    }
}
