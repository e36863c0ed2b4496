use thiserror::Error;

/// Exit codes: 0 ok, 1 verification failure, 2 non-compact embedding,
/// 3 uncovered or tie, 4 usage error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_NONCOMPACT: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] widthcalc::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => EXIT_VERIFY,
        }
    }
}
