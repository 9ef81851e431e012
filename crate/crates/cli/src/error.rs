use diadem::AnalysisError;

/// CLI-level errors, split by the exit code they map to: input problems
/// (malformed files, bad configuration) exit with 2, numeric/analysis
/// failures with 3.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input file: line number and reason.
    Parse { file: String, line: usize, reason: String },
    /// A cell that should be numeric is not.
    NonNumericCell { file: String, line: usize, column: String },
    /// Configuration or usage problem.
    Config(String),
    /// I/O failure on an input or output path.
    Io { path: String, source: std::io::Error },
    /// Input validation failure surfaced from the core data model.
    InvalidInput(AnalysisError),
    /// Analysis failure.
    Numeric(AnalysisError),
    /// A factor map was requested for an empty score matrix.
    EmptyScores,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) | CliError::EmptyScores => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse { file, line, reason } => {
                write!(f, "{file}:{line}: {reason}")
            }
            CliError::NonNumericCell { file, line, column } => {
                write!(f, "{file}:{line}: column `{column}` is not numeric")
            }
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::InvalidInput(e) => write!(f, "invalid input: {e}"),
            CliError::Numeric(e) => write!(f, "analysis error: {e}"),
            CliError::EmptyScores => write!(f, "no scores to plot"),
        }
    }
}

impl std::error::Error for CliError {}
