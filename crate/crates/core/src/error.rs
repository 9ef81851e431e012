use thiserror::Error;

/// Errors produced by table construction, preprocessing and the analyses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("column `{column}`{} has zero weighted variance", block_suffix(.block))]
    ZeroVarianceColumn {
        column: String,
        block: Option<String>,
    },

    #[error("negative entry at row `{row}`, column `{column}`")]
    NegativeEntry { row: String, column: String },

    #[error("entry at row `{row}`, column `{column}` is not finite")]
    NonFiniteEntry { row: String, column: String },

    #[error("label `{label}` appears more than once")]
    DuplicateLabel { label: String },

    #[error("group `{group}` is empty")]
    EmptyGroup { group: String },

    #[error("block row counts sum to {sum} but the table has {n} rows")]
    BlockSizeMismatch { sum: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("column labels or metric do not match: {0}")]
    ColumnMismatch(String),

    #[error("rows do not match: {0}")]
    RowMismatch(String),

    #[error("axis {axis} has a null eigenvalue and cannot be rescaled")]
    NullEigenvalue { axis: usize },

    #[error("table `{table}` has zero vector variance")]
    ZeroVarianceTable { table: String },

    #[error("weights are invalid: {0}")]
    InvalidWeights(String),

    #[error("need at least {needed} tables, got {got}")]
    NotEnoughTables { needed: usize, got: usize },

    #[error("need at least 2 groups, got {got}")]
    NotEnoughGroups { got: usize },
}

fn block_suffix(block: &Option<String>) -> String {
    match block {
        Some(b) => format!(" of block `{b}`"),
        None => String::new(),
    }
}

/// Non-fatal conditions surfaced alongside results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// A table fed to an analysis that expects centered columns was not centered.
    NotCentered { table: String },
    /// The dominant interstructure eigenvector has entries of both signs,
    /// so the compromise mixes tables with opposite orientations.
    MixedSignEigenvector,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::NotCentered { table } => {
                write!(f, "table `{table}` does not have weighted column means of zero")
            }
            Warning::MixedSignEigenvector => {
                write!(f, "dominant interstructure eigenvector has mixed signs; table weights are not all positive")
            }
        }
    }
}
