use thiserror::Error;

pub type Result<T, E = HnetError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HnetError {
    #[error("empty input")]
    EmptyInput,

    #[error("malformed CSV: {0}")]
    MalformedCsv(String),

    #[error("type override names unknown column `{0}`")]
    UnknownOverrideColumn(String),

    #[error("column `{0}` is forced numeric but holds non-numeric value `{1}`")]
    NonNumericOverride(String, String),

    #[error("no category reaches the minimum support of {y_min} rows")]
    NoUsableColumns { y_min: usize },

    #[error("combination enumeration exceeded the budget of {0} candidates")]
    CombinatorialBudgetExceeded(usize),

    #[error("invalid hypergeometric counts N={population} K={successes} n={draws} x={observed}")]
    InvalidCounts {
        population: u64,
        successes: u64,
        draws: u64,
        observed: u64,
    },

    #[error("columns `{0}` and `{1}` share a parent feature")]
    SameFeaturePair(String, String),

    #[error("degenerate split: groups of {0} and {1} rows, at least 2 each required")]
    DegenerateSplit(usize, usize),

    #[error("all numeric values are equal")]
    ConstantValues,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("network has a cycle through `{0}`")]
    CyclicGraph(String),

    #[error("malformed CPT for `{node}`: {reason}")]
    MalformedCpt { node: String, reason: String },

    #[error("node `{node}` lists unknown parent `{parent}`")]
    UnknownParent { node: String, parent: String },

    #[error("duplicate node `{0}`")]
    DuplicateNode(String),

    #[error("graph node `{0}` is not a network variable")]
    UnknownVariable(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),

    #[error("no valid pair to test")]
    NoTestsPerformed,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HnetError {
    /// Stable snake_case identifier for machine-readable error output.
    pub fn code(&self) -> &'static str {
        match self {
            HnetError::EmptyInput => "empty_input",
            HnetError::MalformedCsv(_) => "malformed_csv",
            HnetError::UnknownOverrideColumn(_) => "unknown_override_column",
            HnetError::NonNumericOverride(..) => "non_numeric_override",
            HnetError::NoUsableColumns { .. } => "no_usable_columns",
            HnetError::CombinatorialBudgetExceeded(_) => "combinatorial_budget_exceeded",
            HnetError::InvalidCounts { .. } => "invalid_counts",
            HnetError::SameFeaturePair(..) => "same_feature_pair",
            HnetError::DegenerateSplit(..) => "degenerate_split",
            HnetError::ConstantValues => "constant_values",
            HnetError::LengthMismatch { .. } => "length_mismatch",
            HnetError::CyclicGraph(_) => "cyclic_graph",
            HnetError::MalformedCpt { .. } => "malformed_cpt",
            HnetError::UnknownParent { .. } => "unknown_parent",
            HnetError::DuplicateNode(_) => "duplicate_node",
            HnetError::UnknownVariable(_) => "unknown_variable",
            HnetError::DimensionMismatch(..) => "dimension_mismatch",
            HnetError::UnsupportedFormat(_) => "unsupported_format",
            HnetError::NoTestsPerformed => "no_tests_performed",
            HnetError::InvalidConfig(_) => "invalid_config",
            HnetError::Json(_) => "json",
            HnetError::Io(_) => "io",
        }
    }
}
