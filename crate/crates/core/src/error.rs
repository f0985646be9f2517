use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the estimation stack can report.
///
/// Variants fall into three families that map onto CLI exit codes: bad
/// configuration (1), bad data (2) and numerical degeneracy (3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("regressors are collinear; dependent columns: {}", columns.join(", "))]
    Collinearity { columns: Vec<String> },

    #[error("not enough degrees of freedom: {n} observations for {k} parameters")]
    DegreesOfFreedom { n: usize, k: usize },

    #[error("cluster-robust inference needs at least 2 clusters, found {found}")]
    ClusterCount { found: usize },

    #[error("degenerate first stage: {0}")]
    DegenerateFirstStage(String),

    #[error("singular variance matrix: {0}")]
    SingularVCov(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("bootstrap unstable: {dropped} of {reps} replicates dropped")]
    BootstrapInstability { dropped: usize, reps: usize },

    #[error("alpha = {0} has no tabulated tF critical values (supported: 0.05, 0.01)")]
    UnsupportedAlpha(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Broad failure class, used for exit codes and report annotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::Precondition(_) | Error::UnsupportedAlpha(_) => {
                ErrorClass::Config
            }
            Error::Parse { .. } | Error::Io { .. } | Error::ClusterCount { .. } => ErrorClass::Data,
            Error::Collinearity { .. }
            | Error::DegreesOfFreedom { .. }
            | Error::DegenerateFirstStage(_)
            | Error::SingularVCov(_)
            | Error::BootstrapInstability { .. } => ErrorClass::Numerical,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Config => 1,
            ErrorClass::Data => 2,
            ErrorClass::Numerical => 3,
        }
    }

    /// Short machine-readable tag, e.g. `"collinearity"`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Collinearity { .. } => "collinearity",
            Error::DegreesOfFreedom { .. } => "degrees_of_freedom",
            Error::ClusterCount { .. } => "cluster_count",
            Error::DegenerateFirstStage(_) => "degenerate_first_stage",
            Error::SingularVCov(_) => "singular_vcov",
            Error::Precondition(_) => "precondition",
            Error::BootstrapInstability { .. } => "bootstrap_instability",
            Error::UnsupportedAlpha(_) => "unsupported_alpha",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
