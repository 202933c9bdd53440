use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}:{line}: {msg}", file.display())]
    Parse {
        file: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("degenerate country series: {country} has no deaths in the analysis window")]
    DegenerateSeries { country: String },

    #[error("insufficient troughs: found {found} qualifying minima, need {needed}")]
    InsufficientTroughs { found: usize, needed: usize },

    #[error("empty phase for country {country} (phase {phase})")]
    EmptyPhase { country: String, phase: usize },

    #[error("wave detection failed: {}", .0.join("; "))]
    WaveFailures(Vec<String>),

    #[error("empty day set for {country} ({index})")]
    EmptyDaySet { country: String, index: &'static str },

    #[error("degenerate variance")]
    DegenerateVariance,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("not enough observations: {0}")]
    TooFewObservations(String),

    #[error("bootstrap failed to converge: {0} undefined resamples")]
    BootstrapNoConvergence(usize),

    #[error("no nonzero differences")]
    NoNonzeroDifferences,

    #[error("rank deficient design, collinear columns: {}", .0.join(", "))]
    RankDeficient(Vec<String>),

    #[error("exposure absorbed by fixed effects")]
    ExposureAbsorbed,

    #[error("empty lagged panel for lag {0}")]
    EmptyPanel(i32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by malformed or inconsistent input files.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Validation(_) | Error::Consistency(_) | Error::Io { .. }
        )
    }
}
