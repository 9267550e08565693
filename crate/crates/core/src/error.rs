use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    SizeCap {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("distance matrix is not a metric: {0}")]
    NotAMetric(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("scales do not merge all points: top scale leaves {classes} classes")]
    ScalesDoNotMerge { classes: usize },

    #[error("radii stop at {last} below the diameter {diameter}")]
    RadiiBelowDiameter { last: String, diameter: String },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("degree precondition fails at level {level}: {detail}")]
    DegreePrecondition { level: u32, detail: String },

    #[error("infeasible partition: {items} items into {parts} parts with sizes in [{lo}, {hi}]")]
    InfeasiblePartition {
        items: usize,
        parts: usize,
        lo: String,
        hi: String,
    },

    #[error("admissible-morphism precondition failed: {0}")]
    Precondition(String),

    #[error("not an asymorphism: {0}")]
    NotAsymorphism(String),

    #[error("truncation exhausted after {steps} step(s): {detail}")]
    Exhausted {
        steps: usize,
        detail: String,
        /// Smallest height that would let the search continue, when it can be
        /// read off the profile's growth.
        suggested_height: Option<u32>,
    },

    #[error("verification of a constructed object failed: {0}")]
    Invariant(String),

    #[error("tower hypothesis fails: {0}")]
    Hypothesis(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn stage(stage: impl Into<String>, source: Error) -> Error {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(source),
        }
    }
}
