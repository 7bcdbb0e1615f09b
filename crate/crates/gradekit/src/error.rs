use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing binding for placeholder {{{{{0}}}}}")]
    MissingBinding(String),

    #[error("unknown placeholder {{{{{0}}}}} in template {1}")]
    UnknownPlaceholder(String, String),

    #[error("condition {condition} {problem}")]
    ConditionRubricMismatch { condition: String, problem: String },

    #[error("questions and answers are misaligned: {0}")]
    MisalignedQuestions(String),

    #[error("backend config invalid: {0}")]
    BadBackendConfig(String),

    #[error("replay cache miss for prompt hash {0}")]
    CacheMiss(String),

    #[error("transport failure after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },

    #[error("backend returned status {status}: {message}")]
    Protocol { status: u16, message: String },

    #[error("backend returned an empty completion")]
    EmptyCompletion,

    #[error("no parsable grade fraction in completion")]
    NoParsableGrade,

    #[error("grade out of range: {0}")]
    GradeOutOfRange(String),

    #[error("no rubric criterion lines found in completion")]
    NoCriterionLines,

    #[error("rubric criteria sum {found} does not match question maximum {expected}")]
    RubricSumMismatch { found: u32, expected: u32 },

    #[error("duplicate grade record for item {item}, rater {rater}")]
    DuplicateRecord { item: String, rater: String },

    #[error("unknown rater id: {0}")]
    UnknownRater(String),

    #[error("grade matrix needs at least 2 complete items, got {0}")]
    TooFewItems(usize),

    #[error("grading {submission_id} under {condition}: {source}")]
    Graded {
        submission_id: String,
        condition: String,
        #[source]
        source: Box<Error>,
    },

    #[error("statistics failure in {analysis}: {source}")]
    Stats {
        analysis: String,
        #[source]
        source: statkit::StatError,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn annotate(self, submission_id: &str, condition: &str) -> Error {
        Error::Graded {
            submission_id: submission_id.to_string(),
            condition: condition.to_string(),
            source: Box::new(self),
        }
    }

    pub fn stats(analysis: &str, source: statkit::StatError) -> Error {
        Error::Stats {
            analysis: analysis.to_string(),
            source,
        }
    }
}
