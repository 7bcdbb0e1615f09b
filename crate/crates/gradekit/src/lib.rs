//! Grading harness: corpus model, prompt rendering, LLM dispatch with a
//! replayable response cache, grade aggregation, and agreement reports.

pub mod aggregation;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod grader;
pub mod prompting;
pub mod report;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
