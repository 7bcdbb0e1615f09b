//! Grade one submission end to end: render the prompt for a condition,
//! resolve it through the backend/cache, and parse the completion.

mod backend;
mod cache;
mod parse;

pub use backend::{dispatch, timestamp_now, BackendConfig, BackendKind, RawResponse};
pub use cache::{CacheRecord, ResponseCache, CACHE_FILE};
pub use parse::{
    extract_grade, parse_ai_rubric, render_rubric_listing, split_rubric_sections,
    strip_leading_grade, GradeFlags,
};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, RubricOrigin, Submission};
use crate::prompting::{build_grading_prompt, PromptCondition, TemplateSet};
use crate::{Error, Result};

/// One parsed grade for one submission under one prompt condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeResult {
    pub submission_id: String,
    pub condition: PromptCondition,
    pub awarded: f64,
    pub max: u32,
    pub rationale: String,
    pub prompt_hash: String,
    pub flags: GradeFlags,
}

/// Compose prompt rendering, dispatch and grade extraction for one
/// submission. Errors are annotated with the submission id and condition.
pub fn grade_submission(
    submission: &Submission,
    condition: PromptCondition,
    corpus: &Corpus,
    templates: &TemplateSet,
    config: &BackendConfig,
    cache: &ResponseCache,
) -> Result<GradeResult> {
    grade_inner(submission, condition, corpus, templates, config, cache)
        .map_err(|e| e.annotate(&submission.id, &condition.to_string()))
}

fn grade_inner(
    submission: &Submission,
    condition: PromptCondition,
    corpus: &Corpus,
    templates: &TemplateSet,
    config: &BackendConfig,
    cache: &ResponseCache,
) -> Result<GradeResult> {
    let question = corpus.question(&submission.question_id)?;
    let answer = corpus
        .model_answer(&question.id)
        .ok_or_else(|| Error::Integrity(format!("question {} has no model answer", question.id)))?;
    let rubric = match condition {
        PromptCondition::AnswerOnly => None,
        PromptCondition::AnswerPlusRubric => corpus.instructor_rubric(&question.id),
        PromptCondition::AiRubricPlusAnswer => {
            Some(corpus.rubric(&question.id, RubricOrigin::AiGenerated).ok_or_else(|| {
                Error::ConditionRubricMismatch {
                    condition: "3 (AI rubric plus answer)".into(),
                    problem: format!(
                        "no AI-generated rubric exists for question {}",
                        question.id
                    ),
                }
            })?)
        }
    };

    let artifact = build_grading_prompt(
        condition,
        question,
        answer,
        rubric,
        submission,
        templates.for_condition(condition),
        &config.fingerprint(),
    )?;
    let response = dispatch(&artifact, config, cache)?;
    let (awarded, max, flags) = extract_grade(&response.text, question.max_points)?;
    Ok(GradeResult {
        submission_id: submission.id.clone(),
        condition,
        awarded,
        max,
        rationale: strip_leading_grade(&response.text).to_string(),
        prompt_hash: artifact.content_hash,
        flags,
    })
}
