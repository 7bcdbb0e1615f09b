//! Assessment data model: courses, questions, rubrics, model answers and
//! submissions, loaded from a directory bundle of TOML documents and
//! validated for referential integrity.
//!
//! The corpus is immutable after load and safe to share read-only across
//! grader threads.

mod load;

pub use load::{
    lint_corpus, load_corpus, load_instructor_grades, load_peer_scores, write_ai_rubrics,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Course {
    pub id: String,
    pub title: String,
    /// free text describing the audience; embedded in rubric-generation prompts
    pub audience_note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordGuidance {
    pub min: u32,
    pub max: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub course_id: String,
    pub prompt_text: String,
    pub max_points: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_guidance: Option<WordGuidance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RubricOrigin {
    Instructor,
    AiGenerated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubricLevel {
    pub points: u32,
    pub descriptor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubricCriterion {
    pub label: String,
    pub description: String,
    /// point levels, highest first by convention in the bundled documents
    pub levels: Vec<RubricLevel>,
}

impl RubricCriterion {
    pub fn max_points(&self) -> u32 {
        self.levels.iter().map(|l| l.points).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rubric {
    pub question_id: String,
    pub origin: RubricOrigin,
    pub criteria: Vec<RubricCriterion>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelAnswer {
    pub question_id: String,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Submission {
    pub id: String,
    pub question_id: String,
    /// opaque de-identified learner token
    pub student_alias: String,
    pub text: String,
}

/// Sum of the criteria maxima; equals the question's max_points for every
/// valid rubric.
pub fn question_max_points(rubric: &Rubric) -> u32 {
    rubric.criteria.iter().map(|c| c.max_points()).sum()
}

/// 100·awarded/max at full precision. Rounding is a display concern.
pub fn normalize_score(awarded: f64, max: u32) -> Result<f64> {
    if max < 1 {
        return Err(Error::Domain(format!("max must be >= 1, got {max}")));
    }
    if !(0.0..=max as f64).contains(&awarded) {
        return Err(Error::Domain(format!(
            "awarded {awarded} outside [0, {max}]"
        )));
    }
    Ok(100.0 * awarded / max as f64)
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub courses: BTreeMap<String, Course>,
    pub questions: BTreeMap<String, Question>,
    /// keyed by (question id, origin); exactly one instructor rubric per
    /// question, at most one AI-generated one
    pub rubrics: BTreeMap<(String, RubricOrigin), Rubric>,
    pub model_answers: BTreeMap<String, ModelAnswer>,
    pub submissions: BTreeMap<String, Submission>,
}

impl Corpus {
    pub fn rubric(&self, question_id: &str, origin: RubricOrigin) -> Option<&Rubric> {
        self.rubrics.get(&(question_id.to_string(), origin))
    }

    pub fn instructor_rubric(&self, question_id: &str) -> Option<&Rubric> {
        self.rubric(question_id, RubricOrigin::Instructor)
    }

    pub fn ai_rubric(&self, question_id: &str) -> Option<&Rubric> {
        self.rubric(question_id, RubricOrigin::AiGenerated)
    }

    pub fn model_answer(&self, question_id: &str) -> Option<&ModelAnswer> {
        self.model_answers.get(question_id)
    }

    /// Questions of a course, ordered by id.
    pub fn questions_for_course(&self, course_id: &str) -> Vec<&Question> {
        self.questions
            .values()
            .filter(|q| q.course_id == course_id)
            .collect()
    }

    /// Submissions ordered by (course, question, submission id).
    pub fn submissions_ordered(&self) -> Vec<&Submission> {
        let mut subs: Vec<&Submission> = self.submissions.values().collect();
        subs.sort_by_key(|s| {
            let q = &self.questions[&s.question_id];
            (q.course_id.clone(), s.question_id.clone(), s.id.clone())
        });
        subs
    }

    pub fn question(&self, id: &str) -> Result<&Question> {
        self.questions
            .get(id)
            .ok_or_else(|| Error::Integrity(format!("unknown question id {id}")))
    }

    /// Full integrity pass; every error names the offending id.
    pub fn validate(&self) -> Result<()> {
        if self.courses.is_empty() {
            return Err(Error::Integrity("corpus has no courses".into()));
        }
        for c in self.courses.values() {
            if c.title.trim().is_empty() {
                return Err(Error::Integrity(format!("course {} has an empty title", c.id)));
            }
        }
        for q in self.questions.values() {
            if !self.courses.contains_key(&q.course_id) {
                return Err(Error::Integrity(format!(
                    "question {} references unknown course {}",
                    q.id, q.course_id
                )));
            }
            if q.max_points < 1 {
                return Err(Error::Integrity(format!(
                    "question {} has max_points {}, need >= 1",
                    q.id, q.max_points
                )));
            }
            if let Some(g) = &q.word_guidance {
                if g.min > g.max {
                    return Err(Error::Integrity(format!(
                        "question {} word guidance min {} exceeds max {}",
                        q.id, g.min, g.max
                    )));
                }
            }
            if self.instructor_rubric(&q.id).is_none() {
                return Err(Error::Integrity(format!(
                    "question {} has no instructor rubric",
                    q.id
                )));
            }
            if self.model_answer(&q.id).is_none() {
                return Err(Error::Integrity(format!(
                    "question {} has no model answer",
                    q.id
                )));
            }
        }
        for ((qid, _), rubric) in &self.rubrics {
            let question = self
                .questions
                .get(qid)
                .ok_or_else(|| Error::Integrity(format!("rubric references unknown question {qid}")))?;
            validate_rubric(rubric, question)?;
        }
        for a in self.model_answers.values() {
            if !self.questions.contains_key(&a.question_id) {
                return Err(Error::Integrity(format!(
                    "model answer references unknown question {}",
                    a.question_id
                )));
            }
            if a.text.trim().is_empty() {
                return Err(Error::Integrity(format!(
                    "model answer for {} is empty",
                    a.question_id
                )));
            }
        }
        for s in self.submissions.values() {
            if !self.questions.contains_key(&s.question_id) {
                return Err(Error::Integrity(format!(
                    "submission {} references unknown question {}",
                    s.id, s.question_id
                )));
            }
            if s.text.trim().is_empty() {
                return Err(Error::Integrity(format!("submission {} has empty text", s.id)));
            }
        }
        Ok(())
    }
}

pub(crate) fn validate_rubric(rubric: &Rubric, question: &Question) -> Result<()> {
    if rubric.criteria.is_empty() {
        return Err(Error::Integrity(format!(
            "rubric for {} has no criteria",
            rubric.question_id
        )));
    }
    for c in &rubric.criteria {
        if c.levels.is_empty() {
            return Err(Error::Integrity(format!(
                "criterion '{}' of {} has no levels",
                c.label, rubric.question_id
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &c.levels {
            if !seen.insert(l.points) {
                return Err(Error::Integrity(format!(
                    "criterion '{}' of {} repeats the {}-point level",
                    c.label, rubric.question_id, l.points
                )));
            }
        }
        if c.max_points() < 1 {
            return Err(Error::Integrity(format!(
                "criterion '{}' of {} has maximum level {} points, need >= 1",
                c.label,
                rubric.question_id,
                c.max_points()
            )));
        }
    }
    let sum = question_max_points(rubric);
    if sum != question.max_points {
        return Err(Error::Integrity(format!(
            "rubric criteria for {} sum to {sum} but the question is worth {}",
            question.id, question.max_points
        )));
    }
    Ok(())
}
