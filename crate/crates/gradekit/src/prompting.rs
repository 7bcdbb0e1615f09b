//! Prompt rendering: the three grading prompt conditions and the
//! rubric-generation prompt, built from corpus entities through a
//! double-brace placeholder template system.
//!
//! Rendering is byte-deterministic substitution with no escaping or
//! trimming; downstream grade extraction relies on the templates' trailing
//! "Grade:" cue.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Course, ModelAnswer, Question, Rubric, RubricOrigin, Submission};
use crate::{Error, Result};

/// The three grading prompt recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptCondition {
    /// model answer only
    AnswerOnly,
    /// model answer plus the instructor rubric
    AnswerPlusRubric,
    /// model answer plus an AI-generated rubric
    AiRubricPlusAnswer,
}

impl PromptCondition {
    pub const ALL: [PromptCondition; 3] = [
        PromptCondition::AnswerOnly,
        PromptCondition::AnswerPlusRubric,
        PromptCondition::AiRubricPlusAnswer,
    ];

    pub fn index(&self) -> u8 {
        match self {
            PromptCondition::AnswerOnly => 1,
            PromptCondition::AnswerPlusRubric => 2,
            PromptCondition::AiRubricPlusAnswer => 3,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(PromptCondition::AnswerOnly),
            2 => Ok(PromptCondition::AnswerPlusRubric),
            3 => Ok(PromptCondition::AiRubricPlusAnswer),
            other => Err(Error::Domain(format!("condition must be 1, 2 or 3, got {other}"))),
        }
    }

    /// Rater column id used in grade matrices and reports.
    pub fn rater_id(&self) -> &'static str {
        match self {
            PromptCondition::AnswerOnly => "llm_p1",
            PromptCondition::AnswerPlusRubric => "llm_p2",
            PromptCondition::AiRubricPlusAnswer => "llm_p3",
        }
    }
}

impl fmt::Display for PromptCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.index())
    }
}

/// What a rendered prompt is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    Grading(PromptCondition),
    RubricGeneration,
}

const ALLOWED_PLACEHOLDERS: [&str; 8] = [
    "question",
    "model_answer",
    "rubric",
    "student_answer",
    "max_points",
    "course_title",
    "audience_note",
    "score_breakdown",
];

#[derive(Debug, Clone)]
pub struct PromptTemplate {
    pub name: String,
    pub body: String,
}

impl PromptTemplate {
    pub fn new(name: &str, body: &str) -> Result<Self> {
        for ph in placeholders(body) {
            if !ALLOWED_PLACEHOLDERS.contains(&ph.as_str()) {
                return Err(Error::UnknownPlaceholder(ph, name.to_string()));
            }
        }
        Ok(PromptTemplate {
            name: name.to_string(),
            body: body.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "template".to_string());
        PromptTemplate::new(&name, &body)
    }
}

/// The bundled template files, loaded from one directory.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub answer_only: PromptTemplate,
    pub answer_plus_rubric: PromptTemplate,
    pub ai_rubric_plus_answer: PromptTemplate,
    pub rubric_generation: PromptTemplate,
}

impl TemplateSet {
    pub fn load(dir: &Path) -> Result<Self> {
        Ok(TemplateSet {
            answer_only: PromptTemplate::load(&dir.join("grade_answer_only.txt"))?,
            answer_plus_rubric: PromptTemplate::load(&dir.join("grade_answer_plus_rubric.txt"))?,
            ai_rubric_plus_answer: PromptTemplate::load(
                &dir.join("grade_ai_rubric_plus_answer.txt"),
            )?,
            rubric_generation: PromptTemplate::load(&dir.join("rubric_generation.txt"))?,
        })
    }

    pub fn for_condition(&self, condition: PromptCondition) -> &PromptTemplate {
        match condition {
            PromptCondition::AnswerOnly => &self.answer_only,
            PromptCondition::AnswerPlusRubric => &self.answer_plus_rubric,
            PromptCondition::AiRubricPlusAnswer => &self.ai_rubric_plus_answer,
        }
    }

    pub fn names(&self) -> Vec<String> {
        vec![
            self.answer_only.name.clone(),
            self.answer_plus_rubric.name.clone(),
            self.ai_rubric_plus_answer.name.clone(),
            self.rubric_generation.name.clone(),
        ]
    }
}

/// Identity of the backend that a prompt is destined for; part of the
/// content hash so cached responses never leak across models or decoding
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendFingerprint {
    pub backend_id: String,
    pub model_id: String,
    pub temperature: f64,
}

/// A fully rendered prompt, the unit of dispatch and caching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptArtifact {
    pub kind: PromptKind,
    pub text: String,
    /// hex SHA-256 over (backend id, model id, temperature, text)
    pub content_hash: String,
}

pub fn content_hash(fingerprint: &BackendFingerprint, text: &str) -> String {
    let mut h = Sha256::new();
    h.update(fingerprint.backend_id.as_bytes());
    h.update([0u8]);
    h.update(fingerprint.model_id.as_bytes());
    h.update([0u8]);
    h.update(format!("{}", fingerprint.temperature).as_bytes());
    h.update([0u8]);
    h.update(text.as_bytes());
    hex::encode(h.finalize())
}

fn placeholders(body: &str) -> Vec<String> {
    let re = regex::Regex::new(r"\{\{([a-z_]+)\}\}").expect("static regex");
    re.captures_iter(body).map(|c| c[1].to_string()).collect()
}

/// Byte-deterministic placeholder substitution. Every placeholder in the
/// body must be bound; bound text is inserted verbatim.
pub fn render(template: &PromptTemplate, bindings: &BTreeMap<&str, String>) -> Result<String> {
    let mut out = String::with_capacity(template.body.len());
    let mut rest = template.body.as_str();
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let end = after.find("}}").ok_or_else(|| {
            Error::UnknownPlaceholder("unterminated {{".into(), template.name.clone())
        })?;
        let name = &after[..end];
        match bindings.get(name) {
            Some(value) => out.push_str(value),
            None => return Err(Error::MissingBinding(name.to_string())),
        }
        rest = &after[end + 2..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Rubric block rendered as prose: each criterion's description followed by
/// its point levels, highest first.
pub fn render_rubric_prose(rubric: &Rubric) -> String {
    let mut blocks = Vec::new();
    for c in &rubric.criteria {
        let mut levels = c.levels.clone();
        levels.sort_by_key(|l| std::cmp::Reverse(l.points));
        let mut lines = vec![c.description.clone()];
        for l in levels {
            let unit = if l.points == 1 { "point" } else { "points" };
            lines.push(format!("{} {unit}: {}", l.points, l.descriptor));
        }
        blocks.push(lines.join("\n\n"));
    }
    blocks.join("\n\n")
}

/// Render one grading prompt for a submission under the given condition.
pub fn build_grading_prompt(
    condition: PromptCondition,
    question: &Question,
    answer: &ModelAnswer,
    rubric: Option<&Rubric>,
    submission: &Submission,
    template: &PromptTemplate,
    fingerprint: &BackendFingerprint,
) -> Result<PromptArtifact> {
    match (condition, rubric) {
        (PromptCondition::AnswerOnly, Some(_)) => {
            return Err(Error::ConditionRubricMismatch {
                condition: "1 (answer only)".into(),
                problem: "forbids a rubric but one was supplied".into(),
            })
        }
        (PromptCondition::AnswerPlusRubric, None) => {
            return Err(Error::ConditionRubricMismatch {
                condition: "2 (answer plus rubric)".into(),
                problem: "requires an instructor rubric".into(),
            })
        }
        (PromptCondition::AnswerPlusRubric, Some(r)) if r.origin != RubricOrigin::Instructor => {
            return Err(Error::ConditionRubricMismatch {
                condition: "2 (answer plus rubric)".into(),
                problem: "requires an instructor-origin rubric".into(),
            })
        }
        (PromptCondition::AiRubricPlusAnswer, None) => {
            return Err(Error::ConditionRubricMismatch {
                condition: "3 (AI rubric plus answer)".into(),
                problem: "requires an AI-generated rubric".into(),
            })
        }
        (PromptCondition::AiRubricPlusAnswer, Some(r)) if r.origin != RubricOrigin::AiGenerated => {
            return Err(Error::ConditionRubricMismatch {
                condition: "3 (AI rubric plus answer)".into(),
                problem: "requires an AI-generated rubric, got an instructor one".into(),
            })
        }
        _ => {}
    }

    let mut bindings: BTreeMap<&str, String> = BTreeMap::new();
    bindings.insert("question", question.prompt_text.clone());
    bindings.insert("model_answer", answer.text.clone());
    bindings.insert("student_answer", submission.text.clone());
    bindings.insert("max_points", question.max_points.to_string());
    if let Some(r) = rubric {
        bindings.insert("rubric", render_rubric_prose(r));
    }
    let text = render(template, &bindings)?;
    Ok(PromptArtifact {
        kind: PromptKind::Grading(condition),
        content_hash: content_hash(fingerprint, &text),
        text,
    })
}

/// Render the rubric-generation prompt for one course: score breakdown
/// sentence plus every question/model-answer pair with its full-score line.
pub fn build_rubric_prompt(
    course: &Course,
    questions: &[&Question],
    answers: &[&ModelAnswer],
    template: &PromptTemplate,
    fingerprint: &BackendFingerprint,
) -> Result<PromptArtifact> {
    if questions.is_empty() {
        return Err(Error::MisalignedQuestions("no questions supplied".into()));
    }
    if questions.len() != answers.len() {
        return Err(Error::MisalignedQuestions(format!(
            "{} questions but {} answers",
            questions.len(),
            answers.len()
        )));
    }
    for (q, a) in questions.iter().zip(answers) {
        if q.id != a.question_id {
            return Err(Error::MisalignedQuestions(format!(
                "answer for {} paired with question {}",
                a.question_id, q.id
            )));
        }
    }

    let breakdown = {
        let parts: Vec<String> = questions
            .iter()
            .enumerate()
            .map(|(i, q)| format!("the score for Question {} is {}", i + 1, q.max_points))
            .collect();
        match parts.len() {
            1 => parts[0].clone(),
            _ => {
                let (last, init) = parts.split_last().expect("non-empty");
                format!("{}, and {}", init.join(", "), last)
            }
        }
    };

    let qa_block = questions
        .iter()
        .zip(answers)
        .enumerate()
        .map(|(i, (q, a))| {
            format!(
                "Question {n}:\n\n{q}\n\nAnswer {n}:\n\n{a}\n\nFull Score: {m}/{m}",
                n = i + 1,
                q = q.prompt_text,
                a = a.text,
                m = q.max_points
            )
        })
        .collect::<Vec<_>>()
        .join("\n\n");

    let mut bindings: BTreeMap<&str, String> = BTreeMap::new();
    bindings.insert("course_title", course.title.clone());
    bindings.insert("audience_note", course.audience_note.clone());
    bindings.insert("score_breakdown", breakdown);
    bindings.insert("question", qa_block);
    let text = render(template, &bindings)?;
    Ok(PromptArtifact {
        kind: PromptKind::RubricGeneration,
        content_hash: content_hash(fingerprint, &text),
        text,
    })
}
