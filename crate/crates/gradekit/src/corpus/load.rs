//! Corpus bundle loading.
//!
//! A bundle is a directory of TOML documents: `courses.toml`,
//! `questions.toml`, `rubrics.toml`, `model_answers.toml`,
//! `submissions.toml`, plus optional `ai_rubrics.toml` (written by the
//! rubric-generation command), `peer_scores.toml` and
//! `instructor_grades.toml`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::{Corpus, Course, ModelAnswer, Question, Rubric, Submission};
use crate::aggregation::PeerScoreSet;
use crate::{Error, Result};

#[derive(Deserialize)]
struct CoursesDoc {
    #[serde(default)]
    courses: Vec<Course>,
}

#[derive(Deserialize)]
struct QuestionsDoc {
    #[serde(default)]
    questions: Vec<Question>,
}

#[derive(Deserialize, serde::Serialize)]
struct RubricsDoc {
    #[serde(default)]
    rubrics: Vec<Rubric>,
}

#[derive(Deserialize)]
struct ModelAnswersDoc {
    #[serde(default)]
    model_answers: Vec<ModelAnswer>,
}

#[derive(Deserialize)]
struct SubmissionsDoc {
    #[serde(default)]
    submissions: Vec<Submission>,
}

#[derive(Deserialize)]
struct PeerScoresDoc {
    #[serde(default)]
    peer_scores: Vec<PeerScoreSet>,
}

#[derive(Deserialize)]
struct InstructorGradesDoc {
    #[serde(default)]
    instructor_grades: Vec<InstructorGrade>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct InstructorGrade {
    pub submission_id: String,
    pub awarded: f64,
}

pub(crate) fn read_doc<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        // toml errors carry line/column context in their message
        message: e.to_string(),
    })
}

fn insert_unique<V>(map: &mut BTreeMap<String, V>, id: &str, value: V, kind: &str) -> Result<()> {
    if map.insert(id.to_string(), value).is_some() {
        return Err(Error::Integrity(format!("duplicate {kind} id {id}")));
    }
    Ok(())
}

/// Load and fully validate a corpus bundle.
pub fn load_corpus(dir: &Path) -> Result<Corpus> {
    let mut corpus = Corpus::default();

    let courses: CoursesDoc = read_doc(&dir.join("courses.toml"))?;
    for c in courses.courses {
        insert_unique(&mut corpus.courses, &c.id.clone(), c, "course")?;
    }
    let questions: QuestionsDoc = read_doc(&dir.join("questions.toml"))?;
    for q in questions.questions {
        insert_unique(&mut corpus.questions, &q.id.clone(), q, "question")?;
    }
    let mut rubric_docs: Vec<Rubric> = read_doc::<RubricsDoc>(&dir.join("rubrics.toml"))?.rubrics;
    let ai_path = dir.join("ai_rubrics.toml");
    if ai_path.exists() {
        rubric_docs.extend(read_doc::<RubricsDoc>(&ai_path)?.rubrics);
    }
    for r in rubric_docs {
        let key = (r.question_id.clone(), r.origin);
        if corpus.rubrics.insert(key, r.clone()).is_some() {
            return Err(Error::Integrity(format!(
                "duplicate {:?} rubric for question {}",
                r.origin, r.question_id
            )));
        }
    }
    let answers: ModelAnswersDoc = read_doc(&dir.join("model_answers.toml"))?;
    for a in answers.model_answers {
        insert_unique(&mut corpus.model_answers, &a.question_id.clone(), a, "model answer")?;
    }
    let subs: SubmissionsDoc = read_doc(&dir.join("submissions.toml"))?;
    for s in subs.submissions {
        insert_unique(&mut corpus.submissions, &s.id.clone(), s, "submission")?;
    }

    corpus.validate()?;
    Ok(corpus)
}

/// Load peer score sets from the bundle and validate them against the corpus.
pub fn load_peer_scores(dir: &Path, corpus: &Corpus) -> Result<BTreeMap<String, PeerScoreSet>> {
    let doc: PeerScoresDoc = read_doc(&dir.join("peer_scores.toml"))?;
    let mut out = BTreeMap::new();
    for ps in doc.peer_scores {
        let sub = corpus.submissions.get(&ps.submission_id).ok_or_else(|| {
            Error::Integrity(format!(
                "peer scores reference unknown submission {}",
                ps.submission_id
            ))
        })?;
        let max = corpus.question(&sub.question_id)?.max_points;
        if ps.scores.is_empty() || ps.scores.len() > 8 {
            return Err(Error::Integrity(format!(
                "submission {} has {} peer scores, expected 1..=8",
                ps.submission_id,
                ps.scores.len()
            )));
        }
        for &s in &ps.scores {
            if !(0.0..=max as f64).contains(&s) {
                return Err(Error::Integrity(format!(
                    "peer score {s} for {} outside [0, {max}]",
                    ps.submission_id
                )));
            }
        }
        if out.insert(ps.submission_id.clone(), ps).is_some() {
            return Err(Error::Integrity("duplicate peer score record".into()));
        }
    }
    Ok(out)
}

/// Load instructor grades from the bundle, validated against question maxima.
pub fn load_instructor_grades(dir: &Path, corpus: &Corpus) -> Result<BTreeMap<String, f64>> {
    let doc: InstructorGradesDoc = read_doc(&dir.join("instructor_grades.toml"))?;
    let mut out = BTreeMap::new();
    for g in doc.instructor_grades {
        let sub = corpus.submissions.get(&g.submission_id).ok_or_else(|| {
            Error::Integrity(format!(
                "instructor grade references unknown submission {}",
                g.submission_id
            ))
        })?;
        let max = corpus.question(&sub.question_id)?.max_points;
        if !(0.0..=max as f64).contains(&g.awarded) {
            return Err(Error::Integrity(format!(
                "instructor grade {} for {} outside [0, {max}]",
                g.awarded, g.submission_id
            )));
        }
        if out.insert(g.submission_id.clone(), g.awarded).is_some() {
            return Err(Error::Integrity(format!(
                "duplicate instructor grade for {}",
                g.submission_id
            )));
        }
    }
    Ok(out)
}

/// Write (or replace) the bundle's AI-generated rubric document.
pub fn write_ai_rubrics(dir: &Path, rubrics: &[Rubric]) -> Result<()> {
    let doc = RubricsDoc {
        rubrics: rubrics.to_vec(),
    };
    let body = toml::to_string_pretty(&doc).map_err(|e| Error::Parse {
        path: dir.join("ai_rubrics.toml").display().to_string(),
        message: e.to_string(),
    })?;
    std::fs::write(dir.join("ai_rubrics.toml"), body)?;
    Ok(())
}

/// Non-fatal findings: word counts outside a question's guidance.
/// Guidance is advisory only and never enforced.
pub fn lint_corpus(corpus: &Corpus) -> Vec<String> {
    let mut lints = Vec::new();
    for s in corpus.submissions_ordered() {
        let q = &corpus.questions[&s.question_id];
        if let Some(g) = &q.word_guidance {
            let words = s.text.split_whitespace().count() as u32;
            if words < g.min || words > g.max {
                lints.push(format!(
                    "submission {}: {words} words, guidance {}-{}",
                    s.id, g.min, g.max
                ));
            }
        }
    }
    lints
}
