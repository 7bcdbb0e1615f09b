//! Peer-grading rules, the items × raters grade matrix, and per-item
//! difference series.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_score, Corpus};
use crate::{Error, Result};

/// Raw peer scores for one submission plus whether the author did their
/// own reviewing duty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeerScoreSet {
    pub submission_id: String,
    pub scores: Vec<f64>,
    pub reviewer_participated: bool,
}

/// How the median of an even number of peer scores is taken. The platform
/// convention is not observable from the data, so it stays configurable
/// and is recorded in report manifests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MedianConvention {
    /// mean of the two central order statistics (default)
    MeanPair,
    Lower,
    Upper,
}

impl MedianConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            MedianConvention::MeanPair => "mean_pair",
            MedianConvention::Lower => "lower",
            MedianConvention::Upper => "upper",
        }
    }
}

impl std::str::FromStr for MedianConvention {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mean_pair" => Ok(MedianConvention::MeanPair),
            "lower" => Ok(MedianConvention::Lower),
            "upper" => Ok(MedianConvention::Upper),
            other => Err(format!("unknown median convention: {other}")),
        }
    }
}

/// Final peer grade: median of the received scores, cut by 20% when the
/// author skipped peer reviewing, clamped to [0, max].
pub fn peer_final_grade(
    peers: &PeerScoreSet,
    max: u32,
    convention: MedianConvention,
) -> Result<f64> {
    if peers.scores.is_empty() {
        return Err(Error::Domain(format!(
            "submission {} has an empty peer score list",
            peers.submission_id
        )));
    }
    let mut sorted = peers.scores.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite peer score"));
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        match convention {
            MedianConvention::MeanPair => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
            MedianConvention::Lower => sorted[n / 2 - 1],
            MedianConvention::Upper => sorted[n / 2],
        }
    };
    let graded = if peers.reviewer_participated {
        median
    } else {
        median * 0.8
    };
    Ok(graded.clamp(0.0, max as f64))
}

/// One rater's score for one submission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeRecord {
    pub submission_id: String,
    /// rater column id: "instructor", "peer_median", "llm_p1", …
    pub rater: String,
    pub awarded: f64,
    pub max: u32,
}

/// Complete items × raters table of normalized percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeMatrix {
    pub item_ids: Vec<String>,
    pub rater_ids: Vec<String>,
    /// `values[item][rater]`, all in [0, 100]
    pub values: Vec<Vec<f64>>,
    pub course_of_item: Vec<String>,
    pub question_of_item: Vec<String>,
}

impl GradeMatrix {
    pub fn rater_index(&self, rater: &str) -> Result<usize> {
        self.rater_ids
            .iter()
            .position(|r| r == rater)
            .ok_or_else(|| Error::UnknownRater(rater.to_string()))
    }

    pub fn column(&self, rater: &str) -> Result<Vec<f64>> {
        let j = self.rater_index(rater)?;
        Ok(self.values.iter().map(|row| row[j]).collect())
    }
}

/// Matrix plus the raw (point-scale) table and the listwise-deletion
/// warning ledger.
#[derive(Debug, Clone)]
pub struct MatrixBundle {
    pub matrix: GradeMatrix,
    /// raw awarded points aligned with `matrix.values`
    pub raw: Vec<Vec<f64>>,
    pub max_of_item: Vec<u32>,
    /// items dropped because a rater was missing
    pub dropped: Vec<String>,
}

/// Assemble the grade matrix from per-rater records.
///
/// Items missing any requested rater are excluded (listwise deletion) and
/// listed in the warning ledger; duplicates are an error. Item order is
/// (course, question, submission id).
pub fn build_grade_matrix(
    records: &[GradeRecord],
    corpus: &Corpus,
    rater_ids: &[String],
) -> Result<MatrixBundle> {
    if rater_ids.len() < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 raters, got {}",
            rater_ids.len()
        )));
    }
    let mut by_item: BTreeMap<String, BTreeMap<String, &GradeRecord>> = BTreeMap::new();
    for r in records {
        if !rater_ids.contains(&r.rater) {
            continue;
        }
        let slot = by_item.entry(r.submission_id.clone()).or_default();
        if slot.insert(r.rater.clone(), r).is_some() {
            return Err(Error::DuplicateRecord {
                item: r.submission_id.clone(),
                rater: r.rater.clone(),
            });
        }
    }

    let mut items: Vec<String> = by_item.keys().cloned().collect();
    items.sort_by_key(|id| {
        let sub = &corpus.submissions[id];
        let q = &corpus.questions[&sub.question_id];
        (q.course_id.clone(), q.id.clone(), id.clone())
    });

    let mut matrix_items = Vec::new();
    let mut values = Vec::new();
    let mut raw = Vec::new();
    let mut max_of_item = Vec::new();
    let mut course_of_item = Vec::new();
    let mut question_of_item = Vec::new();
    let mut dropped = Vec::new();

    for id in items {
        let sub = corpus
            .submissions
            .get(&id)
            .ok_or_else(|| Error::Integrity(format!("grade record for unknown submission {id}")))?;
        let question = corpus.question(&sub.question_id)?;
        let raters = &by_item[&id];
        if rater_ids.iter().any(|r| !raters.contains_key(r)) {
            dropped.push(id.clone());
            continue;
        }
        let mut row = Vec::with_capacity(rater_ids.len());
        let mut raw_row = Vec::with_capacity(rater_ids.len());
        for rater in rater_ids {
            let rec = raters[rater];
            if rec.max != question.max_points {
                return Err(Error::Integrity(format!(
                    "record for {id}/{rater} carries max {} but question {} is worth {}",
                    rec.max, question.id, question.max_points
                )));
            }
            row.push(normalize_score(rec.awarded, rec.max)?);
            raw_row.push(rec.awarded);
        }
        matrix_items.push(id.clone());
        values.push(row);
        raw.push(raw_row);
        max_of_item.push(question.max_points);
        course_of_item.push(question.course_id.clone());
        question_of_item.push(question.id.clone());
    }

    if matrix_items.len() < 2 {
        return Err(Error::TooFewItems(matrix_items.len()));
    }
    Ok(MatrixBundle {
        matrix: GradeMatrix {
            item_ids: matrix_items,
            rater_ids: rater_ids.to_vec(),
            values,
            course_of_item,
            question_of_item,
        },
        raw,
        max_of_item,
        dropped,
    })
}

/// Per-course baseline-minus-other differences with mean/sd summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSeries {
    pub course_id: String,
    pub baseline: String,
    pub other_raters: Vec<String>,
    pub item_ids: Vec<String>,
    /// `diffs[item][other]`, percentage points
    pub diffs: Vec<Vec<f64>>,
    pub summaries: Vec<DiffSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffSummary {
    pub rater: String,
    pub mean: f64,
    /// sample standard deviation (n − 1)
    pub sd: f64,
}

/// Baseline value minus each other rater's value, per item, grouped by
/// course.
pub fn difference_series(
    matrix: &GradeMatrix,
    baseline: &str,
    others: &[String],
) -> Result<Vec<DifferenceSeries>> {
    let b = matrix.rater_index(baseline)?;
    let other_idx: Vec<usize> = others
        .iter()
        .map(|r| matrix.rater_index(r))
        .collect::<Result<_>>()?;

    let mut courses: Vec<String> = matrix.course_of_item.clone();
    courses.sort();
    courses.dedup();

    let mut out = Vec::new();
    for course in courses {
        let mut item_ids = Vec::new();
        let mut diffs = Vec::new();
        for (i, row) in matrix.values.iter().enumerate() {
            if matrix.course_of_item[i] != course {
                continue;
            }
            item_ids.push(matrix.item_ids[i].clone());
            diffs.push(other_idx.iter().map(|&j| row[b] - row[j]).collect::<Vec<f64>>());
        }
        let summaries = others
            .iter()
            .enumerate()
            .map(|(oj, rater)| {
                let column: Vec<f64> = diffs.iter().map(|d| d[oj]).collect();
                DiffSummary {
                    rater: rater.clone(),
                    mean: statkit::mean(&column),
                    sd: statkit::sample_sd(&column),
                }
            })
            .collect();
        out.push(DifferenceSeries {
            course_id: course,
            baseline: baseline.to_string(),
            other_raters: others.to_vec(),
            item_ids,
            diffs,
            summaries,
        });
    }
    Ok(out)
}
