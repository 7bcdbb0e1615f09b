//! Parsers for model output: the grade fraction in a grading completion
//! and the criteria list in a rubric-generation completion.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{Question, Rubric, RubricCriterion, RubricLevel, RubricOrigin};
use crate::{Error, Result};

/// Repairs applied while extracting a grade, kept for report auditing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeFlags {
    pub non_integer_awarded: bool,
    pub max_mismatch_repaired: bool,
}

impl GradeFlags {
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.non_integer_awarded {
            parts.push("non_integer_awarded");
        }
        if self.max_mismatch_repaired {
            parts.push("max_mismatch_repaired");
        }
        parts.join(";")
    }
}

fn fraction_at_start() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*(\d+(?:\.\d+)?)\s*/\s*(\d+)").expect("static regex"))
}

/// Extract the authoritative grade from a completion.
///
/// The grade is the first fraction token `A/B` immediately after the last
/// "Grade:" marker, falling back to a fraction at the very start of the
/// completion (the two transcript shapes a grading prompt's trailing
/// "Grade:" cue produces). If B differs from the expected maximum the
/// awarded value is rescaled to `expected_max·A/B` and flagged.
pub fn extract_grade(text: &str, expected_max: u32) -> Result<(f64, u32, GradeFlags)> {
    if expected_max < 1 {
        return Err(Error::Domain("expected_max must be >= 1".into()));
    }
    let candidate = text
        .rfind("Grade:")
        .and_then(|pos| fraction_at_start().captures(&text[pos + "Grade:".len()..]))
        .or_else(|| fraction_at_start().captures(text))
        .ok_or(Error::NoParsableGrade)?;

    let a: f64 = candidate[1].parse().expect("digits match");
    let b: u32 = candidate[2]
        .parse()
        .map_err(|_| Error::GradeOutOfRange(format!("denominator {} too large", &candidate[2])))?;
    if b == 0 {
        return Err(Error::GradeOutOfRange("denominator is zero".into()));
    }

    let mut flags = GradeFlags::default();
    let awarded = if b != expected_max {
        flags.max_mismatch_repaired = true;
        expected_max as f64 * a / b as f64
    } else {
        a
    };
    if awarded < 0.0 {
        return Err(Error::GradeOutOfRange(format!("awarded {awarded} < 0")));
    }
    if awarded > expected_max as f64 {
        return Err(Error::GradeOutOfRange(format!(
            "awarded {awarded} exceeds maximum {expected_max}"
        )));
    }
    if awarded.fract() != 0.0 {
        flags.non_integer_awarded = true;
    }
    Ok((awarded, expected_max, flags))
}

/// Strip a leading grade token (optionally preceded by a "Grade:" marker)
/// so the remainder can serve as the rationale.
pub fn strip_leading_grade(text: &str) -> &str {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(r"^\s*(?:Grade:\s*)?\d+(?:\.\d+)?\s*/\s*\d+[ \t]*\n?").expect("static regex")
    });
    match re.find(text) {
        Some(m) => &text[m.end()..],
        None => text,
    }
}

fn criterion_line() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^\s*-\s*(.+?)\s*\((\d+)\s*points?\)\s*:\s*(.*)$").expect("static regex")
    })
}

/// Parse an AI-generated rubric from list-item criterion lines of the form
/// `- <label> (<n> points): <description>`. Each criterion gets the stated
/// level plus an implicit zero level; the criteria maxima must sum to the
/// question's total.
pub fn parse_ai_rubric(text: &str, question: &Question) -> Result<Rubric> {
    let mut criteria = Vec::new();
    for line in text.lines() {
        if let Some(c) = criterion_line().captures(line) {
            let points: u32 = c[2]
                .parse()
                .map_err(|_| Error::Domain(format!("criterion points {} too large", &c[2])))?;
            criteria.push(RubricCriterion {
                label: c[1].trim().to_string(),
                description: c[3].trim().to_string(),
                levels: vec![
                    RubricLevel {
                        points,
                        descriptor: c[3].trim().to_string(),
                    },
                    RubricLevel {
                        points: 0,
                        descriptor: "The criterion is not met.".to_string(),
                    },
                ],
            });
        }
    }
    if criteria.is_empty() {
        return Err(Error::NoCriterionLines);
    }
    let sum: u32 = criteria.iter().map(|c| c.max_points()).sum();
    if sum != question.max_points {
        return Err(Error::RubricSumMismatch {
            found: sum,
            expected: question.max_points,
        });
    }
    Ok(Rubric {
        question_id: question.id.clone(),
        origin: RubricOrigin::AiGenerated,
        criteria,
    })
}

/// Inverse of `parse_ai_rubric` on labels and points: render a rubric back
/// to the list-item format.
pub fn render_rubric_listing(rubric: &Rubric) -> String {
    rubric
        .criteria
        .iter()
        .map(|c| {
            let points = c.max_points();
            let unit = if points == 1 { "point" } else { "points" };
            format!("- {} ({points} {unit}): {}", c.label, c.description)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Split a rubric-generation completion into per-question sections.
///
/// Sections open with a header line like `Rubric for Question 2:` (an
/// arbitrary tag may sit between "for" and "Question"); returned keyed by
/// the 1-based question number.
pub fn split_rubric_sections(text: &str) -> Vec<(usize, String)> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(r"^\s*Rubric for .*?Question\s+(\d+)\s*:?\s*$").expect("static regex")
    });
    let mut sections: Vec<(usize, String)> = Vec::new();
    for line in text.lines() {
        if let Some(c) = re.captures(line) {
            let number: usize = c[1].parse().unwrap_or(0);
            sections.push((number, String::new()));
        } else if let Some((_, body)) = sections.last_mut() {
            body.push_str(line);
            body.push('\n');
        }
    }
    sections
}
