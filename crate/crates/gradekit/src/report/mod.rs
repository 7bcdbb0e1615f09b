//! Report pipeline: assemble the grade matrix from ledgers and bundle
//! documents, run the full statistical battery, and serialize a
//! machine-readable report plus rendered CSV tables.
//!
//! Full precision everywhere in the machine form; rounding happens only in
//! the rendered CSV views.

pub mod render;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use statkit::prng::stream_label;
use statkit::{
    bootstrap_diff_pvalue, bootstrap_mean_sd, conover_posthoc, friedman, icc, levene,
    mean_absolute_deviation, rms_difference, shapiro_wilk, BootstrapEstimate, IccResult,
    IccVariant, LeveneCenter, Rng, TestResult,
};

use crate::aggregation::{
    build_grade_matrix, difference_series, peer_final_grade, DifferenceSeries, GradeRecord,
    MatrixBundle, MedianConvention, PeerScoreSet,
};
use crate::corpus::Corpus;
use crate::grader::{timestamp_now, BackendConfig, GradeFlags, GradeResult};
use crate::prompting::PromptCondition;
use crate::{Error, Result};

pub const INSTRUCTOR: &str = "instructor";
pub const PEER_MEDIAN: &str = "peer_median";

/// Everything needed to reproduce a run from its cache.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub corpus_path: String,
    pub backend: BackendSummary,
    pub template_names: Vec<String>,
    pub conditions: Vec<String>,
    /// template shell used for condition 3 prompts
    pub condition3_shell: String,
    pub median_convention: String,
    pub levene_center: String,
    pub icc_default_variant: String,
    pub seed: u64,
    pub iterations: u32,
    pub tool_version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendSummary {
    pub kind: String,
    pub model_id: String,
    pub temperature: f64,
}

impl BackendSummary {
    pub fn of(config: &BackendConfig) -> Self {
        BackendSummary {
            kind: config.kind.as_str().to_string(),
            model_id: config.model_id.clone(),
            temperature: config.temperature,
        }
    }
}

/// Machine form of one grading run over one condition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradeLedger {
    pub manifest: RunManifest,
    pub rows: Vec<LedgerRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub submission_id: String,
    pub condition: PromptCondition,
    pub awarded: f64,
    pub max: u32,
    pub normalized: f64,
    pub flags: String,
    pub prompt_hash: String,
}

impl LedgerRow {
    pub fn from_result(r: &GradeResult) -> Result<Self> {
        Ok(LedgerRow {
            submission_id: r.submission_id.clone(),
            condition: r.condition,
            awarded: r.awarded,
            max: r.max,
            normalized: crate::corpus::normalize_score(r.awarded, r.max)?,
            flags: r.flags.render(),
            prompt_hash: r.prompt_hash.clone(),
        })
    }

    pub fn flags(&self) -> GradeFlags {
        GradeFlags {
            non_integer_awarded: self.flags.contains("non_integer_awarded"),
            max_mismatch_repaired: self.flags.contains("max_mismatch_repaired"),
        }
    }
}

pub fn write_ledger(path: &Path, ledger: &GradeLedger) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut body = serde_json::to_string_pretty(ledger).expect("serializable ledger");
    body.push('\n');
    std::fs::write(path, body)?;
    Ok(())
}

pub fn read_ledger(path: &Path) -> Result<GradeLedger> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pretests {
    /// normality of the pooled normalized scores (all matrix cells)
    pub shapiro_wilk: TestResult,
    /// homogeneity of variances across rater columns
    pub levene: TestResult,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Omnibus {
    pub friedman: TestResult,
    pub significant_at_05: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosthocReport {
    pub rater_ids: Vec<String>,
    /// Bonferroni-adjusted two-sided p-values, symmetric, unit diagonal
    pub p: Vec<Vec<f64>>,
    pub df: f64,
    pub comparisons: usize,
    pub omnibus_significant: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerQuestionEstimate {
    pub course_id: String,
    pub question_id: String,
    pub rater_id: String,
    /// raw point scale, matching the per-question tables
    pub estimate: BootstrapEstimate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffPValue {
    pub course_id: String,
    pub question_id: String,
    pub rater_id: String,
    pub baseline: String,
    /// observed mean(rater) − mean(baseline), raw points
    pub mean_diff: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RmsEntry {
    pub course_id: String,
    pub rater_id: String,
    /// unweighted mean over the course's per-question RMS values, raw points
    pub rms_points: f64,
    /// same aggregate on the normalized [0,1] fraction scale
    pub rms_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersionEntry {
    pub course_id: String,
    pub question_id: String,
    pub rater_id: String,
    /// mean normalized score over the question's items
    pub mean: f64,
    /// mean absolute deviation of those scores
    pub mad: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub rater_id: String,
    pub bin_low: f64,
    pub bin_high: f64,
    pub count: usize,
}

/// Structured results for the whole battery.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatReport {
    pub manifest: RunManifest,
    pub pretests: Pretests,
    pub omnibus: Omnibus,
    pub posthoc: PosthocReport,
    pub per_question: Vec<PerQuestionEstimate>,
    pub diff_pvalues: Vec<DiffPValue>,
    pub rms: Vec<RmsEntry>,
    pub icc: Vec<IccResult>,
    pub differences: Vec<DifferenceSeries>,
    pub dispersion: Vec<DispersionEntry>,
    pub histogram: Vec<HistogramEntry>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct StatsOptions {
    pub seed: u64,
    pub iterations: u32,
    pub icc_variant: IccVariant,
    pub levene_center: LeveneCenter,
    pub median_convention: MedianConvention,
    pub ci_level: f64,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            seed: 42,
            iterations: 10_000,
            icc_variant: IccVariant::Icc2_1,
            levene_center: LeveneCenter::Median,
            median_convention: MedianConvention::MeanPair,
            ci_level: 0.95,
        }
    }
}

/// Assemble instructor/peer/LLM grade records into one matrix bundle.
pub fn assemble_records(
    corpus: &Corpus,
    instructor: &BTreeMap<String, f64>,
    peers: &BTreeMap<String, PeerScoreSet>,
    ledgers: &[GradeLedger],
    convention: MedianConvention,
) -> Result<(MatrixBundle, Vec<String>)> {
    let mut records = Vec::new();
    for (id, sub) in &corpus.submissions {
        let max = corpus.question(&sub.question_id)?.max_points;
        if let Some(&awarded) = instructor.get(id) {
            records.push(GradeRecord {
                submission_id: id.clone(),
                rater: INSTRUCTOR.into(),
                awarded,
                max,
            });
        }
        if let Some(ps) = peers.get(id) {
            records.push(GradeRecord {
                submission_id: id.clone(),
                rater: PEER_MEDIAN.into(),
                awarded: peer_final_grade(ps, max, convention)?,
                max,
            });
        }
    }
    let mut conditions: Vec<PromptCondition> = Vec::new();
    for ledger in ledgers {
        for row in &ledger.rows {
            if !conditions.contains(&row.condition) {
                conditions.push(row.condition);
            }
            records.push(GradeRecord {
                submission_id: row.submission_id.clone(),
                rater: row.condition.rater_id().into(),
                awarded: row.awarded,
                max: row.max,
            });
        }
    }
    conditions.sort();

    let mut rater_ids = vec![INSTRUCTOR.to_string(), PEER_MEDIAN.to_string()];
    rater_ids.extend(conditions.iter().map(|c| c.rater_id().to_string()));
    let bundle = build_grade_matrix(&records, corpus, &rater_ids)?;
    let condition_names = conditions.iter().map(|c| c.to_string()).collect();
    Ok((bundle, condition_names))
}

/// Questions in matrix order, each with its item index range.
fn questions_in_order(bundle: &MatrixBundle) -> Vec<(String, String, Vec<usize>)> {
    let mut out: Vec<(String, String, Vec<usize>)> = Vec::new();
    for (i, qid) in bundle.matrix.question_of_item.iter().enumerate() {
        match out.last_mut() {
            Some((_, last_q, idx)) if last_q == qid => idx.push(i),
            _ => out.push((
                bundle.matrix.course_of_item[i].clone(),
                qid.clone(),
                vec![i],
            )),
        }
    }
    out
}

/// Run every analysis over an assembled matrix bundle.
pub fn run_stats(
    bundle: &MatrixBundle,
    manifest: RunManifest,
    opts: &StatsOptions,
) -> Result<StatReport> {
    let matrix = &bundle.matrix;
    let rng = Rng::new(opts.seed);

    // Pretests. Normality over the pooled cells, variance homogeneity
    // across rater columns.
    let pooled: Vec<f64> = matrix.values.iter().flatten().copied().collect();
    let shapiro = shapiro_wilk(&pooled).map_err(|e| Error::stats("shapiro_wilk", e))?;
    let groups: Vec<Vec<f64>> = (0..matrix.rater_ids.len())
        .map(|j| matrix.values.iter().map(|row| row[j]).collect())
        .collect();
    let levene_result =
        levene(&groups, opts.levene_center).map_err(|e| Error::stats("levene", e))?;

    // Omnibus and post-hoc. The post-hoc always runs; the report records
    // whether the omnibus cleared 0.05.
    let friedman_result = friedman(&matrix.values).map_err(|e| Error::stats("friedman", e))?;
    let significant = friedman_result.p_value < 0.05;
    let posthoc =
        conover_posthoc(&matrix.values).map_err(|e| Error::stats("conover_posthoc", e))?;

    let questions = questions_in_order(bundle);

    // Per-question bootstrap estimates on the raw point scale.
    let mut per_question = Vec::new();
    for (course, qid, items) in &questions {
        for (j, rater) in matrix.rater_ids.iter().enumerate() {
            let sample: Vec<f64> = items.iter().map(|&i| bundle.raw[i][j]).collect();
            let stream = rng.stream(stream_label(&format!("bootstrap:{qid}:{rater}")));
            let estimate = bootstrap_mean_sd(&sample, opts.iterations, stream.seed())
                .map_err(|e| Error::stats("bootstrap_mean_sd", e))?;
            per_question.push(PerQuestionEstimate {
                course_id: course.clone(),
                question_id: qid.clone(),
                rater_id: rater.clone(),
                estimate,
            });
        }
    }

    // Paired bootstrap p-values against the instructor, per question.
    let b_idx = matrix.rater_index(INSTRUCTOR)?;
    let mut diff_pvalues = Vec::new();
    for (course, qid, items) in &questions {
        let baseline: Vec<f64> = items.iter().map(|&i| bundle.raw[i][b_idx]).collect();
        for (j, rater) in matrix.rater_ids.iter().enumerate() {
            if j == b_idx {
                continue;
            }
            let sample: Vec<f64> = items.iter().map(|&i| bundle.raw[i][j]).collect();
            let stream = rng.stream(stream_label(&format!("diffp:{qid}:{rater}")));
            let t = bootstrap_diff_pvalue(&sample, &baseline, opts.iterations, stream.seed())
                .map_err(|e| Error::stats("bootstrap_diff_pvalue", e))?;
            diff_pvalues.push(DiffPValue {
                course_id: course.clone(),
                question_id: qid.clone(),
                rater_id: rater.clone(),
                baseline: INSTRUCTOR.into(),
                mean_diff: t.statistic,
                p_value: t.p_value,
            });
        }
    }

    // RMS agreement instructor vs each LLM condition, per course, both
    // scales.
    let mut courses: Vec<String> = matrix.course_of_item.clone();
    courses.sort();
    courses.dedup();
    let mut rms = Vec::new();
    for course in &courses {
        let item_idx: Vec<usize> = (0..matrix.item_ids.len())
            .filter(|&i| &matrix.course_of_item[i] == course)
            .collect();
        let grouping: Vec<String> = item_idx
            .iter()
            .map(|&i| matrix.question_of_item[i].clone())
            .collect();
        for (j, rater) in matrix.rater_ids.iter().enumerate() {
            if !rater.starts_with("llm_") {
                continue;
            }
            let a_points: Vec<f64> = item_idx.iter().map(|&i| bundle.raw[i][b_idx]).collect();
            let b_points: Vec<f64> = item_idx.iter().map(|&i| bundle.raw[i][j]).collect();
            let points = rms_difference(&a_points, &b_points, &grouping)
                .map_err(|e| Error::stats("rms_difference", e))?;
            let a_frac: Vec<f64> = item_idx
                .iter()
                .map(|&i| matrix.values[i][b_idx] / 100.0)
                .collect();
            let b_frac: Vec<f64> = item_idx.iter().map(|&i| matrix.values[i][j] / 100.0).collect();
            let frac = rms_difference(&a_frac, &b_frac, &grouping)
                .map_err(|e| Error::stats("rms_difference", e))?;
            rms.push(RmsEntry {
                course_id: course.clone(),
                rater_id: rater.clone(),
                rms_points: points.mean,
                rms_fraction: frac.mean,
            });
        }
    }

    // All ICC variants over the normalized matrix.
    let icc_results: Vec<IccResult> = IccVariant::ALL
        .iter()
        .map(|&v| icc(&matrix.values, v, opts.ci_level))
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::stats("icc", e))?;

    // Instructor-minus-other difference series for the scatter/histogram
    // figure: peer median plus the rubric-driven condition when present.
    let mut others = vec![PEER_MEDIAN.to_string()];
    for preferred in ["llm_p2", "llm_p3", "llm_p1"] {
        if matrix.rater_ids.iter().any(|r| r == preferred) {
            others.push(preferred.to_string());
            break;
        }
    }
    let differences = difference_series(matrix, INSTRUCTOR, &others)?;

    // Per-question mean ± MAD for instructor and peer columns.
    let mut dispersion = Vec::new();
    for (course, qid, items) in &questions {
        for rater in [INSTRUCTOR, PEER_MEDIAN] {
            let j = matrix.rater_index(rater)?;
            let xs: Vec<f64> = items.iter().map(|&i| matrix.values[i][j]).collect();
            dispersion.push(DispersionEntry {
                course_id: course.clone(),
                question_id: qid.clone(),
                rater_id: rater.to_string(),
                mean: statkit::mean(&xs),
                mad: mean_absolute_deviation(&xs)
                    .map_err(|e| Error::stats("mean_absolute_deviation", e))?,
            });
        }
    }

    // Histogram of normalized grades, ten bins over [0, 100].
    let mut histogram = Vec::new();
    for (j, rater) in matrix.rater_ids.iter().enumerate() {
        let mut counts = [0usize; 10];
        for row in &matrix.values {
            let bin = ((row[j] / 10.0).floor() as usize).min(9);
            counts[bin] += 1;
        }
        for (b, &count) in counts.iter().enumerate() {
            histogram.push(HistogramEntry {
                rater_id: rater.clone(),
                bin_low: 10.0 * b as f64,
                bin_high: 10.0 * (b + 1) as f64,
                count,
            });
        }
    }

    let warnings = bundle
        .dropped
        .iter()
        .map(|id| format!("item {id} dropped: missing at least one rater"))
        .collect();

    Ok(StatReport {
        manifest,
        pretests: Pretests {
            shapiro_wilk: shapiro,
            levene: levene_result,
        },
        omnibus: Omnibus {
            friedman: friedman_result,
            significant_at_05: significant,
        },
        posthoc: PosthocReport {
            rater_ids: matrix.rater_ids.clone(),
            p: posthoc.p,
            df: posthoc.df,
            comparisons: posthoc.comparisons,
            omnibus_significant: significant,
        },
        per_question,
        diff_pvalues,
        rms,
        icc: icc_results,
        differences,
        dispersion,
        histogram,
        warnings,
    })
}

pub fn manifest_for(
    corpus_path: &str,
    backend: BackendSummary,
    template_names: Vec<String>,
    conditions: Vec<String>,
    opts: &StatsOptions,
) -> RunManifest {
    RunManifest {
        corpus_path: corpus_path.to_string(),
        backend,
        template_names,
        conditions,
        condition3_shell: "grade_ai_rubric_plus_answer".to_string(),
        median_convention: opts.median_convention.as_str().to_string(),
        levene_center: opts.levene_center.as_str().to_string(),
        icc_default_variant: opts.icc_variant.label().to_string(),
        seed: opts.seed,
        iterations: opts.iterations,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: timestamp_now(),
    }
}

pub fn write_report(path: &Path, report: &StatReport) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut body = serde_json::to_string_pretty(report).expect("serializable report");
    body.push('\n');
    std::fs::write(path, body)?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<StatReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
