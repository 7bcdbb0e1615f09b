//! Command-line entry points: validate, grade, genrubric, stats, report.
//!
//! Exit codes: 0 success, 1 domain/data failure, 2 usage error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use statkit::{IccVariant, LeveneCenter};

use crate::aggregation::MedianConvention;
use crate::corpus::{
    lint_corpus, load_corpus, load_instructor_grades, load_peer_scores, write_ai_rubrics, Corpus,
    Rubric, RubricOrigin,
};
use crate::grader::{
    dispatch, grade_submission, parse_ai_rubric, split_rubric_sections, BackendConfig,
    BackendKind, ResponseCache,
};
use crate::prompting::{build_rubric_prompt, PromptCondition, TemplateSet};
use crate::report::{
    assemble_records, manifest_for, read_ledger, read_report, render::render_csv_reports,
    run_stats, write_ledger, write_report, BackendSummary, GradeLedger, LedgerRow, StatsOptions,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(name = "gradekit", version, about = "Grade free-text answers with an LLM and audit rater agreement")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct BackendArgs {
    /// backend kind: replay serves cached completions only
    #[arg(long, value_parser = ["http", "replay"], default_value = "replay")]
    backend: String,

    /// chat-completion endpoint (http backend)
    #[arg(long, default_value = "https://api.openai.com/v1/chat/completions")]
    endpoint: String,

    #[arg(long, default_value = "gpt-4")]
    model: String,

    #[arg(long, default_value_t = 0.0)]
    temperature: f64,

    /// environment variable holding the API key (http backend)
    #[arg(long, default_value = "OPENAI_API_KEY")]
    credential_env: String,

    #[arg(long, default_value_t = 3)]
    max_retries: u32,

    #[arg(long, default_value_t = 60)]
    timeout_secs: u64,

    /// bound on concurrent dispatches
    #[arg(long, default_value_t = 4)]
    in_flight: usize,

    /// directory holding the response cache
    #[arg(long)]
    cache_dir: PathBuf,
}

impl BackendArgs {
    fn config(&self) -> BackendConfig {
        BackendConfig {
            kind: match self.backend.as_str() {
                "http" => BackendKind::HttpChat,
                _ => BackendKind::Replay,
            },
            endpoint: Some(self.endpoint.clone()),
            model_id: self.model.clone(),
            temperature: self.temperature,
            max_retries: self.max_retries,
            timeout: Duration::from_secs(self.timeout_secs),
            credential_env: Some(self.credential_env.clone()),
            backend_id: "openai_chat".to_string(),
            in_flight: self.in_flight,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Load a corpus bundle and report integrity findings and lints
    Validate {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Grade every submission under one prompt condition
    Grade {
        #[arg(long)]
        corpus: PathBuf,
        /// prompt condition: 1 answer-only, 2 answer+rubric, 3 AI rubric
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        condition: u8,
        #[command(flatten)]
        backend: BackendArgs,
        /// template directory (default: <corpus>/templates)
        #[arg(long)]
        templates: Option<PathBuf>,
        /// generate missing AI rubrics before grading condition 3
        #[arg(long, default_value_t = false)]
        auto_genrubric: bool,
        /// ledger output path
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate AI rubrics for a course (or all courses) into the bundle
    Genrubric {
        #[arg(long)]
        corpus: PathBuf,
        /// course id; omitted means every course
        #[arg(long)]
        course: Option<String>,
        #[command(flatten)]
        backend: BackendArgs,
        #[arg(long)]
        templates: Option<PathBuf>,
        /// overwrite existing AI rubrics
        #[arg(long, default_value_t = false)]
        force: bool,
    },
    /// Build the grade matrix from ledgers and run the statistical battery
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        /// grade ledger file; repeat per condition
        #[arg(long = "ledger", required = true)]
        ledgers: Vec<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        iterations: u32,
        #[arg(long, default_value = "icc2_1")]
        icc_variant: String,
        #[arg(long, value_parser = ["median", "mean"], default_value = "median")]
        levene_center: String,
        #[arg(long, value_parser = ["mean_pair", "lower", "upper"], default_value = "mean_pair")]
        median_convention: String,
        /// output directory for report.json and rendered tables
        #[arg(long)]
        out: PathBuf,
    },
    /// Render CSV tables from a stored report
    Report {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_parser = ["csv"], default_value = "csv")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn require_dir(path: &Path) -> Option<i32> {
    if !path.is_dir() {
        eprintln!(
            "error: corpus path {} does not exist or is not a directory",
            path.display()
        );
        eprintln!("usage: gradekit <command> --corpus <DIR> …");
        return Some(EXIT_USAGE);
    }
    None
}

fn template_dir(corpus: &Path, explicit: &Option<PathBuf>) -> PathBuf {
    explicit.clone().unwrap_or_else(|| corpus.join("templates"))
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Validate { corpus } => {
            if let Some(code) = require_dir(&corpus) {
                return Ok(code);
            }
            match load_corpus(&corpus) {
                Ok(c) => {
                    println!("{} questions, {} rubrics OK", c.questions.len(), c.rubrics.len());
                    println!(
                        "{} courses, {} model answers, {} submissions",
                        c.courses.len(),
                        c.model_answers.len(),
                        c.submissions.len()
                    );
                    for lint in lint_corpus(&c) {
                        println!("warning: {lint}");
                    }
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(EXIT_FAILURE)
                }
            }
        }
        Command::Grade {
            corpus,
            condition,
            backend,
            templates,
            auto_genrubric,
            out,
        } => {
            if let Some(code) = require_dir(&corpus) {
                return Ok(code);
            }
            let condition = PromptCondition::from_index(condition)?;
            let config = backend.config();
            config.validate()?;
            let templates = TemplateSet::load(&template_dir(&corpus, &templates))?;
            let cache = ResponseCache::open(&backend.cache_dir)?;
            let mut loaded = load_corpus(&corpus)?;

            if condition == PromptCondition::AiRubricPlusAnswer {
                let missing: Vec<String> = loaded
                    .questions
                    .keys()
                    .filter(|q| loaded.ai_rubric(q).is_none())
                    .cloned()
                    .collect();
                if !missing.is_empty() {
                    if !auto_genrubric {
                        eprintln!(
                            "error: no AI rubric for {} question(s) ({}…); run genrubric or pass --auto-genrubric",
                            missing.len(),
                            missing[0]
                        );
                        return Ok(EXIT_FAILURE);
                    }
                    let failures =
                        generate_rubrics(&corpus, &loaded, None, &templates, &config, &cache, false)?;
                    if failures > 0 {
                        return Ok(EXIT_FAILURE);
                    }
                    loaded = load_corpus(&corpus)?;
                }
            }

            let (rows, failures) = grade_all(&loaded, condition, &templates, &config, &cache);
            let manifest = manifest_for(
                &corpus.display().to_string(),
                BackendSummary::of(&config),
                templates.names(),
                vec![condition.to_string()],
                &StatsOptions::default(),
            );
            write_ledger(&out, &GradeLedger { manifest, rows })?;
            if failures > 0 {
                eprintln!("{failures} submission(s) failed to grade");
                return Ok(EXIT_FAILURE);
            }
            Ok(EXIT_OK)
        }
        Command::Genrubric {
            corpus,
            course,
            backend,
            templates,
            force,
        } => {
            if let Some(code) = require_dir(&corpus) {
                return Ok(code);
            }
            let config = backend.config();
            config.validate()?;
            let templates = TemplateSet::load(&template_dir(&corpus, &templates))?;
            let cache = ResponseCache::open(&backend.cache_dir)?;
            let loaded = load_corpus(&corpus)?;
            if let Some(course_id) = &course {
                if !loaded.courses.contains_key(course_id) {
                    eprintln!("error: unknown course {course_id}");
                    return Ok(EXIT_USAGE);
                }
            }
            let failures = generate_rubrics(
                &corpus,
                &loaded,
                course.as_deref(),
                &templates,
                &config,
                &cache,
                force,
            )?;
            Ok(if failures > 0 { EXIT_FAILURE } else { EXIT_OK })
        }
        Command::Stats {
            corpus,
            ledgers,
            seed,
            iterations,
            icc_variant,
            levene_center,
            median_convention,
            out,
        } => {
            if let Some(code) = require_dir(&corpus) {
                return Ok(code);
            }
            let opts = StatsOptions {
                seed,
                iterations,
                icc_variant: icc_variant
                    .parse::<IccVariant>()
                    .map_err(Error::Domain)?,
                levene_center: match levene_center.as_str() {
                    "mean" => LeveneCenter::Mean,
                    _ => LeveneCenter::Median,
                },
                median_convention: median_convention
                    .parse::<MedianConvention>()
                    .map_err(Error::Domain)?,
                ci_level: 0.95,
            };
            let loaded = load_corpus(&corpus)?;
            let peers = load_peer_scores(&corpus, &loaded)?;
            let instructor = load_instructor_grades(&corpus, &loaded)?;
            let ledgers: Vec<GradeLedger> =
                ledgers.iter().map(|p| read_ledger(p)).collect::<Result<_>>()?;
            if ledgers.is_empty() {
                return Err(Error::Domain("at least one ledger is required".into()));
            }
            for l in &ledgers[1..] {
                if l.manifest.backend.model_id != ledgers[0].manifest.backend.model_id
                    || l.manifest.backend.temperature != ledgers[0].manifest.backend.temperature
                {
                    return Err(Error::Domain(
                        "ledgers mix model snapshots or decoding parameters; runs are only comparable within one".into(),
                    ));
                }
            }

            let (bundle, conditions) = assemble_records(
                &loaded,
                &instructor,
                &peers,
                &ledgers,
                opts.median_convention,
            )?;
            for w in &bundle.dropped {
                eprintln!("warning: item {w} dropped (incomplete rater set)");
            }
            let manifest = manifest_for(
                &corpus.display().to_string(),
                ledgers[0].manifest.backend.clone(),
                ledgers[0].manifest.template_names.clone(),
                conditions,
                &opts,
            );
            let report = run_stats(&bundle, manifest, &opts)?;
            std::fs::create_dir_all(&out)?;
            write_report(&out.join("report.json"), &report)?;
            render_csv_reports(&report, &out)?;
            println!(
                "report written to {} ({} items x {} raters)",
                out.display(),
                bundle.matrix.item_ids.len(),
                bundle.matrix.rater_ids.len()
            );
            Ok(EXIT_OK)
        }
        Command::Report {
            report,
            format: _,
            out,
        } => {
            let loaded = read_report(&report)?;
            render_csv_reports(&loaded, &out)?;
            println!("tables written to {}", out.display());
            Ok(EXIT_OK)
        }
    }
}

/// Grade every submission under one condition with a bounded worker pool.
/// Individual failures are reported and skipped; the ledger keeps item
/// order (course, question, submission).
fn grade_all(
    corpus: &Corpus,
    condition: PromptCondition,
    templates: &TemplateSet,
    config: &BackendConfig,
    cache: &ResponseCache,
) -> (Vec<LedgerRow>, usize) {
    let subs = corpus.submissions_ordered();
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<LedgerRow>>>> =
        (0..subs.len()).map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..config.in_flight.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= subs.len() {
                    break;
                }
                let row = grade_submission(subs[i], condition, corpus, templates, config, cache)
                    .and_then(|r| LedgerRow::from_result(&r));
                *slots[i].lock().expect("slot lock") = Some(row);
            });
        }
    });

    let mut rows = Vec::with_capacity(subs.len());
    let mut failures = 0;
    for slot in slots {
        match slot.into_inner().expect("slot lock").expect("slot filled") {
            Ok(row) => rows.push(row),
            Err(e) => {
                failures += 1;
                eprintln!("error: {e}");
            }
        }
    }
    (rows, failures)
}

/// Build, dispatch and parse the rubric-generation prompt for the target
/// courses, then write the bundle's AI rubric document. Returns the number
/// of per-question failures.
fn generate_rubrics(
    corpus_dir: &Path,
    corpus: &Corpus,
    course_filter: Option<&str>,
    templates: &TemplateSet,
    config: &BackendConfig,
    cache: &ResponseCache,
    force: bool,
) -> Result<usize> {
    let targets: Vec<&str> = corpus
        .courses
        .keys()
        .map(|s| s.as_str())
        .filter(|id| course_filter.is_none_or(|f| f == *id))
        .collect();

    // keep AI rubrics of courses outside the target set
    let mut kept: BTreeMap<String, Rubric> = corpus
        .rubrics
        .iter()
        .filter(|((_, origin), _)| *origin == RubricOrigin::AiGenerated)
        .filter(|((qid, _), _)| {
            let course = &corpus.questions[qid].course_id;
            !targets.contains(&course.as_str())
        })
        .map(|((qid, _), r)| (qid.clone(), r.clone()))
        .collect();

    let mut failures = 0;
    for course_id in &targets {
        let course = &corpus.courses[*course_id];
        let questions = corpus.questions_for_course(course_id);
        if questions.is_empty() {
            continue;
        }
        if !force {
            if let Some(q) = questions.iter().find(|q| corpus.ai_rubric(&q.id).is_some()) {
                return Err(Error::Domain(format!(
                    "AI rubric for {} already exists; pass --force to regenerate",
                    q.id
                )));
            }
        }
        let answers: Vec<_> = questions
            .iter()
            .map(|q| {
                corpus
                    .model_answer(&q.id)
                    .ok_or_else(|| Error::Integrity(format!("question {} has no model answer", q.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        let artifact = build_rubric_prompt(
            course,
            &questions,
            &answers,
            &templates.rubric_generation,
            &config.fingerprint(),
        )?;
        let response = dispatch(&artifact, config, cache)?;
        let sections = split_rubric_sections(&response.text);
        for (number, question) in questions.iter().enumerate() {
            let section = sections.iter().find(|(n, _)| *n == number + 1);
            match section {
                None => {
                    failures += 1;
                    eprintln!(
                        "error: rubric completion for {} has no section for question {} ({})",
                        course_id,
                        number + 1,
                        question.id
                    );
                }
                Some((_, body)) => match parse_ai_rubric(body, question) {
                    Ok(rubric) => {
                        kept.insert(question.id.clone(), rubric);
                    }
                    Err(e) => {
                        failures += 1;
                        eprintln!("error: question {}: {e}", question.id);
                    }
                },
            }
        }
    }

    let rubrics: Vec<Rubric> = kept.into_values().collect();
    write_ai_rubrics(corpus_dir, &rubrics)?;
    println!("wrote {} AI rubric(s)", rubrics.len());
    Ok(failures)
}
