//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured numbers. Run with
//! `cargo test -p gradekit --test acceptance`.

mod bigfixed;
mod conover_ref;
mod friedman_ref;
mod oracle;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use serde::Deserialize;

use gradekit::aggregation::{MatrixBundle, MedianConvention, PeerScoreSet};
use gradekit::aggregation::{peer_final_grade, GradeMatrix};
use gradekit::corpus::Question;
use gradekit::grader::{extract_grade, parse_ai_rubric};
use gradekit::report::{manifest_for, run_stats, BackendSummary, StatsOptions};
use statkit::prng::Rng;
use statkit::special::{reg_inc_beta, reg_inc_gamma};
use statkit::{
    bootstrap_diff_pvalue, bootstrap_mean_sd, conover_posthoc, friedman, icc, shapiro_wilk,
    IccVariant, StatError,
};

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn goldens_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/goldens")
}

// ---------------------------------------------------------------------
// Criterion 1: exact Friedman oracle on small integer matrices.

fn small_matrix_grid() -> Vec<Vec<Vec<f64>>> {
    let base = Rng::new(0xF12ED);
    let mut grid = Vec::new();
    for n in 2..=6usize {
        for rep in 0..20u64 {
            let mut rng = base.stream(n as u64 * 1000 + rep);
            // heavy ties: entries in 0..=3
            grid.push(
                (0..n)
                    .map(|_| (0..3).map(|_| rng.next_index(4) as f64).collect())
                    .collect(),
            );
            // lighter ties: entries in 0..=9
            grid.push(
                (0..n)
                    .map(|_| (0..3).map(|_| rng.next_index(10) as f64).collect())
                    .collect(),
            );
        }
        // structured shapes
        grid.push((0..n).map(|i| vec![i as f64; 3]).collect()); // identical columns
        grid.push((0..n).map(|i| vec![i as f64, i as f64 + 1.0, i as f64 + 2.0]).collect());
        grid.push(vec![vec![1.0, 1.0, 1.0]; n]); // constant
    }
    grid
}

#[test]
fn criterion_01_exact_friedman_oracle() {
    let start = Instant::now();
    let grid = small_matrix_grid();
    assert!(grid.len() >= 200, "grid has {} matrices", grid.len());
    let mut worst: f64 = 0.0;
    for (i, rows) in grid.iter().enumerate() {
        let got = friedman(rows).expect("friedman runs").p_value;
        let want = friedman_ref::exact_p(rows);
        let diff = (got - want).abs();
        worst = worst.max(diff);
        assert!(
            diff <= 1e-9,
            "matrix {i} (n={}): p {got} vs exact {want}",
            rows.len()
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "PASS criterion 1: exact Friedman tail on {} matrices, max |Δp| = {worst:.2e}, {elapsed:?}",
        grid.len()
    );
}

// ---------------------------------------------------------------------
// Criterion 2: special functions vs the arbitrary-precision oracle.

#[test]
fn criterion_02_special_function_accuracy() {
    let start = Instant::now();
    let mut points = 0usize;
    let mut worst: f64 = 0.0;

    let xs: [(u64, u64); 10] = [
        (1, 10),
        (3, 10),
        (7, 10),
        (3, 2),
        (3, 1),
        (5, 1),
        (8, 1),
        (12, 1),
        (20, 1),
        (30, 1),
    ];
    for a2 in 1..=20u32 {
        for &(xn, xd) in &xs {
            let got = reg_inc_gamma(a2 as f64 / 2.0, xn as f64 / xd as f64).unwrap();
            let want = oracle::oracle_reg_inc_gamma(a2, xn, xd);
            let diff = (got - want).abs();
            worst = worst.max(diff);
            assert!(diff <= 1e-12, "P({}/2, {xn}/{xd}): {got} vs {want}", a2);
            points += 1;
        }
    }

    let halves: [u32; 8] = [1, 2, 3, 5, 8, 12, 17, 22];
    let bx: [(u64, u64); 7] = [(1, 20), (1, 5), (37, 100), (1, 2), (63, 100), (4, 5), (19, 20)];
    for &a2 in &halves {
        for &b2 in &halves {
            for &(xn, xd) in &bx {
                let a = a2 as f64 / 2.0;
                let b = b2 as f64 / 2.0;
                let x = xn as f64 / xd as f64;
                let got = reg_inc_beta(a, b, x).unwrap();
                let want = oracle::oracle_reg_inc_beta(a2, b2, xn, xd);
                let diff = (got - want).abs();
                worst = worst.max(diff);
                assert!(diff <= 1e-12, "I_{x}({a},{b}): {got} vs {want}");
                points += 1;
            }
        }
    }
    assert!(points >= 500, "only {points} grid points");

    // reflection identity on a dense grid
    for &a2 in &halves {
        for &b2 in &halves {
            for j in 1..40u32 {
                let a = a2 as f64 / 2.0;
                let b = b2 as f64 / 2.0;
                let x = j as f64 / 40.0;
                let lhs = reg_inc_beta(a, b, x).unwrap();
                let rhs = 1.0 - reg_inc_beta(b, a, 1.0 - x).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12, "identity at a={a} b={b} x={x}");
            }
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "PASS criterion 2: {points} oracle points, max |Δ| = {worst:.2e}, identity grid OK, {elapsed:?}"
    );
}

// ---------------------------------------------------------------------
// Criterion 3: Shapiro-Wilk against reference vectors.

#[test]
#[allow(clippy::approx_constant)] // 3.14 is a sample value, not pi
fn criterion_03_shapiro_wilk_vectors() {
    // (sample, W, p) frozen from the AS R94 reference implementation;
    // the full vector table lives in the statkit test suite.
    let cases: [(&[f64], f64, f64); 3] = [
        (
            &[148.0, 154.0, 158.0, 160.0, 161.0, 162.0, 166.0, 170.0, 182.0, 195.0, 236.0],
            0.7888146948631716,
            0.006703814061898823,
        ),
        (
            &[0.11, 7.87, 4.61, 10.14, 7.95, 3.14, 0.46, 4.43, 0.21, 4.75, 0.71, 1.52, 3.24,
              0.93, 0.42, 4.97, 9.53, 4.55, 0.47, 6.66],
            0.9004728794391273,
            0.04208957544308365,
        ),
        (
            &[1.36, 1.14, 2.92, 2.55, 1.46, 1.06, 5.27, -1.11, 3.48, 1.1, 0.88, -0.51, 1.46,
              0.52, 6.2, 1.69, 0.08, 3.67, 2.81, 3.49],
            0.9590269459704117,
            0.5245979292601223,
        ),
    ];
    for (sample, w_ref, p_ref) in cases {
        let r = shapiro_wilk(sample).unwrap();
        assert!((r.statistic - w_ref).abs() < 1e-3, "W {} vs {w_ref}", r.statistic);
        assert!((r.p_value - p_ref).abs() < 1e-3, "p {} vs {p_ref}", r.p_value);
    }
    assert_eq!(shapiro_wilk(&[2.5; 30]).unwrap_err(), StatError::ZeroVariance);
    println!("PASS criterion 3: Shapiro-Wilk matches reference vectors; zero variance errors");
}

// ---------------------------------------------------------------------
// Criterion 4: bootstrap calibration and thread-count determinism.

#[test]
fn criterion_04_bootstrap_calibration() {
    let x = [2.0, 4.0, 4.5, 5.0, 6.0, 6.5, 7.0, 8.0, 9.5, 10.0];
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let s = (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    let plug_in = s * ((n - 1.0) / n).sqrt() / n.sqrt();

    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bootstrap_mean_sd(&x, 10_000, 7_2024).unwrap())
    };
    let single = run(1);
    let rel = (single.sd - plug_in).abs() / plug_in;
    assert!(rel < 0.05, "sd {} vs plug-in {plug_in} ({rel:.3})", single.sd);

    let again = run(1);
    let wide = run(4);
    let wider = run(8);
    assert_eq!(single, again);
    assert_eq!(single, wide);
    assert_eq!(single, wider);
    println!(
        "PASS criterion 4: bootstrap sd {:.6} within {:.2}% of plug-in {:.6}; identical across runs and 1/4/8 threads",
        single.sd,
        100.0 * rel,
        plug_in
    );
}

// ---------------------------------------------------------------------
// Criterion 5: ICC correctness.

#[test]
fn criterion_05_icc_correctness() {
    let identical: Vec<Vec<f64>> = [4.0, 9.0, 2.0, 7.0, 5.0].iter().map(|&v| vec![v; 3]).collect();
    let r = icc(&identical, IccVariant::Icc2_1, 0.95).unwrap();
    assert_eq!(r.value, 1.0, "identical columns must give exactly 1.0");

    // 4×3 worksheet (exact fractions: BMS 17, JMS 7/3, EMS 1/3, WMS 5/6)
    let worksheet = vec![
        vec![9.0, 8.0, 9.0],
        vec![5.0, 6.0, 7.0],
        vec![7.0, 6.0, 8.0],
        vec![3.0, 2.0, 4.0],
    ];
    let expected = [
        (IccVariant::Icc1_1, 97.0 / 112.0),
        (IccVariant::Icc2_1, 20.0 / 23.0),
        (IccVariant::Icc3_1, 50.0 / 53.0),
        (IccVariant::Icc1K, 97.0 / 102.0),
        (IccVariant::Icc2K, 20.0 / 21.0),
        (IccVariant::Icc3K, 50.0 / 51.0),
    ];
    for (variant, want) in expected {
        let r = icc(&worksheet, variant, 0.95).unwrap();
        assert!((r.value - want).abs() < 1e-9, "{}", variant.label());
    }

    let base = Rng::new(0xACC5);
    for rep in 0..100u64 {
        let mut rng = base.stream(rep);
        let n = 5 + rng.next_index(10);
        let k = 2 + rng.next_index(4);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..k).map(|_| 2.0 * i as f64 + 4.0 * rng.next_normal()).collect())
            .collect();
        for v in IccVariant::ALL {
            let r = icc(&rows, v, 0.95).unwrap();
            assert!(
                r.ci.0 <= r.value && r.value <= r.ci.1,
                "{} CI ({}, {}) misses {}",
                v.label(),
                r.ci.0,
                r.ci.1,
                r.value
            );
        }
    }
    println!("PASS criterion 5: ICC worksheet to 1e-9, perfect agreement exact, CIs bracket on 100 random matrices");
}

// ---------------------------------------------------------------------
// Criterion 6: the pairwise significance pattern of a constructed matrix.

/// 120×5 normalized matrix: peer +8 points, llm_p1 +6, llm_p2/p3 unshifted
/// with small noise.
fn synthetic_pattern_matrix(seed: u64) -> Vec<Vec<f64>> {
    let base = Rng::new(seed);
    let mut rows = Vec::with_capacity(120);
    for q in 0..12u64 {
        let mut rng = base.stream(q);
        let quality = 55.0 + 3.2 * q as f64;
        for _ in 0..10 {
            let instructor = (quality + 9.0 * rng.next_normal()).clamp(5.0, 97.0);
            let peer = (instructor + 8.0 + 2.0 * rng.next_normal()).clamp(0.0, 100.0);
            let p1 = (instructor + 6.0 + 2.0 * rng.next_normal()).clamp(0.0, 100.0);
            let p2 = (instructor + 2.0 * rng.next_normal()).clamp(0.0, 100.0);
            let p3 = (instructor + 2.0 * rng.next_normal()).clamp(0.0, 100.0);
            rows.push(vec![instructor, peer, p1, p2, p3]);
        }
    }
    rows
}

#[test]
fn criterion_06_pairwise_pattern_reconstruction() {
    let rows = synthetic_pattern_matrix(0x7AB1E);
    let ph = conover_posthoc(&rows).unwrap();
    let again = conover_posthoc(&synthetic_pattern_matrix(0x7AB1E)).unwrap();
    assert_eq!(ph.p, again.p, "deterministic under the fixed seed");

    // second implementation agreement
    let reference = conover_ref::pairwise_p(&rows);
    for (i, ref_row) in reference.iter().enumerate() {
        for (j, &ref_p) in ref_row.iter().enumerate() {
            assert!(
                (ph.p[i][j] - ref_p).abs() <= 1e-9,
                "pair ({i},{j}): {} vs {ref_p}",
                ph.p[i][j]
            );
        }
    }

    // columns: 0 instructor, 1 peer, 2 llm_p1, 3 llm_p2, 4 llm_p3
    assert!(ph.p[0][1] < 0.05, "instructor vs peer: {}", ph.p[0][1]);
    assert!(ph.p[0][2] < 0.05, "instructor vs llm_p1: {}", ph.p[0][2]);
    assert!(ph.p[0][3] >= 0.05, "instructor vs llm_p2: {}", ph.p[0][3]);
    assert!(ph.p[0][4] >= 0.05, "instructor vs llm_p3: {}", ph.p[0][4]);

    let f = friedman(&rows).unwrap();
    assert!(f.p_value < 0.05);
    println!(
        "PASS criterion 6: significance pattern matches construction (p01={:.2e}, p02={:.2e}, p03={:.2}, p04={:.2})",
        ph.p[0][1], ph.p[0][2], ph.p[0][3], ph.p[0][4]
    );
}

// ---------------------------------------------------------------------
// Criterion 7: end-to-end golden run over the bundled corpus.

fn copy_tree(src: &Path, dst: &Path) {
    std::fs::create_dir_all(dst).unwrap();
    for entry in std::fs::read_dir(src).unwrap() {
        let entry = entry.unwrap();
        let to = dst.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_tree(&entry.path(), &to);
        } else {
            std::fs::copy(entry.path(), &to).unwrap();
        }
    }
}

#[test]
fn criterion_07_end_to_end_golden_run() {
    let start = Instant::now();
    let work = tempfile::tempdir().unwrap();
    copy_tree(&fixtures_dir().join("corpus"), &work.path().join("corpus"));
    copy_tree(&fixtures_dir().join("cache"), &work.path().join("cache"));

    let bin = env!("CARGO_BIN_EXE_gradekit");
    let run = |args: &[&str]| {
        let out = Command::new(bin)
            .args(args)
            .current_dir(work.path())
            .env("SOURCE_DATE_EPOCH", "1717200000")
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "gradekit {args:?} failed:\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
    };

    run(&["genrubric", "--corpus", "corpus", "--backend", "replay", "--cache-dir", "cache"]);
    for c in ["1", "2", "3"] {
        run(&[
            "grade", "--corpus", "corpus", "--condition", c, "--backend", "replay",
            "--cache-dir", "cache", "--out", &format!("out/ledger_p{c}.json"),
        ]);
    }
    run(&[
        "stats", "--corpus", "corpus",
        "--ledger", "out/ledger_p1.json",
        "--ledger", "out/ledger_p2.json",
        "--ledger", "out/ledger_p3.json",
        "--seed", "42", "--out", "out/report",
    ]);
    run(&["report", "--report", "out/report/report.json", "--out", "out/tables"]);

    let golden_files = [
        ("corpus/ai_rubrics.toml", "ai_rubrics.toml"),
        ("out/ledger_p1.json", "ledger_p1.json"),
        ("out/ledger_p2.json", "ledger_p2.json"),
        ("out/ledger_p3.json", "ledger_p3.json"),
        ("out/report/report.json", "report.json"),
        ("out/tables/table1_posthoc.csv", "table1_posthoc.csv"),
        ("out/tables/table2_means.csv", "table2_means.csv"),
        ("out/tables/table3_pvalues.csv", "table3_pvalues.csv"),
        ("out/tables/table4_rms.csv", "table4_rms.csv"),
        ("out/tables/fig1_hist.csv", "fig1_hist.csv"),
        ("out/tables/fig2_diffs.csv", "fig2_diffs.csv"),
        ("out/tables/fig3_dispersion.csv", "fig3_dispersion.csv"),
    ];
    for (produced, golden) in golden_files {
        let got = std::fs::read(work.path().join(produced)).expect(produced);
        let want = std::fs::read(goldens_dir().join(golden)).expect(golden);
        assert!(
            got == want,
            "{produced} differs from the committed golden {golden}"
        );
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 20.0, "took {elapsed:?}");
    println!(
        "PASS criterion 7: golden run byte-identical across {} outputs in {elapsed:?} (replay backend, no network)",
        golden_files.len()
    );
}

// ---------------------------------------------------------------------
// Criterion 8: the grading-completion parser corpus and rubric texts.

#[derive(Deserialize)]
struct CompletionCorpus {
    completions: Vec<CompletionCase>,
}

#[derive(Deserialize)]
struct CompletionCase {
    name: String,
    expected_max: u32,
    expect: String,
    #[serde(default)]
    awarded: f64,
    #[serde(default)]
    flags: String,
    text: String,
}

#[test]
fn criterion_08_parser_corpus() {
    let text =
        std::fs::read_to_string(fixtures_dir().join("completions/completions.toml")).unwrap();
    let corpus: CompletionCorpus = toml::from_str(&text).unwrap();
    assert!(corpus.completions.len() >= 10);
    for case in &corpus.completions {
        let result = extract_grade(case.text.trim_end_matches('\n'), case.expected_max);
        match case.expect.as_str() {
            "ok" => {
                let (awarded, max, flags) =
                    result.unwrap_or_else(|e| panic!("{}: {e}", case.name));
                assert!((awarded - case.awarded).abs() < 1e-12, "{}", case.name);
                assert_eq!(max, case.expected_max, "{}", case.name);
                assert_eq!(flags.render(), case.flags, "{}", case.name);
            }
            "error" => assert!(result.is_err(), "{} should not parse", case.name),
            other => panic!("unknown expectation {other}"),
        }
    }

    // four one-point criteria per rubric in the bundled rubric-generation
    // completions for the history course
    let hpa_rubric = "\
- Understanding of the topic (1 point): The student demonstrates a clear understanding of the practical and philosophical importance of astronomy for humans living a nomadic lifestyle in 20,000 B.C.
- Use of course topics and sources (1 point): The student effectively uses course topics and sources to support their claims.
- Clarity and completeness of the answer (1 point): The student's answer is clear, concise, and fully addresses the prompt.
- Originality and creativity (1 point): The student's answer is original and demonstrates creative thinking.";
    let q4 = Question {
        id: "hpa_q1".into(),
        course_id: "hpa".into(),
        prompt_text: "?".into(),
        max_points: 4,
        word_guidance: None,
    };
    let rubric = parse_ai_rubric(hpa_rubric, &q4).unwrap();
    assert_eq!(rubric.criteria.len(), 4);
    assert!(rubric.criteria.iter().all(|c| c.max_points() == 1));
    assert_eq!(rubric.criteria[0].label, "Understanding of the topic");

    // five two-point criteria summing to 10 for the astrobiology rubric
    let abio_rubric = "\
- Identification of detection methods (2 points): The student correctly identifies the detection methods used for each exoplanet.
- Explanation of detection methods (2 points): The student provides a clear and accurate explanation of how each detection method works.
- Identification of physical characteristics (2 points): The student correctly identifies the physical characteristics that can be learned from each set of data.
- Explanation of physical characteristics (2 points): The student provides a clear and accurate explanation of why these physical characteristics can be learned from the data.
- Identification of Earth-like exoplanet (2 points): The student correctly identifies one exoplanet as Earth-like.";
    let q10 = Question {
        id: "abio_q1".into(),
        course_id: "abio".into(),
        prompt_text: "?".into(),
        max_points: 10,
        word_guidance: None,
    };
    let rubric = parse_ai_rubric(abio_rubric, &q10).unwrap();
    assert_eq!(rubric.criteria.len(), 5);
    assert_eq!(
        rubric.criteria.iter().map(|c| c.max_points()).sum::<u32>(),
        10
    );

    println!(
        "PASS criterion 8: {} completion cases parsed as expected; rubric texts reconstructed",
        corpus.completions.len()
    );
}

// ---------------------------------------------------------------------
// Criterion 9: peer aggregation rules.

#[test]
fn criterion_09_aggregation_rules() {
    // sort-free oracle: median by repeated minimum extraction
    fn median_oracle(scores: &[f64]) -> f64 {
        let mut pool = scores.to_vec();
        let mut order = Vec::with_capacity(pool.len());
        while !pool.is_empty() {
            let (mi, _) = pool
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap();
            order.push(pool.remove(mi));
        }
        let n = order.len();
        if n % 2 == 1 {
            order[n / 2]
        } else {
            0.5 * (order[n / 2 - 1] + order[n / 2])
        }
    }

    let base = Rng::new(0x9A9A);
    for rep in 0..500u64 {
        let mut rng = base.stream(rep);
        let max = 4 + rng.next_index(7) as u32;
        let count = 1 + rng.next_index(8);
        let scores: Vec<f64> = (0..count).map(|_| rng.next_index(max as usize + 1) as f64).collect();
        let participated = rng.next_index(2) == 0;
        let set = PeerScoreSet {
            submission_id: format!("s{rep}"),
            scores: scores.clone(),
            reviewer_participated: participated,
        };
        let got = peer_final_grade(&set, max, MedianConvention::MeanPair).unwrap();
        let mut want = median_oracle(&scores);
        if !participated {
            want *= 0.8;
        }
        let want = want.clamp(0.0, max as f64);
        assert_eq!(got, want, "scores {scores:?} participated {participated}");
    }

    let exact = peer_final_grade(
        &PeerScoreSet {
            submission_id: "s".into(),
            scores: vec![4.0, 4.0, 4.0],
            reviewer_participated: false,
        },
        4,
        MedianConvention::MeanPair,
    )
    .unwrap();
    assert_eq!(exact, 3.2);
    println!("PASS criterion 9: median semantics on 500 random score sets; 20% penalty 4 -> 3.2 exact");
}

// ---------------------------------------------------------------------
// Criterion 10: statistics performance at the production scale.

#[test]
fn criterion_10_stats_performance() {
    let rows = synthetic_pattern_matrix(0xBEEF);
    let raters = ["instructor", "peer_median", "llm_p1", "llm_p2", "llm_p3"];
    let courses = ["alpha", "beta", "gamma"];
    let bundle = MatrixBundle {
        matrix: GradeMatrix {
            item_ids: (0..120).map(|i| format!("item{i:03}")).collect(),
            rater_ids: raters.iter().map(|s| s.to_string()).collect(),
            values: rows.clone(),
            course_of_item: (0..120).map(|i| courses[i / 40].to_string()).collect(),
            question_of_item: (0..120).map(|i| format!("q{:02}", i / 10)).collect(),
        },
        raw: rows.iter().map(|r| r.iter().map(|v| v / 10.0).collect()).collect(),
        max_of_item: vec![10; 120],
        dropped: vec![],
    };
    let opts = StatsOptions::default();
    let manifest = manifest_for(
        "synthetic",
        BackendSummary {
            kind: "replay".into(),
            model_id: "gpt-4".into(),
            temperature: 0.0,
        },
        vec![],
        vec!["p1".into(), "p2".into(), "p3".into()],
        &opts,
    );

    let start = Instant::now();
    let report = run_stats(&bundle, manifest, &opts).unwrap();
    let elapsed = start.elapsed();

    assert_eq!(report.per_question.len(), 12 * 5);
    assert_eq!(report.diff_pvalues.len(), 12 * 4);
    assert_eq!(report.icc.len(), 6);
    // histogram conservation: counts per rater sum to the item count
    for rater in raters {
        let total: usize = report
            .histogram
            .iter()
            .filter(|h| h.rater_id == rater)
            .map(|h| h.count)
            .sum();
        assert_eq!(total, 120);
    }
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "PASS criterion 10: full battery over 120x5 with 10k-iteration bootstraps in {elapsed:?}"
    );
}

// ---------------------------------------------------------------------
// Criterion 4/10 support: paired bootstrap sanity at scale (kept here so
// the suite exercises both bootstrap entry points end to end).

#[test]
fn paired_bootstrap_separation_floor() {
    let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let x: Vec<f64> = y.iter().map(|v| v + 100.0).collect();
    let r = bootstrap_diff_pvalue(&x, &y, 10_000, 11).unwrap();
    assert!(r.p_value <= 2.0 / 10_000.0);
}
