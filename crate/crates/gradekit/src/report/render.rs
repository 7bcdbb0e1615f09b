//! Rendered CSV views of a report.
//!
//! Dialect: comma-separated, `\n` line endings, header row, UTF-8. Fields
//! are numeric or token-valued by construction so no quoting is needed.
//! Floats render at 2 decimals; p-values below 0.005 render as "~0.00"
//! with a significance asterisk at p < 0.05.

use std::path::Path;

use super::StatReport;
use crate::Result;

fn f2(x: f64) -> String {
    format!("{x:.2}")
}

/// Post-hoc cell: "~0.00" below 0.005, asterisk at p < 0.05.
fn p_cell(p: f64, starred: bool) -> String {
    let body = if p < 0.005 {
        "~0.00".to_string()
    } else {
        f2(p)
    };
    if starred && p < 0.05 {
        format!("{body}*")
    } else {
        body
    }
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut body = String::with_capacity(rows.len() * 32 + header.len() + 1);
    body.push_str(header);
    body.push('\n');
    for row in rows {
        debug_assert!(!row.contains('"'), "CSV fields are tokens by construction");
        body.push_str(row);
        body.push('\n');
    }
    std::fs::write(path, body)?;
    Ok(())
}

/// Emit every CSV view into `dir`.
pub fn render_csv_reports(report: &StatReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;

    // pairwise post-hoc table
    let header = format!("rater,{}", report.posthoc.rater_ids.join(","));
    let rows: Vec<String> = report
        .posthoc
        .rater_ids
        .iter()
        .enumerate()
        .map(|(i, rater)| {
            let cells: Vec<String> = report.posthoc.p[i]
                .iter()
                .enumerate()
                .map(|(j, &p)| p_cell(p, i != j))
                .collect();
            format!("{rater},{}", cells.join(","))
        })
        .collect();
    write_csv(&dir.join("table1_posthoc.csv"), &header, &rows)?;

    // per-question bootstrap means
    let rows: Vec<String> = report
        .per_question
        .iter()
        .map(|e| {
            format!(
                "{},{},{},{},{}",
                e.course_id,
                e.question_id,
                e.rater_id,
                f2(e.estimate.mean),
                f2(e.estimate.sd)
            )
        })
        .collect();
    write_csv(
        &dir.join("table2_means.csv"),
        "course,question,rater,mean_points,sd_points",
        &rows,
    )?;

    // per-question bootstrap p-values vs the instructor
    let rows: Vec<String> = report
        .diff_pvalues
        .iter()
        .map(|e| {
            format!(
                "{},{},{},{},{}",
                e.course_id,
                e.question_id,
                e.rater_id,
                f2(e.mean_diff),
                f2(e.p_value)
            )
        })
        .collect();
    write_csv(
        &dir.join("table3_pvalues.csv"),
        "course,question,rater,mean_diff_points,p_value",
        &rows,
    )?;

    // per-course RMS, both scales labeled
    let rows: Vec<String> = report
        .rms
        .iter()
        .map(|e| {
            format!(
                "{},{},{},{}",
                e.course_id,
                e.rater_id,
                f2(e.rms_points),
                f2(e.rms_fraction)
            )
        })
        .collect();
    write_csv(
        &dir.join("table4_rms.csv"),
        "course,rater,rms_points,rms_fraction",
        &rows,
    )?;

    // histogram of normalized grades
    let rows: Vec<String> = report
        .histogram
        .iter()
        .map(|e| {
            format!(
                "{},{},{},{}",
                e.rater_id,
                f2(e.bin_low),
                f2(e.bin_high),
                e.count
            )
        })
        .collect();
    write_csv(
        &dir.join("fig1_hist.csv"),
        "rater,bin_low,bin_high,count",
        &rows,
    )?;

    // per-item differences, percentage points and normalized fraction
    let mut rows = Vec::new();
    for series in &report.differences {
        for (i, item) in series.item_ids.iter().enumerate() {
            for (oj, other) in series.other_raters.iter().enumerate() {
                let pp = series.diffs[i][oj];
                rows.push(format!(
                    "{},{},{},{},{}",
                    series.course_id,
                    item,
                    other,
                    f2(pp),
                    f2(pp / 100.0)
                ));
            }
        }
    }
    write_csv(
        &dir.join("fig2_diffs.csv"),
        "course,item,rater,instructor_minus_rater_pp,instructor_minus_rater_fraction",
        &rows,
    )?;

    // per-question dispersion
    let rows: Vec<String> = report
        .dispersion
        .iter()
        .map(|e| {
            format!(
                "{},{},{},{},{}",
                e.course_id,
                e.question_id,
                e.rater_id,
                f2(e.mean),
                f2(e.mad)
            )
        })
        .collect();
    write_csv(
        &dir.join("fig3_dispersion.csv"),
        "course,question,rater,mean_percent,mad_percent",
        &rows,
    )?;

    Ok(())
}
