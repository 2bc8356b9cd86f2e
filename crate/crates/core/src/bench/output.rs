//! CSV output with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::experiment::{ErrorReport, ExperimentOutcome, MethodRun};
use crate::error::Result;

pub const SUMMARY_HEADER: &str = "system,method,h,max_pos_err,max_S_err,max_H_dev";

/// Formats `x` with 17 significant digits; `NaN` becomes an empty field.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

pub fn trajectory_header(n: usize) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|i| format!("q_{i}")));
    cols.extend((1..=n).map(|i| format!("v_{i}")));
    cols.extend(["S", "H_plus", "H_minus", "H_vel"].map(String::from));
    cols.join(",")
}

pub fn trajectory_csv(run: &MethodRun, n: usize) -> String {
    let mut out = trajectory_header(n);
    out.push('\n');
    for k in 0..run.qs.len() {
        let t = k as f64 * run.h;
        let ham = &run.hamiltonian;
        let fields = std::iter::once(t)
            .chain(run.qs[k].iter().copied())
            .chain(run.vs[k].iter().copied())
            .chain([run.ss[k], ham.plus[k], ham.minus[k], ham.velocity[k]])
            .map(fmt_f64)
            .collect::<Vec<_>>();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn summary_csv(reports: &[ErrorReport]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.system,
            r.method,
            fmt_f64(r.h),
            fmt_f64(r.max_pos_err),
            fmt_f64(r.max_s_err),
            fmt_f64(r.max_h_dev)
        );
    }
    out
}

/// File name of a method's trajectory CSV.
pub fn trajectory_file(dir: &Path, outcome: &ExperimentOutcome, run: &MethodRun) -> PathBuf {
    dir.join(format!("{}_{}_h{}.csv", outcome.system, run.method, outcome.h))
}

/// Writes one trajectory CSV per method and `summary.csv`.
pub fn write_outcome(dir: &Path, outcome: &ExperimentOutcome, n: usize) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for run in &outcome.runs {
        let path = trajectory_file(dir, outcome, run);
        fs::write(&path, trajectory_csv(run, n))?;
        written.push(path);
    }
    let summary = dir.join("summary.csv");
    fs::write(&summary, summary_csv(&outcome.reports))?;
    written.push(summary);
    Ok(written)
}
