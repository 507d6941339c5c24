//! Report files and the human summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nctori::cwikel::PROBE_LABEL;
use nctori::{CheckRecord, Status, Tally};
use serde::Serialize;

use crate::campaign::VerificationReport;
use crate::error::{CliError, CliResult};

pub const JSON_NAME: &str = "report.json";
pub const CSV_NAME: &str = "report.csv";

#[derive(Serialize)]
struct FlatRow<'a> {
    check_id: &'a str,
    status: Status,
    margin: f64,
}

/// Writes `report.json` (full) and `report.csv` (check id, status, margin).
pub fn write(report: &VerificationReport, dir: &Path) -> CliResult<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let json_path = dir.join(JSON_NAME);
    let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::io(&json_path, e))?;
    text.push('\n');
    fs::write(&json_path, text).map_err(|e| CliError::io(&json_path, e))?;

    let csv_path = dir.join(CSV_NAME);
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| CliError::io(&csv_path, e))?;
    for r in &report.records {
        w.serialize(FlatRow {
            check_id: &r.check_id,
            status: r.status,
            margin: r.margin,
        })
        .map_err(|e| CliError::io(&csv_path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&csv_path, e))?;
    Ok((json_path, csv_path))
}

pub fn load(path: &Path) -> CliResult<VerificationReport> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, &e))
}

/// Suite name of a record: the first segment of its check id.
pub fn suite_of(check_id: &str) -> &str {
    check_id.split('/').next().unwrap_or(check_id)
}

pub fn tally_line(t: &Tally) -> String {
    format!(
        "{} pass, {} fail, {} inconclusive, {} boundary-sensitive",
        t.pass, t.fail, t.inconclusive, t.boundary_sensitive
    )
}

/// Best finite value of `key(record)` under `better`, with its check id.
fn extreme<'a>(
    records: &[&'a CheckRecord],
    key: impl Fn(&CheckRecord) -> Option<f64>,
    better: impl Fn(f64, f64) -> bool,
) -> Option<(f64, &'a str)> {
    let mut best: Option<(f64, &str)> = None;
    for r in records {
        if let Some(v) = key(r).filter(|v| v.is_finite()) {
            if best.is_none_or(|(b, _)| better(v, b)) {
                best = Some((v, &r.check_id));
            }
        }
    }
    best
}

/// Per-suite counts, worst margins, constant probes and inconclusive reasons.
pub fn summarize(records: &[CheckRecord]) -> String {
    let mut groups: BTreeMap<&str, Vec<&CheckRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(suite_of(&r.check_id)).or_default().push(r);
    }
    let mut out = String::new();
    for (suite, recs) in &groups {
        let tally = Tally::of(recs.iter().copied());
        let _ = writeln!(out, "{suite}: {}", tally_line(&tally));
        if let Some((m, id)) = extreme(recs, |r| Some(r.margin), |a, b| a < b) {
            let _ = writeln!(out, "  worst margin {m:.6e} at {id}");
        }
        let probe = |r: &CheckRecord| r.diagnostics.get(PROBE_LABEL).and_then(|v| v.as_f64());
        if let Some((v, id)) = extreme(recs, probe, |a, b| a > b) {
            let _ = writeln!(out, "  largest observed constant {v:.6} at {id}");
        }
        let mut reasons: BTreeMap<&str, usize> = BTreeMap::new();
        for r in recs.iter().filter(|r| r.status != Status::Pass) {
            if let Some(reason) = r.diagnostics.get("reason").and_then(|v| v.as_str()) {
                *reasons.entry(reason).or_default() += 1;
            }
        }
        for (reason, count) in reasons {
            let _ = writeln!(out, "  {count} x {reason}");
        }
    }
    let _ = writeln!(out, "total: {}", tally_line(&Tally::of(records)));
    out
}
