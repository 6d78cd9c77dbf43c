use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::chain::ChainReport;
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};

use super::{ExperimentOutcome, Member, RunSummary, TrendVerdict, SCHEMA_VERSION};

/// Chain pair columns in the order `chain_report_from` lists the pairs.
const PAIR_COLUMNS: [&str; 7] = [
    "hat_g_g1",
    "g1_g2",
    "g1_g2prime",
    "g2_g3",
    "g3_target",
    "hat_g_g3",
    "hat_g_target",
];

/// Header plus string rows, written verbatim as CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }
}

/// Header names and values of a flat serializable struct.
fn flatten<T: Serialize>(v: &T) -> Result<(Vec<String>, Vec<String>)> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(v)?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    let headers = r.headers()?.iter().map(String::from).collect();
    let row = match r.records().next() {
        Some(rec) => rec?.iter().map(String::from).collect(),
        None => Vec::new(),
    };
    Ok((headers, row))
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// One row per output time: diagnostics record, roundness deficit and the
/// spatial integrand of every chain pair.
pub fn per_time_table(
    member: &Member,
    records: &[DiagnosticsRecord],
    roundness: &[f64],
    chain: Option<&ChainReport>,
) -> Result<Table> {
    let mut headers: Vec<String> = vec!["schema_version".into(), "member".into(), "parameter".into()];
    let mut rows = Vec::with_capacity(records.len());
    for (k, rec) in records.iter().enumerate() {
        let (h, vals) = flatten(rec)?;
        if k == 0 {
            headers.extend(h);
            headers.push("roundness_deficit".into());
            headers.extend(PAIR_COLUMNS.iter().map(|c| format!("p_{c}")));
        }
        let mut row = vec![SCHEMA_VERSION.to_string(), member.index.to_string(), num(member.parameter)];
        row.extend(vals);
        row.push(roundness.get(k).map(|v| num(*v)).unwrap_or_default());
        for p in 0..PAIR_COLUMNS.len() {
            let v = chain.and_then(|c| c.pairs.get(p)).and_then(|p| p.profile.get(k));
            row.push(v.map(|v| num(*v)).unwrap_or_default());
        }
        rows.push(row);
    }
    Ok(Table { headers, rows })
}

/// One row per member, then one trend verdict row for stability families.
pub fn summary_table(summaries: &[RunSummary], trends: &[TrendVerdict]) -> Result<Table> {
    let mut t = Table::default();
    for s in summaries {
        let (h, row) = flatten(s)?;
        if t.headers.is_empty() {
            t.headers = h;
        }
        t.rows.push(row);
    }
    if !trends.is_empty() && !t.headers.is_empty() {
        let mut row = vec![String::new(); t.headers.len()];
        let set = |row: &mut Vec<String>, col: &str, v: String| {
            if let Some(i) = t.column(col) {
                row[i] = v;
            }
        };
        set(&mut row, "schema_version", SCHEMA_VERSION.to_string());
        set(&mut row, "member", "trend".into());
        set(&mut row, "passed", trends.iter().all(TrendVerdict::passed).to_string());
        let failed: Vec<&str> = trends.iter().filter(|v| !v.passed()).map(|v| v.quantity.as_str()).collect();
        set(&mut row, "failed_checks", failed.join(";"));
        let ratios: Vec<String> = trends.iter().map(|v| format!("{} last/first = {}", v.quantity, v.ratio)).collect();
        set(&mut row, "error", ratios.join("; "));
        t.rows.push(row);
    }
    Ok(t)
}

fn sci(v: f64) -> String {
    if v.is_nan() {
        "-".into()
    } else {
        format!("{v:.3e}")
    }
}

/// Fixed-width text table of the summaries, the trend verdicts and the overall verdict.
pub fn emit_report(name: &str, summaries: &[RunSummary], trends: &[TrendVerdict]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "experiment {name}");
    let _ = writeln!(
        out,
        "{:>6} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}  verdict",
        "member", "parameter", "m_H(T)", "d(hat_g,*)", "roundness", "identity", "slack_stmt", "slack_prf", "h_conc"
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{:>6} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}  {}",
            s.member,
            sci(s.parameter),
            sci(s.m_h_final),
            sci(s.d_hat_g_target),
            sci(s.roundness_max),
            sci(s.worst_identity_residual()),
            sci(s.slack_statement),
            sci(s.slack_proof),
            sci(s.h_concentration_mid),
            if s.passed { "PASS" } else { "FAIL" }
        );
        for c in s.checks.iter().filter(|c| !c.passed) {
            let _ = writeln!(out, "{:>8}failed {}: {} > {}", "", c.name, sci(c.value), sci(c.limit));
        }
        if !s.error.is_empty() {
            let _ = writeln!(out, "{:>8}error: {}", "", s.error);
        }
        if s.checks.is_empty() && s.error.is_empty() {
            let _ = writeln!(out, "{:>8}no checks ran", "");
        }
    }
    for v in trends {
        let vals: Vec<String> = v.values.iter().map(|x| sci(*x)).collect();
        let _ = writeln!(
            out,
            "trend {}: [{}] last/first {} {}",
            v.quantity,
            vals.join(", "),
            sci(v.ratio),
            if v.passed() { "PASS" } else { "FAIL" }
        );
    }
    let ok = !summaries.is_empty() && summaries.iter().all(|s| s.passed) && trends.iter().all(TrendVerdict::passed);
    let _ = writeln!(out, "verdict {}", if ok { "PASS" } else { "FAIL" });
    out
}

/// Writes `<name>_member<i>.csv`, `<name>_summary.csv` and `<name>_report.txt`.
pub fn write_outputs(dir: &Path, outcome: &ExperimentOutcome) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = &outcome.config.name;
    let mut files = Vec::new();
    for (s, t) in outcome.summaries.iter().zip(&outcome.tables) {
        let p = dir.join(format!("{name}_member{:02}.csv", s.member));
        t.write_csv(&p)?;
        files.push(p);
    }
    let p = dir.join(format!("{name}_summary.csv"));
    summary_table(&outcome.summaries, &outcome.trends)?.write_csv(&p)?;
    files.push(p);
    let p = dir.join(format!("{name}_report.txt"));
    std::fs::write(&p, outcome.report())?;
    files.push(p);
    Ok(files)
}
