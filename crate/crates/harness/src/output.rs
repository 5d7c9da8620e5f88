//! Trial records, summaries and their CSV / JSON forms.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::error::{HarnessError, Result};
use crate::stats::{wilson, Z95};

/// One trial: its index, named statistics and flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub values: Vec<(String, f64)>,
    pub flags: Vec<String>,
}

impl TrialRecord {
    pub fn new(trial: u64) -> Self {
        TrialRecord {
            trial,
            values: Vec::new(),
            flags: Vec::new(),
        }
    }

    pub fn value(mut self, name: &str, v: f64) -> Self {
        self.values.push((name.to_string(), v));
        self
    }

    pub fn flag(mut self, f: &str) -> Self {
        self.flags.push(f.to_string());
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    pub fn has_flag(&self, f: &str) -> bool {
        self.flags.iter().any(|x| x == f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub n: usize,
    pub eps: f64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
}

impl SummaryRow {
    /// A frequency with its Wilson interval.
    pub fn frequency(experiment: &str, n: usize, eps: f64, hits: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson(hits, trials, Z95);
        SummaryRow {
            experiment: experiment.to_string(),
            n,
            eps,
            estimate: hits as f64 / trials as f64,
            ci_low,
            ci_high,
            trials,
        }
    }

    /// An exactly known value; the interval is degenerate.
    pub fn exact(experiment: &str, n: usize, eps: f64, value: f64, trials: u64) -> Self {
        SummaryRow {
            experiment: experiment.to_string(),
            n,
            eps,
            estimate: value,
            ci_low: value,
            ci_high: value,
            trials,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
    /// Fitted constants, slopes and exact counts.
    pub derived: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl RunOutput {
    pub fn new(config: ExperimentConfig) -> Self {
        RunOutput {
            config,
            records: Vec::new(),
            summary: Vec::new(),
            derived: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary_for(&self, experiment: &str) -> Vec<&SummaryRow> {
        self.summary
            .iter()
            .filter(|r| r.experiment == experiment)
            .collect()
    }
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub const RECORD_HEADER: [&str; 7] = [
    "experiment",
    "n",
    "d",
    "trial",
    "statistic",
    "value",
    "flag",
];
pub const SUMMARY_HEADER: [&str; 7] = [
    "experiment",
    "n",
    "eps",
    "estimate",
    "ci_low",
    "ci_high",
    "trials",
];
pub const DERIVED_HEADER: [&str; 4] = ["experiment", "n", "quantity", "value"];

/// One CSV row per (trial, statistic); flags joined with `;`.
pub fn write_records_csv<W: Write>(out: &RunOutput, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(RECORD_HEADER)?;
    let (exp, n, d) = (
        out.config.experiment.name(),
        out.config.n.to_string(),
        out.config.d.to_string(),
    );
    for r in &out.records {
        let flag = r.flags.join(";");
        for (stat, v) in &r.values {
            wr.write_record([
                exp,
                &n,
                &d,
                &r.trial.to_string(),
                stat,
                &fmt_float(*v),
                &flag,
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: &RunOutput, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(SUMMARY_HEADER)?;
    for s in &out.summary {
        wr.write_record([
            s.experiment.as_str(),
            &s.n.to_string(),
            &fmt_float(s.eps),
            &fmt_float(s.estimate),
            &fmt_float(s.ci_low),
            &fmt_float(s.ci_high),
            &s.trials.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_derived_csv<W: Write>(out: &RunOutput, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(DERIVED_HEADER)?;
    let (exp, n) = (out.config.experiment.name(), out.config.n.to_string());
    for (k, v) in &out.derived {
        wr.write_record([exp, &n, k, &fmt_float(*v)])?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    experiment: &'a str,
    n: usize,
    d: usize,
    trial: u64,
    statistic: &'a str,
    value: f64,
    flag: String,
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    rows: &'a [SummaryRow],
    derived: &'a BTreeMap<String, f64>,
    checks: &'a [Check],
}

#[derive(Serialize)]
struct JsonRun<'a> {
    config: &'a ExperimentConfig,
    records: Vec<JsonRecord<'a>>,
    summary: JsonSummary<'a>,
}

pub fn write_json<W: Write>(out: &RunOutput, w: W) -> Result<()> {
    let exp = out.config.experiment.name();
    let records = out
        .records
        .iter()
        .flat_map(|r| {
            r.values.iter().map(move |(stat, v)| JsonRecord {
                experiment: exp,
                n: out.config.n,
                d: out.config.d,
                trial: r.trial,
                statistic: stat,
                value: *v,
                flag: r.flags.join(";"),
            })
        })
        .collect();
    let run = JsonRun {
        config: &out.config,
        records,
        summary: JsonSummary {
            rows: &out.summary,
            derived: &out.derived,
            checks: &out.checks,
        },
    };
    serde_json::to_writer_pretty(w, &run)?;
    Ok(())
}

/// `base` with `.suffix` inserted before the extension (`run.csv` -> `run.summary.csv`).
pub fn sibling_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{suffix}.csv"),
    };
    base.with_file_name(name)
}

/// Writes the run where the configuration asks: files under `out`, or stdout.
pub fn emit(out: &RunOutput) -> Result<()> {
    match (&out.config.out, out.config.format) {
        (Some(path), Format::Csv) => {
            write_records_csv(out, std::fs::File::create(path)?)?;
            if !out.summary.is_empty() {
                write_summary_csv(out, std::fs::File::create(sibling_path(path, "summary"))?)?;
            }
            if !out.derived.is_empty() {
                write_derived_csv(out, std::fs::File::create(sibling_path(path, "derived"))?)?;
            }
        }
        (Some(path), Format::Json) => {
            write_json(out, std::io::BufWriter::new(std::fs::File::create(path)?))?
        }
        (None, Format::Csv) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_records_csv(out, &mut lock)?;
            if !out.summary.is_empty() {
                writeln!(lock)?;
                write_summary_csv(out, &mut lock)?;
            }
            if !out.derived.is_empty() {
                writeln!(lock)?;
                write_derived_csv(out, &mut lock)?;
            }
        }
        (None, Format::Json) => {
            write_json(out, std::io::stdout().lock())?;
            println!();
        }
    }
    Ok(())
}

/// A parsed row of a records CSV file.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct RecordRow {
    pub experiment: String,
    pub n: usize,
    pub d: usize,
    pub trial: u64,
    pub statistic: String,
    pub value: f64,
    pub flag: String,
}

/// Reads a records CSV, checking the header and that `(trial, statistic)` pairs are unique.
pub fn read_records_csv<R: Read>(r: R) -> Result<Vec<RecordRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers()?.clone();
    if header.iter().ne(RECORD_HEADER.iter().copied()) {
        return Err(HarnessError::usage(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    let mut rows = Vec::new();
    for row in rd.deserialize() {
        let row: RecordRow = row?;
        if !seen.insert((row.trial, row.statistic.clone())) {
            return Err(HarnessError::usage(format!(
                "duplicate record for trial {} statistic {}",
                row.trial, row.statistic
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}
