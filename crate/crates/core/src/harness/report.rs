//! Accuracy tables and their markdown / CSV renderings.

use std::fmt::Write as _;

use super::{HarnessError, Result};
use crate::bayes::Evaluation;
use crate::features::Method;

/// Confusion matrix of one split, `confusion[true][predicted]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitScore {
    pub confusion: Vec<Vec<u64>>,
}

impl SplitScore {
    pub fn correct(&self) -> u64 {
        (0..self.confusion.len()).map(|c| self.confusion[c][c]).sum()
    }

    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.total() as f64
    }

    /// Recall per true class; 0 for classes without samples.
    pub fn per_class(&self) -> Vec<f64> {
        self.confusion
            .iter()
            .enumerate()
            .map(|(c, row)| {
                let n: u64 = row.iter().sum();
                if n == 0 {
                    0.0
                } else {
                    row[c] as f64 / n as f64
                }
            })
            .collect()
    }
}

impl From<Evaluation> for SplitScore {
    fn from(e: Evaluation) -> Self {
        Self { confusion: e.confusion }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Scored {
        train: SplitScore,
        test: SplitScore,
        /// Ridge load added per class (0 when the covariance was usable as is).
        ridge: Vec<f64>,
    },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// Canonical order.
    pub methods: Vec<Method>,
    pub feature_count: usize,
    pub outcome: RowOutcome,
}

impl ReportRow {
    /// "GMRF & fBm".
    pub fn combination_label(&self) -> String {
        self.methods.iter().map(|m| m.label()).collect::<Vec<_>>().join(" & ")
    }

    pub fn test_accuracy(&self) -> Option<f64> {
        match &self.outcome {
            RowOutcome::Scored { test, .. } => Some(test.accuracy()),
            RowOutcome::Failed(_) => None,
        }
    }

    pub fn train_accuracy(&self) -> Option<f64> {
        match &self.outcome {
            RowOutcome::Scored { train, .. } => Some(train.accuracy()),
            RowOutcome::Failed(_) => None,
        }
    }

    pub fn regularized(&self) -> bool {
        matches!(&self.outcome, RowOutcome::Scored { ridge, .. } if ridge.iter().any(|&r| r > 0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub class_names: Vec<String>,
    pub rows: Vec<ReportRow>,
}

impl AccuracyReport {
    /// Descending test accuracy, failed rows last; ties keep their order.
    pub fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| {
            let key = |r: &ReportRow| r.test_accuracy().unwrap_or(f64::NEG_INFINITY);
            key(b).total_cmp(&key(a))
        });
    }

    pub fn row(&self, methods: &[Method]) -> Option<&ReportRow> {
        let mut want = methods.to_vec();
        want.sort();
        self.rows.iter().find(|r| r.methods == want)
    }

    /// Best successful row among those with exactly `size` methods.
    pub fn best_of_size(&self, size: usize) -> Option<&ReportRow> {
        self.rows
            .iter()
            .filter(|r| r.methods.len() == size && r.test_accuracy().is_some())
            .max_by(|a, b| a.test_accuracy().unwrap().total_cmp(&b.test_accuracy().unwrap()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format `{other}` (expected markdown or csv)")),
        }
    }
}

pub fn percent(fraction: f64) -> String {
    format!("{:.2}%", fraction * 100.0)
}

pub fn render_report(report: &AccuracyReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => render_markdown(report),
        ReportFormat::Csv => render_csv(report),
    }
}

fn render_markdown(report: &AccuracyReport) -> String {
    let mut out = String::new();
    let singles: Vec<&ReportRow> = {
        let mut s: Vec<_> = report.rows.iter().filter(|r| r.methods.len() == 1).collect();
        s.sort_by_key(|r| r.methods[0]);
        s
    };
    if !singles.is_empty() {
        out.push_str("### Per-class accuracy of single methods\n\n| Texture |");
        for r in &singles {
            let _ = write!(out, " {0} train | {0} test |", r.methods[0].label());
        }
        out.push_str("\n|---|");
        out.push_str(&"---:|".repeat(2 * singles.len()));
        out.push('\n');
        let cell = |r: &ReportRow, pick: &dyn Fn(&SplitScore) -> String| match &r.outcome {
            RowOutcome::Scored { train, test, .. } => format!(" {} | {} |", pick(train), pick(test)),
            RowOutcome::Failed(_) => " failed | failed |".to_string(),
        };
        for (c, name) in report.class_names.iter().enumerate() {
            let _ = write!(out, "| {name} |");
            for r in &singles {
                out.push_str(&cell(r, &|s: &SplitScore| percent(s.per_class()[c])));
            }
            out.push('\n');
        }
        out.push_str("| Overall |");
        for r in &singles {
            out.push_str(&cell(r, &|s: &SplitScore| percent(s.accuracy())));
        }
        out.push_str("\n\n");
    }
    out.push_str("### Overall accuracy\n\n");
    out.push_str("| Combined methods | No. of features | Train set accuracy | Test set accuracy |\n");
    out.push_str("|---|---:|---:|---:|\n");
    for r in &report.rows {
        match &r.outcome {
            RowOutcome::Scored { train, test, .. } => {
                let flag = if r.regularized() { " (ridge)" } else { "" };
                let _ = writeln!(
                    out,
                    "| {}{flag} | {} | {} | {} |",
                    r.combination_label(),
                    r.feature_count,
                    percent(train.accuracy()),
                    percent(test.accuracy())
                );
            }
            RowOutcome::Failed(msg) => {
                let _ = writeln!(
                    out,
                    "| {} | {} | error | error: {} |",
                    r.combination_label(),
                    r.feature_count,
                    msg.replace('|', "/")
                );
            }
        }
    }
    out
}

const CSV_FIXED: [&str; 13] = [
    "combination",
    "methods",
    "feature_count",
    "train_correct",
    "train_total",
    "train_accuracy",
    "test_correct",
    "test_total",
    "test_accuracy",
    "train_confusion",
    "test_confusion",
    "ridge",
    "status",
];

fn encode_confusion(m: &[Vec<u64>]) -> String {
    m.iter()
        .map(|row| row.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

fn decode_confusion(s: &str) -> Option<Vec<Vec<u64>>> {
    s.split(';')
        .map(|row| row.split(' ').map(|v| v.parse().ok()).collect())
        .collect()
}

fn render_csv(report: &AccuracyReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = CSV_FIXED
        .iter()
        .map(|s| s.to_string())
        .chain(report.class_names.iter().map(|c| format!("test.{c}")))
        .collect();
    w.write_record(&header).expect("in-memory write");
    for r in &report.rows {
        let methods = r.methods.iter().map(|m| m.name()).collect::<Vec<_>>().join("+");
        let mut rec = vec![r.combination_label(), methods, r.feature_count.to_string()];
        match &r.outcome {
            RowOutcome::Scored { train, test, ridge } => {
                for s in [train, test] {
                    rec.extend([s.correct().to_string(), s.total().to_string(), s.accuracy().to_string()]);
                }
                rec.push(encode_confusion(&train.confusion));
                rec.push(encode_confusion(&test.confusion));
                rec.push(ridge.iter().map(f64::to_string).collect::<Vec<_>>().join(";"));
                rec.push("ok".into());
                rec.extend(test.per_class().iter().map(f64::to_string));
            }
            RowOutcome::Failed(msg) => {
                rec.extend(std::iter::repeat_n(String::new(), 9));
                rec.push(format!("error: {msg}"));
                rec.extend(std::iter::repeat_n(String::new(), report.class_names.len()));
            }
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

/// Inverse of the CSV rendering.
pub fn parse_report_csv(text: &str) -> Result<AccuracyReport> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header.len() < CSV_FIXED.len() || header[..CSV_FIXED.len()] != CSV_FIXED {
        return Err(HarnessError::Format("report header does not match".into()));
    }
    let class_names = header[CSV_FIXED.len()..]
        .iter()
        .map(|h| {
            h.strip_prefix("test.")
                .map(str::to_string)
                .ok_or_else(|| HarnessError::Format(format!("unexpected column `{h}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| HarnessError::Format(format!("report row {}: bad {what}", i + 1));
        let methods = rec[1]
            .split('+')
            .map(|m| m.parse::<Method>().map_err(|_| bad("methods")))
            .collect::<Result<Vec<_>>>()?;
        let feature_count = rec[2].parse().map_err(|_| bad("feature_count"))?;
        let status = &rec[12];
        let outcome = if status == "ok" {
            let train = SplitScore {
                confusion: decode_confusion(&rec[9]).ok_or_else(|| bad("train_confusion"))?,
            };
            let test = SplitScore {
                confusion: decode_confusion(&rec[10]).ok_or_else(|| bad("test_confusion"))?,
            };
            let ridge = if rec[11].is_empty() {
                Vec::new()
            } else {
                rec[11]
                    .split(';')
                    .map(|v| v.parse::<f64>().map_err(|_| bad("ridge")))
                    .collect::<Result<_>>()?
            };
            if train.correct().to_string() != rec[3] || test.correct().to_string() != rec[6] {
                return Err(bad("correct counts"));
            }
            RowOutcome::Scored { train, test, ridge }
        } else {
            let msg = status.strip_prefix("error: ").ok_or_else(|| bad("status"))?;
            RowOutcome::Failed(msg.to_string())
        };
        rows.push(ReportRow {
            methods,
            feature_count,
            outcome,
        });
    }
    Ok(AccuracyReport { class_names, rows })
}
