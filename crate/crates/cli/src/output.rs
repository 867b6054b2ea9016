use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

use shellzeta::report::InequalityReport;
use shellzeta::verify::{Basis, Criterion, VerifyReport};

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Out {
    pub format: Format,
    path: Option<PathBuf>,
}

impl Out {
    pub fn new(format: Format, path: Option<PathBuf>) -> Self {
        Out { format, path }
    }

    fn write(&self, bytes: &[u8]) -> Result<(), Failure> {
        let res = match &self.path {
            Some(p) => File::create(p).and_then(|mut f| f.write_all(bytes)),
            None => io::stdout().lock().write_all(bytes),
        };
        res.map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
    }

    pub fn json<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(format!("cannot encode JSON: {e}")))?;
        s.push('\n');
        self.write(s.as_bytes())
    }

    pub fn csv(&self, header: &[String], rows: &[Vec<String>]) -> Result<(), Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let enc = |e: csv::Error| Failure::Usage(format!("cannot encode CSV: {e}"));
        w.write_record(header).map_err(enc)?;
        for r in rows {
            w.write_record(r).map_err(enc)?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Usage(format!("cannot encode CSV: {e}")))?;
        self.write(&bytes)
    }

    pub fn text(&self, s: &str) -> Result<(), Failure> {
        self.write(s.as_bytes())
    }
}

pub fn basis(b: Basis) -> &'static str {
    match b {
        Basis::Literature => "literature",
        Basis::ClosedForm => "closed-form",
        Basis::Oracle => "oracle",
    }
}

pub fn criterion(c: Criterion) -> &'static str {
    match c {
        Criterion::Relative => "rel",
        Criterion::Absolute => "abs",
        Criterion::AtLeast => ">=",
        Criterion::AtMost => "<=",
    }
}

pub fn report(out: &Out, rep: &InequalityReport) -> Result<(), Failure> {
    match out.format {
        Format::Json => out.json(rep),
        Format::Csv => {
            let rows = rep
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.name.clone(),
                        format!("{:e}", e.lhs),
                        format!("{:e}", e.rhs),
                        format!("{:e}", e.slack),
                        format!("{:e}", e.tolerance),
                        e.holds.to_string(),
                    ]
                })
                .collect::<Vec<_>>();
            out.csv(&["inequality", "lhs", "rhs", "slack", "tolerance", "holds"].map(String::from), &rows)
        }
    }
}

/// Fixed-width table, one line per check, followed by a summary line.
pub fn verify_table(rep: &VerifyReport) -> String {
    let mut s = String::new();
    let name_w = rep.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(5).min(96);
    s.push_str(&format!(
        "{:<6} {:<10} {:<name_w$} {:<11} {:>4} {:>14} {:>14} {:>9}\n",
        "result", "group", "check", "basis", "cmp", "expected", "observed", "tolerance"
    ));
    for c in &rep.checks {
        s.push_str(&format!(
            "{:<6} {:<10} {:<name_w$} {:<11} {:>4} {:>14.7e} {:>14.7e} {:>9.1e}\n",
            if c.pass { "pass" } else { "FAIL" },
            c.group,
            c.name,
            basis(c.basis),
            criterion(c.criterion),
            c.expected,
            c.observed,
            c.tolerance,
        ));
        if !c.pass && !c.detail.is_empty() {
            s.push_str(&format!("       {}\n", c.detail));
        }
    }
    s.push_str(&format!(
        "{} checks, {} passed, {} failed (seed {})\n",
        rep.checks.len(),
        rep.checks.len() - rep.failures(),
        rep.failures(),
        rep.seed
    ));
    s
}
