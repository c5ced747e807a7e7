//! Experiment reports: verdicts, scalars, tables, and deterministic output.
//!
//! A report serializes to `report.json` plus one CSV per table inside
//! `out/<experiment>/<config-hash>/`. With timestamps suppressed the entire
//! output tree is a pure function of the resolved configuration, so two
//! runs produce byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

use super::config::ResolvedConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    /// Must pass for the experiment (and the process) to succeed.
    Gate,
    /// Reported and checked, but never fails the run.
    Advisory,
}

/// One checked claim with the measured value and its threshold.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub id: String,
    pub kind: VerdictKind,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Verdict {
    pub fn gate(id: &str, pass: bool, value: f64, threshold: f64, detail: String) -> Self {
        Verdict {
            id: id.into(),
            kind: VerdictKind::Gate,
            pass,
            value,
            threshold,
            detail,
        }
    }

    pub fn advisory(id: &str, pass: bool, value: f64, threshold: f64, detail: String) -> Self {
        Verdict {
            id: id.into(),
            kind: VerdictKind::Advisory,
            pass,
            value,
            threshold,
            detail,
        }
    }
}

/// A rectangular table, exported as CSV next to the report.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Render the table as CSV (quoting cells that need it).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&csv_row(&self.columns));
        for row in &self.rows {
            out.push_str(&csv_row(row));
        }
        out
    }
}

fn csv_row(cells: &[String]) -> String {
    let escaped: Vec<String> = cells
        .iter()
        .map(|c| {
            if c.contains(',') || c.contains('"') || c.contains('\n') {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        })
        .collect();
    format!("{}\n", escaped.join(","))
}

/// Everything one experiment run produced.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config_hash: String,
    pub pass: bool,
    pub verdicts: Vec<Verdict>,
    pub scalars: BTreeMap<String, f64>,
    pub tables: BTreeMap<String, Table>,
    pub config: ResolvedConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

impl ExperimentReport {
    pub fn new(config: ResolvedConfig) -> Self {
        ExperimentReport {
            experiment: config.experiment.clone(),
            config_hash: config.hash(),
            pass: true,
            verdicts: Vec::new(),
            scalars: BTreeMap::new(),
            tables: BTreeMap::new(),
            config,
            wall_clock_ms: None,
        }
    }

    pub fn record(&mut self, verdict: Verdict) {
        if verdict.kind == VerdictKind::Gate && !verdict.pass {
            self.pass = false;
        }
        self.verdicts.push(verdict);
    }

    pub fn scalar(&mut self, name: &str, value: f64) {
        self.scalars.insert(name.into(), value);
    }

    pub fn table(&mut self, name: &str, table: Table) {
        self.tables.insert(name.into(), table);
    }

    /// Directory this report lands in, under `out_root`.
    pub fn output_dir(&self, out_root: &Path) -> PathBuf {
        out_root.join(&self.experiment).join(&self.config_hash)
    }

    /// Write `report.json` and one `<table>.csv` per table; returns the
    /// report path.
    pub fn write(&self, out_root: &Path) -> Result<PathBuf> {
        let dir = self.output_dir(out_root);
        fs::create_dir_all(&dir)?;
        let json = serde_json::to_string_pretty(self)?;
        let report_path = dir.join("report.json");
        fs::write(&report_path, format!("{json}\n"))?;
        for (name, table) in &self.tables {
            fs::write(dir.join(format!("{name}.csv")), table.to_csv())?;
        }
        Ok(report_path)
    }

    /// One line per verdict, for terminal output.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let kind = match v.kind {
                VerdictKind::Gate => "gate",
                VerdictKind::Advisory => "advisory",
            };
            out.push_str(&format!(
                "{} [{kind}] {}: value {:.6e} vs threshold {:.6e} — {}\n",
                if v.pass { "PASS" } else { "FAIL" },
                v.id,
                v.value,
                v.threshold,
                v.detail
            ));
        }
        out.push_str(&format!(
            "{}: {}\n",
            self.experiment,
            if self.pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}
