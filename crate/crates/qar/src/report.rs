//! Run reports and table writers.
//!
//! Every run produces one JSON report (resolved config echo, results
//! payload, law-audit summary, version, timing) and, in CSV mode, RFC-4180
//! tables with '.' decimals and no locale dependence. The CSV payload is a
//! pure function of the resolved config — timing lives only in the report —
//! so identical configs give byte-identical tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::scaling::SweepRow;
use crate::thermo::CurrentsReport;

/// Aggregate of the law audits run during a command.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct LawAuditSummary {
    pub points_audited: usize,
    /// max |J_h + J_c + J_n| / max|J_k| over all audited steady states.
    pub max_first_law_rel_residual: f64,
    /// most negative Σ_u encountered.
    pub min_sigma_total: f64,
    pub cop_chain_checked: usize,
    pub cop_chain_ok: bool,
}

impl LawAuditSummary {
    pub fn absorb_currents(&mut self, c: &CurrentsReport) {
        self.points_audited += 1;
        let scale = c.scale().max(1e-300);
        let rel = c.first_law_residual.abs() / scale;
        if rel > self.max_first_law_rel_residual {
            self.max_first_law_rel_residual = rel;
        }
    }

    pub fn absorb_sigma(&mut self, sigma_total: f64) {
        if self.points_audited == 0 || sigma_total < self.min_sigma_total {
            self.min_sigma_total = sigma_total;
        }
    }

    pub fn absorb_cop(&mut self, ok: bool) {
        self.cop_chain_checked += 1;
        if self.cop_chain_checked == 1 {
            self.cop_chain_ok = ok;
        } else {
            self.cop_chain_ok &= ok;
        }
    }
}

/// The structured document written once per run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub law_audit: LawAuditSummary,
    pub results: serde_json::Value,
    /// Wall-clock duration; excluded from determinism guarantees.
    pub elapsed_ms: u128,
    /// Files written by the run, relative to the output directory.
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        RunReport {
            command: command.to_string(),
            version: crate::VERSION.to_string(),
            config: config.clone(),
            law_audit: LawAuditSummary::default(),
            results: json!({}),
            elapsed_ms: 0,
            artifacts: Vec::new(),
        }
    }

    pub fn write_json(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.report.json", self.command));
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Internal(format!("report serialization: {e}")))?;
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Format a float for CSV: Rust's shortest round-trip representation,
/// always with '.' as the decimal separator.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

/// Write one CSV table; the header comes first, every row must match its
/// width.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    w.write_record(header)
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row)
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    }
    w.flush()?;
    Ok(())
}

/// Sibling metadata file embedding the resolved config next to a table.
pub fn write_meta(table_path: &Path, config: &RunConfig, command: &str) -> Result<PathBuf> {
    let meta_path = table_path.with_extension("meta.json");
    let doc = json!({
        "command": command,
        "version": crate::VERSION,
        "config": config,
    });
    fs::write(
        &meta_path,
        serde_json::to_string_pretty(&doc)
            .map_err(|e| Error::Internal(format!("meta serialization: {e}")))?,
    )?;
    Ok(meta_path)
}

/// Standard 9-column sweep table rows (grid-aligned; infeasible rows keep
/// their place with empty numeric cells).
pub fn sweep_table_rows(rows: &[SweepRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            let mut out = vec![fmt_f64(r.value)];
            match (&r.currents, &r.entropy) {
                (Some(c), Some(e)) => {
                    out.extend([
                        fmt_f64(c.j_hot),
                        fmt_f64(c.j_cold),
                        fmt_f64(c.j_noise),
                        fmt_f64(e.sigma_hot),
                        fmt_f64(e.sigma_cold),
                        fmt_f64(e.sigma_total),
                        r.cop_machine.map(fmt_f64).unwrap_or_default(),
                    ]);
                }
                _ => out.extend(std::iter::repeat_n(String::new(), 7)),
            }
            out.push(if r.feasible { "1".into() } else { "0".into() });
            out
        })
        .collect()
}

pub const SWEEP_HEADER: [&str; 9] = [
    "parameter",
    "j_hot",
    "j_cold",
    "j_noise",
    "sigma_hot",
    "sigma_cold",
    "sigma_total",
    "cop",
    "feasible",
];
