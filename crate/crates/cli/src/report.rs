//! Report structures and emission. Structured output is versioned JSON whose
//! bytes are a pure function of the run configuration (timestamps honor
//! SOURCE_DATE_EPOCH so archived runs reproduce byte-for-byte).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use bellcert_core::certifier::{CertConfig, CertStatus, Witness};
use bellcert_core::search::ScanRow;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    Structured,
}

pub fn timestamp_unix() -> u64 {
    if let Ok(epoch) = std::env::var("SOURCE_DATE_EPOCH") {
        if let Ok(v) = epoch.parse() {
            return v;
        }
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoreReport {
    pub schema_version: u32,
    pub command: String,
    pub timestamp_unix: u64,
    pub nu: f64,
    pub chsh: f64,
    /// Device-dependent (trusted-measurement) fidelity floor S/(2√2);
    /// informational only, never used in certification.
    pub comparison_fidelity_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub command: String,
    pub timestamp_unix: u64,
    pub nu: f64,
    pub pc: f64,
    pub q: f64,
    pub branch: String,
    pub point: [f64; 5],
    pub epsilon: f64,
    pub epsilon_plus: f64,
    pub epsilon_minus: f64,
    pub fidelity_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub schema_version: u32,
    pub command: String,
    pub timestamp_unix: u64,
    pub nu: f64,
    pub pc: f64,
    pub q: f64,
    pub seed: u64,
    pub samples: u64,
    pub violations: u64,
    pub worst_slack: f64,
    pub best_fidelity: f64,
    pub discard_and_prepare_fidelity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyReport {
    pub schema_version: u32,
    pub command: String,
    pub timestamp_unix: u64,
    pub nu: f64,
    pub pc: f64,
    pub q: f64,
    pub branch: String,
    pub workers: usize,
    pub seed: u64,
    pub verdict: String,
    pub iota_sup: f64,
    pub lambda_max_t: f64,
    pub residual_valid: bool,
    pub boxes_processed: u64,
    pub eliminated: u64,
    pub excluded: u64,
    pub max_center_value: f64,
    pub witness: Option<Witness<f64, 5>>,
    pub frontier_size: usize,
    pub checkpoint_path: Option<String>,
    pub config: CertConfig<f64, 5>,
    pub config_hash: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub command: String,
    pub timestamp_unix: u64,
    pub nu_start: f64,
    pub nu_end: f64,
    pub nu_step: f64,
    pub pc_tolerance: f64,
    pub seed: u64,
    pub rows: Vec<ScanRow<f64>>,
    pub candidate_nu: Option<f64>,
    pub candidate_chsh: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReproReport {
    pub schema_version: u32,
    pub command: String,
    pub timestamp_unix: u64,
    pub nu: f64,
    pub pc: f64,
    pub q: f64,
    pub chsh: f64,
    pub iota_sup: f64,
    pub lambda_max_t: f64,
    pub residual_valid: bool,
    pub certifier_verdict: String,
    pub boxes_processed: u64,
    pub max_center_value: f64,
    pub frontier_size: usize,
    pub extractability_bounded: bool,
    pub statement: String,
    pub checkpoint_path: Option<String>,
    pub config_hash: String,
}

pub fn verdict_str(status: CertStatus) -> &'static str {
    match status {
        CertStatus::Certified => "certified",
        CertStatus::RefutedAtPoint => "refuted-at-point",
        CertStatus::BudgetExceeded => "budget-exceeded",
    }
}

pub fn exit_code(status: CertStatus) -> i32 {
    match status {
        CertStatus::Certified => 0,
        CertStatus::RefutedAtPoint => 1,
        CertStatus::BudgetExceeded => 3,
    }
}

/// Write `text` to `path` or stdout.
pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())
        }
    }
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// CSV with the fixed column set nu,best_pc,eps_max,chsh,certified.
pub fn scan_csv(rows: &[ScanRow<f64>]) -> String {
    let mut out = String::from("nu,best_pc,eps_max,chsh,certified\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.nu, r.best_pc, r.eps_max, r.chsh, r.certified
        ));
    }
    out
}
