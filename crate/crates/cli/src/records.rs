//! Serializable output records.
//!
//! Every JSON document is `{"schema": "...", "records": [...]}` where the
//! schema string names the command and a version. CSV output is one flat row
//! per record. Exact values travel as strings (`"num/den"` for rationals).

use serde::{de::DeserializeOwned, Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

pub fn schema_name(command: &str) -> String {
    format!("cluster-bounds/{command}/v{SCHEMA_VERSION}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub schema: String,
    pub records: Vec<T>,
}

impl<T> Document<T> {
    pub fn new(command: &str, records: Vec<T>) -> Self {
        Document {
            schema: schema_name(command),
            records,
        }
    }
}

pub fn to_json<T: Serialize>(doc: &Document<T>) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("records serialize");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> serde_json::Result<Document<T>> {
    serde_json::from_str(text)
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("flat rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

pub fn from_csv<T: DeserializeOwned>(text: &str) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub r: u64,
    pub m: u64,
    pub paper_bound_exact: String,
    pub paper_bound_decimal: String,
    pub nagata_floor: String,
    pub sqrt_bound_lo: String,
    pub sqrt_bound_hi: String,
    pub improves: bool,
    pub vs_nagata: String,
    pub vs_sqrt_bound: String,
    /// Xu's bounds hold for irreducible reduced curves only.
    pub xu_sqrt_r_minus_1_lo: String,
    pub xu_sqrt_r_minus_1_hi: String,
    pub vs_xu_sqrt_r_minus_1: String,
    pub xu_shifted_lo: String,
    pub xu_shifted_hi: String,
    pub vs_xu_shifted: String,
    pub evain_applies: bool,
    pub precision_digits: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r: u64,
    pub m: u64,
    pub paper_bound_exact: String,
    pub paper_bound_decimal: String,
    pub nagata_floor: String,
    pub sqrt_bound_lo: String,
    pub sqrt_bound_hi: String,
    pub improves: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub stage: Option<usize>,
    pub step: usize,
    pub pivot: usize,
    pub amount: String,
    pub excess_before: String,
    pub excess_after: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageChecksRecord {
    pub first_lhs: String,
    pub first_rhs: String,
    pub first: bool,
    pub second_lhs: String,
    pub second_rhs: String,
    pub second: bool,
    pub proximity_audit: bool,
    pub conserved_quantity: bool,
    pub coefficient_identity: bool,
    pub consistent_output: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecordOut {
    pub stage: usize,
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub target: String,
    pub target_decimal: String,
    pub alpha: String,
    pub beta: String,
    pub checks: StageChecksRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepRecord>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulateRecord {
    pub r: u64,
    pub m: u64,
    pub stages: Vec<StageRecordOut>,
    pub final_first: String,
    pub certified_bound: String,
    pub certified_bound_decimal: String,
    pub matches_theorem_bound: bool,
    pub certified: bool,
}

/// Flat stage row for CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRow {
    pub stage: usize,
    pub input: String,
    pub output: String,
    pub target: String,
    pub target_decimal: String,
    pub first: bool,
    pub second: bool,
    pub proximity_audit: bool,
    pub conserved_quantity: bool,
    pub coefficient_identity: bool,
    pub consistent_output: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnloadRecord {
    pub points: usize,
    pub proximities: Vec<[usize; 2]>,
    pub initial: Vec<String>,
    pub unloaded: Vec<String>,
    pub excesses: Vec<String>,
    pub consistent: bool,
    pub steps_taken: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepRecord>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRow {
    pub point: usize,
    pub initial: String,
    pub unloaded: String,
    pub excess: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStepRecord {
    pub name: String,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropRecord {
    pub n: u64,
    pub b_exact: String,
    pub b_decimal: String,
    pub rhs_lo: String,
    pub rhs_hi: String,
    pub verdict: String,
    pub exploratory: bool,
    pub chain_passes: bool,
    pub precision_digits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof_chain: Option<Vec<ChainStepRecord>>,
}

/// Flat row for CSV; with `--verbose` the output is one [`ChainRow`] per proof step instead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropRow {
    pub n: u64,
    pub b_exact: String,
    pub b_decimal: String,
    pub rhs_lo: String,
    pub rhs_hi: String,
    pub verdict: String,
    pub exploratory: bool,
    pub chain_passes: bool,
    pub precision_digits: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRow {
    pub n: u64,
    pub step: usize,
    pub name: String,
    pub outcome: String,
}
