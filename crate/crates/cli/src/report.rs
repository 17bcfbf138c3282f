//! Run configuration, reproducibility header and output documents.

use std::path::Path;

use kobayashi_core::detectors::SpcVerdict;
use kobayashi_core::format::{g17, to_json, to_json_pretty};
use kobayashi_core::linalg::AffineDoc;
use kobayashi_core::rescaling::KdReport;
use kobayashi_core::{Tolerances, VerdictConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Contents of a `--config` file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub verdict: VerdictConfig,
    /// Recorded in the header; every computation is deterministic.
    pub seed: u64,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", p.display()))
            }
        }
    }

    pub fn sha256(&self) -> String {
        let digest = Sha256::digest(to_json(self).as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub verdict: VerdictConfig,
}

impl Header {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Self {
            tool: "kobayashi".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256: cfg.sha256(),
            seed: cfg.seed,
            tolerances: cfg.tolerances.clone(),
            verdict: cfg.verdict.clone(),
        }
    }

    /// `#` comment lines placed above CSV tables.
    pub fn csv_preamble(&self) -> String {
        format!(
            "# tool={} version={} command={} config_sha256={} seed={}\n# tolerances={}\n# verdict={}\n",
            self.tool,
            self.version,
            self.command,
            self.config_sha256,
            self.seed,
            to_json(&self.tolerances),
            to_json(&self.verdict)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope<T> {
    pub header: Header,
    pub result: T,
}

pub fn json_document<T: Serialize>(header: Header, result: T) -> String {
    let mut s = to_json_pretty(&Envelope { header, result });
    s.push('\n');
    s
}

/// A CSV table with the header preamble; floats use 17 significant digits.
pub struct Table {
    columns: &'static str,
    rows: Vec<String>,
}

impl Table {
    pub fn new(columns: &'static str) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, cells: &[Cell]) {
        let row: Vec<String> = cells.iter().map(Cell::render).collect();
        self.rows.push(row.join(","));
    }

    pub fn render(&self, header: &Header) -> String {
        let mut s = header.csv_preamble();
        s.push_str(self.columns);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

pub enum Cell {
    Int(usize),
    Float(f64),
    Opt(Option<f64>),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(k) => k.to_string(),
            Cell::Float(x) => csv_float(*x),
            Cell::Opt(Some(x)) => csv_float(*x),
            Cell::Opt(None) => String::new(),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

fn csv_float(x: f64) -> String {
    if x.is_finite() {
        g17(x)
    } else {
        String::new()
    }
}

// ---------------------------------------------------------------------------
// per-command results

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaResult {
    pub point: Vec<[f64; 2]>,
    pub dir: Option<Vec<[f64; 2]>>,
    pub delta: f64,
    /// Minimising phase of the complex line for directional distances.
    pub theta: Option<f64>,
    pub boundary_point: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistResult {
    pub z1: Vec<[f64; 2]>,
    pub z2: Vec<[f64; 2]>,
    /// Closed-form distance for model domains.
    pub exact: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovResult {
    pub model: String,
    pub exponent: f64,
    pub half_width: f64,
    pub intercept: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub n_samples: usize,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HausdorffDeltas {
    #[serde(rename = "1")]
    pub r1: Option<f64>,
    #[serde(rename = "4")]
    pub r4: Option<f64>,
    #[serde(rename = "16")]
    pub r16: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RescaleStep {
    pub n: usize,
    pub r: f64,
    pub affine: AffineDoc,
    pub kd: KdReport,
    #[serde(rename = "dH")]
    pub dh: HausdorffDeltas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizeResult {
    pub point: Vec<[f64; 2]>,
    pub affine: AffineDoc,
    pub kd: KdReport,
    pub boundary_points: Vec<Vec<[f64; 2]>>,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictDoc {
    pub exponent: f64,
    pub half_width: f64,
    pub target: f64,
    pub verdict: String,
}

impl From<&SpcVerdict> for VerdictDoc {
    fn from(v: &SpcVerdict) -> Self {
        Self {
            exponent: v.exponent_fit.exponent,
            half_width: v.exponent_fit.half_width,
            target: v.target,
            verdict: v.verdict.label().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRowDoc {
    pub xi_index: usize,
    pub dir_index: usize,
    pub xi: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
    pub exponent: f64,
    pub half_width: f64,
    pub target: f64,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanDoc {
    pub worst: ScanRowDoc,
    pub rows: Vec<ScanRowDoc>,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HausdorffResult {
    #[serde(rename = "R")]
    pub radius: f64,
    pub samples: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BergmanResult {
    pub d: usize,
    pub z: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
    pub curvature: f64,
    pub klembeck_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeResult {
    pub point: Vec<[f64; 2]>,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorDoc {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
}
