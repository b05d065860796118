//! Record layouts and atomic CSV/JSON writers.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use spinwrite::angle_mapper::AngleMapEntry;
use spinwrite::mean_field::{BranchTag, FieldScanRow};
use spinwrite::{CurvePoint, MapMethod};

use crate::config::Format;
use crate::error::CliError;

pub fn method_name(m: MapMethod) -> &'static str {
    match m {
        MapMethod::Analytic => "analytic",
        MapMethod::Refined => "refined",
    }
}

pub fn tag_name(t: BranchTag) -> &'static str {
    match t {
        BranchTag::Continued => "continued",
        BranchTag::Reseeded => "reseeded",
        BranchTag::Jumped => "jumped",
    }
}

/// One written-and-read-back grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    #[serde(rename = "B0_T")]
    pub b0_t: f64,
    #[serde(rename = "T_K")]
    pub t_k: f64,
    pub t_reduced: Option<f64>,
    pub branch: String,
    pub m: f64,
    #[serde(rename = "M_si")]
    pub m_si: f64,
    #[serde(rename = "B_eff")]
    pub b_eff: f64,
    #[serde(rename = "M_nmr")]
    pub m_nmr: f64,
    pub discrepancy: f64,
    #[serde(rename = "theta_xA")]
    pub theta_xa: f64,
    #[serde(rename = "theta_yA")]
    pub theta_ya: f64,
    #[serde(rename = "theta_xB")]
    pub theta_xb: f64,
    #[serde(rename = "theta_yB")]
    pub theta_yb: f64,
    pub trace_distance: f64,
}

impl From<&CurvePoint> for CurveRecord {
    fn from(p: &CurvePoint) -> Self {
        let [xa, ya, xb, yb] = p.angles.as_array();
        CurveRecord {
            b0_t: p.b0,
            t_k: p.temperature,
            t_reduced: p.t_reduced,
            branch: p.branch.to_string(),
            m: p.m,
            m_si: p.magnetization,
            b_eff: p.b_eff,
            m_nmr: p.m_nmr,
            discrepancy: p.discrepancy,
            theta_xa: xa,
            theta_ya: ya,
            theta_xb: xb,
            theta_yb: yb,
            trace_distance: p.trace_distance,
        }
    }
}

/// One certified angle-table entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleRecord {
    #[serde(rename = "B0_T")]
    pub b0_t: f64,
    #[serde(rename = "T_K")]
    pub t_k: f64,
    pub t_reduced: Option<f64>,
    pub branch: String,
    pub m: f64,
    #[serde(rename = "B_eff")]
    pub b_eff: f64,
    #[serde(rename = "theta_xA")]
    pub theta_xa: f64,
    #[serde(rename = "theta_yA")]
    pub theta_ya: f64,
    #[serde(rename = "theta_xB")]
    pub theta_xb: f64,
    #[serde(rename = "theta_yB")]
    pub theta_yb: f64,
    pub trace_distance: f64,
    pub method: String,
    pub tag: String,
}

impl AngleRecord {
    pub fn new(entry: &AngleMapEntry, branch: &str, t_c: Option<f64>) -> Self {
        let [xa, ya, xb, yb] = entry.angles.as_array();
        AngleRecord {
            b0_t: entry.b0,
            t_k: entry.temperature,
            t_reduced: t_c.map(|tc| entry.temperature / tc),
            branch: branch.to_owned(),
            m: entry.m,
            b_eff: entry.solution.b_eff,
            theta_xa: xa,
            theta_ya: ya,
            theta_xb: xb,
            theta_yb: yb,
            trace_distance: entry.achieved_distance,
            method: method_name(entry.method).to_owned(),
            tag: tag_name(entry.tag).to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrillouinRecord {
    pub spin: f64,
    pub y: f64,
    pub brillouin: f64,
}

/// One field of a critical-field scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldScanRecord {
    #[serde(rename = "B0_T")]
    pub b0_t: f64,
    pub up_jumps: usize,
    pub down_jumps: usize,
    /// First heating jump temperature.
    #[serde(rename = "up_jump_T_K")]
    pub up_jump_t_k: Option<f64>,
    /// First cooling jump temperature.
    #[serde(rename = "down_jump_T_K")]
    pub down_jump_t_k: Option<f64>,
    pub max_branch_gap: f64,
    pub jump_free: bool,
}

impl From<&FieldScanRow> for FieldScanRecord {
    fn from(r: &FieldScanRow) -> Self {
        FieldScanRecord {
            b0_t: r.b0,
            up_jumps: r.up_transitions.len(),
            down_jumps: r.down_transitions.len(),
            up_jump_t_k: r.up_transitions.first().map(|t| t.temperature),
            down_jump_t_k: r.down_transitions.first().map(|t| t.temperature),
            max_branch_gap: r.max_branch_gap,
            jump_free: r.is_jump_free(),
        }
    }
}

pub fn render<T: Serialize>(records: &[T], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in records {
                w.serialize(r).map_err(CliError::Csv)?;
            }
            w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
        }
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(records).map_err(CliError::Json)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// or to stdout when `path` is `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        return out
            .write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            });
    };
    let io_err = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_owned(),
        _ => PathBuf::from("."),
    };
    let mut tmp = NamedTempFile::new_in(&dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(CliError::Csv)?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(CliError::Csv)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(CliError::Json)
}
