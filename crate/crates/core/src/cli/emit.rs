//! CSV and JSON writers.
//!
//! Spectra columns: omega_rad_s, lambda_nm, joint_density,
//! singles_signal_density, singles_idler_density (densities in s^-1 per rad/s,
//! unfiltered). Sweep columns: param, R_hz, Rs_hz, Ri_hz, eta, status.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::OutputFormat;
use super::scenario::{RunReport, ScenarioOutput, SweepRow, SweepTable};
use crate::constants::wavelength_from_omega;
use crate::error::{Error, Result};
use crate::rates::Spectra;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraRow {
    pub omega_rad_s: f64,
    pub lambda_nm: f64,
    pub joint_density: f64,
    pub singles_signal_density: f64,
    pub singles_idler_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub kind: String,
    pub tool: String,
    pub version: String,
    pub preset: String,
    pub config_sha256: String,
    pub dispersion_sha256: String,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonTable<R> {
    pub metadata: Metadata,
    pub rows: Vec<R>,
}

pub const SPECTRA_COLUMNS: [&str; 5] = [
    "omega_rad_s",
    "lambda_nm",
    "joint_density",
    "singles_signal_density",
    "singles_idler_density",
];
pub const SWEEP_COLUMNS: [&str; 6] = ["param", "R_hz", "Rs_hz", "Ri_hz", "eta", "status"];

pub fn spectra_rows(s: &Spectra) -> Vec<SpectraRow> {
    (0..s.joint.omega.len())
        .map(|j| {
            let w = s.joint.omega[j];
            SpectraRow {
                omega_rad_s: w,
                lambda_nm: wavelength_from_omega(w) * 1e9,
                joint_density: s.joint.value[j],
                singles_signal_density: s.singles_signal.value[j],
                singles_idler_density: s.singles_idler.value[j],
            }
        })
        .collect()
}

fn csv_bytes<R: Serialize>(rows: &[R], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        source: std::io::Error::other(e.to_string()),
    };
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io {
        path: "<csv>".into(),
        source: std::io::Error::other(e.to_string()),
    })
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serialisable");
    v.push(b'\n');
    v
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<ManifestEntry> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok(ManifestEntry {
        file: name.to_string(),
        sha256: hex::encode(Sha256::digest(bytes)),
        bytes: bytes.len() as u64,
    })
}

fn metadata(report: &RunReport, kind: &str, columns: &[&str]) -> Metadata {
    Metadata {
        kind: kind.to_string(),
        tool: report.tool.name.clone(),
        version: report.tool.version.clone(),
        preset: report.config.preset.to_string(),
        config_sha256: report.config_sha256.clone(),
        dispersion_sha256: report.dispersion.sha256.clone(),
        columns: columns.iter().map(|c| c.to_string()).collect(),
    }
}

pub fn spectra_bytes(out: &ScenarioOutput, format: OutputFormat) -> Result<Vec<u8>> {
    let rows = spectra_rows(&out.spectra);
    match format {
        OutputFormat::Csv => csv_bytes(&rows, &SPECTRA_COLUMNS),
        OutputFormat::Json => Ok(json_bytes(&JsonTable {
            metadata: metadata(&out.report, "spectra", &SPECTRA_COLUMNS),
            rows,
        })),
    }
}

pub fn sweep_bytes(report: &RunReport, table: &SweepTable, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Csv => csv_bytes::<SweepRow>(&table.rows, &SWEEP_COLUMNS),
        OutputFormat::Json => Ok(json_bytes(&JsonTable {
            metadata: Metadata {
                kind: format!("sweep:{}", table.param.name()),
                ..metadata(report, "sweep", &SWEEP_COLUMNS)
            },
            rows: table.rows.clone(),
        })),
    }
}

/// Writes spectra, the optional sweep table and `report.json` into `dir`.
/// Returns the report with its manifest, after re-reading every listed
/// file to confirm its checksum.
pub fn write_outputs(out: &ScenarioOutput, dir: &Path, format: OutputFormat) -> Result<RunReport> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ext = match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let mut report = out.report.clone();
    let mut manifest = vec![write_file(dir, &format!("spectra.{ext}"), &spectra_bytes(out, format)?)?];
    if let Some(t) = &out.sweep {
        manifest.push(write_file(dir, &format!("sweep.{ext}"), &sweep_bytes(&report, t, format)?)?);
    }
    for m in &manifest {
        let path = dir.join(&m.file);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if hex::encode(Sha256::digest(&bytes)) != m.sha256 {
            return Err(Error::io(&path, std::io::Error::other("checksum mismatch after write")));
        }
    }
    report.manifest = manifest;
    write_file(dir, "report.json", &json_bytes(&report))?;
    Ok(report)
}

/// Reads a report written by [`write_outputs`].
pub fn read_report(path: &Path) -> Result<RunReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
