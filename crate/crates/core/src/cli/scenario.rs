use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{FilterShape, FilterSpec, ScenarioConfig, SweepParam};
use super::emit::ManifestEntry;
use crate::constants::omega_from_wavelength;
use crate::error::{Error, Result};
use crate::numerics::quad::QuadOptions;
use crate::phasematch::{second_branch, solve_geometry, Geometry};
use crate::rates::{filter_transmission, heralding_efficiency, spectra, RateReport, SourceModel, Spectra};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryEcho {
    pub theta_p_deg: f64,
    pub theta_s_deg: f64,
    pub theta_i_deg: f64,
    pub exterior_s_deg: f64,
    pub exterior_i_deg: f64,
    pub pump_nm: f64,
    pub signal_nm: f64,
    pub idler_nm: f64,
    pub omega_p_rad_s: f64,
    pub omega_s0_rad_s: f64,
    pub omega_i0_rad_s: f64,
}

impl From<&Geometry> for GeometryEcho {
    fn from(g: &Geometry) -> Self {
        GeometryEcho {
            theta_p_deg: g.theta_p.to_degrees(),
            theta_s_deg: g.theta_s.to_degrees(),
            theta_i_deg: g.theta_i.to_degrees(),
            exterior_s_deg: g.exterior_s.to_degrees(),
            exterior_i_deg: g.exterior_i.to_degrees(),
            pump_nm: g.pump_wavelength() * 1e9,
            signal_nm: g.signal_wavelength() * 1e9,
            idler_nm: g.idler_wavelength() * 1e9,
            omega_p_rad_s: g.omega_p,
            omega_s0_rad_s: g.omega_s0,
            omega_i0_rad_s: g.omega_i0,
        }
    }
}

/// Light from the other phase-matching branch that reaches each arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondBranchEcho {
    pub signal_arm_nm: Option<f64>,
    pub idler_arm_nm: Option<f64>,
    /// Transmission of the arm's own filter at that wavelength.
    pub signal_arm_transmission: Option<f64>,
    pub idler_arm_transmission: Option<f64>,
    /// Whether that wavelength, expressed as a signal frequency, lies inside
    /// the integration window.
    pub signal_arm_in_window: Option<bool>,
    pub idler_arm_in_window: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionEcho {
    pub material: String,
    pub citation: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolEcho {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: ToolEcho,
    pub config: ScenarioConfig,
    pub config_sha256: String,
    pub dispersion: DispersionEcho,
    pub geometry: GeometryEcho,
    pub rates: RateReport,
    pub second_branch: SecondBranchEcho,
    pub warnings: Vec<String>,
    pub manifest: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub report: RunReport,
    pub spectra: Spectra,
    pub geometry: Geometry,
    pub sweep: Option<SweepTable>,
}

pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serialises");
    hex::encode(Sha256::digest(json.as_bytes()))
}

pub fn quad_options() -> QuadOptions {
    QuadOptions::default()
}

/// Builds the model for a resolved config.
pub fn build_model(cfg: &ScenarioConfig) -> Result<SourceModel> {
    let crystal = cfg.crystal()?;
    let g = solve_geometry(cfg.preset, &crystal, cfg.carriers(), cfg.constraint())?;
    SourceModel::new(cfg.beams(), g, crystal, cfg.mode_truncation)
}

/// Solves the geometry, computes spectra and integrated rates. No files are written.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let model = build_model(cfg)?;
    let g = model.geometry;
    let filters = cfg.filter_pair(&g);
    let rates = heralding_efficiency(&model, &filters, &quad_options())?;
    let window = (rates.window_rad_s[0], rates.window_rad_s[1]);
    let hash = config_hash(cfg);
    let spectra = spectra(&model, window, cfg.spectrum_points, &hash)?;

    let branch = second_branch(&model.crystal, &g)?;
    let in_window = |w: f64| w >= window.0 && w <= window.1;
    let second = SecondBranchEcho {
        signal_arm_nm: branch.signal_arm.map(|l| l * 1e9),
        idler_arm_nm: branch.idler_arm.map(|l| l * 1e9),
        signal_arm_transmission: branch.signal_arm.map(|l| filter_transmission(&filters.signal, omega_from_wavelength(l))),
        idler_arm_transmission: branch.idler_arm.map(|l| filter_transmission(&filters.idler, omega_from_wavelength(l))),
        signal_arm_in_window: branch.signal_arm.map(|l| in_window(omega_from_wavelength(l))),
        idler_arm_in_window: branch.idler_arm.map(|l| in_window(g.omega_p - omega_from_wavelength(l))),
    };

    let mut warnings = Vec::new();
    if rates.truncation_warning() {
        warnings.push(format!(
            "mode sum not converged: raising the truncation from {} to {} changes the singles by {:.3e} (signal) and {:.3e} (idler)",
            rates.truncation,
            rates.truncation + 2,
            rates.signal_truncation_increment,
            rates.idler_truncation_increment
        ));
    }
    let dispersion = &model.crystal.dispersion;
    let report = RunReport {
        tool: ToolEcho {
            name: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
        },
        config: cfg.clone(),
        config_sha256: hash,
        dispersion: DispersionEcho {
            material: dispersion.material.clone(),
            citation: dispersion.citation.clone(),
            sha256: dispersion.checksum.clone(),
        },
        geometry: GeometryEcho::from(&g),
        rates,
        second_branch: second,
        warnings,
        manifest: Vec::new(),
    };
    let sweep = match &cfg.sweep {
        Some(_) => Some(run_sweep(cfg)?),
        None => None,
    };
    Ok(ScenarioOutput {
        report,
        spectra,
        geometry: g,
        sweep,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    #[serde(rename = "R_hz")]
    pub r_hz: Option<f64>,
    #[serde(rename = "Rs_hz")]
    pub rs_hz: Option<f64>,
    #[serde(rename = "Ri_hz")]
    pub ri_hz: Option<f64>,
    pub eta: Option<f64>,
    /// `ok`, or the error that stopped this point.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
}

/// Config for one sweep point.
pub fn sweep_point(cfg: &ScenarioConfig, param: SweepParam, value: f64) -> Result<ScenarioConfig> {
    let mut c = cfg.clone();
    c.sweep = None;
    match param {
        SweepParam::FilterWidth => {
            let mut touched = false;
            for f in &mut c.filters {
                if let FilterShape::TopHat {
                    width_nm, width_rad_s, ..
                } = &mut f.shape
                {
                    *width_nm = None;
                    *width_rad_s = Some(value);
                    touched = true;
                }
            }
            if !touched {
                if !c.filters.is_empty() {
                    return Err(Error::config("sweep", "filter-width sweeps need top-hat filters or none"));
                }
                c.filters.push(FilterSpec {
                    arm: Default::default(),
                    shape: FilterShape::TopHat {
                        center_nm: None,
                        width_nm: None,
                        width_rad_s: Some(value),
                    },
                    peak: 1.0,
                });
            }
        }
        SweepParam::WaistScale => {
            let w = c.waists_um.unwrap_or(super::config::LOOSE_WAISTS_UM);
            c.waists_um = Some(w.map(|x| x * value));
        }
        SweepParam::PumpWaistUm => {
            let mut w = c.waists_um.unwrap_or(super::config::LOOSE_WAISTS_UM);
            w[0] = value;
            c.waists_um = Some(w);
        }
    }
    c.resolve()
}

fn sweep_row(cfg: &ScenarioConfig, param: SweepParam, value: f64) -> SweepRow {
    let result = sweep_point(cfg, param, value).and_then(|c| {
        let model = build_model(&c)?;
        heralding_efficiency(&model, &c.filter_pair(&model.geometry), &quad_options())
    });
    match result {
        Ok(r) => SweepRow {
            param: value,
            r_hz: Some(r.joint_rate_hz),
            rs_hz: Some(r.signal_singles_hz),
            ri_hz: Some(r.idler_singles_hz),
            eta: Some(r.heralding_efficiency),
            status: "ok".into(),
        },
        Err(e) => SweepRow {
            param: value,
            r_hz: None,
            rs_hz: None,
            ri_hz: None,
            eta: None,
            status: e.to_string(),
        },
    }
}

/// One row per sweep value; points run in parallel and failures are
/// recorded in the row instead of aborting the sweep.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<SweepTable> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep", "no sweep specified"))?;
    let rows = spec
        .values()
        .par_iter()
        .map(|v| sweep_row(cfg, spec.param, *v))
        .collect();
    Ok(SweepTable { param: spec.param, rows })
}
