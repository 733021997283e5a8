use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::omega_from_wavelength;
use crate::crystal::CrystalParams;
use crate::dispersion::DispersionSet;
use crate::error::{Error, Result};
use crate::modeoverlap::BeamConfig;
use crate::phasematch::{Carriers, Constraint, Geometry, Preset};
use crate::rates::{bandwidth_nm_to_angular, FilterPair, SpectralFilter, DEFAULT_TRUNCATION};

pub const LOOSE_WAISTS_UM: [f64; 3] = [250.0, 100.0, 100.0];
pub const TIGHT_WAISTS_UM: [f64; 3] = [150.0, 50.0, 50.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArmSelect {
    #[default]
    Both,
    Signal,
    Idler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FilterShape {
    /// Centre defaults to each arm's carrier. Give exactly one width.
    TopHat {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center_nm: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width_nm: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width_rad_s: Option<f64>,
    },
    LongPass {
        edge_nm: f64,
    },
    ShortPass {
        edge_nm: f64,
    },
    Tabulated {
        wavelength_nm: Vec<f64>,
        transmission: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    #[serde(default)]
    pub arm: ArmSelect,
    #[serde(flatten)]
    pub shape: FilterShape,
    #[serde(default = "one")]
    pub peak: f64,
}

fn one() -> f64 {
    1.0
}

impl FromStr for FilterSpec {
    type Err = Error;

    /// `[signal@|idler@]top-hat:CENTER_NM:WIDTH_NM`, `long-pass:EDGE_NM` or
    /// `short-pass:EDGE_NM`. CENTER_NM may be `carrier`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::config("filter", format!("`{s}`: {m}"));
        let (arm, rest) = match s.split_once('@') {
            Some(("signal", r)) => (ArmSelect::Signal, r),
            Some(("idler", r)) => (ArmSelect::Idler, r),
            Some(("both", r)) => (ArmSelect::Both, r),
            Some((a, _)) => return Err(bad(&format!("unknown arm `{a}`"))),
            None => (ArmSelect::Both, s),
        };
        let parts: Vec<&str> = rest.split(':').collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad(&format!("`{t}` is not a number")));
        let shape = match parts.as_slice() {
            ["top-hat", center, width] => FilterShape::TopHat {
                center_nm: if *center == "carrier" { None } else { Some(num(center)?) },
                width_nm: Some(num(width)?),
                width_rad_s: None,
            },
            ["long-pass", edge] => FilterShape::LongPass { edge_nm: num(edge)? },
            ["short-pass", edge] => FilterShape::ShortPass { edge_nm: num(edge)? },
            _ => return Err(bad("expected top-hat:CENTER_NM:WIDTH_NM, long-pass:EDGE_NM or short-pass:EDGE_NM")),
        };
        Ok(FilterSpec { arm, shape, peak: 1.0 })
    }
}

impl FilterSpec {
    fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::config("filters", m.to_string()));
        if !(0.0..=1.0).contains(&self.peak) {
            return err("peak transmission must lie in [0, 1]");
        }
        match &self.shape {
            FilterShape::TopHat {
                center_nm,
                width_nm,
                width_rad_s,
            } => {
                if center_nm.is_some_and(|c| !(c > 0.0)) {
                    return err("top-hat centre must be positive");
                }
                match (width_nm, width_rad_s) {
                    (Some(w), None) | (None, Some(w)) if *w >= 0.0 => Ok(()),
                    (Some(_), Some(_)) | (None, None) => err("top-hat needs exactly one of width_nm, width_rad_s"),
                    _ => err("filter widths must be non-negative"),
                }
            }
            FilterShape::LongPass { edge_nm } | FilterShape::ShortPass { edge_nm } => {
                if *edge_nm > 0.0 {
                    Ok(())
                } else {
                    err("edge wavelength must be positive")
                }
            }
            FilterShape::Tabulated {
                wavelength_nm,
                transmission,
            } => {
                if wavelength_nm.len() != transmission.len() || wavelength_nm.len() < 2 {
                    return err("tabulated filter needs matching wavelength and transmission lists of length >= 2");
                }
                if !wavelength_nm.windows(2).all(|w| w[1] > w[0]) || wavelength_nm[0] <= 0.0 {
                    return err("tabulated wavelengths must be positive and increasing");
                }
                if !transmission.iter().all(|t| (0.0..=1.0).contains(t)) {
                    return err("tabulated transmission must lie in [0, 1]");
                }
                Ok(())
            }
        }
    }

    /// Filter acting on a photon whose carrier is `carrier_omega`.
    fn build(&self, carrier_omega: f64) -> SpectralFilter {
        match &self.shape {
            FilterShape::TopHat {
                center_nm,
                width_nm,
                width_rad_s,
            } => {
                let center = center_nm.map(|c| omega_from_wavelength(c * 1e-9)).unwrap_or(carrier_omega);
                let full_width = match (width_nm, width_rad_s) {
                    (Some(w), _) => bandwidth_nm_to_angular(crate::constants::wavelength_from_omega(center), w * 1e-9),
                    (None, Some(w)) => *w,
                    (None, None) => 0.0,
                };
                SpectralFilter::TopHat {
                    center,
                    full_width,
                    peak: self.peak,
                }
            }
            FilterShape::LongPass { edge_nm } => SpectralFilter::LongPass {
                edge: omega_from_wavelength(edge_nm * 1e-9),
                peak: self.peak,
            },
            FilterShape::ShortPass { edge_nm } => SpectralFilter::ShortPass {
                edge: omega_from_wavelength(edge_nm * 1e-9),
                peak: self.peak,
            },
            FilterShape::Tabulated {
                wavelength_nm,
                transmission,
            } => {
                let mut pairs: Vec<(f64, f64)> = wavelength_nm
                    .iter()
                    .zip(transmission)
                    .map(|(l, t)| (omega_from_wavelength(l * 1e-9), t * self.peak))
                    .collect();
                pairs.reverse();
                SpectralFilter::Tabulated {
                    omega: pairs.iter().map(|p| p.0).collect(),
                    transmission: pairs.iter().map(|p| p.1).collect(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    /// Top-hat full width in rad/s, applied to both arms.
    FilterWidth,
    /// Factor applied to all three waists.
    WaistScale,
    /// Pump waist in um.
    PumpWaistUm,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::FilterWidth => "filter-width",
            SweepParam::WaistScale => "waist-scale",
            SweepParam::PumpWaistUm => "pump-waist-um",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.start];
        }
        (0..self.steps)
            .map(|k| self.start + (self.stop - self.start) * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

impl FromStr for SweepSpec {
    type Err = Error;

    /// `PARAM:START:STOP:STEPS`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::config("sweep", format!("`{s}`: {m}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [param, start, stop, steps] = parts.as_slice() else {
            return Err(bad("expected PARAM:START:STOP:STEPS".into()));
        };
        let param = match *param {
            "filter-width" => SweepParam::FilterWidth,
            "waist-scale" => SweepParam::WaistScale,
            "pump-waist-um" => SweepParam::PumpWaistUm,
            p => return Err(bad(format!("unknown parameter `{p}` (filter-width, waist-scale, pump-waist-um)"))),
        };
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad(format!("`{t}` is not a number")));
        Ok(SweepSpec {
            param,
            start: num(start)?,
            stop: num(stop)?,
            steps: steps.parse().map_err(|_| bad(format!("`{steps}` is not a step count")))?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::config("format", format!("`{s}` is not csv or json"))),
        }
    }
}

fn default_length_um() -> f64 {
    600.0
}
fn default_d_eff() -> f64 {
    3.2
}
fn default_pump_nm() -> f64 {
    355.0
}
fn default_power_mw() -> f64 {
    1.0
}
fn default_efficiency() -> [f64; 2] {
    [1.0, 1.0]
}
fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}
fn default_points() -> usize {
    2001
}

/// Scenario description. Units follow the field suffixes; wavelengths are
/// vacuum values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub preset: Preset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crystal_file: Option<PathBuf>,
    #[serde(default = "default_length_um")]
    pub crystal_length_um: f64,
    #[serde(default = "default_d_eff")]
    pub d_eff_pm_per_v: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_p_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exterior_angle_deg: Option<f64>,
    #[serde(default = "default_pump_nm")]
    pub pump_nm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waists_um: Option<[f64; 3]>,
    #[serde(default = "default_power_mw")]
    pub pump_power_mw: f64,
    /// Signal and idler path efficiencies.
    #[serde(default = "default_efficiency")]
    pub path_efficiency: [f64; 2],
    #[serde(default = "default_truncation")]
    pub mode_truncation: usize,
    #[serde(default = "default_points")]
    pub spectrum_points: usize,
    #[serde(default)]
    pub filters: Vec<FilterSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    /// Output directory. Not serialised.
    #[serde(default, skip_serializing)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ScenarioConfig {
    /// Defaults for `preset` before resolution.
    pub fn preset(preset: Preset) -> Self {
        ScenarioConfig {
            preset,
            crystal_file: None,
            crystal_length_um: default_length_um(),
            d_eff_pm_per_v: default_d_eff(),
            theta_p_deg: None,
            exterior_angle_deg: None,
            pump_nm: default_pump_nm(),
            signal_nm: None,
            waists_um: None,
            pump_power_mw: default_power_mw(),
            path_efficiency: default_efficiency(),
            mode_truncation: default_truncation(),
            spectrum_points: default_points(),
            filters: Vec::new(),
            sweep: None,
            out_dir: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        let raw: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        raw.resolve()
    }

    /// Fills preset defaults and checks every invariant.
    pub fn resolve(mut self) -> Result<Self> {
        let p = self.preset;
        if p.is_degenerate() && self.signal_nm.is_none() {
            self.signal_nm = Some(2.0 * self.pump_nm);
        }
        self.signal_nm.get_or_insert(p.default_signal_nm());
        self.waists_um.get_or_insert(LOOSE_WAISTS_UM);
        if p.is_collinear() {
            if self.theta_p_deg.is_some() || self.exterior_angle_deg.is_some() {
                return Err(Error::config(
                    "theta_p_deg",
                    format!("preset {p} fixes the tilt by collinearity; give neither a tilt nor an exterior angle"),
                ));
            }
        } else {
            match (self.theta_p_deg, self.exterior_angle_deg) {
                (Some(_), Some(_)) => {
                    return Err(Error::config(
                        "theta_p_deg",
                        "give either theta_p_deg or exterior_angle_deg, not both",
                    ))
                }
                (None, None) => self.exterior_angle_deg = p.default_exterior_angle_deg(),
                _ => {}
            }
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be positive, got {v}")))
            }
        };
        positive("crystal_length_um", self.crystal_length_um)?;
        positive("d_eff_pm_per_v", self.d_eff_pm_per_v)?;
        positive("pump_nm", self.pump_nm)?;
        positive("pump_power_mw", self.pump_power_mw)?;
        if let Some(s) = self.signal_nm {
            positive("signal_nm", s)?;
        }
        if let Some(w) = self.waists_um {
            for v in w {
                positive("waists_um", v)?;
            }
        }
        if let Some(t) = self.theta_p_deg {
            if !(0.0..=180.0).contains(&t) {
                return Err(Error::config("theta_p_deg", "must lie in [0, 180]"));
            }
        }
        if let Some(t) = self.exterior_angle_deg {
            if !(t > 0.0 && t < 90.0) {
                return Err(Error::config("exterior_angle_deg", "must lie in (0, 90)"));
            }
        }
        for e in self.path_efficiency {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::config("path_efficiency", "must lie in [0, 1]"));
            }
        }
        if self.spectrum_points < 2 {
            return Err(Error::config("spectrum_points", "need at least 2 points"));
        }
        if self.mode_truncation > 30 {
            return Err(Error::config("mode_truncation", "at most 30"));
        }
        for f in &self.filters {
            f.validate()?;
        }
        for arm in [ArmSelect::Signal, ArmSelect::Idler] {
            let n = self
                .filters
                .iter()
                .filter(|f| f.arm == arm || f.arm == ArmSelect::Both)
                .count();
            if n > 1 {
                return Err(Error::config("filters", format!("at most one filter per arm, {arm:?} has {n}")));
            }
        }
        if let Some(s) = &self.sweep {
            if s.steps == 0 {
                return Err(Error::config("sweep", "steps must be at least 1"));
            }
            let lo = s.start.min(s.stop);
            let ok = match s.param {
                SweepParam::FilterWidth => lo >= 0.0,
                SweepParam::WaistScale | SweepParam::PumpWaistUm => lo > 0.0,
            };
            if !ok || !s.start.is_finite() || !s.stop.is_finite() {
                return Err(Error::config("sweep", format!("{} range must be positive", s.param.name())));
            }
        }
        Ok(())
    }

    pub fn dispersion(&self) -> Result<DispersionSet> {
        match &self.crystal_file {
            Some(p) => DispersionSet::from_file(p),
            None => Ok(DispersionSet::bibo()),
        }
    }

    pub fn crystal(&self) -> Result<CrystalParams> {
        CrystalParams::new(
            self.crystal_length_um * 1e-6,
            self.d_eff_pm_per_v * 1e-12,
            Arc::new(self.dispersion()?),
        )
    }

    pub fn carriers(&self) -> Carriers {
        Carriers {
            pump_wavelength: self.pump_nm * 1e-9,
            signal_wavelength: self.signal_nm.unwrap_or(self.preset.default_signal_nm()) * 1e-9,
        }
    }

    pub fn constraint(&self) -> Constraint {
        match (self.theta_p_deg, self.exterior_angle_deg) {
            _ if self.preset.is_collinear() => Constraint::Collinear,
            (Some(t), _) => Constraint::Tilt(t.to_radians()),
            (None, Some(e)) => Constraint::ExteriorAngle(e.to_radians()),
            (None, None) => Constraint::Collinear,
        }
    }

    pub fn beams(&self) -> BeamConfig {
        let w = self.waists_um.unwrap_or(LOOSE_WAISTS_UM);
        BeamConfig {
            pump_waist: w[0] * 1e-6,
            signal_waist: w[1] * 1e-6,
            idler_waist: w[2] * 1e-6,
            pump_power: self.pump_power_mw * 1e-3,
            signal_efficiency: self.path_efficiency[0],
            idler_efficiency: self.path_efficiency[1],
            pump_wavelength: self.pump_nm * 1e-9,
        }
    }

    pub fn filter_pair(&self, g: &Geometry) -> FilterPair {
        let mut pair = FilterPair::open();
        for f in &self.filters {
            if matches!(f.arm, ArmSelect::Both | ArmSelect::Signal) {
                pair.signal = f.build(g.omega_s0);
            }
            if matches!(f.arm, ArmSelect::Both | ArmSelect::Idler) {
                pair.idler = f.build(g.omega_i0);
            }
        }
        pair
    }
}

/// Reads and resolves a TOML scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cfg = ScenarioConfig::from_toml_str(&text, path)?;
    // Crystal files are looked up next to the config that names them.
    if let (Some(f), Some(dir)) = (&cfg.crystal_file, path.parent()) {
        if f.is_relative() {
            cfg.crystal_file = Some(dir.join(f));
        }
    }
    Ok(cfg)
}
