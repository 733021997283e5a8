//! Carrier phase matching, exterior/interior angles and the phase mismatch
//! as a function of signal frequency.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::{omega_from_wavelength, wavelength_from_omega, SPEED_OF_LIGHT};
use crate::crystal::CrystalParams;
use crate::dispersion::Polarization;
use crate::error::{Error, Result};
use crate::numerics::roots::{bisect_secant, scan_brackets};

/// Tilt search interval in degrees.
pub const TILT_SCAN_DEG: (f64, f64) = (130.0, 155.0);
const TILT_SCAN_STEPS: usize = 250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    CollinearDegenerate,
    NoncollinearDegenerate,
    CollinearNondegenerate,
    NoncollinearNondegenerate,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::CollinearDegenerate,
        Preset::NoncollinearDegenerate,
        Preset::CollinearNondegenerate,
        Preset::NoncollinearNondegenerate,
    ];

    pub fn is_collinear(self) -> bool {
        matches!(self, Preset::CollinearDegenerate | Preset::CollinearNondegenerate)
    }

    pub fn is_degenerate(self) -> bool {
        matches!(self, Preset::CollinearDegenerate | Preset::NoncollinearDegenerate)
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::CollinearDegenerate => "collinear-degenerate",
            Preset::NoncollinearDegenerate => "noncollinear-degenerate",
            Preset::CollinearNondegenerate => "collinear-nondegenerate",
            Preset::NoncollinearNondegenerate => "noncollinear-nondegenerate",
        }
    }

    /// Default signal carrier in nm.
    pub fn default_signal_nm(self) -> f64 {
        if self.is_degenerate() {
            710.0
        } else {
            850.0
        }
    }

    /// Default exterior signal angle in degrees for noncollinear presets.
    pub fn default_exterior_angle_deg(self) -> Option<f64> {
        match self {
            Preset::NoncollinearDegenerate => Some(3.04),
            Preset::NoncollinearNondegenerate => Some(5.62),
            _ => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::config("preset", format!("unknown preset `{s}`")))
    }
}

/// Pump and signal carrier wavelengths in m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Carriers {
    pub pump_wavelength: f64,
    pub signal_wavelength: f64,
}

impl Carriers {
    pub fn degenerate(pump_wavelength: f64) -> Self {
        Carriers {
            pump_wavelength,
            signal_wavelength: 2.0 * pump_wavelength,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    Collinear,
    /// Fixed crystal tilt in rad.
    Tilt(f64),
    /// Target exterior signal angle in rad.
    ExteriorAngle(f64),
}

/// Solved carrier geometry. Interior angles are magnitudes; signal and
/// idler lie on opposite sides of the pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub theta_p: f64,
    pub theta_s: f64,
    pub theta_i: f64,
    pub exterior_s: f64,
    pub exterior_i: f64,
    pub omega_s0: f64,
    pub omega_i0: f64,
    pub omega_p: f64,
}

impl Geometry {
    pub fn signal_wavelength(&self) -> f64 {
        wavelength_from_omega(self.omega_s0)
    }

    pub fn idler_wavelength(&self) -> f64 {
        wavelength_from_omega(self.omega_i0)
    }

    pub fn pump_wavelength(&self) -> f64 {
        wavelength_from_omega(self.omega_p)
    }

    pub fn is_degenerate(&self) -> bool {
        (self.omega_s0 - 0.5 * self.omega_p).abs() <= 1e-12 * self.omega_p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseMismatch {
    pub dk_y: f64,
    pub dk_z: f64,
}

pub fn exterior_angle(theta: f64, n: f64) -> Result<f64> {
    let s = n * theta.sin();
    if s.abs() > 1.0 {
        return Err(Error::TotalInternalReflection(s));
    }
    Ok(s.asin())
}

pub fn interior_angle(theta_ext: f64, n: f64) -> Result<f64> {
    let s = theta_ext.sin() / n;
    if s.abs() > 1.0 {
        return Err(Error::TotalInternalReflection(s));
    }
    Ok(s.asin())
}

fn k_pump(crystal: &CrystalParams, omega_p: f64) -> Result<f64> {
    crystal.dispersion.wavenumber(omega_p, 0.0, Polarization::Pump)
}

fn k_spdc(crystal: &CrystalParams, omega: f64, theta_p: f64) -> Result<f64> {
    crystal.dispersion.wavenumber(omega, theta_p, Polarization::Spdc)
}

fn n_spdc(crystal: &CrystalParams, omega: f64, theta_p: f64) -> Result<f64> {
    crystal.dispersion.index_spdc(wavelength_from_omega(omega), theta_p)
}

/// Interior angles (theta_s, theta_i) closing the wavevector triangle, or
/// `None` when k_s + k_i < k_p.
fn triangle(k_p: f64, k_s: f64, k_i: f64) -> Option<(f64, f64)> {
    let cs = (k_p * k_p + k_s * k_s - k_i * k_i) / (2.0 * k_p * k_s);
    let ci = (k_p * k_p + k_i * k_i - k_s * k_s) / (2.0 * k_p * k_i);
    if cs > 1.0 || ci > 1.0 || cs < -1.0 || ci < -1.0 {
        return None;
    }
    Some((cs.acos(), ci.acos()))
}

/// Geometry at a fixed tilt: the carrier angles follow in closed form from
/// the two carrier conditions.
pub fn geometry_at_tilt(crystal: &CrystalParams, theta_p: f64, omega_s0: f64, omega_p: f64) -> Result<Geometry> {
    let omega_i0 = omega_p - omega_s0;
    let kp = k_pump(crystal, omega_p)?;
    let ks = k_spdc(crystal, omega_s0, theta_p)?;
    let ki = k_spdc(crystal, omega_i0, theta_p)?;
    let (theta_s, theta_i) = triangle(kp, ks, ki).ok_or(Error::NoEmission {
        theta_p_deg: theta_p.to_degrees(),
        signal_nm: wavelength_from_omega(omega_s0) * 1e9,
    })?;
    Ok(Geometry {
        theta_p,
        theta_s,
        theta_i,
        exterior_s: exterior_angle(theta_s, n_spdc(crystal, omega_s0, theta_p)?)?,
        exterior_i: exterior_angle(theta_i, n_spdc(crystal, omega_i0, theta_p)?)?,
        omega_s0,
        omega_i0,
        omega_p,
    })
}

fn single_root<F: Fn(f64) -> f64>(f: F, context: &str) -> Result<f64> {
    let lo = TILT_SCAN_DEG.0.to_radians();
    let hi = TILT_SCAN_DEG.1.to_radians();
    let brackets = scan_brackets(&f, lo, hi, TILT_SCAN_STEPS);
    match brackets.len() {
        0 => Err(Error::NoRoot {
            context: context.to_string(),
            lo,
            hi,
            f_lo: f(lo),
            f_hi: f(hi),
        }),
        1 => bisect_secant(&f, brackets[0].0, brackets[0].1, 1e-15, context),
        _ => {
            let roots = brackets
                .iter()
                .map(|&(a, b)| bisect_secant(&f, a, b, 1e-15, context).map(f64::to_degrees))
                .collect::<Result<Vec<_>>>()?;
            Err(Error::AmbiguousRoot { candidates_deg: roots })
        }
    }
}

/// Tilt at which the carriers phase match collinearly.
pub fn collinear_tilt(crystal: &CrystalParams, omega_s0: f64, omega_p: f64) -> Result<f64> {
    let kp = k_pump(crystal, omega_p)?;
    let omega_i0 = omega_p - omega_s0;
    k_spdc(crystal, omega_s0, 0.0)?;
    k_spdc(crystal, omega_i0, 0.0)?;
    single_root(
        |t| kp - k_spdc(crystal, omega_s0, t).unwrap_or(f64::NAN) - k_spdc(crystal, omega_i0, t).unwrap_or(f64::NAN),
        "collinear tilt",
    )
}

pub fn solve_geometry(preset: Preset, crystal: &CrystalParams, carriers: Carriers, constraint: Constraint) -> Result<Geometry> {
    let (lp, ls) = (carriers.pump_wavelength, carriers.signal_wavelength);
    if !(lp > 0.0 && ls > lp) {
        return Err(Error::config("signal_nm", "signal wavelength must exceed the pump wavelength"));
    }
    let degenerate = (ls - 2.0 * lp).abs() <= 1e-9 * ls;
    if preset.is_degenerate() != degenerate {
        return Err(Error::config(
            "signal_nm",
            format!("{} nm does not match preset {preset}", ls * 1e9),
        ));
    }
    let omega_p = omega_from_wavelength(lp);
    let omega_s0 = if degenerate { 0.5 * omega_p } else { omega_from_wavelength(ls) };
    match (preset.is_collinear(), constraint) {
        (true, Constraint::Collinear) => {
            let theta_p = collinear_tilt(crystal, omega_s0, omega_p)?;
            Ok(Geometry {
                theta_p,
                theta_s: 0.0,
                theta_i: 0.0,
                exterior_s: 0.0,
                exterior_i: 0.0,
                omega_s0,
                omega_i0: omega_p - omega_s0,
                omega_p,
            })
        }
        (false, Constraint::Tilt(theta_p)) => geometry_at_tilt(crystal, theta_p, omega_s0, omega_p),
        (false, Constraint::ExteriorAngle(target)) => {
            if !(target > 0.0 && target < std::f64::consts::FRAC_PI_2) {
                return Err(Error::config("exterior_angle_deg", "must lie in (0, 90) degrees"));
            }
            let f = |t: f64| match geometry_at_tilt(crystal, t, omega_s0, omega_p) {
                Ok(g) => g.exterior_s - target,
                Err(Error::TotalInternalReflection(_)) => std::f64::consts::FRAC_PI_2 - target,
                Err(_) => -target,
            };
            let theta_p = single_root(f, "exterior angle")?;
            geometry_at_tilt(crystal, theta_p, omega_s0, omega_p)
        }
        (true, _) => Err(Error::config("theta_p_deg", format!("preset {preset} fixes the tilt by collinearity"))),
        (false, Constraint::Collinear) => Err(Error::config(
            "exterior_angle_deg",
            format!("preset {preset} needs a tilt or an exterior angle"),
        )),
    }
}

/// Exact mismatch at signal frequency `omega_s`, with the carrier angles held fixed.
pub fn phase_mismatch(g: &Geometry, crystal: &CrystalParams, omega_s: f64) -> Result<PhaseMismatch> {
    let omega_i = g.omega_p - omega_s;
    let kp = k_pump(crystal, g.omega_p)?;
    let ks = k_spdc(crystal, omega_s, g.theta_p)?;
    let ki = k_spdc(crystal, omega_i, g.theta_p)?;
    Ok(PhaseMismatch {
        dk_y: ks * g.theta_s.sin() - ki * g.theta_i.sin(),
        dk_z: kp - ks * g.theta_s.cos() - ki * g.theta_i.cos(),
    })
}

/// Second-order expansion of the mismatch about degeneracy.
pub fn taylor_mismatch_degenerate(g: &Geometry, crystal: &CrystalParams, omega_s: f64) -> Result<PhaseMismatch> {
    if !g.is_degenerate() {
        return Err(Error::NotDegenerate);
    }
    let s = crystal
        .dispersion
        .dispersion_sample(g.signal_wavelength(), g.theta_p, Polarization::Spdc)?;
    let d = omega_s - 0.5 * g.omega_p;
    Ok(PhaseMismatch {
        dk_y: 2.0 * s.n_g * g.theta_s.sin() * d / SPEED_OF_LIGHT,
        dk_z: -s.k2 * g.theta_s.cos() * d * d,
    })
}

/// One point of an emission-angle curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmissionPoint {
    /// Photon wavelength in m.
    pub wavelength: f64,
    pub interior: f64,
    pub exterior: f64,
}

/// Emission angle of a photon at `wavelength` whose partner carries the rest
/// of the pump energy, at fixed tilt. `None` when no triangle closes.
pub fn emission_angle(crystal: &CrystalParams, theta_p: f64, omega_p: f64, wavelength: f64) -> Result<Option<EmissionPoint>> {
    let omega = omega_from_wavelength(wavelength);
    let kp = k_pump(crystal, omega_p)?;
    let k1 = k_spdc(crystal, omega, theta_p)?;
    let k2 = k_spdc(crystal, omega_p - omega, theta_p)?;
    Ok(match triangle(kp, k1, k2) {
        Some((t, _)) => {
            let n = n_spdc(crystal, omega, theta_p)?;
            exterior_angle(t, n).ok().map(|e| EmissionPoint {
                wavelength,
                interior: t,
                exterior: e,
            })
        }
        None => None,
    })
}

/// Wavelength interval over which both a photon and its partner lie inside
/// the dispersion validity range.
pub fn conjugate_valid_range(crystal: &CrystalParams, omega_p: f64) -> (f64, f64) {
    let (lo, hi) = crystal.dispersion.valid_range;
    let w_min = omega_from_wavelength(hi).max(omega_p - omega_from_wavelength(lo));
    let w_max = omega_from_wavelength(lo).min(omega_p - omega_from_wavelength(hi));
    let eps = 1e-9;
    (wavelength_from_omega(w_max) * (1.0 + eps), wavelength_from_omega(w_min) * (1.0 - eps))
}

/// Sampled emission-angle curve split into contiguous branches.
pub fn emission_angle_curve(
    theta_p: f64,
    crystal: &CrystalParams,
    omega_p: f64,
    range: (f64, f64),
    samples: usize,
) -> Result<Vec<Vec<EmissionPoint>>> {
    let mut branches: Vec<Vec<EmissionPoint>> = Vec::new();
    let mut current: Vec<EmissionPoint> = Vec::new();
    for j in 0..samples {
        let lambda = range.0 + (range.1 - range.0) * j as f64 / (samples.max(2) - 1) as f64;
        match emission_angle(crystal, theta_p, omega_p, lambda)? {
            Some(p) => current.push(p),
            None => {
                if !current.is_empty() {
                    branches.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        branches.push(current);
    }
    Ok(branches)
}

/// Wavelengths in `range` where the emission angle equals `target_exterior`.
/// Regions without emission count as angle zero, so a zero target finds the
/// edges of collinear emission.
pub fn angle_crossings(
    crystal: &CrystalParams,
    theta_p: f64,
    omega_p: f64,
    target_exterior: f64,
    range: (f64, f64),
    samples: usize,
) -> Result<Vec<f64>> {
    let f = |lambda: f64| match emission_angle(crystal, theta_p, omega_p, lambda) {
        Ok(Some(p)) => p.exterior - target_exterior,
        Ok(None) => -target_exterior,
        Err(_) => f64::NAN,
    };
    if target_exterior == 0.0 {
        return collinear_wavelengths(crystal, theta_p, omega_p, range, samples);
    }
    scan_brackets(&f, range.0, range.1, samples)
        .into_iter()
        .map(|(a, b)| bisect_secant(&f, a, b, 1e-18, "emission angle crossing"))
        .collect()
}

/// Wavelengths in `range` that phase match collinearly at this tilt.
pub fn collinear_wavelengths(
    crystal: &CrystalParams,
    theta_p: f64,
    omega_p: f64,
    range: (f64, f64),
    samples: usize,
) -> Result<Vec<f64>> {
    let kp = k_pump(crystal, omega_p)?;
    let f = |lambda: f64| {
        let w = omega_from_wavelength(lambda);
        kp - k_spdc(crystal, w, theta_p).unwrap_or(f64::NAN) - k_spdc(crystal, omega_p - w, theta_p).unwrap_or(f64::NAN)
    };
    scan_brackets(&f, range.0, range.1, samples)
        .into_iter()
        .map(|(a, b)| bisect_secant(&f, a, b, 1e-18, "collinear wavelength"))
        .collect()
}

/// Other wavelengths that reach each fibre arm at the carrier exterior angles.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SecondBranch {
    /// m
    pub signal_arm: Option<f64>,
    /// m
    pub idler_arm: Option<f64>,
}

pub fn second_branch(crystal: &CrystalParams, g: &Geometry) -> Result<SecondBranch> {
    if g.is_degenerate() {
        return Ok(SecondBranch::default());
    }
    let range = conjugate_valid_range(crystal, g.omega_p);
    let pick = |target: f64, carrier: f64| -> Result<Option<f64>> {
        let roots = angle_crossings(crystal, g.theta_p, g.omega_p, target, range, 2000)?;
        Ok(roots
            .into_iter()
            .filter(|l| (l - carrier).abs() > 1e-6 * carrier)
            .min_by(|a, b| (a - carrier).abs().partial_cmp(&(b - carrier).abs()).unwrap()))
    };
    Ok(SecondBranch {
        signal_arm: pick(g.exterior_s, g.signal_wavelength())?,
        idler_arm: pick(g.exterior_i, g.idler_wavelength())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("diagonal".parse::<Preset>().is_err());
    }

    #[test]
    fn snell_round_trip() {
        let t = 0.03;
        let e = exterior_angle(t, 1.85).unwrap();
        assert!((interior_angle(e, 1.85).unwrap() - t).abs() < 1e-12);
        assert_eq!(exterior_angle(0.0, 1.7).unwrap(), 0.0);
        assert!(exterior_angle(1.2, 1.9).is_err());
    }
}
