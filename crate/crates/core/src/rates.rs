//! Spectral rate densities, filtering, integrated rates and heralding efficiency.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{omega_from_wavelength, wavelength_from_omega, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
pub use crate::crystal::CrystalParams;
use crate::dispersion::Polarization;
use crate::error::{Error, Result};
use crate::modeoverlap::{alpha_sq, mode_amplitudes, overlap_constants, phi00, BeamConfig, OverlapConstants};
use crate::numerics::quad::{integrate, QuadOptions};
use crate::phasematch::{conjugate_valid_range, phase_mismatch, Geometry, PhaseMismatch};
use crate::Arm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub c: f64,
    pub eps0: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    c: SPEED_OF_LIGHT,
    eps0: VACUUM_PERMITTIVITY,
};

/// Default mode-sum truncation.
pub const DEFAULT_TRUNCATION: usize = 10;

/// Transmission as a function of the angular frequency of the photon that
/// passes through it. Long-pass and short-pass refer to wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectralFilter {
    Open,
    TopHat { center: f64, full_width: f64, peak: f64 },
    /// Passes omega <= edge.
    LongPass { edge: f64, peak: f64 },
    /// Passes omega >= edge.
    ShortPass { edge: f64, peak: f64 },
    /// Linear interpolation in (omega, T), zero outside the table.
    Tabulated { omega: Vec<f64>, transmission: Vec<f64> },
}

impl SpectralFilter {
    pub fn validate(&self) -> Result<()> {
        let peak_ok = |p: f64| (0.0..=1.0).contains(&p);
        let ok = match self {
            SpectralFilter::Open => true,
            SpectralFilter::TopHat { center, full_width, peak } => *center > 0.0 && *full_width >= 0.0 && peak_ok(*peak),
            SpectralFilter::LongPass { edge, peak } | SpectralFilter::ShortPass { edge, peak } => *edge > 0.0 && peak_ok(*peak),
            SpectralFilter::Tabulated { omega, transmission } => {
                omega.len() == transmission.len()
                    && omega.len() >= 2
                    && omega.windows(2).all(|w| w[1] > w[0])
                    && transmission.iter().all(|t| peak_ok(*t))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("filters", format!("invalid filter {self:?}")))
        }
    }

    /// Frequencies where the transmission is discontinuous or kinked.
    pub fn edges(&self) -> Vec<f64> {
        match self {
            SpectralFilter::Open => vec![],
            SpectralFilter::TopHat { center, full_width, .. } => {
                vec![center - 0.5 * full_width, center + 0.5 * full_width]
            }
            SpectralFilter::LongPass { edge, .. } | SpectralFilter::ShortPass { edge, .. } => vec![*edge],
            SpectralFilter::Tabulated { omega, .. } => omega.clone(),
        }
    }
}

pub fn filter_transmission(f: &SpectralFilter, omega: f64) -> f64 {
    match f {
        SpectralFilter::Open => 1.0,
        SpectralFilter::TopHat { center, full_width, peak } => {
            if (omega - center).abs() <= 0.5 * full_width {
                *peak
            } else {
                0.0
            }
        }
        SpectralFilter::LongPass { edge, peak } => {
            if omega <= *edge {
                *peak
            } else {
                0.0
            }
        }
        SpectralFilter::ShortPass { edge, peak } => {
            if omega >= *edge {
                *peak
            } else {
                0.0
            }
        }
        SpectralFilter::Tabulated { omega: w, transmission: t } => {
            if omega < w[0] || omega > w[w.len() - 1] {
                return 0.0;
            }
            let j = w.partition_point(|x| *x <= omega).clamp(1, w.len() - 1);
            let f = (omega - w[j - 1]) / (w[j] - w[j - 1]);
            t[j - 1] + f * (t[j] - t[j - 1])
        }
    }
}

/// First-order conversion of a wavelength full width to angular frequency.
pub fn bandwidth_nm_to_angular(lambda_center: f64, delta_lambda: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * delta_lambda / (lambda_center * lambda_center)
}

/// Exact angular width between the band edges lambda_c -+ delta/2.
pub fn bandwidth_exact(lambda_center: f64, delta_lambda: f64) -> f64 {
    omega_from_wavelength(lambda_center - 0.5 * delta_lambda) - omega_from_wavelength(lambda_center + 0.5 * delta_lambda)
}

/// Signal-arm and idler-arm filters; each acts on its own photon's frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterPair {
    pub signal: SpectralFilter,
    pub idler: SpectralFilter,
}

impl FilterPair {
    pub fn open() -> Self {
        FilterPair {
            signal: SpectralFilter::Open,
            idler: SpectralFilter::Open,
        }
    }
}

/// Rate densities at one signal frequency, in s^-1 per rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Densities {
    pub joint: f64,
    pub singles_signal: f64,
    pub singles_idler: f64,
    /// Singles with the truncation raised by two.
    pub singles_signal_next: f64,
    pub singles_idler_next: f64,
}

/// A fully specified source with every frequency-independent quantity cached.
#[derive(Debug, Clone)]
pub struct SourceModel {
    pub beams: BeamConfig,
    pub geometry: Geometry,
    pub crystal: CrystalParams,
    pub truncation: usize,
    pub constants: PhysicalConstants,
    overlap: OverlapConstants,
    n_pump: f64,
}

impl SourceModel {
    pub fn new(beams: BeamConfig, geometry: Geometry, crystal: CrystalParams, truncation: usize) -> Result<Self> {
        beams.validate()?;
        let n_pump = crystal.dispersion.index_pump(wavelength_from_omega(geometry.omega_p))?;
        Ok(SourceModel {
            overlap: overlap_constants(&beams, &geometry),
            beams,
            geometry,
            crystal,
            truncation,
            constants: CODATA,
            n_pump,
        })
    }

    pub fn overlap(&self) -> &OverlapConstants {
        &self.overlap
    }

    pub fn mismatch(&self, omega_s: f64) -> Result<PhaseMismatch> {
        phase_mismatch(&self.geometry, &self.crystal, omega_s)
    }

    /// P d^2 alpha_p^2 omega_s omega_i / (pi eps0 c^3 n_s n_i n_p).
    fn prefactor(&self, omega_s: f64) -> Result<f64> {
        let omega_i = self.geometry.omega_p - omega_s;
        if !(omega_s > 0.0 && omega_i > 0.0) {
            return Err(Error::Precondition(format!("signal frequency {omega_s} outside (0, omega_p)")));
        }
        let d = &self.crystal.dispersion;
        let ns = d.index(wavelength_from_omega(omega_s), self.geometry.theta_p, Polarization::Spdc)?;
        let ni = d.index(wavelength_from_omega(omega_i), self.geometry.theta_p, Polarization::Spdc)?;
        let c = self.constants.c;
        Ok(self.beams.pump_power * self.crystal.d_eff.powi(2) * alpha_sq(self.beams.pump_waist, 0, 0) * omega_s * omega_i
            / (PI * self.constants.eps0 * c * c * c * ns * ni * self.n_pump))
    }

    pub fn joint_spectral_rate(&self, omega_s: f64) -> Result<f64> {
        let dk = self.mismatch(omega_s)?;
        let b = &self.beams;
        Ok(b.signal_efficiency
            * b.idler_efficiency
            * self.prefactor(omega_s)?
            * alpha_sq(b.signal_waist, 0, 0)
            * alpha_sq(b.idler_waist, 0, 0)
            * phi00(&self.overlap, &dk, self.crystal.length).norm_sqr())
    }

    fn singles_from(&self, which: Arm, dk: &PhaseMismatch, prefactor: f64, truncation: usize, extra: usize) -> (f64, f64) {
        let amps = mode_amplitudes(
            &self.overlap,
            &self.beams,
            &self.geometry,
            dk,
            self.crystal.length,
            which,
            truncation + extra,
        );
        let scale = self.beams.efficiency(which) * prefactor * alpha_sq(self.beams.waist(which), 0, 0);
        (scale * amps.weighted_sum(truncation), scale * amps.weighted_sum(truncation + extra))
    }

    /// Singles density of `which` at signal frequency `omega_s`, summing
    /// companion modes with even n <= N and m <= N.
    pub fn singles_spectral_rate(&self, which: Arm, omega_s: f64, truncation: usize) -> Result<f64> {
        let dk = self.mismatch(omega_s)?;
        let p = self.prefactor(omega_s)?;
        Ok(self.singles_from(which, &dk, p, truncation, 0).0)
    }

    pub fn densities(&self, omega_s: f64) -> Result<Densities> {
        let dk = self.mismatch(omega_s)?;
        let p = self.prefactor(omega_s)?;
        let b = &self.beams;
        let joint = b.signal_efficiency
            * b.idler_efficiency
            * p
            * alpha_sq(b.signal_waist, 0, 0)
            * alpha_sq(b.idler_waist, 0, 0)
            * phi00(&self.overlap, &dk, self.crystal.length).norm_sqr();
        let (s, s2) = self.singles_from(Arm::Signal, &dk, p, self.truncation, 2);
        let (i, i2) = self.singles_from(Arm::Idler, &dk, p, self.truncation, 2);
        Ok(Densities {
            joint,
            singles_signal: s,
            singles_idler: i,
            singles_signal_next: s2,
            singles_idler_next: i2,
        })
    }

    /// Signal frequencies for which both photons lie inside the dispersion
    /// data, further limited to the near side of degeneracy for
    /// nondegenerate carriers.
    pub fn frequency_caps(&self) -> (f64, f64) {
        let g = &self.geometry;
        let (l_lo, l_hi) = conjugate_valid_range(&self.crystal, g.omega_p);
        let mut lo = omega_from_wavelength(l_hi);
        let mut hi = omega_from_wavelength(l_lo);
        if !g.is_degenerate() {
            let half = (0.5 * g.omega_p - g.omega_s0).abs();
            lo = lo.max(g.omega_s0 - half);
            hi = hi.min(g.omega_s0 + half);
        }
        (lo, hi)
    }

    /// Integration window: scan outward from the carrier until the joint and
    /// both singles densities stay below 1e-8 of their peak.
    pub fn window(&self) -> Result<(f64, f64)> {
        const REL: f64 = 1e-8;
        const RUN: usize = 64;
        let g = &self.geometry;
        let (lo_cap, hi_cap) = self.frequency_caps();
        let step = 1e-3 * g.omega_s0;
        let envelope = |w: f64| -> Result<f64> {
            let d = self.densities(w)?;
            Ok(d.joint.max(d.singles_signal).max(d.singles_idler))
        };
        let mut peak = envelope(g.omega_s0)?;
        let mut edges = [lo_cap, hi_cap];
        for (dir, edge) in [(-1.0, 0usize), (1.0, 1usize)] {
            let cap = edges[edge];
            let mut below = 0usize;
            let mut k = 1usize;
            loop {
                let w = g.omega_s0 + dir * step * k as f64;
                if (dir < 0.0 && w <= cap) || (dir > 0.0 && w >= cap) {
                    break;
                }
                let v = envelope(w)?;
                peak = peak.max(v);
                if v < REL * peak {
                    below += 1;
                    if below >= RUN {
                        edges[edge] = w;
                        break;
                    }
                } else {
                    below = 0;
                }
                k += 1;
            }
        }
        Ok((edges[0], edges[1]))
    }

    fn breakpoints(&self, window: (f64, f64), filters: &FilterPair) -> Vec<f64> {
        let wp = self.geometry.omega_p;
        let mut pts = vec![window.0, window.1, self.geometry.omega_s0];
        pts.extend(filters.signal.edges());
        pts.extend(filters.idler.edges().into_iter().map(|e| wp - e));
        pts.retain(|p| *p >= window.0 && *p <= window.1);
        pts
    }

    /// Filtered integrals of joint, signal and idler densities (orders N and N+2).
    fn integrate_all(&self, filters: &FilterPair, window: (f64, f64), opts: &QuadOptions) -> Result<([f64; 5], [f64; 5], usize)> {
        let wp = self.geometry.omega_p;
        let f = |w: f64| -> [f64; 5] {
            match self.densities(w) {
                Ok(d) => {
                    let ts = filter_transmission(&filters.signal, w);
                    let ti = filter_transmission(&filters.idler, wp - w);
                    [
                        ts * ti * d.joint,
                        ts * d.singles_signal,
                        ti * d.singles_idler,
                        ts * d.singles_signal_next,
                        ti * d.singles_idler_next,
                    ]
                }
                Err(_) => [f64::NAN; 5],
            }
        };
        let r = integrate(f, &self.breakpoints(window, filters), opts)?;
        if r.value.iter().chain(r.error.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Quadrature {
                estimate: r.value[0],
                error: r.error[0],
                intervals: r.intervals,
            });
        }
        Ok((r.value, r.error, r.evaluations))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub value: f64,
    pub error: f64,
}

pub fn total_joint_rate(model: &SourceModel, filters: &FilterPair, opts: &QuadOptions) -> Result<RateEstimate> {
    let window = model.window()?;
    let wp = model.geometry.omega_p;
    let f = |w: f64| -> [f64; 1] {
        let ts = filter_transmission(&filters.signal, w);
        let ti = filter_transmission(&filters.idler, wp - w);
        if ts * ti == 0.0 {
            return [0.0];
        }
        [ts * ti * model.joint_spectral_rate(w).unwrap_or(f64::NAN)]
    };
    let r = integrate(f, &model.breakpoints(window, filters), opts)?;
    if !r.value[0].is_finite() {
        return Err(Error::Quadrature {
            estimate: r.value[0],
            error: r.error[0],
            intervals: r.intervals,
        });
    }
    Ok(RateEstimate {
        value: r.value[0],
        error: r.error[0],
    })
}

pub fn total_singles_rate(model: &SourceModel, which: Arm, filter: &SpectralFilter, opts: &QuadOptions) -> Result<RateEstimate> {
    let window = model.window()?;
    let wp = model.geometry.omega_p;
    let filters = match which {
        Arm::Signal => FilterPair {
            signal: filter.clone(),
            idler: SpectralFilter::Open,
        },
        Arm::Idler => FilterPair {
            signal: SpectralFilter::Open,
            idler: filter.clone(),
        },
    };
    let f = |w: f64| -> [f64; 1] {
        let t = match which {
            Arm::Signal => filter_transmission(filter, w),
            Arm::Idler => filter_transmission(filter, wp - w),
        };
        if t == 0.0 {
            return [0.0];
        }
        [t * model.singles_spectral_rate(which, w, model.truncation).unwrap_or(f64::NAN)]
    };
    let r = integrate(f, &model.breakpoints(window, &filters), opts)?;
    if !r.value[0].is_finite() {
        return Err(Error::Quadrature {
            estimate: r.value[0],
            error: r.error[0],
            intervals: r.intervals,
        });
    }
    Ok(RateEstimate {
        value: r.value[0],
        error: r.error[0],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub joint_rate_hz: f64,
    pub signal_singles_hz: f64,
    pub idler_singles_hz: f64,
    pub heralding_efficiency: f64,
    pub truncation: usize,
    pub joint_error_hz: f64,
    pub signal_error_hz: f64,
    pub idler_error_hz: f64,
    /// Relative change of each singles rate when the truncation grows by two.
    pub signal_truncation_increment: f64,
    pub idler_truncation_increment: f64,
    pub window_rad_s: [f64; 2],
    pub evaluations: usize,
}

impl RateReport {
    /// True when raising the truncation by two moves a singles rate by more than 1 %.
    pub fn truncation_warning(&self) -> bool {
        self.signal_truncation_increment.abs() > 0.01 || self.idler_truncation_increment.abs() > 0.01
    }
}

/// R, R_s, R_i and eta = R / sqrt(R_s R_i) from one shared adaptive quadrature.
pub fn heralding_efficiency(model: &SourceModel, filters: &FilterPair, opts: &QuadOptions) -> Result<RateReport> {
    let window = model.window()?;
    let (v, e, evaluations) = model.integrate_all(filters, window, opts)?;
    let eta = if v[1] > 0.0 && v[2] > 0.0 { v[0] / (v[1] * v[2]).sqrt() } else { 0.0 };
    let incr = |a: f64, b: f64| if a > 0.0 { (b - a) / a } else { 0.0 };
    Ok(RateReport {
        joint_rate_hz: v[0],
        signal_singles_hz: v[1],
        idler_singles_hz: v[2],
        heralding_efficiency: eta,
        truncation: model.truncation,
        joint_error_hz: e[0],
        signal_error_hz: e[1],
        idler_error_hz: e[2],
        signal_truncation_increment: incr(v[1], v[3]),
        idler_truncation_increment: incr(v[2], v[4]),
        window_rad_s: [window.0, window.1],
        evaluations,
    })
}

/// Ordered samples of one rate density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurve {
    pub omega: Vec<f64>,
    pub value: Vec<f64>,
    pub config_hash: String,
}

impl SpectralCurve {
    pub fn peak(&self) -> (f64, f64) {
        self.omega
            .iter()
            .zip(&self.value)
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, (w, v)| if *v > acc.1 { (*w, *v) } else { acc })
    }

    /// Full width at half maximum by linear interpolation; `None` when the
    /// curve does not fall to half its peak on both sides.
    pub fn fwhm(&self) -> Option<f64> {
        let (imax, vmax) = self
            .value
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
        let half = 0.5 * vmax;
        let cross = |i0: usize, i1: usize| {
            let (w0, w1, v0, v1) = (self.omega[i0], self.omega[i1], self.value[i0], self.value[i1]);
            w0 + (half - v0) * (w1 - w0) / (v1 - v0)
        };
        let left = (0..imax).rev().find(|&i| self.value[i] < half).map(|i| cross(i, i + 1))?;
        let right = (imax + 1..self.value.len()).find(|&i| self.value[i] < half).map(|i| cross(i - 1, i))?;
        Some(right - left)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectra {
    pub joint: SpectralCurve,
    pub singles_signal: SpectralCurve,
    pub singles_idler: SpectralCurve,
}

/// Unfiltered densities on a uniform grid of `points` across `window`.
pub fn spectra(model: &SourceModel, window: (f64, f64), points: usize, config_hash: &str) -> Result<Spectra> {
    let points = points.max(2);
    let omega: Vec<f64> = (0..points)
        .map(|j| window.0 + (window.1 - window.0) * j as f64 / (points - 1) as f64)
        .collect();
    let samples = omega.par_iter().map(|w| model.densities(*w)).collect::<Result<Vec<_>>>()?;
    let curve = |f: fn(&Densities) -> f64| SpectralCurve {
        omega: omega.clone(),
        value: samples.iter().map(f).collect(),
        config_hash: config_hash.to_string(),
    };
    Ok(Spectra {
        joint: curve(|d| d.joint),
        singles_signal: curve(|d| d.singles_signal),
        singles_idler: curve(|d| d.singles_idler),
    })
}
