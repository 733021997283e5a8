//! Overlap of the pump, a fixed single-mode target beam and a Hermite-Gauss
//! companion mode with the phase-mismatch kernel, integrated over the crystal.
//!
//! Transverse integrals are done in closed form at the crystal centre
//! (thin-crystal limit); the residual z dependence is a polynomial times
//! exp(i dk_z z), integrated exactly by the moments in [`z_moments`].

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasematch::{Geometry, PhaseMismatch};
use crate::Arm;

/// Above this value of dk_y^2 / 4C every amplitude is reported as exactly zero.
pub const UNDERFLOW_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamConfig {
    /// 1/e field radii in m.
    pub pump_waist: f64,
    pub signal_waist: f64,
    pub idler_waist: f64,
    /// Average pump power in W.
    pub pump_power: f64,
    pub signal_efficiency: f64,
    pub idler_efficiency: f64,
    /// m
    pub pump_wavelength: f64,
}

impl BeamConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("pump waist", self.pump_waist),
            ("signal waist", self.signal_waist),
            ("idler waist", self.idler_waist),
        ] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::config("waists_um", format!("{name} must be positive")));
            }
        }
        if !(self.pump_power > 0.0 && self.pump_power.is_finite()) {
            return Err(Error::config("pump_power_mw", "must be positive"));
        }
        for e in [self.signal_efficiency, self.idler_efficiency] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::config("path_efficiency", "must lie in [0, 1]"));
            }
        }
        if !(self.pump_wavelength > 0.0) {
            return Err(Error::config("pump_nm", "must be positive"));
        }
        Ok(())
    }

    pub fn waist(&self, arm: Arm) -> f64 {
        match arm {
            Arm::Signal => self.signal_waist,
            Arm::Idler => self.idler_waist,
        }
    }

    pub fn efficiency(&self, arm: Arm) -> f64 {
        match arm {
            Arm::Signal => self.signal_efficiency,
            Arm::Idler => self.idler_efficiency,
        }
    }

    /// Every waist multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        BeamConfig {
            pump_waist: self.pump_waist * s,
            signal_waist: self.signal_waist * s,
            idler_waist: self.idler_waist * s,
            ..*self
        }
    }
}

/// Squared normalisation of the (n, m) Hermite-Gauss mode of waist `w`.
pub fn alpha_sq(w: f64, n: usize, m: usize) -> f64 {
    2.0 / (2f64.powi((n + m) as i32) * factorial(n) * factorial(m) * PI * w * w)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapConstants {
    /// 1/m^2
    pub a: f64,
    pub c: f64,
    /// Coefficient of the y z cross term.
    pub d: f64,
}

pub fn overlap_constants(b: &BeamConfig, g: &Geometry) -> OverlapConstants {
    let (wp, ws, wi) = (b.pump_waist, b.signal_waist, b.idler_waist);
    let (cs, ci) = (g.theta_s.cos(), g.theta_i.cos());
    OverlapConstants {
        a: 1.0 / (wp * wp) + 1.0 / (ws * ws) + 1.0 / (wi * wi),
        c: 1.0 / (wp * wp) + cs * cs / (ws * ws) + ci * ci / (wi * wi),
        d: (2.0 * g.theta_s).sin() / (ws * ws) - (2.0 * g.theta_i).sin() / (wi * wi),
    }
}

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Fundamental-mode overlap amplitude.
pub fn phi00(oc: &OverlapConstants, dk: &PhaseMismatch, length: f64) -> Complex64 {
    let e = dk.dk_y * dk.dk_y / (4.0 * oc.c);
    if e > UNDERFLOW_EXPONENT {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(
        PI * length / (oc.a * oc.c).sqrt() * (-e).exp() * sinc(0.5 * dk.dk_z * length),
        0.0,
    )
}

/// Companion beam angle, waist and side (+1 signal side, -1 idler side).
fn companion(b: &BeamConfig, g: &Geometry, which: Arm) -> (f64, f64, f64) {
    match which {
        Arm::Signal => (g.theta_i, b.idler_waist, -1.0),
        Arm::Idler => (g.theta_s, b.signal_waist, 1.0),
    }
}

/// (L/q) (cos(qL/2) - sinc(qL/2)), with a series below |qL| = 1e-3.
pub fn cos_minus_sinc_term(q: f64, length: f64) -> f64 {
    if (q * length).abs() < 1e-3 {
        cos_minus_sinc_series(q, length)
    } else {
        cos_minus_sinc_direct(q, length)
    }
}

pub fn cos_minus_sinc_direct(q: f64, length: f64) -> f64 {
    let x = 0.5 * q * length;
    let h = (0.5 * x).sin();
    length / q * (-2.0 * h * h - (x.sin() - x) / x)
}

pub fn cos_minus_sinc_series(q: f64, length: f64) -> f64 {
    let x = 0.5 * q * length;
    let x2 = x * x;
    0.5 * length * length * x * (-1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45360.0)
}

/// Closed form of the (0, 1) amplitude.
pub fn phi01_closed_form(oc: &OverlapConstants, b: &BeamConfig, g: &Geometry, dk: &PhaseMismatch, length: f64, which: Arm) -> Complex64 {
    let e = dk.dk_y * dk.dk_y / (4.0 * oc.c);
    if e > UNDERFLOW_EXPONENT {
        return Complex64::new(0.0, 0.0);
    }
    let (theta, w, side) = companion(b, g, which);
    let k = theta.cos() * oc.d - side * 2.0 * oc.c * theta.sin();
    let pre = PI * SQRT_2 / (w * oc.a.sqrt() * oc.c.powf(1.5)) * (-e).exp();
    let bracket = theta.cos() * dk.dk_y * length * sinc(0.5 * dk.dk_z * length) + k * cos_minus_sinc_term(dk.dk_z, length);
    Complex64::new(0.0, pre * bracket)
}

/// Closed form of the (2, 0) amplitude.
pub fn phi20_closed_form(oc: &OverlapConstants, b: &BeamConfig, g: &Geometry, dk: &PhaseMismatch, length: f64, which: Arm) -> Complex64 {
    let (_, w, _) = companion(b, g, which);
    phi00(oc, dk, length) * (2.0 * (2.0 / (oc.a * w * w) - 1.0))
}

/// m_j = int_{-1}^{1} t^j exp(i eps t) dt for j = 0..=jmax.
pub fn unit_moments(eps: f64, jmax: usize) -> Vec<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let threshold = (0.5 * jmax as f64).max(4.0);
    if eps.abs() >= threshold {
        let ie = i * eps;
        let ep = Complex64::from_polar(1.0, eps);
        let em = ep.conj();
        let mut out = Vec::with_capacity(jmax + 1);
        out.push(Complex64::new(2.0 * eps.sin() / eps, 0.0));
        for j in 1..=jmax {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let prev = out[j - 1];
            out.push((ep - em * sign) / ie - prev * (j as f64) / ie);
        }
        return out;
    }
    let mut out = vec![Complex64::new(0.0, 0.0); jmax + 1];
    let powers = [
        Complex64::new(1.0, 0.0),
        i,
        Complex64::new(-1.0, 0.0),
        -i,
    ];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut term = 1.0; // eps^k / k!
        let mut max_term: f64 = 0.0;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut k = 0usize;
        loop {
            if (j + k) % 2 == 0 {
                sum += powers[k % 4] * (term * 2.0 / (j + k + 1) as f64);
            }
            max_term = max_term.max(term.abs());
            k += 1;
            term *= eps / k as f64;
            if (k as f64 > eps.abs() && term.abs() < 1e-18 * max_term) || k > 400 {
                break;
            }
        }
        *slot = sum;
    }
    out
}

/// M_j = int_{-L/2}^{L/2} z^j exp(i q z) dz for j = 0..=jmax.
pub fn z_moments(q: f64, length: f64, jmax: usize) -> Vec<Complex64> {
    let h = 0.5 * length;
    let mut scale = h;
    unit_moments(q * h, jmax)
        .into_iter()
        .map(|m| {
            let v = m * scale;
            scale *= h;
            v
        })
        .collect()
}

/// Separated x and y factors of every (n, m) amplitude up to `n_max`:
/// Phi^(n,m) = x[n] * y[m].
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    pub x: Vec<f64>,
    pub y: Vec<Complex64>,
    pub companion_waist: f64,
}

impl ModeAmplitudes {
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.y[m] * self.x[n]
    }

    /// Sum over even n <= N and m <= N of alpha^(n,m)^2 |Phi^(n,m)|^2.
    pub fn weighted_sum(&self, truncation: usize) -> f64 {
        let w = self.companion_waist;
        let mut total = 0.0;
        for n in (0..=truncation.min(self.x.len() - 1)).step_by(2) {
            let x2 = self.x[n] * self.x[n];
            for m in 0..=truncation.min(self.y.len() - 1) {
                total += alpha_sq(w, n, m) * x2 * self.y[m].norm_sqr();
            }
        }
        total
    }
}

pub fn mode_amplitudes(
    oc: &OverlapConstants,
    b: &BeamConfig,
    g: &Geometry,
    dk: &PhaseMismatch,
    length: f64,
    which: Arm,
    n_max: usize,
) -> ModeAmplitudes {
    let (theta, w, side) = companion(b, g, which);
    let mut x = vec![0.0; n_max + 1];
    let gx = 1.0 - 2.0 / (oc.a * w * w);
    let root_a = (PI / oc.a).sqrt();
    for n in (0..=n_max).step_by(2) {
        let h = n / 2;
        let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
        x[n] = root_a * sign * factorial(n) / factorial(h) * gx.powi(h as i32);
    }

    let e = dk.dk_y * dk.dk_y / (4.0 * oc.c);
    if e > UNDERFLOW_EXPONENT {
        return ModeAmplitudes {
            x,
            y: vec![Complex64::new(0.0, 0.0); n_max + 1],
            companion_waist: w,
        };
    }
    let gy = 1.0 - 2.0 * theta.cos().powi(2) / (w * w * oc.c);
    let i = Complex64::new(0.0, 1.0);
    // Argument of the companion Hermite polynomial after the transverse
    // integral: 2 a(z) = u0 + u1 z.
    let u0 = i * (2.0 * SQRT_2 * theta.cos() * dk.dk_y / (2.0 * oc.c * w));
    let u1 = Complex64::new(2.0 * SQRT_2 / w * (-theta.cos() * oc.d / (2.0 * oc.c) + side * theta.sin()), 0.0);
    let moments = z_moments(dk.dk_z, length, n_max);
    let env = (PI / oc.c).sqrt() * (-e).exp();

    // powers[p][j]: coefficients of (u0 + u1 z)^p
    let mut powers: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]];
    for p in 1..=n_max {
        let prev = &powers[p - 1];
        let mut next = vec![Complex64::new(0.0, 0.0); p + 1];
        for (j, c) in prev.iter().enumerate() {
            next[j] += c * u0;
            next[j + 1] += c * u1;
        }
        powers.push(next);
    }

    let mut y = Vec::with_capacity(n_max + 1);
    for m in 0..=n_max {
        let mut poly = vec![Complex64::new(0.0, 0.0); m + 1];
        for k in 0..=m / 2 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let coef = sign * factorial(m) / (factorial(k) * factorial(m - 2 * k)) * gy.powi(k as i32);
            for (j, c) in powers[m - 2 * k].iter().enumerate() {
                poly[j] += c * coef;
            }
        }
        let s: Complex64 = poly.iter().zip(&moments).map(|(p, mj)| p * mj).sum();
        y.push(s * env);
    }
    ModeAmplitudes {
        x,
        y,
        companion_waist: w,
    }
}

/// Overlap amplitude with the companion beam in Hermite-Gauss mode (n, m).
/// `which` names the arm whose target mode stays fundamental.
pub fn phi_nm(
    n: usize,
    m: usize,
    oc: &OverlapConstants,
    b: &BeamConfig,
    g: &Geometry,
    dk: &PhaseMismatch,
    length: f64,
    which: Arm,
) -> Complex64 {
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    mode_amplitudes(oc, b, g, dk, length, which, n.max(m)).get(n, m)
}

/// Weight of the (2, 0) correction for equal signal and idler waists.
pub fn focusing_ratio(b: &BeamConfig) -> Result<f64> {
    if (b.signal_waist - b.idler_waist).abs() > 1e-12 * b.signal_waist {
        return Err(Error::Precondition("focusing ratio needs equal signal and idler waists".into()));
    }
    Ok(1.0 / (1.0 + 2.0 * (b.pump_waist / b.signal_waist).powi(2)))
}
