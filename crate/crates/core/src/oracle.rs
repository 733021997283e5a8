//! Brute-force quadrature of the thin-crystal overlap integral, used to
//! validate the closed forms in [`crate::modeoverlap`].
//!
//! The integrand is the product of the actual beam profiles at (x, y, z),
//! the phase exp(i dk_y y + i dk_z z), and a weight that holds the transverse
//! Gaussian overlap of every slice at its value on the crystal centre plane.
//! The x and (y, z) parts factorise and are integrated separately.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modeoverlap::BeamConfig;
use crate::numerics::legendre::gauss_legendre;
use crate::phasematch::{Geometry, PhaseMismatch};
use crate::Arm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSpec {
    /// Transverse half-width in units of the largest waist; at least 5.
    pub radius_factor: f64,
    pub nodes_per_panel: usize,
    pub transverse_panels: usize,
    pub axial_panels: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_doublings: usize,
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec {
            radius_factor: 8.0,
            nodes_per_panel: 16,
            transverse_panels: 8,
            axial_panels: 2,
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_doublings: 6,
        }
    }
}

fn hermite(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

fn composite_rule(lo: f64, hi: f64, panels: usize, base: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let width = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * base.0.len());
    for p in 0..panels {
        let c = lo + width * (p as f64 + 0.5);
        for (x, w) in base.0.iter().zip(&base.1) {
            out.push((c + 0.5 * width * x, 0.5 * width * w));
        }
    }
    out
}

struct Beams {
    wp: f64,
    target: (f64, f64, f64),
    companion: (f64, f64, f64),
}

impl Beams {
    fn new(b: &BeamConfig, g: &Geometry, which: Arm) -> Self {
        // (waist, angle, side); the signal sits on the +z-tilted side.
        let signal = (b.signal_waist, g.theta_s, 1.0);
        let idler = (b.idler_waist, g.theta_i, -1.0);
        let (target, companion) = match which {
            Arm::Signal => (signal, idler),
            Arm::Idler => (idler, signal),
        };
        Beams {
            wp: b.pump_waist,
            target,
            companion,
        }
    }

    fn transverse(beam: (f64, f64, f64), y: f64, z: f64) -> f64 {
        y * beam.1.cos() + beam.2 * z * beam.1.sin()
    }

    /// Exponent of the Gaussian product restricted to the y-z plane.
    fn gaussian_yz(&self, y: f64, z: f64) -> f64 {
        let yt = Self::transverse(self.target, y, z);
        let yc = Self::transverse(self.companion, y, z);
        -(y * y) / (self.wp * self.wp) - yt * yt / (self.target.0 * self.target.0) - yc * yc / (self.companion.0 * self.companion.0)
    }

    fn gaussian_x(&self, x: f64) -> f64 {
        -x * x * (1.0 / (self.wp * self.wp) + 1.0 / (self.target.0 * self.target.0) + 1.0 / (self.companion.0 * self.companion.0))
    }
}

/// Numerical overlap amplitude with the companion in mode (n, m).
pub fn numeric_overlap(
    n: usize,
    m: usize,
    b: &BeamConfig,
    g: &Geometry,
    dk: &PhaseMismatch,
    length: f64,
    which: Arm,
    spec: &OracleSpec,
) -> Result<Complex64> {
    if spec.radius_factor < 5.0 {
        return Err(Error::Precondition("oracle radius must be at least 5 waists".into()));
    }
    let beams = Beams::new(b, g, which);
    let wmax = b.pump_waist.max(b.signal_waist).max(b.idler_waist);
    let r = spec.radius_factor * wmax;
    let h = 0.5 * length;
    let wc = beams.companion.0;
    let s2 = std::f64::consts::SQRT_2;

    // Quadratic form -(C y^2 + D y z + E z^2) of the y-z Gaussian exponent.
    let c = -beams.gaussian_yz(1.0, 0.0);
    let e = -beams.gaussian_yz(0.0, 1.0);
    let d = -beams.gaussian_yz(1.0, 1.0) - c - e;

    let base = gauss_legendre(spec.nodes_per_panel);
    let estimate = |level: usize| -> Complex64 {
        let scale = 1usize << level;
        let tx = composite_rule(-r, r, spec.transverse_panels * scale, &base);
        let tz = composite_rule(-h, h, spec.axial_panels * scale, &base);

        let xpart: f64 = tx
            .iter()
            .map(|&(x, w)| w * hermite(n, s2 * x / wc) * beams.gaussian_x(x).exp())
            .sum();

        let mut yz = Complex64::new(0.0, 0.0);
        for &(z, wz) in &tz {
            let weight = Complex64::new(e * z * z - d * d * z * z / (4.0 * c), dk.dk_y * d * z / (2.0 * c) + dk.dk_z * z).exp();
            let mut inner = Complex64::new(0.0, 0.0);
            for &(y, wy) in &tx {
                let yc = Beams::transverse(beams.companion, y, z);
                let amp = wy * hermite(m, s2 * yc / wc) * beams.gaussian_yz(y, z).exp();
                inner += Complex64::from_polar(amp, dk.dk_y * y);
            }
            yz += inner * weight * wz;
        }
        yz * xpart
    };

    let mut prev = estimate(0);
    for level in 1..=spec.max_doublings {
        let next = estimate(level);
        let diff = (next - prev).norm();
        if diff <= spec.abs_tol.max(spec.rel_tol * next.norm()) {
            return Ok(next);
        }
        if level == spec.max_doublings {
            return Err(Error::Oracle { previous: prev, last: next });
        }
        prev = next;
    }
    Err(Error::Oracle { previous: prev, last: prev })
}
