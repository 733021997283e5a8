//! Refractive index, group index and group-velocity dispersion of a biaxial
//! crystal in one principal plane.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::{omega_from_wavelength, wavelength_from_omega, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Embedded BiBO coefficient file.
pub const BIBO_DATA: &str = include_str!("../data/bibo.toml");

/// `n^2 = a + b / (lambda^2 - c) - d lambda^2`, lambda in micrometres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sellmeier {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Sellmeier {
    /// Dielectric constant at `lambda` (m).
    pub fn epsilon(&self, lambda: f64) -> f64 {
        let s = (lambda * 1e6).powi(2);
        self.a + self.b / (s - self.c) - self.d * s
    }

    /// (epsilon, d epsilon / d omega, d^2 epsilon / d omega^2).
    fn epsilon_omega_derivs(&self, omega: f64) -> (f64, f64, f64) {
        let s = (wavelength_from_omega(omega) * 1e6).powi(2);
        let r = s - self.c;
        let e = self.a + self.b / r - self.d * s;
        let e_s = -self.b / (r * r) - self.d;
        let e_ss = 2.0 * self.b / (r * r * r);
        let s1 = -2.0 * s / omega;
        let s2 = 6.0 * s / (omega * omega);
        (e, e_s * s1, e_ss * s1 * s1 + e_s * s2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Axes {
    x: Sellmeier,
    y: Sellmeier,
    z: Sellmeier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DispersionFile {
    material: String,
    version: u32,
    citation: String,
    valid_range_nm: [f64; 2],
    pump_axis: Axis,
    spdc_axes: [Axis; 2],
    axes: Axes,
}

/// Which polarisation a sample refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Pump,
    Spdc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexSample {
    pub n: f64,
    /// Group index c dk/domega.
    pub n_g: f64,
    /// d^2 k / d omega^2 in s^2/m.
    pub k2: f64,
    /// Wavevector magnitude in rad/m.
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionSet {
    pub material: String,
    pub version: u32,
    pub citation: String,
    /// Valid wavelength interval in m.
    pub valid_range: (f64, f64),
    pub pump_axis: Axis,
    pub spdc_axes: [Axis; 2],
    pub principal: [Sellmeier; 3],
    /// Hex SHA-256 of the source text.
    pub checksum: String,
}

impl DispersionSet {
    pub fn bibo() -> Self {
        Self::from_toml_str(BIBO_DATA).expect("embedded BiBO data is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Dispersion(m) => Error::Parse {
                path: path.to_path_buf(),
                message: m,
            },
            other => other,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: DispersionFile = toml::from_str(text).map_err(|e| Error::Dispersion(e.to_string()))?;
        let [lo, hi] = file.valid_range_nm;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Dispersion(format!("bad valid_range_nm [{lo}, {hi}]")));
        }
        if file.spdc_axes[0] == file.spdc_axes[1] {
            return Err(Error::Dispersion("spdc_axes must name two distinct axes".into()));
        }
        let set = DispersionSet {
            material: file.material,
            version: file.version,
            citation: file.citation,
            valid_range: (lo * 1e-9, hi * 1e-9),
            pump_axis: file.pump_axis,
            spdc_axes: file.spdc_axes,
            principal: [file.axes.x, file.axes.y, file.axes.z],
            checksum: hex::encode(Sha256::digest(text.as_bytes())),
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.valid_range;
        for (i, s) in self.principal.iter().enumerate() {
            if s.c >= (lo * 1e6).powi(2) {
                return Err(Error::Dispersion(format!("axis {i}: Sellmeier pole inside valid range")));
            }
            let mut prev = f64::INFINITY;
            for j in 0..=200 {
                let lambda = lo + (hi - lo) * j as f64 / 200.0;
                let e = s.epsilon(lambda);
                let n = e.sqrt();
                if !(e > 1.0 && n < 4.0) {
                    return Err(Error::Dispersion(format!(
                        "axis {i}: index {n} at {} nm outside (1, 4)",
                        lambda * 1e9
                    )));
                }
                if n >= prev {
                    return Err(Error::Dispersion(format!(
                        "axis {i}: index not decreasing at {} nm",
                        lambda * 1e9
                    )));
                }
                prev = n;
            }
        }
        Ok(())
    }

    fn check_range(&self, lambda: f64) -> Result<()> {
        let (lo, hi) = self.valid_range;
        // A relative slack of 1e-12 keeps round-tripped endpoint frequencies valid.
        if lambda.is_finite() && lambda >= lo * (1.0 - 1e-12) && lambda <= hi * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                material: self.material.clone(),
                wavelength_nm: lambda * 1e9,
                min_nm: lo * 1e9,
                max_nm: hi * 1e9,
            })
        }
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.check_range(lambda).is_ok()
    }

    /// (n_x, n_y, n_z) at `lambda` (m).
    pub fn principal_indices(&self, lambda: f64) -> Result<[f64; 3]> {
        self.check_range(lambda)?;
        Ok(self.principal.map(|s| s.epsilon(lambda).sqrt()))
    }

    /// Angle-independent index seen by the pump polarisation.
    pub fn index_pump(&self, lambda: f64) -> Result<f64> {
        self.check_range(lambda)?;
        Ok(self.principal[self.pump_axis.index()].epsilon(lambda).sqrt())
    }

    /// Index of the down-converted polarisation for propagation at polar
    /// angle `theta` within the principal plane.
    pub fn index_spdc(&self, lambda: f64, theta: f64) -> Result<f64> {
        self.check_range(lambda)?;
        let e0 = self.principal[self.spdc_axes[0].index()].epsilon(lambda);
        let e1 = self.principal[self.spdc_axes[1].index()].epsilon(lambda);
        let (s, c) = theta.sin_cos();
        Ok((c * c / e0 + s * s / e1).sqrt().recip())
    }

    pub fn index(&self, lambda: f64, theta: f64, pol: Polarization) -> Result<f64> {
        match pol {
            Polarization::Pump => self.index_pump(lambda),
            Polarization::Spdc => self.index_spdc(lambda, theta),
        }
    }

    /// Wavevector magnitude at angular frequency `omega`.
    pub fn wavenumber(&self, omega: f64, theta: f64, pol: Polarization) -> Result<f64> {
        Ok(self.index(wavelength_from_omega(omega), theta, pol)? * omega / SPEED_OF_LIGHT)
    }

    /// Index, group index and GVD from analytic derivatives of the Sellmeier form.
    pub fn dispersion_sample(&self, lambda: f64, theta: f64, pol: Polarization) -> Result<IndexSample> {
        self.check_range(lambda)?;
        let omega = omega_from_wavelength(lambda);
        let terms: Vec<(f64, Sellmeier)> = match pol {
            Polarization::Pump => vec![(1.0, self.principal[self.pump_axis.index()])],
            Polarization::Spdc => {
                let (s, c) = theta.sin_cos();
                vec![
                    (c * c, self.principal[self.spdc_axes[0].index()]),
                    (s * s, self.principal[self.spdc_axes[1].index()]),
                ]
            }
        };
        // u = 1/n^2 = sum w / epsilon
        let (mut u, mut u1, mut u2) = (0.0, 0.0, 0.0);
        for (w, s) in terms {
            if w == 0.0 {
                continue;
            }
            let (e, e1, e2) = s.epsilon_omega_derivs(omega);
            u += w / e;
            u1 -= w * e1 / (e * e);
            u2 += w * (2.0 * e1 * e1 / (e * e * e) - e2 / (e * e));
        }
        let n = u.powf(-0.5);
        let n1 = -0.5 * u.powf(-1.5) * u1;
        let n2 = 0.75 * u.powf(-2.5) * u1 * u1 - 0.5 * u.powf(-1.5) * u2;
        Ok(IndexSample {
            n,
            n_g: n + omega * n1,
            k2: (2.0 * n1 + omega * n2) / SPEED_OF_LIGHT,
            k: n * omega / SPEED_OF_LIGHT,
        })
    }

    /// Same quantities by central differences of k(omega) with relative step `h`.
    pub fn dispersion_sample_numeric(&self, lambda: f64, theta: f64, pol: Polarization, h: f64) -> Result<IndexSample> {
        let omega = omega_from_wavelength(lambda);
        let d = omega * h;
        self.check_range(wavelength_from_omega(omega + d))?;
        self.check_range(wavelength_from_omega(omega - d))?;
        let k0 = self.wavenumber(omega, theta, pol)?;
        let kp = self.wavenumber(omega + d, theta, pol)?;
        let km = self.wavenumber(omega - d, theta, pol)?;
        Ok(IndexSample {
            n: k0 * SPEED_OF_LIGHT / omega,
            n_g: SPEED_OF_LIGHT * (kp - km) / (2.0 * d),
            k2: (kp - 2.0 * k0 + km) / (d * d),
            k: k0,
        })
    }
}
