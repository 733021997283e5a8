//! CODATA 2018 constants in SI units.

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

use std::f64::consts::PI;

/// Vacuum wavelength (m) to angular frequency (rad/s).
pub fn omega_from_wavelength(lambda: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / lambda
}

/// Angular frequency (rad/s) to vacuum wavelength (m).
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}
