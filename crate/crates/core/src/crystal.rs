use std::sync::Arc;

use serde::Serialize;

use crate::dispersion::DispersionSet;
use crate::error::{Error, Result};

/// Crystal length, effective nonlinearity and dispersion data. The tilt
/// angle lives on [`crate::phasematch::Geometry`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrystalParams {
    /// m
    pub length: f64,
    /// m/V
    pub d_eff: f64,
    #[serde(skip)]
    pub dispersion: Arc<DispersionSet>,
}

impl CrystalParams {
    pub fn new(length: f64, d_eff: f64, dispersion: Arc<DispersionSet>) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::config("crystal_length_um", "must be positive"));
        }
        if !(d_eff > 0.0 && d_eff.is_finite()) {
            return Err(Error::config("d_eff_pm_per_v", "must be positive"));
        }
        Ok(CrystalParams {
            length,
            d_eff,
            dispersion,
        })
    }

    /// 600 um BiBO with d_eff = 3.2 pm/V.
    pub fn bibo_default() -> Self {
        CrystalParams {
            length: 600e-6,
            d_eff: 3.2e-12,
            dispersion: Arc::new(DispersionSet::bibo()),
        }
    }
}
