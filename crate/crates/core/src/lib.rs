//! Photon-pair rates, singles rates and heralding efficiency for type-I
//! down-conversion in a thin birefringent crystal collected into Gaussian
//! single-mode beams.

pub mod cli;
pub mod constants;
pub mod crystal;
pub mod dispersion;
pub mod error;
pub mod modeoverlap;
pub mod numerics;
pub mod oracle;
pub mod phasematch;
pub mod rates;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

/// Which down-converted beam is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Signal,
    Idler,
}

impl Arm {
    pub fn other(self) -> Arm {
        match self {
            Arm::Signal => Arm::Idler,
            Arm::Idler => Arm::Signal,
        }
    }
}
