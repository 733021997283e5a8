use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wavelength {wavelength_nm} nm is outside the valid range [{min_nm}, {max_nm}] nm of {material}")]
    OutOfRange {
        material: String,
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("dispersion data: {0}")]
    Dispersion(String),

    #[error("no root in [{lo}, {hi}] (residuals {f_lo:e}, {f_hi:e}): {context}")]
    NoRoot {
        context: String,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("ambiguous phase matching: {} candidate tilts {candidates_deg:?} deg", candidates_deg.len())]
    AmbiguousRoot { candidates_deg: Vec<f64> },

    #[error("no phase-matched emission at tilt {theta_p_deg} deg for signal {signal_nm} nm")]
    NoEmission { theta_p_deg: f64, signal_nm: f64 },

    #[error("total internal reflection: sin argument {0} exceeds 1")]
    TotalInternalReflection(f64),

    #[error("geometry is not frequency degenerate")]
    NotDegenerate,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("overlap oracle did not converge: last estimates {previous} and {last}")]
    Oracle {
        previous: num_complex::Complex64,
        last: num_complex::Complex64,
    },

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 config, 3 solver, 4 quadrature, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parse { .. } | Error::OutOfRange { .. } => 2,
            Error::Dispersion(_) => 2,
            Error::NoRoot { .. }
            | Error::AmbiguousRoot { .. }
            | Error::NoEmission { .. }
            | Error::TotalInternalReflection(_)
            | Error::NotDegenerate
            | Error::Precondition(_) => 3,
            Error::Quadrature { .. } | Error::Oracle { .. } => 4,
            Error::Io { .. } => 1,
        }
    }
}
