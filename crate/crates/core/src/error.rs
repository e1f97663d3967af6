//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("wavelength {wavelength_nm} nm outside table span [{min_nm}, {max_nm}] nm")]
    OutOfRange {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("index {index} out of range ({len} valid)")]
    Index { index: usize, len: usize },

    #[error("singular resistive network: {0}")]
    SingularNetwork(String),

    #[error("target conductance {target_s} S outside programmable range [{g_min_s} S, {g_max_s} S]: {msg}")]
    TargetOutOfRange {
        target_s: f64,
        g_min_s: f64,
        g_max_s: f64,
        msg: String,
    },

    #[error("programming did not converge within {max_pulses} pulses")]
    MaxPulsesExceeded {
        max_pulses: u32,
        /// Pulses applied before giving up, kept for diagnosis.
        log: Box<crate::crossbar::PulseLog>,
    },

    #[error("crossing angle {angle_deg} deg outside (0, 180)")]
    AngleOutOfRange { angle_deg: f64 },

    #[error("degenerate weights: {0}")]
    DegenerateWeights(String),
}

pub type Result<T> = std::result::Result<T, Error>;
