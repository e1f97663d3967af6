//! Desk-scale simulator of plasmonic nonvolatile memory crossbar arrays.
//!
//! Cells combine a memristive junction (PCM, conductive-bridge RRAM, or FTJ)
//! with a long-range plasmonic waveguide crossing, so every array supports
//! both electrical readout (analog vector-matrix multiplication on row
//! voltages and cell conductances) and optical readout (per-row transmitted
//! power and per-cell phase). The crate covers:
//!
//! - [`materials`]: measured dispersion tables and effective-medium mixing of
//!   partially crystallized switching materials,
//! - [`device`]: the nonvolatile cell state machine with thresholds,
//!   endurance, and conductance drift,
//! - [`optics`]: the balance-detuning loss model of the waveguide cell,
//! - [`crossbar`]: arrays, ideal and wire-resistance-aware VMM, closed-loop
//!   programming, optical row readout, and layer stacking,
//! - [`ann`]: differential-pair weight mapping and inference through the
//!   simulated hardware,
//! - [`energy`]: read/program energy traces and MAC-per-joule reporting,
//! - [`synth`]: seeded synthetic datasets and a float reference trainer.
//!
//! Everything is deterministic given explicit seeds; data-parallel paths
//! (behind the default `parallel` feature) preserve sequential ordering.

pub mod ann;
pub mod crossbar;
pub mod device;
pub mod energy;
pub mod error;
pub mod materials;
pub mod optics;
mod par;
pub mod synth;

pub use error::{Error, Result};
