//! One module per subcommand. Each takes the resolved [`Experiment`] plus its
//! own flags, writes CSVs under the output directory, and reports to stdout.
//!
//! [`Experiment`]: crate::config::Experiment

pub mod ann;
pub mod materials;
pub mod memdemo;
pub mod optics;
pub mod report;
pub mod xbar;
