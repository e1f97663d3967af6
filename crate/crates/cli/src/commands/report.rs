//! `report`: reduce a recorded operation trace to the aggregate energy
//! accounting, as structured text on stdout and a one-row CSV.

use std::path::{Path, PathBuf};

use pxbar_core::energy::EnergyReport;

use crate::config::Experiment;
use crate::error::Result;
use crate::fixtures::read_trace;
use crate::table::{sig12, OutFile};

pub const ENERGY_HEADER: &str =
    "mac_count,read_energy_j,program_energy_j,model_time_s,macs_per_joule";

pub fn write_energy_csv(
    report: &EnergyReport,
    out_dir: &Path,
    config_sha256: &str,
    seed: u64,
) -> Result<PathBuf> {
    let mut out = OutFile::new(config_sha256, seed, ENERGY_HEADER);
    out.row(&[
        report.mac_count.to_string(),
        sig12(report.read_energy_j),
        sig12(report.program_energy_j),
        sig12(report.model_time_s),
        sig12(report.macs_per_joule),
    ]);
    let path = out_dir.join("energy_report.csv");
    out.write(&path)?;
    Ok(path)
}

pub fn print_report(report: &EnergyReport) {
    println!("mac count: {}", report.mac_count);
    println!("read energy: {} J", sig12(report.read_energy_j));
    println!("program energy: {} J", sig12(report.program_energy_j));
    println!("model time: {} s", sig12(report.model_time_s));
    println!("MAC/s/W: {}", sig12(report.macs_per_joule));
}

/// Run the command. Without a config the digest of the trace file itself is
/// echoed into the output comment.
pub fn run(
    trace_path: &Path,
    exp: Option<&Experiment>,
    seed_override: Option<u64>,
    out_override: Option<&Path>,
) -> Result<()> {
    let trace = read_trace(trace_path)?;
    let report = trace.report();

    let (sha, seed, out_dir) = match exp {
        Some(exp) => (exp.config_sha256.clone(), exp.seed, exp.out_dir.clone()),
        None => {
            let bytes = std::fs::read(trace_path).map_err(|e| {
                crate::error::CliError::schema(format!(
                    "cannot read {}: {e}",
                    trace_path.display()
                ))
            })?;
            (
                crate::config::sha256_hex(&bytes),
                seed_override.unwrap_or(0),
                out_override
                    .map(Path::to_path_buf)
                    .unwrap_or_else(|| PathBuf::from("out")),
            )
        }
    };
    let seed = seed_override.unwrap_or(seed);
    let out_dir = out_override.map(Path::to_path_buf).unwrap_or(out_dir);

    println!("events: {}", trace.events.len());
    print_report(&report);
    let path = write_energy_csv(&report, &out_dir, &sha, seed)?;
    println!("wrote {}", path.display());
    Ok(())
}
