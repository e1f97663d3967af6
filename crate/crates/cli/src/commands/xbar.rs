//! `xbar`: direct array experiments. `vmm` reads column currents for each
//! drive vector in a fixture, `program` runs closed-loop writes toward a
//! target conductance matrix, and `snapshot` dumps the combined
//! electrical/optical view of every cell.

use std::path::{Path, PathBuf};

use nalgebra::DVector;

use pxbar_core::ann::VmmMode;
use pxbar_core::crossbar::{program_array, CrossbarArray};

use crate::config::Experiment;
use crate::error::{CliError, Result};
use crate::fixtures::read_matrix;
use crate::table::{sig12, OutFile};

pub const CURRENTS_HEADER: &str = "sample,col,current_A";
pub const PROGRAM_HEADER: &str = "row,col,target_S,final_S,pulses,converged";
pub const SNAPSHOT_HEADER: &str = "row,col,s,conductance_S,class,transmission,phase_rad";

pub enum XbarArgs {
    Vmm {
        input: PathBuf,
        states: Option<PathBuf>,
        conductances: Option<PathBuf>,
        mode: VmmMode,
    },
    Program {
        targets: PathBuf,
    },
    Snapshot {
        states: Option<PathBuf>,
    },
}

/// Build the configured array and optionally preload cell states or exact
/// conductances from a fixture matrix.
fn build_array(
    exp: &Experiment,
    states: Option<&Path>,
    conductances: Option<&Path>,
) -> Result<CrossbarArray> {
    let mut array = exp.spec.build(exp.rows, exp.cols)?;
    if states.is_some() && conductances.is_some() {
        return Err(CliError::config(
            "--states and --conductances are mutually exclusive",
        ));
    }
    if let Some(path) = states {
        let matrix = load_shaped(exp, path)?;
        for n in 0..exp.rows {
            for m in 0..exp.cols {
                array.set_cell_state(n, m, matrix[(n, m)]).map_err(|e| {
                    CliError::schema(format!("{} cell ({n},{m}): {e}", path.display()))
                })?;
            }
        }
    }
    if let Some(path) = conductances {
        let matrix = load_shaped(exp, path)?;
        for n in 0..exp.rows {
            for m in 0..exp.cols {
                array
                    .set_cell_conductance(n, m, matrix[(n, m)])
                    .map_err(|e| {
                        CliError::schema(format!("{} cell ({n},{m}): {e}", path.display()))
                    })?;
            }
        }
    }
    Ok(array)
}

fn load_shaped(exp: &Experiment, path: &Path) -> Result<nalgebra::DMatrix<f64>> {
    let matrix = read_matrix(path)?;
    if matrix.nrows() != exp.rows || matrix.ncols() != exp.cols {
        return Err(CliError::schema(format!(
            "{}: expected a {}x{} matrix, got {}x{}",
            path.display(),
            exp.rows,
            exp.cols,
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    Ok(matrix)
}

pub fn run(exp: &Experiment, args: &XbarArgs) -> Result<()> {
    match args {
        XbarArgs::Vmm {
            input,
            states,
            conductances,
            mode,
        } => vmm(exp, input, states.as_deref(), conductances.as_deref(), *mode),
        XbarArgs::Program { targets } => program(exp, targets),
        XbarArgs::Snapshot { states } => snapshot(exp, states.as_deref()),
    }
}

fn vmm(
    exp: &Experiment,
    input: &Path,
    states: Option<&Path>,
    conductances: Option<&Path>,
    mode: VmmMode,
) -> Result<()> {
    let array = build_array(exp, states, conductances)?;
    let drives = read_matrix(input)?;
    if drives.ncols() != exp.rows {
        return Err(CliError::schema(format!(
            "{}: drive vectors have {} entries, array has {} rows",
            input.display(),
            drives.ncols(),
            exp.rows
        )));
    }
    let mut out = OutFile::new(&exp.config_sha256, exp.seed, CURRENTS_HEADER);
    for sample in 0..drives.nrows() {
        let v = DVector::from_fn(exp.rows, |n, _| drives[(sample, n)]);
        let currents = match mode {
            VmmMode::Ideal => array.vmm_ideal(&v)?,
            VmmMode::Nonideal => array.vmm_nonideal(&v)?,
        };
        for m in 0..exp.cols {
            out.row(&[sample.to_string(), m.to_string(), sig12(currents[m])]);
        }
    }
    let path = exp.out_dir.join("currents.csv");
    out.write(&path)?;
    println!(
        "read {} drive vectors in {mode} mode, wrote {}",
        drives.nrows(),
        path.display()
    );
    Ok(())
}

fn program(exp: &Experiment, targets: &Path) -> Result<()> {
    let mut array = exp.spec.build(exp.rows, exp.cols)?;
    let target_matrix = load_shaped(exp, targets)?;
    let report = program_array(&mut array, &target_matrix, exp.tol, exp.max_pulses)?;

    let mut out = OutFile::new(&exp.config_sha256, exp.seed, PROGRAM_HEADER);
    for cell in &report.cells {
        out.row(&[
            cell.row.to_string(),
            cell.col.to_string(),
            sig12(cell.target_g),
            sig12(cell.final_g),
            cell.pulses.to_string(),
            cell.ok.to_string(),
        ]);
    }
    let path = exp.out_dir.join("program_report.csv");
    out.write(&path)?;

    println!(
        "programmed {} cells at {} relative tolerance: {} pulses, {} J, {} s modeled",
        report.cells.len(),
        exp.tol,
        report.total_pulses,
        sig12(report.program_energy_j),
        sig12(report.program_time_s)
    );
    println!("wrote {}", path.display());
    if !report.all_ok {
        let failed = report.cells.iter().filter(|c| !c.ok).count();
        return Err(CliError::model(format!(
            "{failed} cells missed their target within {} pulses (see {})",
            exp.max_pulses,
            path.display()
        )));
    }
    Ok(())
}

fn snapshot(exp: &Experiment, states: Option<&Path>) -> Result<()> {
    let array = build_array(exp, states, None)?;
    let records = array.electro_optic_snapshot()?;
    let mut out = OutFile::new(&exp.config_sha256, exp.seed, SNAPSHOT_HEADER);
    for record in &records {
        out.row(&[
            record.row.to_string(),
            record.col.to_string(),
            sig12(record.s),
            sig12(record.conductance_s),
            record.class.to_string(),
            sig12(record.transmission),
            sig12(record.phase_rad),
        ]);
    }
    let path = exp.out_dir.join("snapshot.csv");
    out.write(&path)?;
    println!("captured {} cells, wrote {}", records.len(), path.display());
    Ok(())
}
