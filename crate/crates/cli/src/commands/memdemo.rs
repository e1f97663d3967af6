//! `memory-demo`: scripted write-then-erase sequence on a single cell,
//! logging state, conductance, resistance class, and optical transmission
//! after every pulse. Shows conductance climbing while transmission falls,
//! then both returning to baseline after the erase.

use pxbar_core::device::Pulse;

use crate::config::Experiment;
use crate::error::{CliError, Result};
use crate::table::{sig12, OutFile};

pub const DEMO_HEADER: &str = "pulse,s,conductance_S,class,transmission";

pub fn run(exp: &Experiment, writes: u32) -> Result<()> {
    if writes == 0 {
        return Err(CliError::config("--writes must be >= 1"));
    }
    let mut array = exp.spec.build(1, 1)?;
    let device = &exp.spec.device;
    let mut out = OutFile::new(&exp.config_sha256, exp.seed, DEMO_HEADER);

    let mut log_row = |pulse: u32, array: &pxbar_core::crossbar::CrossbarArray| -> Result<()> {
        let snapshot = array.electro_optic_snapshot()?;
        let cell = &snapshot[0];
        let mut fields = vec![pulse.to_string()];
        fields.push(sig12(cell.s));
        fields.push(sig12(cell.conductance_s));
        fields.push(cell.class.to_string());
        fields.push(sig12(cell.transmission));
        out.row(&fields);
        Ok(())
    };

    log_row(0, &array)?;
    let step = Pulse::set_electrical(device.v_set, device.tau_set_s / f64::from(writes))?;
    for pulse in 1..=writes {
        array.apply_pulse_at(0, 0, &step)?;
        log_row(pulse, &array)?;
    }
    let erase = Pulse::reset_electrical(device.v_reset, device.tau_set_s)?;
    array.apply_pulse_at(0, 0, &erase)?;
    log_row(writes + 1, &array)?;

    let path = exp.out_dir.join("memory_demo.csv");
    out.write(&path)?;
    println!(
        "logged baseline, {writes} graded writes, and one erase; wrote {}",
        path.display()
    );
    Ok(())
}
