//! Closed-loop conductance programming.
//!
//! The controller sees the cell only through conductance read-back and its
//! own pulse ledger; it never inspects the state variable. Writes proceed by
//! incremental set pulses whose duration is halved after every overshoot
//! (starting at `tau_set / 16`, floored at `tau_set / 1024`). An overshoot
//! triggers a reset followed by one pulse replaying the last cumulative
//! duration that read back below the target, after which climbing resumes
//! with the finer step. Targets whose tolerance band is narrower than the
//! floor step resolves cannot converge and fail with `MaxPulsesExceeded`.

use nalgebra::DMatrix;

use crate::crossbar::CrossbarArray;
use crate::device::{Pulse, PulseDomain};
use crate::error::{Error, Result};

/// One applied pulse with its read-back, as seen by the controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseRecord {
    pub pulse: Pulse,
    /// Conductance read immediately before the pulse (S).
    pub g_before: f64,
    /// Conductance read immediately after the pulse (S).
    pub g_after: f64,
    /// State variable after the pulse; diagnostic only, never fed back.
    pub s_after: f64,
}

impl PulseRecord {
    /// Energy delivered by this pulse: `V^2 G t` electrical, `P t` optical.
    ///
    /// Electrical dissipation is evaluated at the pre-pulse conductance.
    pub fn energy_j(&self) -> f64 {
        match self.pulse.domain {
            PulseDomain::Electrical => {
                self.pulse.amplitude * self.pulse.amplitude * self.g_before * self.pulse.duration_s
            }
            PulseDomain::Optical => self.pulse.amplitude * self.pulse.duration_s,
        }
    }
}

/// Complete record of one programming attempt on one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseLog {
    pub row: usize,
    pub col: usize,
    pub target_g: f64,
    pub records: Vec<PulseRecord>,
    /// Conductance at loop exit.
    pub final_g: f64,
    pub converged: bool,
}

impl PulseLog {
    pub fn pulses(&self) -> usize {
        self.records.len()
    }

    pub fn energy_j(&self) -> f64 {
        self.records.iter().map(PulseRecord::energy_j).sum()
    }

    pub fn duration_s(&self) -> f64 {
        self.records.iter().map(|r| r.pulse.duration_s).sum()
    }
}

fn apply_logged(
    array: &mut CrossbarArray,
    row: usize,
    col: usize,
    pulse: Pulse,
    log: &mut PulseLog,
) -> Result<f64> {
    let g_before = array.conductance_at(row, col)?;
    array.apply_pulse_at(row, col, &pulse)?;
    let g_after = array.conductance_at(row, col)?;
    log.records.push(PulseRecord {
        pulse,
        g_before,
        g_after,
        s_after: array.cell(row, col)?.s,
    });
    Ok(g_after)
}

/// Drive cell (row, col) to `target_g` within relative tolerance `tol`.
///
/// Returns the pulse log on success; `MaxPulsesExceeded` carries the log for
/// diagnosis when the budget runs out.
pub fn program_cell(
    array: &mut CrossbarArray,
    row: usize,
    col: usize,
    target_g: f64,
    tol: f64,
    max_pulses: u32,
) -> Result<PulseLog> {
    let (g_a, g_c) = (array.device.g_a, array.device.g_c);
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!(
            "programming tolerance must be > 0, got {tol}"
        )));
    }
    if !(target_g >= g_a && target_g <= g_c) {
        return Err(Error::TargetOutOfRange {
            target_s: target_g,
            g_min_s: g_a,
            g_max_s: g_c,
            msg: "programming target".into(),
        });
    }
    let within = |g: f64| (g - target_g).abs() <= tol * target_g;
    if !array.device.analog && !within(g_a) && !within(g_c) {
        return Err(Error::TargetOutOfRange {
            target_s: target_g,
            g_min_s: g_a,
            g_max_s: g_c,
            msg: "abrupt device, only endpoint targets are reachable".into(),
        });
    }

    let mut log = PulseLog {
        row,
        col,
        target_g,
        records: Vec::new(),
        final_g: array.conductance_at(row, col)?,
        converged: false,
    };
    if within(log.final_g) {
        log.converged = true;
        return Ok(log);
    }

    let tau = array.device.tau_set_s;
    let reset_pulse = Pulse::reset_electrical(array.device.v_reset, tau / 64.0)?;
    let budget = |log: &PulseLog| -> Result<()> {
        if log.pulses() >= max_pulses as usize {
            Err(Error::MaxPulsesExceeded {
                max_pulses,
                log: Box::new(log.clone()),
            })
        } else {
            Ok(())
        }
    };

    // Normalize to the reproducible baseline so the duration ledger below
    // measures accumulation from s = 0 rather than an unknown initial state.
    if log.final_g != g_a {
        budget(&log)?;
        apply_logged(array, row, col, reset_pulse, &mut log)?;
    }

    let mut step = tau / 16.0;
    let floor = tau / 1024.0;
    let mut cum: f64 = 0.0;
    let mut last_climb: f64 = 0.0;
    let mut replay: f64 = 0.0;
    loop {
        let g = array.conductance_at(row, col)?;
        log.final_g = g;
        if within(g) {
            log.converged = true;
            return Ok(log);
        }
        budget(&log)?;
        if g > target_g {
            // Overshot: back off to the last cumulative duration that read
            // below target, then climb again at half the step.
            replay = (cum - last_climb).max(0.0);
            step = (step / 2.0).max(floor);
            apply_logged(array, row, col, reset_pulse, &mut log)?;
            cum = 0.0;
            last_climb = 0.0;
        } else {
            let duration = if replay > 0.0 { replay } else { step };
            replay = 0.0;
            let set = Pulse::set_electrical(array.device.v_set, duration)?;
            apply_logged(array, row, col, set, &mut log)?;
            cum += duration;
            last_climb = duration;
        }
    }
}

/// Outcome of programming one cell within a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct CellProgramReport {
    pub row: usize,
    pub col: usize,
    pub target_g: f64,
    pub final_g: f64,
    pub pulses: usize,
    pub ok: bool,
    pub error: Option<String>,
}

/// Aggregate outcome of programming a whole array.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramReport {
    pub cells: Vec<CellProgramReport>,
    /// Per-cell pulse logs in the same order as `cells`.
    pub logs: Vec<PulseLog>,
    pub total_pulses: usize,
    pub program_energy_j: f64,
    pub program_time_s: f64,
    pub all_ok: bool,
}

/// Program every cell toward its entry in `targets`, cell by cell.
///
/// Per-cell failures are recorded in the report instead of aborting the
/// batch; pulses spent on failed attempts still count toward energy and time.
pub fn program_array(
    array: &mut CrossbarArray,
    targets: &DMatrix<f64>,
    tol: f64,
    max_pulses: u32,
) -> Result<ProgramReport> {
    if targets.nrows() != array.rows() {
        return Err(Error::Dimension {
            expected: array.rows(),
            got: targets.nrows(),
        });
    }
    if targets.ncols() != array.cols() {
        return Err(Error::Dimension {
            expected: array.cols(),
            got: targets.ncols(),
        });
    }
    let mut cells = Vec::with_capacity(array.rows() * array.cols());
    let mut logs = Vec::with_capacity(cells.capacity());
    for row in 0..array.rows() {
        for col in 0..array.cols() {
            let target_g = targets[(row, col)];
            let (log, error) = match program_cell(array, row, col, target_g, tol, max_pulses) {
                Ok(log) => (log, None),
                Err(Error::MaxPulsesExceeded { log, max_pulses }) => {
                    let msg = format!("did not converge within {max_pulses} pulses");
                    (*log, Some(msg))
                }
                Err(err) => (
                    PulseLog {
                        row,
                        col,
                        target_g,
                        records: Vec::new(),
                        final_g: array.conductance_at(row, col)?,
                        converged: false,
                    },
                    Some(err.to_string()),
                ),
            };
            cells.push(CellProgramReport {
                row,
                col,
                target_g,
                final_g: log.final_g,
                pulses: log.pulses(),
                ok: log.converged,
                error,
            });
            logs.push(log);
        }
    }
    let total_pulses = logs.iter().map(PulseLog::pulses).sum();
    let program_energy_j = logs.iter().map(PulseLog::energy_j).sum();
    let program_time_s = logs.iter().map(PulseLog::duration_s).sum();
    let all_ok = cells.iter().all(|c| c.ok);
    Ok(ProgramReport {
        cells,
        logs,
        total_pulses,
        program_energy_j,
        program_time_s,
        all_ok,
    })
}
