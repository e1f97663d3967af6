//! Energy, time, and MAC accounting over simulated operation traces.
//!
//! Crossbar reads and programming pulses append events to a [`Trace`]; the
//! trace reduces to an [`EnergyReport`] whose efficiency metric is MAC/s/W,
//! dimensionally MAC per joule.

use serde::{Deserialize, Serialize};

/// One accounted hardware operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TraceEvent {
    /// One electrical VMM read phase over a rows x cols array.
    VmmRead {
        rows: usize,
        cols: usize,
        energy_j: f64,
        duration_s: f64,
    },
    /// One optical row readout (input power times dwell time).
    OpticalRead { energy_j: f64, duration_s: f64 },
    /// One programming pulse, electrical or optical.
    ProgramPulse { energy_j: f64, duration_s: f64 },
}

impl TraceEvent {
    pub fn energy_j(&self) -> f64 {
        match *self {
            TraceEvent::VmmRead { energy_j, .. }
            | TraceEvent::OpticalRead { energy_j, .. }
            | TraceEvent::ProgramPulse { energy_j, .. } => energy_j,
        }
    }

    pub fn duration_s(&self) -> f64 {
        match *self {
            TraceEvent::VmmRead { duration_s, .. }
            | TraceEvent::OpticalRead { duration_s, .. }
            | TraceEvent::ProgramPulse { duration_s, .. } => duration_s,
        }
    }
}

/// Ordered log of accounted operations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    pub fn push(&mut self, event: TraceEvent) {
        self.events.push(event);
    }

    pub fn extend(&mut self, other: &Trace) {
        self.events.extend_from_slice(&other.events);
    }

    pub fn report(&self) -> EnergyReport {
        let mut mac_count: u64 = 0;
        let mut read_energy_j = 0.0;
        let mut program_energy_j = 0.0;
        let mut model_time_s = 0.0;
        for event in &self.events {
            model_time_s += event.duration_s();
            match *event {
                TraceEvent::VmmRead {
                    rows,
                    cols,
                    energy_j,
                    ..
                } => {
                    mac_count += (rows * cols) as u64;
                    read_energy_j += energy_j;
                }
                TraceEvent::OpticalRead { energy_j, .. } => read_energy_j += energy_j,
                TraceEvent::ProgramPulse { energy_j, .. } => program_energy_j += energy_j,
            }
        }
        let total = read_energy_j + program_energy_j;
        let macs_per_joule = if total > 0.0 {
            mac_count as f64 / total
        } else {
            0.0
        };
        EnergyReport {
            mac_count,
            read_energy_j,
            program_energy_j,
            model_time_s,
            macs_per_joule,
        }
    }
}

/// Aggregated accounting of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Multiply-accumulate operations performed by VMM reads.
    pub mac_count: u64,
    pub read_energy_j: f64,
    pub program_energy_j: f64,
    /// Modeled wall time: the sum of configured pulse and read durations.
    pub model_time_s: f64,
    /// MAC/s/W, equal to MACs per joule of total (read + program) energy.
    pub macs_per_joule: f64,
}
