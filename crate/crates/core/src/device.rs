//! Nonvolatile memristive cell model.
//!
//! A cell carries a single state variable `s` in `[0, 1]`: the crystalline
//! fraction for PCM, filament completion for conductive-bridge RRAM, or the
//! switched-polarization fraction for an FTJ. Pulses at or above the set/reset
//! threshold move the state; sub-threshold pulses (reads) never do.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cell technology. Shapes parameter defaults; the state machine is shared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technology {
    Pcm,
    RramCb,
    Ftj,
}

/// Stimulus domain of a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseDomain {
    /// Amplitude in volts.
    Electrical,
    /// Amplitude in watts.
    Optical,
}

/// Direction of a programming pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Crystallizing write, drives the cell towards the low-resistance state.
    Set,
    /// Amorphizing erase, returns the cell to the high-resistance state.
    Reset,
}

/// One programming or read stimulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub domain: PulseDomain,
    pub polarity: Polarity,
    /// Volts for electrical pulses, watts for optical pulses.
    pub amplitude: f64,
    pub duration_s: f64,
}

impl Pulse {
    pub fn new(
        domain: PulseDomain,
        polarity: Polarity,
        amplitude: f64,
        duration_s: f64,
    ) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::Domain(format!(
                "pulse amplitude must be >= 0, got {amplitude}"
            )));
        }
        if !(duration_s > 0.0) || !duration_s.is_finite() {
            return Err(Error::Domain(format!(
                "pulse duration must be > 0, got {duration_s}"
            )));
        }
        Ok(Pulse {
            domain,
            polarity,
            amplitude,
            duration_s,
        })
    }

    pub fn set_electrical(amplitude_v: f64, duration_s: f64) -> Result<Self> {
        Pulse::new(PulseDomain::Electrical, Polarity::Set, amplitude_v, duration_s)
    }

    pub fn reset_electrical(amplitude_v: f64, duration_s: f64) -> Result<Self> {
        Pulse::new(
            PulseDomain::Electrical,
            Polarity::Reset,
            amplitude_v,
            duration_s,
        )
    }
}

/// Device parameters shared by all cells of an array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Set threshold amplitude (volts electrical / watts optical).
    pub v_set: f64,
    /// Reset threshold amplitude.
    pub v_reset: f64,
    /// Characteristic full-crystallization duration (s).
    pub tau_set_s: f64,
    /// Fully amorphous conductance endpoint (S).
    pub g_a: f64,
    /// Fully crystalline conductance endpoint (S).
    pub g_c: f64,
    /// Multilevel set increments when true; abrupt set to s = 1 when false.
    pub analog: bool,
    /// State-changing cycles before the cell sticks.
    #[serde(default = "default_endurance")]
    pub n_endurance: u64,
    /// Conductance drift exponent, 0 disables drift.
    #[serde(default)]
    pub drift_nu: f64,
    /// Resistance class boundary: HRS for s <= this.
    #[serde(default = "default_s_hrs_max")]
    pub s_hrs_max: f64,
    /// Resistance class boundary: LRS for s >= this.
    #[serde(default = "default_s_lrs_min")]
    pub s_lrs_min: f64,
}

fn default_endurance() -> u64 {
    1_000_000_000_000_000
}

fn default_s_hrs_max() -> f64 {
    0.05
}

fn default_s_lrs_min() -> f64 {
    0.95
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g_a > 0.0) || !(self.g_c > self.g_a) {
            return Err(Error::Invariant(format!(
                "device requires g_c > g_a > 0 (got g_a = {} S, g_c = {} S)",
                self.g_a, self.g_c
            )));
        }
        if !(self.tau_set_s > 0.0) {
            return Err(Error::Invariant(format!(
                "tau_set_s must be > 0, got {}",
                self.tau_set_s
            )));
        }
        if !(self.v_set >= 0.0) || !(self.v_reset >= 0.0) {
            return Err(Error::Invariant(
                "set/reset thresholds must be >= 0".into(),
            ));
        }
        if !(self.drift_nu >= 0.0) {
            return Err(Error::Invariant(format!(
                "drift_nu must be >= 0, got {}",
                self.drift_nu
            )));
        }
        if !(self.s_hrs_max >= 0.0 && self.s_lrs_min <= 1.0 && self.s_hrs_max < self.s_lrs_min) {
            return Err(Error::Invariant(
                "resistance class thresholds must satisfy 0 <= s_hrs_max < s_lrs_min <= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Nonvolatile state of one junction device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellState {
    pub technology: Technology,
    /// Crystalline / filament / polarization fraction in [0, 1].
    pub s: f64,
    /// Completed state-changing transitions.
    pub cycle_count: u64,
    /// True once the endurance limit is reached; the state then freezes.
    pub stuck: bool,
}

impl CellState {
    /// A pristine cell: fully amorphous, zero cycles.
    pub fn fresh(technology: Technology) -> Self {
        CellState {
            technology,
            s: 0.0,
            cycle_count: 0,
            stuck: false,
        }
    }
}

/// Coarse resistance classification of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ResistanceClass {
    Hrs,
    Lrs,
    Intermediate,
}

impl std::fmt::Display for ResistanceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResistanceClass::Hrs => write!(f, "HRS"),
            ResistanceClass::Lrs => write!(f, "LRS"),
            ResistanceClass::Intermediate => write!(f, "INTERMEDIATE"),
        }
    }
}

/// Evolve a cell under one pulse. Pure: old state in, new state out.
///
/// Above-threshold set pulses accrete `duration / tau_set` of state (analog
/// devices) or jump straight to `s = 1` (abrupt devices). Above-threshold
/// reset pulses always return to `s = 0`. Sub-threshold pulses and stuck
/// cells leave the state untouched; the cycle counter advances only when the
/// state actually changed.
pub fn apply_pulse(state: CellState, pulse: &Pulse, params: &DeviceParams) -> CellState {
    if state.stuck {
        return state;
    }
    let new_s = match pulse.polarity {
        Polarity::Set if pulse.amplitude >= params.v_set => {
            if params.analog {
                (state.s + pulse.duration_s / params.tau_set_s).min(1.0)
            } else {
                1.0
            }
        }
        Polarity::Reset if pulse.amplitude >= params.v_reset => 0.0,
        _ => state.s,
    };
    if new_s == state.s {
        return state;
    }
    let cycle_count = state.cycle_count + 1;
    CellState {
        technology: state.technology,
        s: new_s,
        cycle_count,
        stuck: cycle_count >= params.n_endurance,
    }
}

/// Electrical conductance of a cell, log-mixed between the endpoints.
///
/// `ln G = (1 - s) ln g_a + s ln g_c`; the endpoints are returned exactly at
/// `s = 0` and `s = 1`. Use [`conductance_with_drift`] when drift matters.
pub fn conductance(state: &CellState, params: &DeviceParams) -> f64 {
    if state.s == 0.0 {
        params.g_a
    } else if state.s == 1.0 {
        params.g_c
    } else {
        ((1.0 - state.s) * params.g_a.ln() + state.s * params.g_c.ln()).exp()
    }
}

/// Conductance including the power-law drift factor `(t / 1 s)^(-nu (1 - s))`.
///
/// Drift applies only to partially or fully amorphous cells (`s < 1`) and only
/// when `drift_nu > 0`. `t_since_reset_s` must be positive when drift is on.
pub fn conductance_with_drift(
    state: &CellState,
    params: &DeviceParams,
    t_since_reset_s: f64,
) -> Result<f64> {
    let base = conductance(state, params);
    if params.drift_nu == 0.0 || state.s >= 1.0 {
        return Ok(base);
    }
    if !(t_since_reset_s > 0.0) {
        return Err(Error::Domain(format!(
            "drift-enabled conductance needs t > 0, got {t_since_reset_s}"
        )));
    }
    Ok(base * t_since_reset_s.powf(-params.drift_nu * (1.0 - state.s)))
}

/// Coarse HRS / LRS / intermediate classification from the state variable.
pub fn resistance_class(state: &CellState, params: &DeviceParams) -> ResistanceClass {
    if state.s <= params.s_hrs_max {
        ResistanceClass::Hrs
    } else if state.s >= params.s_lrs_min {
        ResistanceClass::Lrs
    } else {
        ResistanceClass::Intermediate
    }
}
