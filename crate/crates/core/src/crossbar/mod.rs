//! The R x C crossbar array.
//!
//! Cells sit at the crossings of row and column wires. Rows are driven with
//! read voltages, columns are sensed at virtual ground, and every cell doubles
//! as a waveguide crossing for the optical readout path. Electrical VMM comes
//! in an ideal flavor (pure Ohm/Kirchhoff) and a wire-resistance-aware one
//! backed by nodal analysis; programming is a closed read-back loop.

mod nodal;
mod program;

pub use nodal::NodalSolver;
pub use program::{
    program_array, program_cell, CellProgramReport, ProgramReport, PulseLog, PulseRecord,
};

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::device::{
    apply_pulse, conductance, resistance_class, CellState, DeviceParams, Pulse, ResistanceClass,
    Technology,
};
use crate::error::{Error, Result};
use crate::materials::MaterialRecord;
use crate::optics::{cell_transmission, WaveguideCellGeometry};
use crate::par;

/// Everything needed to instantiate arrays of a given flavor.
#[derive(Debug, Clone)]
pub struct ArraySpec {
    pub technology: Technology,
    pub device: DeviceParams,
    pub geom: WaveguideCellGeometry,
    pub material: Arc<MaterialRecord>,
    /// Row wire resistance per segment (ohm).
    pub r_row_ohm: f64,
    /// Column wire resistance per segment (ohm).
    pub r_col_ohm: f64,
}

impl ArraySpec {
    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        self.geom.validate()?;
        if !(self.r_row_ohm >= 0.0 && self.r_row_ohm.is_finite()) {
            return Err(Error::Invariant(format!(
                "r_row must be finite and >= 0, got {}",
                self.r_row_ohm
            )));
        }
        if !(self.r_col_ohm >= 0.0 && self.r_col_ohm.is_finite()) {
            return Err(Error::Invariant(format!(
                "r_col must be finite and >= 0, got {}",
                self.r_col_ohm
            )));
        }
        // The operating wavelength must be covered by the dispersion table.
        self.material
            .mixed_index_at(0.0, self.geom.wavelength_nm)?;
        Ok(())
    }

    /// Build a fresh (fully amorphous) array of the given dimensions.
    pub fn build(&self, rows: usize, cols: usize) -> Result<CrossbarArray> {
        self.validate()?;
        if rows == 0 || cols == 0 {
            return Err(Error::Invariant(format!(
                "array dimensions must be positive, got {rows} x {cols}"
            )));
        }
        Ok(CrossbarArray {
            rows,
            cols,
            cells: vec![CellState::fresh(self.technology); rows * cols],
            technology: self.technology,
            device: self.device.clone(),
            geom: self.geom,
            material: Arc::clone(&self.material),
            r_row_ohm: self.r_row_ohm,
            r_col_ohm: self.r_col_ohm,
        })
    }
}

/// One crossbar array with shared device, geometry, and wiring parameters.
#[derive(Debug, Clone)]
pub struct CrossbarArray {
    rows: usize,
    cols: usize,
    /// Row-major cell states.
    cells: Vec<CellState>,
    pub technology: Technology,
    pub device: DeviceParams,
    pub geom: WaveguideCellGeometry,
    pub material: Arc<MaterialRecord>,
    pub r_row_ohm: f64,
    pub r_col_ohm: f64,
}

/// Simultaneous electrical and optical view of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub row: usize,
    pub col: usize,
    pub s: f64,
    pub conductance_s: f64,
    pub class: ResistanceClass,
    pub transmission: f64,
    pub phase_rad: f64,
}

impl CrossbarArray {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn check_cell(&self, row: usize, col: usize) -> Result<usize> {
        if row >= self.rows {
            return Err(Error::Index {
                index: row,
                len: self.rows,
            });
        }
        if col >= self.cols {
            return Err(Error::Index {
                index: col,
                len: self.cols,
            });
        }
        Ok(row * self.cols + col)
    }

    pub fn cell(&self, row: usize, col: usize) -> Result<CellState> {
        Ok(self.cells[self.check_cell(row, col)?])
    }

    /// Row-major view of all cell states.
    pub fn states(&self) -> &[CellState] {
        &self.cells
    }

    /// Overwrite one cell's state variable, keeping its cycle accounting.
    pub fn set_cell_state(&mut self, row: usize, col: usize, s: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("cell state must lie in [0, 1], got {s}")));
        }
        let idx = self.check_cell(row, col)?;
        self.cells[idx].s = s;
        Ok(())
    }

    /// Preload a cell to an exact conductance, bypassing the pulse interface.
    ///
    /// Inverts the log-mix law; the endpoints map to `s = 0` and `s = 1`
    /// exactly. This is a modeling shortcut for ideal-mapping studies, not a
    /// physical operation; use [`program_cell`] for closed-loop writes.
    pub fn set_cell_conductance(&mut self, row: usize, col: usize, g: f64) -> Result<()> {
        let (g_a, g_c) = (self.device.g_a, self.device.g_c);
        if !(g >= g_a && g <= g_c) {
            return Err(Error::TargetOutOfRange {
                target_s: g,
                g_min_s: g_a,
                g_max_s: g_c,
                msg: "conductance preload".into(),
            });
        }
        let s = if g == g_a {
            0.0
        } else if g == g_c {
            1.0
        } else {
            (g / g_a).ln() / (g_c / g_a).ln()
        };
        self.set_cell_state(row, col, s.clamp(0.0, 1.0))
    }

    /// Apply one pulse to one cell through the device state machine.
    pub fn apply_pulse_at(&mut self, row: usize, col: usize, pulse: &Pulse) -> Result<()> {
        let idx = self.check_cell(row, col)?;
        self.cells[idx] = apply_pulse(self.cells[idx], pulse, &self.device);
        Ok(())
    }

    pub fn conductance_at(&self, row: usize, col: usize) -> Result<f64> {
        let idx = self.check_cell(row, col)?;
        Ok(conductance(&self.cells[idx], &self.device))
    }

    /// Full conductance matrix, entry (n, m) for cell (row n, column m).
    pub fn conductance_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |n, m| {
            conductance(&self.cells[n * self.cols + m], &self.device)
        })
    }

    /// Ideal VMM: `I_m = sum_n G_nm * V_n`, no wire effects.
    ///
    /// Accumulation runs in ascending row order per column; the nonideal path
    /// reduces to the same arithmetic at zero wire resistance.
    pub fn vmm_ideal(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.rows {
            return Err(Error::Dimension {
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut currents = DVector::zeros(self.cols);
        for m in 0..self.cols {
            let mut acc = 0.0;
            for n in 0..self.rows {
                acc += conductance(&self.cells[n * self.cols + m], &self.device) * v[n];
            }
            currents[m] = acc;
        }
        Ok(currents)
    }

    /// Wire-resistance-aware VMM via nodal analysis of the full network.
    ///
    /// For repeated reads against a frozen array build a [`NodalSolver`] once
    /// and reuse it; this convenience refactors the network on every call.
    pub fn vmm_nonideal(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        NodalSolver::new(self)?.solve(v)
    }

    /// Joule energy dissipated in the cells by one read phase of duration `t`.
    pub fn read_energy_j(&self, v: &DVector<f64>, t_read_s: f64) -> Result<f64> {
        if v.len() != self.rows {
            return Err(Error::Dimension {
                expected: self.rows,
                got: v.len(),
            });
        }
        if !(t_read_s >= 0.0) {
            return Err(Error::Domain(format!(
                "read duration must be >= 0, got {t_read_s}"
            )));
        }
        let mut energy = 0.0;
        for n in 0..self.rows {
            let v2 = v[n] * v[n];
            for m in 0..self.cols {
                energy += v2 * conductance(&self.cells[n * self.cols + m], &self.device) * t_read_s;
            }
        }
        Ok(energy)
    }

    /// Optical power arriving at the end of row `n`: the input attenuated by
    /// every cell crossing along the row waveguide.
    pub fn optical_read_row(&self, row: usize, p_in_w: f64) -> Result<f64> {
        if row >= self.rows {
            return Err(Error::Index {
                index: row,
                len: self.rows,
            });
        }
        if !(p_in_w >= 0.0) {
            return Err(Error::Domain(format!(
                "optical input power must be >= 0, got {p_in_w}"
            )));
        }
        let mut power = p_in_w;
        for m in 0..self.cols {
            let cell = &self.cells[row * self.cols + m];
            power *= cell_transmission(&self.geom, &self.material, cell.s)?.transmission;
        }
        Ok(power)
    }

    /// Consistent per-cell electrical and optical readout, row-major order.
    pub fn electro_optic_snapshot(&self) -> Result<Vec<SnapshotRecord>> {
        par::try_map_indexed(self.rows * self.cols, |idx| {
            let (row, col) = (idx / self.cols, idx % self.cols);
            let cell = &self.cells[idx];
            let optics = cell_transmission(&self.geom, &self.material, cell.s)?;
            Ok(SnapshotRecord {
                row,
                col,
                s: cell.s,
                conductance_s: conductance(cell, &self.device),
                class: resistance_class(cell, &self.device),
                transmission: optics.transmission,
                phase_rad: optics.phase_rad,
            })
        })
    }
}

/// A vertical stack of crossbar layers with crossing-angle metadata.
#[derive(Debug, Clone)]
pub struct LayerStack {
    layers: Vec<CrossbarArray>,
    angles_deg: Vec<f64>,
}

/// Assemble a stack; `angles_deg[i]` is the crossing angle between layer `i`
/// and layer `i + 1`, so it must hold exactly one entry less than `arrays`.
pub fn stack_layers(arrays: Vec<CrossbarArray>, angles_deg: Vec<f64>) -> Result<LayerStack> {
    if arrays.is_empty() {
        return Err(Error::Invariant("a layer stack needs at least one layer".into()));
    }
    if angles_deg.len() != arrays.len() - 1 {
        return Err(Error::Dimension {
            expected: arrays.len() - 1,
            got: angles_deg.len(),
        });
    }
    for &angle in &angles_deg {
        if !(angle > 0.0 && angle < 180.0) {
            return Err(Error::AngleOutOfRange { angle_deg: angle });
        }
    }
    Ok(LayerStack { layers: arrays, angles_deg })
}

impl LayerStack {
    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layers(&self) -> &[CrossbarArray] {
        &self.layers
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    /// Wire crossings between each adjacent layer pair.
    ///
    /// Layer `i` presents its column stripes to layer `i + 1`'s row stripes;
    /// the crossing density of two stripe grids scales with the sine of the
    /// angle between them, anchored at full overlap (R * C) for 90 degrees.
    pub fn junction_counts(&self) -> Vec<u64> {
        self.angles_deg
            .iter()
            .enumerate()
            .map(|(i, &angle)| {
                let upper = self.layers[i].cols() as f64;
                let lower = self.layers[i + 1].rows() as f64;
                (upper * lower * angle.to_radians().sin()).round() as u64
            })
            .collect()
    }
}
