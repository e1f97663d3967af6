//! Nodal analysis of the crossbar wire network.
//!
//! Rows are voltage-driven through their wire segments, columns drain into
//! sense amplifiers held at virtual ground. Every cell is a conductance
//! between its row node and its column node; wire segments contribute
//! `1/r_row` and `1/r_col` conductances along each wire. Nodes on wires with
//! zero resistance collapse onto the driver (rows) or ground (columns), so
//! the unknown set shrinks accordingly and the zero-wire case degenerates to
//! the ideal VMM arithmetic, summation order included.
//!
//! The system matrix depends only on conductances and wiring, never on the
//! drive vector, so it is assembled and factored once per solver and reused
//! across right-hand sides.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::crossbar::CrossbarArray;
use crate::error::{Error, Result};
use crate::par;

/// Factored resistive network of one frozen crossbar.
pub struct NodalSolver {
    rows: usize,
    cols: usize,
    r_row: f64,
    r_col: f64,
    /// Cell conductances captured at construction.
    g: DMatrix<f64>,
    n_unknowns: usize,
    /// `None` when both wire resistances are zero (no unknowns).
    factor: Option<Cholesky<f64, Dyn>>,
}

/// Stamp a conductance between two unknown nodes.
fn stamp(a: &mut DMatrix<f64>, i: usize, j: usize, g: f64) {
    a[(i, i)] += g;
    a[(j, j)] += g;
    a[(i, j)] -= g;
    a[(j, i)] -= g;
}

impl NodalSolver {
    pub fn new(array: &CrossbarArray) -> Result<Self> {
        Self::from_parts(array.conductance_matrix(), array.r_row_ohm, array.r_col_ohm)
    }

    /// Build a solver from a raw conductance matrix and per-segment wire
    /// resistances.
    pub fn from_parts(g: DMatrix<f64>, r_row_ohm: f64, r_col_ohm: f64) -> Result<Self> {
        let (rows, cols) = (g.nrows(), g.ncols());
        if rows == 0 || cols == 0 {
            return Err(Error::Invariant(format!(
                "network needs positive dimensions, got {rows} x {cols}"
            )));
        }
        for &entry in g.iter() {
            if !(entry >= 0.0) || !entry.is_finite() {
                return Err(Error::Invariant(format!(
                    "cell conductances must be finite and >= 0, got {entry}"
                )));
            }
        }
        for (r, name) in [(r_row_ohm, "r_row"), (r_col_ohm, "r_col")] {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(Error::Invariant(format!(
                    "{name} must be finite and >= 0, got {r}"
                )));
            }
        }

        let row_nodes = r_row_ohm > 0.0;
        let col_nodes = r_col_ohm > 0.0;
        let n_unknowns =
            usize::from(row_nodes) * rows * cols + usize::from(col_nodes) * rows * cols;
        if n_unknowns == 0 {
            return Ok(NodalSolver {
                rows,
                cols,
                r_row: r_row_ohm,
                r_col: r_col_ohm,
                g,
                n_unknowns,
                factor: None,
            });
        }

        let idx_row = |n: usize, m: usize| n * cols + m;
        let col_offset = if row_nodes { rows * cols } else { 0 };
        let idx_col = |m: usize, n: usize| col_offset + m * rows + n;

        let mut a = DMatrix::zeros(n_unknowns, n_unknowns);
        if row_nodes {
            let g_row = 1.0 / r_row_ohm;
            for n in 0..rows {
                // Driver (fixed at V_n) into the first node of the row.
                a[(idx_row(n, 0), idx_row(n, 0))] += g_row;
                for m in 0..cols - 1 {
                    stamp(&mut a, idx_row(n, m), idx_row(n, m + 1), g_row);
                }
            }
        }
        if col_nodes {
            let g_col = 1.0 / r_col_ohm;
            for m in 0..cols {
                for n in 0..rows - 1 {
                    stamp(&mut a, idx_col(m, n), idx_col(m, n + 1), g_col);
                }
                // Final segment into the virtual-ground sense node.
                a[(idx_col(m, rows - 1), idx_col(m, rows - 1))] += g_col;
            }
        }
        for n in 0..rows {
            for m in 0..cols {
                let g_cell = g[(n, m)];
                match (row_nodes, col_nodes) {
                    (true, true) => stamp(&mut a, idx_row(n, m), idx_col(m, n), g_cell),
                    // Column node sits at 0 V: diagonal term only.
                    (true, false) => a[(idx_row(n, m), idx_row(n, m))] += g_cell,
                    // Row node sits at V_n: diagonal here, drive term in the RHS.
                    (false, true) => a[(idx_col(m, n), idx_col(m, n))] += g_cell,
                    (false, false) => unreachable!("handled by the zero-unknown case"),
                }
            }
        }

        let factor = Cholesky::new(a).ok_or_else(|| {
            Error::SingularNetwork(format!(
                "{rows} x {cols} network with r_row = {r_row_ohm}, r_col = {r_col_ohm} is not solvable"
            ))
        })?;
        Ok(NodalSolver {
            rows,
            cols,
            r_row: r_row_ohm,
            r_col: r_col_ohm,
            g,
            n_unknowns,
            factor: Some(factor),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Sensed column currents for one drive vector.
    pub fn solve(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.rows {
            return Err(Error::Dimension {
                expected: self.rows,
                got: v.len(),
            });
        }
        let factor = match &self.factor {
            None => {
                let mut currents = DVector::zeros(self.cols);
                for m in 0..self.cols {
                    let mut acc = 0.0;
                    for n in 0..self.rows {
                        acc += self.g[(n, m)] * v[n];
                    }
                    currents[m] = acc;
                }
                return Ok(currents);
            }
            Some(factor) => factor,
        };

        let row_nodes = self.r_row > 0.0;
        let col_nodes = self.r_col > 0.0;
        let idx_row = |n: usize, m: usize| n * self.cols + m;
        let col_offset = if row_nodes { self.rows * self.cols } else { 0 };
        let idx_col = |m: usize, n: usize| col_offset + m * self.rows + n;

        let mut b = DVector::zeros(self.n_unknowns);
        if row_nodes {
            let g_row = 1.0 / self.r_row;
            for n in 0..self.rows {
                b[idx_row(n, 0)] += g_row * v[n];
            }
        } else {
            for m in 0..self.cols {
                for n in 0..self.rows {
                    b[idx_col(m, n)] += self.g[(n, m)] * v[n];
                }
            }
        }

        let x = factor.solve(&b);
        let mut currents = DVector::zeros(self.cols);
        if col_nodes {
            let g_col = 1.0 / self.r_col;
            for m in 0..self.cols {
                currents[m] = x[idx_col(m, self.rows - 1)] * g_col;
            }
        } else {
            for m in 0..self.cols {
                let mut acc = 0.0;
                for n in 0..self.rows {
                    acc += self.g[(n, m)] * x[idx_row(n, m)];
                }
                currents[m] = acc;
            }
        }
        Ok(currents)
    }

    /// Solve many drive vectors against the same factored network.
    pub fn solve_batch(&self, inputs: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
        par::try_map_indexed(inputs.len(), |i| self.solve(&inputs[i]))
    }
}
