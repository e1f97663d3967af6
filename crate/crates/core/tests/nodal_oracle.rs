//! Cross-checks the production nodal solver against a brute-force reference.
//!
//! The reference in [`oracle`] was written against the circuit description
//! alone and shares no code with the library: it enumerates every node of the
//! network including drivers and ground, forms the full branch Laplacian,
//! eliminates known-voltage nodes generically, and solves with partial-pivot
//! Gaussian elimination.

use nalgebra::{DMatrix, DVector};
use pxbar_core::crossbar::NodalSolver;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod oracle {
    /// Sensed column currents of an R x C crossbar with per-segment wire
    /// resistances. Requires positive resistances; the zero-resistance case
    /// has its own closed-form checks elsewhere.
    pub fn column_currents(g: &[Vec<f64>], r_row: f64, r_col: f64, v: &[f64]) -> Vec<f64> {
        assert!(r_row > 0.0 && r_col > 0.0);
        let rows = g.len();
        let cols = g[0].len();
        assert_eq!(v.len(), rows);

        // Unified node list: ground, driver terminals, row nodes, column nodes.
        let ground = 0usize;
        let driver = |n: usize| 1 + n;
        let row_node = |n: usize, m: usize| 1 + rows + n * cols + m;
        let col_node = |m: usize, k: usize| 1 + rows + rows * cols + m * rows + k;
        let n_nodes = 1 + rows + 2 * rows * cols;

        let mut branches: Vec<(usize, usize, f64)> = Vec::new();
        for n in 0..rows {
            branches.push((driver(n), row_node(n, 0), 1.0 / r_row));
            for m in 0..cols - 1 {
                branches.push((row_node(n, m), row_node(n, m + 1), 1.0 / r_row));
            }
            for m in 0..cols {
                branches.push((row_node(n, m), col_node(m, n), g[n][m]));
            }
        }
        for m in 0..cols {
            for k in 0..rows - 1 {
                branches.push((col_node(m, k), col_node(m, k + 1), 1.0 / r_col));
            }
            branches.push((col_node(m, rows - 1), ground, 1.0 / r_col));
        }

        let mut laplacian = vec![vec![0.0f64; n_nodes]; n_nodes];
        for &(a, b, cond) in &branches {
            laplacian[a][a] += cond;
            laplacian[b][b] += cond;
            laplacian[a][b] -= cond;
            laplacian[b][a] -= cond;
        }

        let mut known = vec![None; n_nodes];
        known[ground] = Some(0.0);
        for n in 0..rows {
            known[driver(n)] = Some(v[n]);
        }
        let unknowns: Vec<usize> = (0..n_nodes).filter(|&i| known[i].is_none()).collect();
        let index_of: std::collections::HashMap<usize, usize> =
            unknowns.iter().enumerate().map(|(pos, &node)| (node, pos)).collect();

        let dim = unknowns.len();
        let mut a = vec![vec![0.0f64; dim]; dim];
        let mut b = vec![0.0f64; dim];
        for (pos, &node) in unknowns.iter().enumerate() {
            for other in 0..n_nodes {
                match known[other] {
                    None => a[pos][index_of[&other]] += laplacian[node][other],
                    Some(voltage) => b[pos] -= laplacian[node][other] * voltage,
                }
            }
        }

        let x = gaussian_solve(a, b);
        let mut node_voltage = vec![0.0f64; n_nodes];
        for i in 0..n_nodes {
            node_voltage[i] = match known[i] {
                Some(voltage) => voltage,
                None => x[index_of[&i]],
            };
        }
        (0..cols)
            .map(|m| (node_voltage[col_node(m, rows - 1)] - node_voltage[ground]) / r_col)
            .collect()
    }

    /// Dense Gaussian elimination with partial pivoting.
    fn gaussian_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            assert!(a[pivot][col].abs() > 0.0, "singular oracle system");
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in col + 1..n {
                let factor = a[row][col] / a[col][col];
                if factor == 0.0 {
                    continue;
                }
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
        let mut x = vec![0.0f64; n];
        for row in (0..n).rev() {
            let mut acc = b[row];
            for k in row + 1..n {
                acc -= a[row][k] * x[k];
            }
            x[row] = acc / a[row][row];
        }
        x
    }
}

fn solver_currents(g: &[Vec<f64>], r_row: f64, r_col: f64, v: &[f64]) -> Vec<f64> {
    let rows = g.len();
    let cols = g[0].len();
    let matrix = DMatrix::from_fn(rows, cols, |n, m| g[n][m]);
    let drive = DVector::from_column_slice(v);
    NodalSolver::from_parts(matrix, r_row, r_col)
        .unwrap()
        .solve(&drive)
        .unwrap()
        .iter()
        .cloned()
        .collect()
}

fn assert_close(actual: &[f64], expected: &[f64], tol: f64) {
    assert_eq!(actual.len(), expected.len());
    for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
        let scale = e.abs().max(1e-30);
        assert!(
            (a - e).abs() <= tol * scale,
            "column {i}: {a} vs {e} (relative {})",
            (a - e).abs() / scale
        );
    }
}

#[test]
fn oracle_reproduces_the_series_closed_form() {
    // Credibility check on the reference itself before it judges anything.
    let g = 3e-4;
    let (r_row, r_col) = (40.0, 70.0);
    let v = 0.25;
    let i = oracle::column_currents(&[vec![g]], r_row, r_col, &[v]);
    let expected = v * g / (1.0 + g * (r_row + r_col));
    assert_close(&i, &[expected], 1e-12);
}

#[test]
fn single_cell_closed_form() {
    let g = 1e-4;
    let (r_row, r_col) = (120.0, 80.0);
    let v = 0.3;
    let i = solver_currents(&[vec![g]], r_row, r_col, &[v]);
    let expected = v * g / (1.0 + g * (r_row + r_col));
    assert_close(&i, &[expected], 1e-12);
}

#[test]
fn two_by_two_with_wire_resistance() {
    let g = vec![vec![1e-3, 2e-3], vec![3e-3, 4e-3]];
    let v = [1.0, 2.0];
    let produced = solver_currents(&g, 10.0, 10.0, &v);
    let reference = oracle::column_currents(&g, 10.0, 10.0, &v);
    assert_close(&produced, &reference, 1e-9);
    // Wire drop must actually bite at these conductances.
    let ideal = [7e-3, 10e-3];
    assert!(produced[0] < ideal[0] && produced[1] < ideal[1]);
}

#[test]
fn random_grids_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for &(rows, cols) in &[(1usize, 4usize), (4, 1), (3, 3), (5, 2), (4, 6), (8, 8)] {
        for _ in 0..5 {
            let g: Vec<Vec<f64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.random_range(1e-6..1e-3)).collect())
                .collect();
            let v: Vec<f64> = (0..rows).map(|_| rng.random_range(0.0..0.2)).collect();
            let r_row = rng.random_range(0.1..50.0);
            let r_col = rng.random_range(0.1..50.0);
            let produced = solver_currents(&g, r_row, r_col, &v);
            let reference = oracle::column_currents(&g, r_row, r_col, &v);
            assert_close(&produced, &reference, 1e-9);
        }
    }
}

#[test]
fn extreme_wire_resistance_still_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    let g: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..4).map(|_| rng.random_range(1e-5..1e-3)).collect())
        .collect();
    let v: Vec<f64> = (0..4).map(|_| rng.random_range(0.05..0.2)).collect();
    for r in [1e-3, 1.0, 1e3, 1e5] {
        let produced = solver_currents(&g, r, r, &v);
        let reference = oracle::column_currents(&g, r, r, &v);
        assert_close(&produced, &reference, 1e-9);
    }
}
