//! Fixture file readers: value matrices, drive vectors, labels, layer
//! weights, and recorded operation traces. All failures here are schema
//! errors and carry the offending file and line.

use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use pxbar_core::ann::{Activation, LayerSpec};
use pxbar_core::energy::{Trace, TraceEvent};

use crate::error::{CliError, Result};

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::schema(format!("cannot read {}: {e}", path.display())))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim().to_string()))
        .filter(|(_, line)| !line.is_empty())
        .collect())
}

fn parse_fields(path: &Path, line_no: usize, line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|field| {
            f64::from_str(field.trim()).map_err(|_| {
                CliError::schema(format!(
                    "{} line {line_no}: not a number: {field:?}",
                    path.display()
                ))
            })
        })
        .collect()
}

/// Rectangular matrix of comma-separated values, one row per line. Lines
/// starting with `#` are ignored.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line_no, line) in read_lines(path)? {
        if line.starts_with('#') {
            continue;
        }
        let fields = parse_fields(path, line_no, &line)?;
        if let Some(first) = rows.first() {
            if fields.len() != first.len() {
                return Err(CliError::schema(format!(
                    "{} line {line_no}: expected {} columns, got {}",
                    path.display(),
                    first.len(),
                    fields.len()
                )));
            }
        }
        rows.push(fields);
    }
    if rows.is_empty() {
        return Err(CliError::schema(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

/// One vector per non-comment line; all lines must agree on length.
pub fn read_vectors(path: &Path) -> Result<Vec<DVector<f64>>> {
    let matrix = read_matrix(path)?;
    Ok((0..matrix.nrows())
        .map(|i| DVector::from_fn(matrix.ncols(), |j, _| matrix[(i, j)]))
        .collect())
}

/// One nonnegative integer class label per line.
pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let mut labels = Vec::new();
    for (line_no, line) in read_lines(path)? {
        if line.starts_with('#') {
            continue;
        }
        let label = usize::from_str(line.trim()).map_err(|_| {
            CliError::schema(format!(
                "{} line {line_no}: not a class label: {line:?}",
                path.display()
            ))
        })?;
        labels.push(label);
    }
    Ok(labels)
}

/// One network layer: a `# rows,cols,activation` header line followed by a
/// row-major weight matrix, entry (n, m) weighting input n into output m.
pub fn read_layer(path: &Path) -> Result<LayerSpec> {
    let lines = read_lines(path)?;
    let Some((header_no, header)) = lines.first() else {
        return Err(CliError::schema(format!("{}: empty file", path.display())));
    };
    let Some(spec) = header.strip_prefix('#') else {
        return Err(CliError::schema(format!(
            "{} line {header_no}: expected a '# rows,cols,activation' header",
            path.display()
        )));
    };
    let fields: Vec<&str> = spec.split(',').map(str::trim).collect();
    if fields.len() != 3 {
        return Err(CliError::schema(format!(
            "{} line {header_no}: header needs rows,cols,activation, got {header:?}",
            path.display()
        )));
    }
    let rows = usize::from_str(fields[0]).map_err(|_| {
        CliError::schema(format!(
            "{} line {header_no}: bad row count {:?}",
            path.display(),
            fields[0]
        ))
    })?;
    let cols = usize::from_str(fields[1]).map_err(|_| {
        CliError::schema(format!(
            "{} line {header_no}: bad column count {:?}",
            path.display(),
            fields[1]
        ))
    })?;
    let activation = Activation::from_str(fields[2]).map_err(|e| {
        CliError::schema(format!("{} line {header_no}: {e}", path.display()))
    })?;

    let mut data = Vec::with_capacity(rows);
    for (line_no, line) in &lines[1..] {
        if line.starts_with('#') {
            continue;
        }
        let fields = parse_fields(path, *line_no, line)?;
        if fields.len() != cols {
            return Err(CliError::schema(format!(
                "{} line {line_no}: expected {cols} weights, got {}",
                path.display(),
                fields.len()
            )));
        }
        data.push(fields);
    }
    if data.len() != rows {
        return Err(CliError::schema(format!(
            "{}: header declares {rows} rows, file has {}",
            path.display(),
            data.len()
        )));
    }
    Ok(LayerSpec {
        weights: DMatrix::from_fn(rows, cols, |i, j| data[i][j]),
        activation,
    })
}

pub const TRACE_HEADER: &str = "kind,rows,cols,energy_j,duration_s";

/// Operation trace as written by `ann-infer`: `kind,rows,cols,energy_j,
/// duration_s` with zero dims on non-VMM events.
pub fn read_trace(path: &Path) -> Result<Trace> {
    let mut trace = Trace::new();
    let mut saw_header = false;
    for (line_no, line) in read_lines(path)? {
        if line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != TRACE_HEADER {
                return Err(CliError::schema(format!(
                    "{} line {line_no}: expected header {TRACE_HEADER:?}",
                    path.display()
                )));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(CliError::schema(format!(
                "{} line {line_no}: expected 5 fields, got {}",
                path.display(),
                fields.len()
            )));
        }
        let dim = |field: &str| {
            usize::from_str(field).map_err(|_| {
                CliError::schema(format!(
                    "{} line {line_no}: bad dimension {field:?}",
                    path.display()
                ))
            })
        };
        let num = |field: &str| {
            f64::from_str(field).map_err(|_| {
                CliError::schema(format!(
                    "{} line {line_no}: not a number: {field:?}",
                    path.display()
                ))
            })
        };
        let event = match fields[0] {
            "vmm_read" => TraceEvent::VmmRead {
                rows: dim(fields[1])?,
                cols: dim(fields[2])?,
                energy_j: num(fields[3])?,
                duration_s: num(fields[4])?,
            },
            "optical_read" => TraceEvent::OpticalRead {
                energy_j: num(fields[3])?,
                duration_s: num(fields[4])?,
            },
            "program_pulse" => TraceEvent::ProgramPulse {
                energy_j: num(fields[3])?,
                duration_s: num(fields[4])?,
            },
            other => {
                return Err(CliError::schema(format!(
                    "{} line {line_no}: unknown event kind {other:?}",
                    path.display()
                )))
            }
        };
        trace.push(event);
    }
    if !saw_header {
        return Err(CliError::schema(format!(
            "{}: missing trace header",
            path.display()
        )));
    }
    Ok(trace)
}
