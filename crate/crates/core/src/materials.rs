//! Optical dispersion tables for switching materials.
//!
//! A [`MaterialRecord`] holds the tabulated complex refractive index of a
//! material in its amorphous and crystalline phases, together with the
//! electrical conductance endpoints of a unit cell in each phase. Partially
//! switched material is described by linear volume-weighted mixing of the
//! complex permittivity between the two phase endpoints.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Phase of the switching material.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Amorphous,
    Crystalline,
}

/// One row of a dispersion table: refractive index of both phases at a wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRow {
    pub wavelength_nm: f64,
    pub n_amorphous: f64,
    pub k_amorphous: f64,
    pub n_crystalline: f64,
    pub k_crystalline: f64,
}

/// Dispersion table plus electrical endpoint conductances for one material.
#[derive(Debug, Clone)]
pub struct MaterialRecord {
    pub name: String,
    pub table: Vec<DispersionRow>,
    /// Conductance of a unit cell in the fully amorphous state (S).
    pub g_amorphous: f64,
    /// Conductance of a unit cell in the fully crystalline state (S).
    pub g_crystalline: f64,
}

/// Expected CSV header for material dispersion files.
pub const MATERIAL_CSV_HEADER: &str =
    "wavelength_nm,n_amorphous,k_amorphous,n_crystalline,k_crystalline";

impl MaterialRecord {
    /// Build a record from in-memory rows, checking all invariants.
    pub fn from_rows(
        name: impl Into<String>,
        table: Vec<DispersionRow>,
        g_amorphous: f64,
        g_crystalline: f64,
    ) -> Result<Self> {
        let record = MaterialRecord {
            name: name.into(),
            table,
            g_amorphous,
            g_crystalline,
        };
        record.validate()?;
        Ok(record)
    }

    fn validate(&self) -> Result<()> {
        if self.table.len() < 2 {
            return Err(Error::Invariant(format!(
                "material '{}' needs at least 2 table rows, got {}",
                self.name,
                self.table.len()
            )));
        }
        for pair in self.table.windows(2) {
            if !(pair[1].wavelength_nm > pair[0].wavelength_nm) {
                return Err(Error::Invariant(format!(
                    "material '{}' wavelengths must be strictly increasing ({} nm then {} nm)",
                    self.name, pair[0].wavelength_nm, pair[1].wavelength_nm
                )));
            }
        }
        for row in &self.table {
            if !(row.wavelength_nm > 0.0)
                || !(row.n_amorphous > 0.0)
                || !(row.n_crystalline > 0.0)
                || !(row.k_amorphous >= 0.0)
                || !(row.k_crystalline >= 0.0)
                || !row.n_amorphous.is_finite()
                || !row.n_crystalline.is_finite()
                || !row.k_amorphous.is_finite()
                || !row.k_crystalline.is_finite()
            {
                return Err(Error::Invariant(format!(
                    "material '{}' at {} nm: n must be > 0 and k >= 0",
                    self.name, row.wavelength_nm
                )));
            }
        }
        if !(self.g_amorphous > 0.0) || !(self.g_crystalline > self.g_amorphous) {
            return Err(Error::Invariant(format!(
                "material '{}' requires g_crystalline > g_amorphous > 0 (got {} S, {} S)",
                self.name, self.g_crystalline, self.g_amorphous
            )));
        }
        Ok(())
    }

    /// Wavelength span `(min_nm, max_nm)` covered by the table.
    pub fn span_nm(&self) -> (f64, f64) {
        (
            self.table.first().expect("validated table").wavelength_nm,
            self.table.last().expect("validated table").wavelength_nm,
        )
    }

    /// Complex refractive index `n + i k` of one phase at a wavelength.
    ///
    /// Linear interpolation of n and k independently between the bracketing
    /// table rows; exact at table nodes. Errors with [`Error::OutOfRange`]
    /// outside the table span.
    pub fn lookup_nk(&self, phase: Phase, wavelength_nm: f64) -> Result<Complex64> {
        let (min_nm, max_nm) = self.span_nm();
        if !(wavelength_nm >= min_nm && wavelength_nm <= max_nm) {
            return Err(Error::OutOfRange {
                wavelength_nm,
                min_nm,
                max_nm,
            });
        }
        let pick = |row: &DispersionRow| match phase {
            Phase::Amorphous => (row.n_amorphous, row.k_amorphous),
            Phase::Crystalline => (row.n_crystalline, row.k_crystalline),
        };
        // Exact value at a node; otherwise interpolate within the bracket.
        let idx = self
            .table
            .partition_point(|row| row.wavelength_nm < wavelength_nm);
        if idx < self.table.len() && self.table[idx].wavelength_nm == wavelength_nm {
            let (n, k) = pick(&self.table[idx]);
            return Ok(Complex64::new(n, k));
        }
        let lo = &self.table[idx - 1];
        let hi = &self.table[idx];
        let t = (wavelength_nm - lo.wavelength_nm) / (hi.wavelength_nm - lo.wavelength_nm);
        let (n0, k0) = pick(lo);
        let (n1, k1) = pick(hi);
        Ok(Complex64::new(n0 + t * (n1 - n0), k0 + t * (k1 - k0)))
    }

    /// Effective index of partially crystallized material at a wavelength.
    pub fn mixed_index_at(&self, x: f64, wavelength_nm: f64) -> Result<Complex64> {
        let idx_a = self.lookup_nk(Phase::Amorphous, wavelength_nm)?;
        let idx_c = self.lookup_nk(Phase::Crystalline, wavelength_nm)?;
        mixed_index(x, idx_a, idx_c)
    }
}

/// Linear volume-weighted complex permittivity of a two-phase mixture.
///
/// `x` is the crystalline fraction; the endpoints are the complex refractive
/// indices of the pure phases.
pub fn mixed_permittivity(x: f64, idx_a: Complex64, idx_c: Complex64) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "crystalline fraction {x} outside [0, 1]"
        )));
    }
    Ok((1.0 - x) * idx_a * idx_a + x * idx_c * idx_c)
}

/// Effective complex refractive index of a two-phase mixture.
///
/// Mixes permittivity linearly between the phase endpoints and returns the
/// principal square root (nonnegative real and imaginary parts for physical
/// endpoint indices). The endpoints are returned exactly at `x = 0` and `x = 1`.
pub fn mixed_index(x: f64, idx_a: Complex64, idx_c: Complex64) -> Result<Complex64> {
    if x == 0.0 {
        mixed_permittivity(x, idx_a, idx_c)?; // still reject x outside [0,1]
        return Ok(idx_a);
    }
    if x == 1.0 {
        return Ok(idx_c);
    }
    Ok(mixed_permittivity(x, idx_a, idx_c)?.sqrt())
}

/// Load a material dispersion CSV plus its electrical endpoint conductances.
///
/// The file must start with the header [`MATERIAL_CSV_HEADER`]; `#`-prefixed
/// lines and blank lines are ignored. The conductance endpoints come from the
/// experiment configuration, not the CSV.
pub fn load_material(path: &Path, g_amorphous: f64, g_crystalline: f64) -> Result<MaterialRecord> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "material".to_string());

    let mut rows = Vec::new();
    let mut header_seen = false;
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != MATERIAL_CSV_HEADER {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no + 1,
                    msg: format!("expected header '{MATERIAL_CSV_HEADER}', got '{line}'"),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: line_no + 1,
                msg: format!("expected 5 comma-separated fields, got {}", fields.len()),
            });
        }
        let mut values = [0.0f64; 5];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: line_no + 1,
                msg: format!("not a number: '{field}'"),
            })?;
        }
        rows.push(DispersionRow {
            wavelength_nm: values[0],
            n_amorphous: values[1],
            k_amorphous: values[2],
            n_crystalline: values[3],
            k_crystalline: values[4],
        });
    }
    if !header_seen {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: "empty file, expected CSV header".into(),
        });
    }
    MaterialRecord::from_rows(name, rows, g_amorphous, g_crystalline)
}
