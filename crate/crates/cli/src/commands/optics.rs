//! `optics-sweep`: evaluate the waveguide cell over a grid and emit one CSV
//! row per point: imbalance, loss, propagation length, mode index,
//! transmission, and phase.
//!
//! Two grids are supported. `x` sweeps the crystalline fraction through the
//! full device model. `dn` sweeps the index imbalance directly and isolates
//! the metal-loss parabola, the plot that locates the balanced design at
//! `dn = 0`.

use crate::config::Experiment;
use crate::error::{CliError, Result};
use crate::table::{sig12, OutFile};

use pxbar_core::optics::{
    cell_transmission, imbalance, loss_coefficient, metal_loss, mode_index_shift,
    propagation_length,
};

pub const SWEEP_HEADER: &str = "dn,alpha_prop_per_m,l_prop_m,n_mode,transmission,phase_rad";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Index imbalance, symmetric around zero.
    Dn,
    /// Crystalline fraction in [0, 1].
    X,
}

impl std::str::FromStr for GridKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dn" => Ok(GridKind::Dn),
            "x" => Ok(GridKind::X),
            other => Err(format!("unknown grid '{other}' (expected dn or x)")),
        }
    }
}

pub struct SweepArgs {
    pub grid: GridKind,
    pub points: usize,
    pub span: f64,
    /// Explicit grid values; overrides the uniform grid when present.
    pub list: Option<String>,
}

fn parse_list(list: &str) -> Result<Vec<f64>> {
    let values: std::result::Result<Vec<f64>, _> =
        list.split(',').map(|v| v.trim().parse::<f64>()).collect();
    let values =
        values.map_err(|e| CliError::config(format!("bad --list value: {e}")))?;
    if values.is_empty() {
        return Err(CliError::config("--list needs at least one value"));
    }
    Ok(values)
}

fn grid_values(args: &SweepArgs) -> Result<Vec<f64>> {
    if let Some(list) = &args.list {
        return parse_list(list);
    }
    if args.points < 3 {
        return Err(CliError::config(format!(
            "a uniform sweep needs at least 3 points, got {} (use --list for single points)",
            args.points
        )));
    }
    let n = args.points;
    Ok(match args.grid {
        GridKind::Dn => {
            if !(args.span > 0.0) {
                return Err(CliError::config(format!(
                    "--span must be > 0, got {}",
                    args.span
                )));
            }
            (0..n)
                .map(|i| args.span * (2.0 * i as f64 / (n - 1) as f64 - 1.0))
                .collect()
        }
        GridKind::X => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    })
}

pub fn run(exp: &Experiment, args: &SweepArgs) -> Result<()> {
    let values = grid_values(args)?;
    let geom = &exp.spec.geom;
    let material = exp.spec.material.as_ref();
    let mut out = OutFile::new(&exp.config_sha256, exp.seed, SWEEP_HEADER);

    for &value in &values {
        let (dn, alpha, n_mode, transmission, phase) = match args.grid {
            GridKind::X => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(CliError::config(format!(
                        "crystalline fraction must lie in [0, 1], got {value}"
                    )));
                }
                let dn = imbalance(geom, material, value)?;
                let alpha = loss_coefficient(geom, material, value)?;
                let optics = cell_transmission(geom, material, value)?;
                let n_mode = geom.n_mode0 + mode_index_shift(geom, material, value)?;
                (dn, alpha, n_mode, optics.transmission, optics.phase_rad)
            }
            GridKind::Dn => {
                let alpha = metal_loss(geom, value);
                let transmission = (-alpha * geom.length_m).exp();
                let wavelength_m = geom.wavelength_nm * 1e-9;
                let phase = (2.0 * std::f64::consts::PI / wavelength_m
                    * (geom.n_mode0 + value)
                    * geom.length_m)
                    .rem_euclid(2.0 * std::f64::consts::PI);
                (value, alpha, geom.n_mode0 + value, transmission, phase)
            }
        };
        let l_prop = propagation_length(alpha)?;
        out.row(&[
            sig12(dn),
            sig12(alpha),
            sig12(l_prop),
            sig12(n_mode),
            sig12(transmission),
            sig12(phase),
        ]);
    }

    let path = exp.out_dir.join("optics_sweep.csv");
    out.write(&path)?;
    println!("swept {} points, wrote {}", values.len(), path.display());
    Ok(())
}
