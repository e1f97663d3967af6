//! Experiment configuration: a TOML file resolved into ready-to-run model
//! objects plus the reproducibility envelope (seed, output directory, and the
//! config digest echoed into every CSV).

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use pxbar_core::ann::ReadSettings;
use pxbar_core::crossbar::ArraySpec;
use pxbar_core::device::{DeviceParams, Technology};
use pxbar_core::materials::load_material;
use pxbar_core::optics::{PcmSide, WaveguideCellGeometry};

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: u64,
    out_dir: Option<PathBuf>,
    material: MaterialBlock,
    device: DeviceBlock,
    geometry: GeometryBlock,
    array: ArrayBlock,
    read: ReadBlock,
    #[serde(default)]
    program: ProgramBlock,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialBlock {
    /// Dispersion table CSV, relative paths resolved against the config file.
    path: PathBuf,
    #[serde(rename = "g_amorphous_S")]
    g_amorphous_s: f64,
    #[serde(rename = "g_crystalline_S")]
    g_crystalline_s: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceBlock {
    technology: Technology,
    v_set: f64,
    v_reset: f64,
    tau_set_s: f64,
    analog: bool,
    n_endurance: Option<u64>,
    drift_nu: Option<f64>,
    s_hrs_max: Option<f64>,
    s_lrs_min: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryBlock {
    length_um: f64,
    wavelength_nm: f64,
    gamma: f64,
    fill: f64,
    pcm_side: PcmSide,
    alpha_min_per_m: f64,
    c2_per_m_riu2: f64,
    n_mode0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrayBlock {
    rows: usize,
    cols: usize,
    r_row_ohm: f64,
    r_col_ohm: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReadBlock {
    v_read: f64,
    t_read_s: f64,
    v_scale: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramBlock {
    tol: Option<f64>,
    max_pulses: Option<u32>,
}

/// A fully resolved experiment: validated model objects plus run envelope.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub spec: ArraySpec,
    pub rows: usize,
    pub cols: usize,
    pub read: ReadSettings,
    pub tol: f64,
    pub max_pulses: u32,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub config_sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Load, hash, and validate the experiment file; flags win over file values.
pub fn load_experiment(
    path: &Path,
    seed_override: Option<u64>,
    out_override: Option<&Path>,
) -> Result<Experiment> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let config_sha256 = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::config(format!("{} is not UTF-8", path.display())))?;
    let file: FileConfig = toml::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;

    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    let material_path = if file.material.path.is_absolute() {
        file.material.path.clone()
    } else {
        base_dir.join(&file.material.path)
    };
    let material = load_material(
        &material_path,
        file.material.g_amorphous_s,
        file.material.g_crystalline_s,
    )
    .map_err(|e| CliError::config(format!("material table: {e}")))?;

    let device = DeviceParams {
        v_set: file.device.v_set,
        v_reset: file.device.v_reset,
        tau_set_s: file.device.tau_set_s,
        g_a: file.material.g_amorphous_s,
        g_c: file.material.g_crystalline_s,
        analog: file.device.analog,
        n_endurance: file.device.n_endurance.unwrap_or(1_000_000_000_000_000),
        drift_nu: file.device.drift_nu.unwrap_or(0.0),
        s_hrs_max: file.device.s_hrs_max.unwrap_or(0.05),
        s_lrs_min: file.device.s_lrs_min.unwrap_or(0.95),
    };

    let geom = WaveguideCellGeometry {
        length_m: file.geometry.length_um * 1e-6,
        wavelength_nm: file.geometry.wavelength_nm,
        gamma: file.geometry.gamma,
        fill: file.geometry.fill,
        pcm_side: file.geometry.pcm_side,
        alpha_min_per_m: file.geometry.alpha_min_per_m,
        c2_per_m_riu2: file.geometry.c2_per_m_riu2,
        n_mode0: file.geometry.n_mode0,
    };

    let spec = ArraySpec {
        technology: file.device.technology,
        device,
        geom,
        material: Arc::new(material),
        r_row_ohm: file.array.r_row_ohm,
        r_col_ohm: file.array.r_col_ohm,
    };
    spec.validate()
        .map_err(|e| CliError::config(e.to_string()))?;
    if file.array.rows == 0 || file.array.cols == 0 {
        return Err(CliError::config(format!(
            "array must have at least one row and one column, got {}x{}",
            file.array.rows, file.array.cols
        )));
    }

    let read = ReadSettings {
        v_read: file.read.v_read,
        t_read_s: file.read.t_read_s,
        v_scale: file.read.v_scale.unwrap_or(file.read.v_read),
    };
    read.validate()
        .map_err(|e| CliError::config(e.to_string()))?;
    let disturb = spec.device.v_set.min(spec.device.v_reset);
    if read.v_read >= disturb {
        return Err(CliError::config(format!(
            "v_read {} V reaches the weaker switching threshold {} V; reads would disturb state",
            read.v_read, disturb
        )));
    }

    let tol = file.program.tol.unwrap_or(0.01);
    let max_pulses = file.program.max_pulses.unwrap_or(64);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::config(format!(
            "program tolerance must be > 0, got {tol}"
        )));
    }
    if max_pulses == 0 {
        return Err(CliError::config("program max_pulses must be >= 1"));
    }

    Ok(Experiment {
        spec,
        rows: file.array.rows,
        cols: file.array.cols,
        read,
        tol,
        max_pulses,
        seed: seed_override.unwrap_or(file.seed),
        out_dir: out_override
            .map(Path::to_path_buf)
            .or(file.out_dir)
            .unwrap_or_else(|| PathBuf::from("out")),
        config_sha256,
    })
}
