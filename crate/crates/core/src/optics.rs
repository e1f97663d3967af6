//! Phenomenological long-range plasmonic waveguide cell.
//!
//! The cell sits at a metal-stripe crossing. Its mode is balanced when the
//! effective index below the stripe equals the one above; switching material
//! embedded on one side (ridge or buffer) detunes that balance as it
//! crystallizes. Loss grows quadratically with the detuning, plus a direct
//! material-absorption term, so transmission peaks at the fully amorphous
//! state and the accumulated phase tracks the mode-index shift.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::MaterialRecord;

/// Which side of the metal stripe carries the switching material.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcmSide {
    Ridge,
    Buffer,
}

impl PcmSide {
    /// Sign of the index imbalance this side produces as material crystallizes.
    fn sign(self) -> f64 {
        match self {
            PcmSide::Ridge => 1.0,
            PcmSide::Buffer => -1.0,
        }
    }
}

/// Geometry and calibration constants of one waveguide cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideCellGeometry {
    /// Cell interaction length (m).
    pub length_m: f64,
    /// Operating wavelength (nm).
    pub wavelength_nm: f64,
    /// Confinement factor of the mode field in the switching-material region.
    pub gamma: f64,
    /// Volume fraction of switching material within its side.
    pub fill: f64,
    pub pcm_side: PcmSide,
    /// Residual loss at balance (1/m).
    pub alpha_min_per_m: f64,
    /// Imbalance loss curvature (1/m per RIU^2).
    pub c2_per_m_riu2: f64,
    /// Balanced mode effective index.
    pub n_mode0: f64,
}

impl WaveguideCellGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_m > 0.0) {
            return Err(Error::Invariant(format!(
                "cell length must be > 0 m, got {}",
                self.length_m
            )));
        }
        if !(self.wavelength_nm > 0.0) {
            return Err(Error::Invariant(format!(
                "wavelength must be > 0 nm, got {}",
                self.wavelength_nm
            )));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::Invariant(format!(
                "confinement factor must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        if !(self.fill > 0.0 && self.fill <= 1.0) {
            return Err(Error::Invariant(format!(
                "fill fraction must lie in (0, 1], got {}",
                self.fill
            )));
        }
        if !(self.alpha_min_per_m >= 0.0) {
            return Err(Error::Invariant(format!(
                "alpha_min must be >= 0, got {}",
                self.alpha_min_per_m
            )));
        }
        if !(self.c2_per_m_riu2 >= 0.0) {
            return Err(Error::Invariant(format!(
                "c2 must be >= 0, got {}",
                self.c2_per_m_riu2
            )));
        }
        if !(self.n_mode0 > 0.0) {
            return Err(Error::Invariant(format!(
                "n_mode0 must be > 0, got {}",
                self.n_mode0
            )));
        }
        Ok(())
    }
}

/// Optical readout quantities of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellOptics {
    /// Power transmission factor in (0, 1].
    pub transmission: f64,
    /// Accumulated phase modulo 2 pi (rad).
    pub phase_rad: f64,
}

/// Complex mixed index of the switching material at the cell's wavelength.
fn cell_mixed_index(
    geom: &WaveguideCellGeometry,
    mat: &MaterialRecord,
    x: f64,
) -> Result<Complex64> {
    mat.mixed_index_at(x, geom.wavelength_nm)
}

/// Signed effective-index imbalance between the two sides of the stripe.
///
/// `dn = sign(side) * gamma * fill * [Re idx(x) - Re idx(0)]`; zero at `x = 0`
/// because the balanced design is anchored at the fully amorphous state.
pub fn imbalance(geom: &WaveguideCellGeometry, mat: &MaterialRecord, x: f64) -> Result<f64> {
    let mixed = cell_mixed_index(geom, mat, x)?;
    let baseline = cell_mixed_index(geom, mat, 0.0)?;
    Ok(geom.pcm_side.sign() * geom.gamma * geom.fill * (mixed.re - baseline.re))
}

/// Unsigned mode-index shift seen by the propagating phase.
pub fn mode_index_shift(
    geom: &WaveguideCellGeometry,
    mat: &MaterialRecord,
    x: f64,
) -> Result<f64> {
    let mixed = cell_mixed_index(geom, mat, x)?;
    let baseline = cell_mixed_index(geom, mat, 0.0)?;
    Ok(geom.gamma * geom.fill * (mixed.re - baseline.re))
}

/// Metal absorption alone as a function of the index imbalance (1/m).
///
/// Even and minimal at `dn = 0`: `alpha_min + c2 * dn^2`.
pub fn metal_loss(geom: &WaveguideCellGeometry, dn: f64) -> f64 {
    geom.alpha_min_per_m + geom.c2_per_m_riu2 * dn * dn
}

/// Total propagation loss coefficient (1/m) at crystalline fraction `x`.
///
/// Metal loss from the imbalance plus the switching material's own
/// absorption, `(4 pi / lambda) * gamma * fill * [Im idx(x) - Im idx(0)]`.
/// Clamped below at `alpha_min / 1000` so synthetic tables with decreasing
/// extinction cannot produce gain.
pub fn loss_coefficient(geom: &WaveguideCellGeometry, mat: &MaterialRecord, x: f64) -> Result<f64> {
    let mixed = cell_mixed_index(geom, mat, x)?;
    let baseline = cell_mixed_index(geom, mat, 0.0)?;
    let dn = geom.pcm_side.sign() * geom.gamma * geom.fill * (mixed.re - baseline.re);
    let wavelength_m = geom.wavelength_nm * 1e-9;
    let material = 4.0 * std::f64::consts::PI / wavelength_m
        * geom.gamma
        * geom.fill
        * (mixed.im - baseline.im);
    let alpha = metal_loss(geom, dn) + material;
    Ok(alpha.max(geom.alpha_min_per_m * 1e-3))
}

/// 1/e power decay length (m) for a loss coefficient.
pub fn propagation_length(alpha_per_m: f64) -> Result<f64> {
    if !(alpha_per_m > 0.0) {
        return Err(Error::Domain(format!(
            "propagation length needs a positive loss coefficient, got {alpha_per_m} 1/m"
        )));
    }
    Ok(1.0 / alpha_per_m)
}

/// Power transmission and accumulated phase of one cell at fraction `x`.
pub fn cell_transmission(
    geom: &WaveguideCellGeometry,
    mat: &MaterialRecord,
    x: f64,
) -> Result<CellOptics> {
    let alpha = loss_coefficient(geom, mat, x)?;
    let transmission = (-alpha * geom.length_m).exp();
    let dn_mode = mode_index_shift(geom, mat, x)?;
    let wavelength_m = geom.wavelength_nm * 1e-9;
    let phase =
        2.0 * std::f64::consts::PI / wavelength_m * (geom.n_mode0 + dn_mode) * geom.length_m;
    Ok(CellOptics {
        transmission,
        phase_rad: phase.rem_euclid(2.0 * std::f64::consts::PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{DispersionRow, MaterialRecord};
    use approx::assert_relative_eq;

    fn flat_material(n_a: f64, k_a: f64, n_c: f64, k_c: f64) -> MaterialRecord {
        let row = |wavelength_nm| DispersionRow {
            wavelength_nm,
            n_amorphous: n_a,
            k_amorphous: k_a,
            n_crystalline: n_c,
            k_crystalline: k_c,
        };
        MaterialRecord::from_rows("synthetic", vec![row(1000.0), row(2000.0)], 1e-6, 1e-4)
            .unwrap()
    }

    fn geometry(side: PcmSide) -> WaveguideCellGeometry {
        WaveguideCellGeometry {
            length_m: 10e-6,
            wavelength_nm: 1550.0,
            gamma: 0.1,
            fill: 0.5,
            pcm_side: side,
            alpha_min_per_m: 100.0,
            c2_per_m_riu2: 1e6,
            n_mode0: 1.8,
        }
    }

    #[test]
    fn amorphous_cell_is_balanced() {
        let mat = flat_material(2.0, 0.0, 2.4, 0.0);
        let geom = geometry(PcmSide::Ridge);
        assert_eq!(imbalance(&geom, &mat, 0.0).unwrap(), 0.0);
        assert_eq!(
            loss_coefficient(&geom, &mat, 0.0).unwrap(),
            geom.alpha_min_per_m
        );
    }

    #[test]
    fn degenerate_material_never_detunes() {
        let mat = flat_material(2.2, 0.01, 2.2, 0.01);
        let geom = geometry(PcmSide::Ridge);
        for x in [0.0, 0.25, 0.5, 1.0] {
            assert_eq!(imbalance(&geom, &mat, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn imbalance_sign_follows_the_material_side() {
        // Full crystallization: sqrt((4 + 5.76)/2) - 2 = 0.20880... RIU of raw
        // index change, scaled by gamma * fill = 0.05.
        let mat = flat_material(2.0, 0.0, 2.4, 0.0);
        let ridge = geometry(PcmSide::Ridge);
        let buffer = geometry(PcmSide::Buffer);
        let dn_ridge = imbalance(&ridge, &mat, 0.5).unwrap();
        let dn_buffer = imbalance(&buffer, &mat, 0.5).unwrap();
        assert!(dn_ridge > 0.0);
        assert_relative_eq!(dn_ridge, -dn_buffer, max_relative = 1e-15);
        let raw = ((0.5 * 4.0 + 0.5 * 5.76) as f64).sqrt() - 2.0;
        assert_relative_eq!(dn_ridge, 0.05 * raw, max_relative = 1e-12);
    }

    #[test]
    fn quadratic_loss_reference_point() {
        // Crystalline index chosen so the fully crystalline mixed-index step
        // is exactly 0.4 RIU: dn = 0.1 * 0.5 * 0.4 = 0.02, alpha = 100 +
        // 1e6 * 4e-4 = 500.
        let mat = flat_material(2.0, 0.0, 2.4, 0.0);
        let geom = geometry(PcmSide::Ridge);
        let dn = imbalance(&geom, &mat, 1.0).unwrap();
        assert_relative_eq!(dn, 0.02, max_relative = 1e-12);
        assert_relative_eq!(
            loss_coefficient(&geom, &mat, 1.0).unwrap(),
            500.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn metal_loss_is_even() {
        let geom = geometry(PcmSide::Ridge);
        for i in 0..=100 {
            let dn = -0.05 + 0.1 * i as f64 / 100.0;
            let lo = metal_loss(&geom, dn);
            let hi = metal_loss(&geom, -dn);
            assert!((lo - hi).abs() <= 1e-12 * lo.max(1.0));
        }
        // Swapping the material side leaves the loss untouched.
        let mat = flat_material(2.0, 0.0, 2.4, 0.0);
        let ridge = geometry(PcmSide::Ridge);
        let buffer = geometry(PcmSide::Buffer);
        for x in [0.1, 0.5, 0.9] {
            let a = loss_coefficient(&ridge, &mat, x).unwrap();
            let b = loss_coefficient(&buffer, &mat, x).unwrap();
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn propagation_length_is_reciprocal_loss() {
        assert_eq!(propagation_length(1.0).unwrap(), 1.0);
        assert_relative_eq!(propagation_length(500.0).unwrap(), 2e-3, max_relative = 1e-15);
        assert!(matches!(propagation_length(0.0), Err(Error::Domain(_))));
        assert!(matches!(propagation_length(-5.0), Err(Error::Domain(_))));
    }

    #[test]
    fn balanced_transmission_and_phase() {
        let mat = flat_material(2.0, 0.0, 2.4, 0.0);
        let geom = geometry(PcmSide::Ridge);
        let optics = cell_transmission(&geom, &mat, 0.0).unwrap();
        assert_relative_eq!(optics.transmission, (-1e-3f64).exp(), max_relative = 1e-15);
        let expected_phase = (2.0 * std::f64::consts::PI / 1550e-9 * 1.8 * 10e-6)
            .rem_euclid(2.0 * std::f64::consts::PI);
        assert_relative_eq!(optics.phase_rad, expected_phase, max_relative = 1e-12);
    }

    #[test]
    fn zero_length_limit() {
        let mat = flat_material(2.0, 0.0, 2.4, 0.0);
        let mut geom = geometry(PcmSide::Ridge);
        geom.length_m = 1e-15;
        let optics = cell_transmission(&geom, &mat, 1.0).unwrap();
        assert!(optics.transmission > 1.0 - 1e-9);
        assert!(optics.phase_rad < 1e-6);
    }

    #[test]
    fn transmission_peaks_at_amorphous_and_decreases() {
        // Absorbing crystalline phase: the physical ordering n_c >= n_a,
        // k_c >= k_a makes x = 0 the transmission maximum.
        let mat = flat_material(3.9, 0.05, 6.1, 0.8);
        let geom = geometry(PcmSide::Ridge);
        let baseline = cell_transmission(&geom, &mat, 0.0).unwrap().transmission;
        let mut previous = baseline;
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            let t = cell_transmission(&geom, &mat, x).unwrap().transmission;
            assert!(t > 0.0 && t <= 1.0);
            assert!(t <= baseline + 1e-15);
            assert!(t <= previous + 1e-15, "not monotone at x = {x}");
            previous = t;
        }
    }

    #[test]
    fn phase_is_continuous_up_to_wrap() {
        let mat = flat_material(3.9, 0.05, 6.1, 0.8);
        let mut geom = geometry(PcmSide::Ridge);
        geom.length_m = 50e-6;
        let tau = 2.0 * std::f64::consts::PI;
        let mut previous = cell_transmission(&geom, &mat, 0.0).unwrap().phase_rad;
        for i in 1..=2000 {
            let x = i as f64 / 2000.0;
            let phase = cell_transmission(&geom, &mat, x).unwrap().phase_rad;
            let step = (phase - previous).abs();
            assert!(
                step < 0.05 || (step - tau).abs() < 0.05,
                "phase jump {step} at x = {x}"
            );
            previous = phase;
        }
    }

    #[test]
    fn gain_is_clamped_away() {
        // Extinction decreasing with crystallization would turn the material
        // term negative; the clamp keeps the loss positive.
        let mat = flat_material(2.0, 0.5, 2.0, 0.0);
        let geom = geometry(PcmSide::Ridge);
        let alpha = loss_coefficient(&geom, &mat, 1.0).unwrap();
        assert_eq!(alpha, geom.alpha_min_per_m * 1e-3);
        let t = cell_transmission(&geom, &mat, 1.0).unwrap().transmission;
        assert!(t <= 1.0);
    }

    #[test]
    fn geometry_validation_rejects_bad_fields() {
        let good = geometry(PcmSide::Ridge);
        good.validate().unwrap();
        for mutate in [
            (|g: &mut WaveguideCellGeometry| g.length_m = 0.0) as fn(&mut WaveguideCellGeometry),
            |g| g.wavelength_nm = -1.0,
            |g| g.gamma = 0.0,
            |g| g.gamma = 1.5,
            |g| g.fill = 0.0,
            |g| g.alpha_min_per_m = -1.0,
            |g| g.c2_per_m_riu2 = -1.0,
            |g| g.n_mode0 = 0.0,
        ] {
            let mut geom = good;
            mutate(&mut geom);
            assert!(geom.validate().is_err());
        }
    }
}
