//! Neural-network layers on crossbar hardware.
//!
//! Signed weights map onto differential conductance pairs (two arrays per
//! layer, one-sided encoding); signed inputs are driven as two read phases of
//! one polarity each. A layer with weight matrix `W` (entry `(n, m)` connects
//! input `n` to output `m`) therefore computes `y = act(W^T x)` out of four
//! VMM reads, and every read is accounted in the energy trace whether or not
//! its drive vector happens to be all zero.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::crossbar::{ArraySpec, CrossbarArray, NodalSolver, ProgramReport};
use crate::energy::{Trace, TraceEvent};
use crate::error::{Error, Result};
use crate::par;

/// Neuron nonlinearity applied after the weighted sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    None,
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::None => z,
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Activation::None => "none",
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(Activation::None),
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::Domain(format!(
                "unknown activation '{other}' (expected none, relu, sigmoid, or tanh)"
            ))),
        }
    }
}

/// A layer as stored in weight fixtures: the matrix plus its activation.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    /// Entry `(n, m)` weights input `n` into output `m`; the layer computes
    /// `y = act(W^T x)`.
    pub weights: DMatrix<f64>,
    pub activation: Activation,
}

/// Differential conductance targets for one weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedWeights {
    /// Weight-to-conductance scale `s_w` (S per weight unit).
    pub scale: f64,
    pub g_pos: DMatrix<f64>,
    pub g_neg: DMatrix<f64>,
    /// True when an all-zero matrix forced the fallback scale.
    pub degenerate: bool,
}

/// Map weights onto one-sided differential pairs.
///
/// `s_w = (g_c - g_a) / max|W|`; the positive array carries `g_a + s_w * w`
/// for nonnegative weights, the negative array mirrors negative ones, and the
/// other side of each pair stays at `g_a`. An all-zero matrix has no usable
/// scale: it maps to all-baseline pairs under `fallback_scale`, or fails with
/// `DegenerateWeights` when no fallback is supplied.
pub fn weights_to_conductances(
    weights: &DMatrix<f64>,
    g_a: f64,
    g_c: f64,
    fallback_scale: Option<f64>,
) -> Result<MappedWeights> {
    if weights.is_empty() {
        return Err(Error::Invariant("weight matrix must be nonempty".into()));
    }
    if !(g_a > 0.0 && g_c > g_a) {
        return Err(Error::Invariant(format!(
            "conductance window requires g_c > g_a > 0, got [{g_a}, {g_c}]"
        )));
    }
    let mut w_max = 0.0f64;
    for &w in weights.iter() {
        if !w.is_finite() {
            return Err(Error::Domain(format!("weights must be finite, got {w}")));
        }
        w_max = w_max.max(w.abs());
    }
    let (scale, degenerate) = if w_max > 0.0 {
        ((g_c - g_a) / w_max, false)
    } else {
        match fallback_scale {
            Some(s) if s > 0.0 => (s, true),
            Some(s) => {
                return Err(Error::Invariant(format!(
                    "fallback scale must be > 0, got {s}"
                )))
            }
            None => {
                return Err(Error::DegenerateWeights(
                    "all-zero weight matrix has no conductance scale; provide a fallback".into(),
                ))
            }
        }
    };
    let encode = |w: f64| {
        if w.abs() == w_max && w_max > 0.0 {
            // Land the full-scale weight exactly on the top endpoint.
            g_c
        } else {
            (g_a + scale * w.abs()).min(g_c)
        }
    };
    let g_pos = DMatrix::from_fn(weights.nrows(), weights.ncols(), |n, m| {
        let w = weights[(n, m)];
        if w >= 0.0 {
            encode(w)
        } else {
            g_a
        }
    });
    let g_neg = DMatrix::from_fn(weights.nrows(), weights.ncols(), |n, m| {
        let w = weights[(n, m)];
        if w < 0.0 {
            encode(w)
        } else {
            g_a
        }
    });
    Ok(MappedWeights {
        scale,
        g_pos,
        g_neg,
        degenerate,
    })
}

/// Invert the differential mapping: `W = (G+ - G-) / s_w`.
pub fn conductances_to_weights(
    g_pos: &DMatrix<f64>,
    g_neg: &DMatrix<f64>,
    scale: f64,
) -> DMatrix<f64> {
    assert!(scale > 0.0, "conductance scale must be > 0, got {scale}");
    assert_eq!(g_pos.shape(), g_neg.shape(), "pair shapes must match");
    (g_pos - g_neg) / scale
}

/// One network layer realized as a differential crossbar pair.
#[derive(Debug, Clone)]
pub struct LayerMapping {
    pub weights: DMatrix<f64>,
    pub scale: f64,
    pub pos: CrossbarArray,
    pub neg: CrossbarArray,
    pub activation: Activation,
}

/// Build crossbar pairs for every layer, preloading exact conductances.
///
/// The preload bypasses pulsed programming; call [`program_mappings`]
/// afterwards to re-write the arrays through the closed loop instead.
pub fn build_mappings(
    layers: &[LayerSpec],
    spec: &ArraySpec,
    fallback_scale: Option<f64>,
) -> Result<Vec<LayerMapping>> {
    layers
        .iter()
        .map(|layer| {
            let mapped = weights_to_conductances(
                &layer.weights,
                spec.device.g_a,
                spec.device.g_c,
                fallback_scale,
            )?;
            let (rows, cols) = layer.weights.shape();
            let mut pos = spec.build(rows, cols)?;
            let mut neg = spec.build(rows, cols)?;
            for n in 0..rows {
                for m in 0..cols {
                    pos.set_cell_conductance(n, m, mapped.g_pos[(n, m)])?;
                    neg.set_cell_conductance(n, m, mapped.g_neg[(n, m)])?;
                }
            }
            Ok(LayerMapping {
                weights: layer.weights.clone(),
                scale: mapped.scale,
                pos,
                neg,
                activation: layer.activation,
            })
        })
        .collect()
}

/// Programming outcome for one layer's pair of arrays.
#[derive(Debug, Clone)]
pub struct LayerProgramReport {
    pub pos: ProgramReport,
    pub neg: ProgramReport,
}

/// Reset every array to baseline, then write all conductance targets through
/// the closed programming loop at the given tolerance.
pub fn program_mappings(
    mappings: &mut [LayerMapping],
    tol: f64,
    max_pulses: u32,
) -> Result<Vec<LayerProgramReport>> {
    mappings
        .iter_mut()
        .map(|mapping| {
            let mapped = weights_to_conductances(
                &mapping.weights,
                mapping.pos.device.g_a,
                mapping.pos.device.g_c,
                Some(mapping.scale),
            )?;
            let (rows, cols) = mapping.weights.shape();
            for n in 0..rows {
                for m in 0..cols {
                    mapping.pos.set_cell_state(n, m, 0.0)?;
                    mapping.neg.set_cell_state(n, m, 0.0)?;
                }
            }
            let pos = crate::crossbar::program_array(&mut mapping.pos, &mapped.g_pos, tol, max_pulses)?;
            let neg = crate::crossbar::program_array(&mut mapping.neg, &mapped.g_neg, tol, max_pulses)?;
            Ok(LayerProgramReport { pos, neg })
        })
        .collect()
}

/// Whether reads go through the ideal VMM or the wire-resistance network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VmmMode {
    Ideal,
    Nonideal,
}

impl std::fmt::Display for VmmMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VmmMode::Ideal => write!(f, "ideal"),
            VmmMode::Nonideal => write!(f, "nonideal"),
        }
    }
}

impl std::str::FromStr for VmmMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ideal" => Ok(VmmMode::Ideal),
            "nonideal" => Ok(VmmMode::Nonideal),
            other => Err(Error::Domain(format!(
                "unknown VMM mode '{other}' (expected ideal or nonideal)"
            ))),
        }
    }
}

/// Read-phase electrical settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadSettings {
    /// Largest legal read amplitude (V); encoded drives beyond it are counted
    /// as saturated but intentionally not clamped, keeping reads linear.
    pub v_read: f64,
    /// Duration of one read phase (s).
    pub t_read_s: f64,
    /// Volts per unit of input value.
    pub v_scale: f64,
}

impl ReadSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_read > 0.0) {
            return Err(Error::Invariant(format!(
                "v_read must be > 0, got {}",
                self.v_read
            )));
        }
        if !(self.t_read_s > 0.0) {
            return Err(Error::Invariant(format!(
                "t_read_s must be > 0, got {}",
                self.t_read_s
            )));
        }
        if !(self.v_scale > 0.0) {
            return Err(Error::Invariant(format!(
                "v_scale must be > 0, got {}",
                self.v_scale
            )));
        }
        Ok(())
    }
}

/// Result of one inference pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOutput {
    pub values: DVector<f64>,
    /// Encoded drive entries whose magnitude exceeded `v_read`.
    pub saturated_reads: u64,
    pub trace: Trace,
}

enum LayerReader {
    Ideal,
    Solvers(Vec<(NodalSolver, NodalSolver)>),
}

fn build_reader(mappings: &[LayerMapping], mode: VmmMode) -> Result<LayerReader> {
    match mode {
        VmmMode::Ideal => Ok(LayerReader::Ideal),
        VmmMode::Nonideal => {
            let solvers = mappings
                .iter()
                .map(|m| Ok((NodalSolver::new(&m.pos)?, NodalSolver::new(&m.neg)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(LayerReader::Solvers(solvers))
        }
    }
}

fn forward_with_reader(
    mappings: &[LayerMapping],
    reader: &LayerReader,
    input: &DVector<f64>,
    read: &ReadSettings,
) -> Result<ForwardOutput> {
    let mut trace = Trace::new();
    let mut saturated = 0u64;
    let mut x = input.clone();
    for (li, mapping) in mappings.iter().enumerate() {
        let rows = mapping.pos.rows();
        let cols = mapping.pos.cols();
        if x.len() != rows {
            return Err(Error::Dimension {
                expected: rows,
                got: x.len(),
            });
        }
        let mut v_plus = DVector::zeros(rows);
        let mut v_minus = DVector::zeros(rows);
        for n in 0..rows {
            let v = read.v_scale * x[n];
            if v.abs() > read.v_read {
                saturated += 1;
            }
            if v >= 0.0 {
                v_plus[n] = v;
            } else {
                v_minus[n] = -v;
            }
        }

        let read_phase = |array: &CrossbarArray,
                              solver: Option<&NodalSolver>,
                              v: &DVector<f64>,
                              trace: &mut Trace|
         -> Result<DVector<f64>> {
            let currents = match solver {
                None => array.vmm_ideal(v)?,
                Some(solver) => solver.solve(v)?,
            };
            trace.push(TraceEvent::VmmRead {
                rows,
                cols,
                energy_j: array.read_energy_j(v, read.t_read_s)?,
                duration_s: read.t_read_s,
            });
            Ok(currents)
        };

        let (pos_solver, neg_solver) = match reader {
            LayerReader::Ideal => (None, None),
            LayerReader::Solvers(solvers) => (Some(&solvers[li].0), Some(&solvers[li].1)),
        };
        let i_pp = read_phase(&mapping.pos, pos_solver, &v_plus, &mut trace)?;
        let i_pm = read_phase(&mapping.pos, pos_solver, &v_minus, &mut trace)?;
        let i_np = read_phase(&mapping.neg, neg_solver, &v_plus, &mut trace)?;
        let i_nm = read_phase(&mapping.neg, neg_solver, &v_minus, &mut trace)?;

        let mut y = DVector::zeros(cols);
        for m in 0..cols {
            let delta_pos = i_pp[m] - i_pm[m];
            let delta_neg = i_np[m] - i_nm[m];
            let z = (delta_pos - delta_neg) / (mapping.scale * read.v_scale);
            y[m] = mapping.activation.apply(z);
        }
        x = y;
    }
    Ok(ForwardOutput {
        values: x,
        saturated_reads: saturated,
        trace,
    })
}

/// Run one input through the mapped network.
pub fn forward(
    mappings: &[LayerMapping],
    input: &DVector<f64>,
    mode: VmmMode,
    read: &ReadSettings,
) -> Result<ForwardOutput> {
    read.validate()?;
    let reader = build_reader(mappings, mode)?;
    forward_with_reader(mappings, &reader, input, read)
}

/// Run many inputs, factoring each layer's network once and fanning out over
/// samples. Outputs keep the input order.
pub fn forward_batch(
    mappings: &[LayerMapping],
    inputs: &[DVector<f64>],
    mode: VmmMode,
    read: &ReadSettings,
) -> Result<Vec<ForwardOutput>> {
    read.validate()?;
    let reader = build_reader(mappings, mode)?;
    par::try_map_indexed(inputs.len(), |i| {
        forward_with_reader(mappings, &reader, &inputs[i], read)
    })
}
