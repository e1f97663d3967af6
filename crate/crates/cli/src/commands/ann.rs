//! `ann-infer`: map layer weight fixtures onto differential crossbar pairs,
//! run every input sample through the analog forward pass, and account for
//! the energy spent. Ideal mode preloads exact conductances; nonideal mode
//! programs them through the closed loop first and reads through the wire
//! network.

use std::path::PathBuf;

use pxbar_core::ann::{build_mappings, forward_batch, program_mappings, LayerSpec, VmmMode};
use pxbar_core::energy::{Trace, TraceEvent};

use crate::commands::report::{print_report, write_energy_csv};
use crate::config::Experiment;
use crate::error::{CliError, Result};
use crate::fixtures::{read_labels, read_layer, read_vectors, TRACE_HEADER};
use crate::table::{sig12, OutFile};

pub const PREDICTIONS_HEADER: &str = "sample,prediction";

pub struct AnnArgs {
    pub weights: Vec<PathBuf>,
    pub input: PathBuf,
    pub labels: Option<PathBuf>,
    pub mode: VmmMode,
}

fn check_chain(layers: &[LayerSpec], input_len: usize, paths: &[PathBuf]) -> Result<()> {
    let mut feed = input_len;
    for (i, layer) in layers.iter().enumerate() {
        if layer.weights.nrows() != feed {
            return Err(CliError::schema(format!(
                "{}: layer expects {} inputs, previous stage provides {feed}",
                paths[i].display(),
                layer.weights.nrows()
            )));
        }
        feed = layer.weights.ncols();
    }
    Ok(())
}

fn argmax(values: &nalgebra::DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    best
}

pub fn run(exp: &Experiment, args: &AnnArgs) -> Result<()> {
    let layers: Vec<LayerSpec> = args
        .weights
        .iter()
        .map(|path| read_layer(path))
        .collect::<Result<_>>()?;
    let samples = read_vectors(&args.input)?;
    if samples.is_empty() {
        return Err(CliError::schema(format!(
            "{}: no input samples",
            args.input.display()
        )));
    }
    check_chain(&layers, samples[0].len(), &args.weights)?;

    let labels = args.labels.as_deref().map(read_labels).transpose()?;
    if let Some(labels) = &labels {
        if labels.len() != samples.len() {
            return Err(CliError::schema(format!(
                "{} labels for {} samples",
                labels.len(),
                samples.len()
            )));
        }
    }

    let mut mappings = build_mappings(&layers, &exp.spec, None).map_err(|e| match e {
        pxbar_core::Error::DegenerateWeights(msg) => CliError::schema(msg),
        other => CliError::from(other),
    })?;

    let mut trace = Trace::new();
    if args.mode == VmmMode::Nonideal {
        let reports = program_mappings(&mut mappings, exp.tol, exp.max_pulses)?;
        let mut failed = 0usize;
        for layer in &reports {
            for side in [&layer.pos, &layer.neg] {
                failed += side.cells.iter().filter(|c| !c.ok).count();
                for log in &side.logs {
                    for record in &log.records {
                        trace.push(TraceEvent::ProgramPulse {
                            energy_j: record.energy_j(),
                            duration_s: record.pulse.duration_s,
                        });
                    }
                }
            }
        }
        if failed > 0 {
            return Err(CliError::model(format!(
                "{failed} cells missed their conductance target within {} pulses",
                exp.max_pulses
            )));
        }
    }

    let outputs = forward_batch(&mappings, &samples, args.mode, &exp.read)?;

    let mut predictions = OutFile::new(&exp.config_sha256, exp.seed, PREDICTIONS_HEADER);
    let mut correct = 0usize;
    let mut saturated = 0u64;
    for (i, output) in outputs.iter().enumerate() {
        let prediction = argmax(&output.values);
        predictions.row(&[i.to_string(), prediction.to_string()]);
        saturated += output.saturated_reads;
        if let Some(labels) = &labels {
            if labels[i] == prediction {
                correct += 1;
            }
        }
        trace.extend(&output.trace);
    }
    let predictions_path = exp.out_dir.join("predictions.csv");
    predictions.write(&predictions_path)?;

    let mut trace_out = OutFile::new(&exp.config_sha256, exp.seed, TRACE_HEADER);
    for event in &trace.events {
        let (kind, rows, cols) = match *event {
            TraceEvent::VmmRead { rows, cols, .. } => ("vmm_read", rows, cols),
            TraceEvent::OpticalRead { .. } => ("optical_read", 0, 0),
            TraceEvent::ProgramPulse { .. } => ("program_pulse", 0, 0),
        };
        trace_out.row(&[
            kind.to_string(),
            rows.to_string(),
            cols.to_string(),
            sig12(event.energy_j()),
            sig12(event.duration_s()),
        ]);
    }
    let trace_path = exp.out_dir.join("trace.csv");
    trace_out.write(&trace_path)?;

    let report = trace.report();
    let energy_path = write_energy_csv(&report, &exp.out_dir, &exp.config_sha256, exp.seed)?;

    println!("samples: {}", samples.len());
    println!("mode: {}", args.mode);
    println!("layers: {}", mappings.len());
    println!("saturated reads: {saturated}");
    print_report(&report);
    if let Some(labels) = &labels {
        println!(
            "accuracy: {correct}/{} = {}",
            labels.len(),
            sig12(correct as f64 / labels.len() as f64)
        );
    }
    println!("wrote {}", predictions_path.display());
    println!("wrote {}", trace_path.display());
    println!("wrote {}", energy_path.display());
    Ok(())
}
