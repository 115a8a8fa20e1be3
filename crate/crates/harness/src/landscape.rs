// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use ccwave::chip::{parameters_unitary, ChipParameters};
use ccwave::photonics::{distribution, full_input_set};
use ccwave::rng::{substream, tag};
use ccwave::trainer::{generate_instance, mae_loss, TargetDataset};
use serde::{Deserialize, Serialize};

use crate::config::{Experiment, LandscapeContext, ScenarioConfig};
use crate::error::{HarnessError, Result};
use crate::io;

/// Default half-width of the sweep.
pub const DEFAULT_SPAN: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapePoint {
    pub shift: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeResult {
    /// 1-based swept parameter.
    pub parameter: usize,
    pub midpoint: f64,
    pub points: Vec<LandscapePoint>,
    pub argmin_shift: f64,
}

/// Exact-mode loss as one parameter is swept around the middle of its range,
/// with the target value of that parameter pinned to the midpoint.
///
/// The sweep bypasses the control bounds so the full span is covered.
pub fn loss_landscape(cfg: &ScenarioConfig) -> Result<LandscapeResult> {
    let Experiment::Landscape { parameter, resolution, span, context, start } = &cfg.experiment else {
        return Err(HarnessError::Config(format!("expected a landscape scenario, got {}", cfg.kind())));
    };
    let span = span.unwrap_or(DEFAULT_SPAN);
    let geom = cfg.geometry()?;
    let model = cfg.control_model(&geom)?;
    let k = parameter - 1;
    let n = model.control_count(&geom);
    if k >= n {
        return Err(HarnessError::Config(format!("parameter {parameter} out of range 1..={n}")));
    }
    let inst = generate_instance(&geom, &model, start, &mut substream(cfg.seed, &[tag::INSTANCE]))?;
    let (lo, hi) = model.bounds();
    let midpoint = 0.5 * (lo + hi);

    let couplings = inst.chip.couplings().clone();
    let unitary = |x: &[f64]| -> Result<_> {
        let beta = model.apply_unclamped(&geom, x)?;
        Ok(parameters_unitary(&geom, &ChipParameters::new(&geom, beta, couplings.clone())?)?)
    };
    let mut target = inst.target_controls.clone();
    target[k] = midpoint;
    let inputs = full_input_set(&geom);
    let dataset = TargetDataset::for_inputs(&unitary(&target)?, &inputs)?;
    let targets = dataset.select(&inputs)?;
    let mut base = match context {
        LandscapeContext::Target => target.clone(),
        LandscapeContext::Start => inst.initial_controls.clone(),
    };

    let mut points = Vec::with_capacity(*resolution);
    for i in 0..*resolution {
        let shift = span * (2.0 * i as f64 - (*resolution - 1) as f64) / (*resolution - 1) as f64;
        base[k] = midpoint + shift;
        let u = unitary(&base)?;
        let est = inputs.iter().map(|&inp| distribution(&u, inp)).collect::<ccwave::Result<Vec<_>>>()?;
        points.push(LandscapePoint { shift, loss: mae_loss(&est, &targets)? });
    }
    let argmin_shift = points.iter().min_by(|a, b| a.loss.total_cmp(&b.loss)).expect("resolution >= 2").shift;
    Ok(LandscapeResult { parameter: *parameter, midpoint, points, argmin_shift })
}

pub fn write_landscape(dir: &Path, result: &LandscapeResult) -> Result<()> {
    io::ensure_dir(dir)?;
    io::write_with(&dir.join("landscape.csv"), |w| {
        use std::io::Write;
        writeln!(w, "shift,loss")?;
        for p in &result.points {
            writeln!(w, "{},{}", p.shift, p.loss)?;
        }
        Ok(())
    })?;
    io::write_json(&dir.join("landscape.json"), result)
}
