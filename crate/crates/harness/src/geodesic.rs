// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use ccwave::rng::{substream, tag};
use ccwave::trainer::{generate_instance, intermediate_unitaries_train, StageReport, TrainerConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohort::run_seed;
use crate::config::{Experiment, ScenarioConfig};
use crate::error::{HarnessError, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicRun {
    pub run: usize,
    pub initial_fidelity: f64,
    pub stages: Vec<StageReport>,
    pub final_fidelity: f64,
    pub aborted_at: Option<usize>,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicResult {
    pub steps: usize,
    pub runs: Vec<GeodesicRun>,
    pub success_rate: f64,
}

/// Staged training through intermediate targets on the geodesic to each
/// run's target unitary.
pub fn geodesic_experiment(cfg: &ScenarioConfig) -> Result<GeodesicResult> {
    let Experiment::Geodesic { steps, start } = &cfg.experiment else {
        return Err(HarnessError::Config(format!("expected a geodesic scenario, got {}", cfg.kind())));
    };
    let geom = cfg.geometry()?;
    let model = cfg.control_model(&geom)?;
    let runs: Vec<GeodesicRun> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let seed = run_seed(cfg.seed, run);
            let inst = generate_instance(&geom, &model, start, &mut substream(seed, &[tag::INSTANCE]))?;
            let config = TrainerConfig { seed, ..cfg.trainer.clone() };
            let out = intermediate_unitaries_train(&inst.chip, &inst.initial_controls, &inst.target_unitary, *steps, &config)?;
            Ok(GeodesicRun {
                run,
                initial_fidelity: inst.initial_fidelity,
                stages: out.stages,
                final_fidelity: out.final_fidelity,
                aborted_at: out.aborted_at,
                success: out.success,
            })
        })
        .collect::<Result<_>>()?;
    let success_rate = runs.iter().filter(|r| r.success).count() as f64 / runs.len() as f64;
    Ok(GeodesicResult { steps: *steps, runs, success_rate })
}

pub fn write_geodesic(dir: &Path, result: &GeodesicResult) -> Result<()> {
    io::ensure_dir(dir)?;
    io::write_json(&dir.join("geodesic.json"), result)
}
