// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use ccwave::rng::{derive, substream, tag};
use ccwave::trainer::{
    generate_instance, train, trailing_mean_loss, write_trajectory_csv, RunSummary, StartPolicy, TrainOutcome,
    TrainerConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{DiscardRule, Experiment, ScenarioConfig};
use crate::error::{HarnessError, Result};
use crate::io;

/// Seed of run `i` in a cohort with master seed `master`.
pub fn run_seed(master: u64, i: usize) -> u64 {
    derive(master, &[tag::RUN, i as u64])
}

/// Per-run entry of a cohort summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub initial_fidelity: f64,
    pub final_fidelity: f64,
    pub final_loss: f64,
    /// Mean loss over the last 10% of epochs.
    pub trailing_loss: f64,
    pub discarded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortResult {
    pub runs: Vec<RunRecord>,
    pub stuck_threshold: f64,
    pub discarded: Vec<usize>,
    /// Statistics over kept runs; `None` when every run was discarded.
    pub mean_fidelity: Option<f64>,
    pub min_fidelity: Option<f64>,
    pub config_hash: String,
}

/// A finished run with everything needed to write its files.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub run: usize,
    pub config: TrainerConfig,
    pub initial_fidelity: f64,
    pub outcome: TrainOutcome,
}

fn start_policy(cfg: &ScenarioConfig) -> Result<(StartPolicy, DiscardRule)> {
    match &cfg.experiment {
        Experiment::TrainCohort { start, discard } => Ok((*start, *discard)),
        _ => Err(HarnessError::Config(format!("expected a train_cohort scenario, got {}", cfg.kind()))),
    }
}

/// Generates an instance for run `i` and trains it.
pub fn run_single(cfg: &ScenarioConfig, i: usize) -> Result<RunOutput> {
    let (start, _) = start_policy(cfg)?;
    let geom = cfg.geometry()?;
    let model = cfg.control_model(&geom)?;
    let seed = run_seed(cfg.seed, i);
    let inst = generate_instance(&geom, &model, &start, &mut substream(seed, &[tag::INSTANCE]))?;
    let config = TrainerConfig { seed, ..cfg.trainer.clone() };
    let outcome = train(&inst.chip, &inst.target_unitary, &inst.initial_controls, &config)?;
    log::info!("run {i}: F_in {:.4} -> F {:.5}", inst.initial_fidelity, outcome.final_fidelity);
    Ok(RunOutput { run: i, config, initial_fidelity: inst.initial_fidelity, outcome })
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Aggregates finished runs. Runs are sorted by index so the result does
/// not depend on completion order.
pub fn summarize(cfg: &ScenarioConfig, rule: &DiscardRule, outputs: &[RunOutput]) -> CohortResult {
    let mut outputs: Vec<&RunOutput> = outputs.iter().collect();
    outputs.sort_by_key(|o| o.run);
    let trailing: Vec<f64> = outputs.iter().map(|o| trailing_mean_loss(&o.outcome.trajectory)).collect();
    let threshold = rule.absolute.unwrap_or_else(|| rule.median_factor * median(&trailing));
    let runs: Vec<RunRecord> = outputs
        .iter()
        .zip(&trailing)
        .map(|(o, &t)| RunRecord {
            run: o.run,
            seed: o.config.seed,
            initial_fidelity: o.initial_fidelity,
            final_fidelity: o.outcome.final_fidelity,
            final_loss: o.outcome.final_loss,
            trailing_loss: t,
            discarded: t > threshold,
        })
        .collect();
    let kept: Vec<f64> = runs.iter().filter(|r| !r.discarded).map(|r| r.final_fidelity).collect();
    let (mean_fidelity, min_fidelity) = if kept.is_empty() {
        (None, None)
    } else {
        (Some(kept.iter().sum::<f64>() / kept.len() as f64), Some(kept.iter().copied().fold(f64::INFINITY, f64::min)))
    };
    CohortResult {
        discarded: runs.iter().filter(|r| r.discarded).map(|r| r.run).collect(),
        runs,
        stuck_threshold: threshold,
        mean_fidelity,
        min_fidelity,
        config_hash: config_hash(cfg),
    }
}

/// Hex SHA-256 of the scenario's canonical JSON, master seed included and
/// output location excluded.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let detached = ScenarioConfig { output_dir: Default::default(), ..cfg.clone() };
    let text = serde_json::to_string(&detached).expect("serializable");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs every member of the cohort in parallel.
pub fn run_cohort(cfg: &ScenarioConfig) -> Result<(CohortResult, Vec<RunOutput>)> {
    let (_, rule) = start_policy(cfg)?;
    let outputs: Vec<RunOutput> = (0..cfg.runs).into_par_iter().map(|i| run_single(cfg, i)).collect::<Result<_>>()?;
    Ok((summarize(cfg, &rule, &outputs), outputs))
}

pub fn write_run(dir: &Path, stem: &str, out: &RunOutput) -> Result<()> {
    io::write_with(&dir.join(format!("{stem}.csv")), |w| write_trajectory_csv(w, &out.outcome.trajectory))?;
    io::write_json(&dir.join(format!("{stem}.json")), &RunSummary::new(&out.outcome, &out.config))
}

pub fn write_cohort(dir: &Path, result: &CohortResult, outputs: &[RunOutput]) -> Result<()> {
    io::ensure_dir(dir)?;
    for out in outputs {
        write_run(dir, &format!("run_{:03}", out.run), out)?;
    }
    io::write_json(&dir.join("cohort.json"), result)
}
