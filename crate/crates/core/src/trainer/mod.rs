// SPDX-License-Identifier: Apache-2.0

//! Loss, finite-difference training and staged training along geodesics.

mod config;
mod fdsa;
mod instance;
mod loss;
mod staged;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

pub use config::{DeltaSchedule, DeltaStep, TrainerConfig, UpdateMethod};
pub use fdsa::{train, Action, EpochRecord, TrainOutcome, Trainer, TrainingState};
pub use instance::{generate_instance, Instance, StartPolicy, DEFAULT_PERTURBATION, WINDOW_RETRY_CAP};
pub use loss::{mae_loss, TargetDataset};
pub use staged::{intermediate_unitaries_train, StageReport, StagedOutcome, SUCCESS_FIDELITY};

/// Number of trailing epochs inspected by [`flag_stuck`]: 10%, at least one.
pub fn trailing_window(len: usize) -> usize {
    len.div_ceil(10).max(1).min(len)
}

/// Whether the mean loss of the trailing window exceeds `threshold`.
pub fn flag_stuck(trajectory: &[EpochRecord], threshold: f64) -> bool {
    if trajectory.is_empty() {
        return false;
    }
    trailing_mean_loss(trajectory) > threshold
}

pub fn trailing_mean_loss(trajectory: &[EpochRecord]) -> f64 {
    let w = trailing_window(trajectory.len());
    let tail = &trajectory[trajectory.len() - w..];
    tail.iter().map(|r| r.loss).sum::<f64>() / w as f64
}

pub const TRAJECTORY_HEADER: &str = "epoch,i0,l_prev,l_up,l_down,action,delta,loss,fidelity";

/// Writes a trajectory as CSV. `i0` is 1-based; an untracked fidelity is empty.
pub fn write_trajectory_csv<W: Write>(mut w: W, trajectory: &[EpochRecord]) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in trajectory {
        let fid = r.fidelity.map(|f| f.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.epoch,
            r.index + 1,
            r.l_prev,
            r.l_up,
            r.l_down,
            r.action.as_str(),
            r.delta,
            r.loss,
            fid
        )?;
    }
    Ok(())
}

/// JSON summary of a finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub final_params: Vec<f64>,
    pub final_loss: f64,
    pub final_fidelity: f64,
    pub stuck_flag: bool,
    pub seed: u64,
    pub config_hash: String,
}

impl RunSummary {
    pub fn new(outcome: &TrainOutcome, config: &TrainerConfig) -> Self {
        RunSummary {
            final_params: outcome.params.clone(),
            final_loss: outcome.final_loss,
            final_fidelity: outcome.final_fidelity,
            stuck_flag: outcome.stuck,
            seed: config.seed,
            config_hash: config.hash(),
        }
    }
}

#[cfg(test)]
mod tests;
