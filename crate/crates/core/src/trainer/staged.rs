// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::config::TrainerConfig;
use super::fdsa::{train, TrainOutcome};
use crate::chip::Chip;
use crate::error::{Error, Result};
use crate::rng::{derive, tag};
use crate::unitary::{fidelity, geodesic_path, Unitary};

/// Final fidelity above which a staged run counts as converged.
pub const SUCCESS_FIDELITY: f64 = 0.98;

/// Outcome of one geodesic step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub step: usize,
    /// Fidelity with this step's intermediate target.
    pub step_fidelity: f64,
    /// Fidelity with the final target.
    pub target_fidelity: f64,
    pub final_loss: f64,
    pub stuck: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagedOutcome {
    pub stages: Vec<StageReport>,
    pub params: Vec<f64>,
    pub final_fidelity: f64,
    /// Step at which a stuck run stopped the chain.
    pub aborted_at: Option<usize>,
    pub success: bool,
    pub last: TrainOutcome,
}

/// Trains through `steps` targets along the geodesic from the unitary
/// realized by `initial` to `target`, chaining parameters between steps.
///
/// Step `k > 0` uses a seed derived from `config.seed`; the last target is
/// `target` itself, so `steps = 1` is exactly a plain training run.
pub fn intermediate_unitaries_train(
    chip: &Chip,
    initial: &[f64],
    target: &Unitary,
    steps: usize,
    config: &TrainerConfig,
) -> Result<StagedOutcome> {
    if steps == 0 {
        return Err(Error::InvalidConfig("steps must be at least 1".into()));
    }
    let start = chip.unitary(initial)?;
    let mut path = geodesic_path(&start, target, steps)?;
    *path.last_mut().expect("steps >= 1") = target.clone();

    let mut params = initial.to_vec();
    let mut stages = Vec::with_capacity(steps);
    let mut last = None;
    for (k, u_k) in path.iter().enumerate() {
        let seed = if k == 0 { config.seed } else { derive(config.seed, &[tag::PHASE, k as u64]) };
        let cfg = TrainerConfig { seed, ..config.clone() };
        let out = train(chip, u_k, &params, &cfg)?;
        let target_fidelity = fidelity(target, &chip.unitary(&out.params)?)?;
        stages.push(StageReport {
            step: k,
            step_fidelity: out.final_fidelity,
            target_fidelity,
            final_loss: out.final_loss,
            stuck: out.stuck,
        });
        params = out.params.clone();
        let stuck = out.stuck;
        last = Some(out);
        if stuck && k + 1 < steps {
            log::warn!("geodesic step {k} stuck, aborting chain");
            let final_fidelity = target_fidelity;
            return Ok(StagedOutcome {
                stages,
                params,
                final_fidelity,
                aborted_at: Some(k),
                success: false,
                last: last.expect("set above"),
            });
        }
    }
    let final_fidelity = stages.last().expect("steps >= 1").target_fidelity;
    Ok(StagedOutcome {
        stages,
        params,
        final_fidelity,
        aborted_at: None,
        success: final_fidelity > SUCCESS_FIDELITY,
        last: last.expect("steps >= 1"),
    })
}
