// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One reduction of the finite-difference step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaStep {
    /// Applies once the loss falls below this fraction of the initial loss.
    pub below: f64,
    pub delta: f64,
}

/// Finite-difference step keyed to the loss relative to its starting value.
///
/// The step only ever decreases: once a threshold has been crossed the
/// trainer keeps the reduced step even if a later noisy estimate rises again.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSchedule {
    pub start: f64,
    pub steps: Vec<DeltaStep>,
}

impl DeltaSchedule {
    /// Halves `start` at 1/2, 1/4 and 1/8 of the initial loss, down to `start / 8`.
    pub fn halving(start: f64) -> Self {
        DeltaSchedule {
            start,
            steps: (1..=3)
                .map(|k| DeltaStep { below: 0.5f64.powi(k), delta: start * 0.5f64.powi(k) })
                .collect(),
        }
    }

    /// A single step size for the whole run.
    pub fn constant(delta: f64) -> Self {
        DeltaSchedule { start: delta, steps: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.start.is_nan() || self.start <= 0.0 {
            return Err(Error::InvalidConfig("delta must be strictly positive".into()));
        }
        let mut prev = (f64::INFINITY, self.start);
        for s in &self.steps {
            if s.delta.is_nan() || s.delta <= 0.0 || s.delta > prev.1 {
                return Err(Error::InvalidConfig("delta schedule must be positive and non-increasing".into()));
            }
            if s.below.is_nan() || s.below <= 0.0 || s.below >= prev.0 {
                return Err(Error::InvalidConfig("delta thresholds must be strictly decreasing".into()));
            }
            prev = (s.below, s.delta);
        }
        Ok(())
    }

    /// Schedule level reached for `loss`, never below `current`.
    pub fn level(&self, current: usize, loss: f64, initial: f64) -> usize {
        let reached = self
            .steps
            .iter()
            .rposition(|s| loss < s.below * initial)
            .map_or(0, |p| p + 1);
        reached.max(current)
    }

    pub fn delta_at(&self, level: usize) -> f64 {
        if level == 0 {
            self.start
        } else {
            self.steps[level - 1].delta
        }
    }
}

/// Size of the move once a descent direction is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UpdateMethod {
    /// Move to the already-evaluated point `±δ`.
    FixedStep,
    /// Move by `gain · (l_prev − min(l_up, l_down)) / δ`.
    GradientProportional { gain: f64 },
}

/// Settings of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    pub epochs: usize,
    /// Shots per input state; `None` uses exact probabilities.
    pub shots: Option<u64>,
    pub delta_schedule: DeltaSchedule,
    /// Two-photon inputs drawn per epoch on triangular chips; `None` uses all.
    pub pairs_per_epoch: Option<usize>,
    pub update: UpdateMethod,
    /// Trailing-mean loss above which a run counts as stuck; `None` never flags.
    pub stuck_loss_threshold: Option<f64>,
    /// Skip re-measuring `l_prev` when the previous epoch already evaluated
    /// the current point.
    pub reuse_previous_loss: bool,
    /// Compute the (unused by the optimizer) fidelity after every epoch.
    pub track_fidelity: bool,
    pub seed: u64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            epochs: 500,
            shots: Some(1000),
            delta_schedule: DeltaSchedule::halving(0.02),
            pairs_per_epoch: None,
            update: UpdateMethod::FixedStep,
            stuck_loss_threshold: None,
            reuse_previous_loss: false,
            track_fidelity: true,
            seed: 0,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.shots == Some(0) {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        if let UpdateMethod::GradientProportional { gain } = self.update {
            if gain.is_nan() || gain <= 0.0 {
                return Err(Error::InvalidConfig("gradient gain must be positive".into()));
            }
        }
        self.delta_schedule.validate()
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
