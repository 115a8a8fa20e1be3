// SPDX-License-Identifier: Apache-2.0

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::{TrainerConfig, UpdateMethod};
use super::loss::{mae_loss, TargetDataset};
use crate::chip::Chip;
use crate::error::{Error, Result};
use crate::photonics::{distribution, estimate_distribution, sample_counts, select_input_set, InputSet, InputState};
use crate::rng::{derive, substream, tag};
use crate::unitary::{fidelity, Unitary};

/// What an epoch did with the selected parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Up,
    Down,
    Stay,
}

impl Action {
    pub fn as_str(&self) -> &'static str {
        match self {
            Action::Up => "up",
            Action::Down => "down",
            Action::Stay => "stay",
        }
    }
}

/// One row of a training trajectory. `index` is 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub index: usize,
    pub l_prev: f64,
    pub l_up: f64,
    pub l_down: f64,
    pub action: Action,
    pub delta: f64,
    /// Loss at the accepted point. For gradient-proportional moves the new
    /// point is not evaluated, so this is the lowest loss seen this epoch.
    pub loss: f64,
    pub fidelity: Option<f64>,
}

/// Mutable state of a run. Everything the next epoch depends on lives here,
/// so a run can be paused and resumed bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingState {
    pub epoch: usize,
    pub params: Vec<f64>,
    pub order: Vec<usize>,
    pub cursor: usize,
    pub reshuffles: u64,
    pub initial_loss: Option<f64>,
    pub delta_level: usize,
    /// Loss of `params` measured on the previous epoch, when it was measured there.
    pub last_loss: Option<f64>,
    pub trajectory: Vec<EpochRecord>,
}

impl TrainingState {
    pub fn new(params: Vec<f64>) -> Self {
        let n = params.len();
        TrainingState {
            epoch: 0,
            params,
            order: (0..n).collect(),
            cursor: 0,
            reshuffles: 0,
            initial_loss: None,
            delta_level: 0,
            last_loss: None,
            trajectory: Vec::new(),
        }
    }
}

/// Result of a complete run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub params: Vec<f64>,
    pub trajectory: Vec<EpochRecord>,
    pub final_loss: f64,
    pub final_fidelity: f64,
    pub stuck: bool,
}

/// FDSA trainer for one chip against one target.
#[derive(Debug, Clone)]
pub struct Trainer<'a> {
    chip: &'a Chip,
    target: Unitary,
    dataset: TargetDataset,
    config: TrainerConfig,
}

fn input_tag(input: &InputState) -> u64 {
    match *input {
        InputState::Single(i) => i as u64,
        InputState::Pair(i, k) => (1 << 40) | ((i as u64) << 20) | k as u64,
    }
}

impl<'a> Trainer<'a> {
    pub fn new(chip: &'a Chip, target: Unitary, config: TrainerConfig) -> Result<Self> {
        config.validate()?;
        if target.dim() != chip.geometry().modes() {
            return Err(Error::DimensionMismatch { expected: chip.geometry().modes(), found: target.dim() });
        }
        let dataset = TargetDataset::new(chip.geometry(), &target)?;
        Ok(Trainer { chip, target, dataset, config })
    }

    pub fn config(&self) -> &TrainerConfig {
        &self.config
    }

    pub fn target(&self) -> &Unitary {
        &self.target
    }

    pub fn dataset(&self) -> &TargetDataset {
        &self.dataset
    }

    /// Inputs probed during `epoch`.
    pub fn inputs_for_epoch(&self, epoch: usize) -> Result<InputSet> {
        let mut rng = substream(self.config.seed, &[tag::SUBSET, epoch as u64]);
        select_input_set(self.chip.geometry(), self.config.pairs_per_epoch, &mut rng)
    }

    /// Loss of controls `x` on `inputs`. With finite shots every input state
    /// draws from its own stream keyed by `eval_key`, so the value does not
    /// depend on evaluation order or on which other inputs were present.
    pub fn evaluate_loss(&self, x: &[f64], inputs: &InputSet, eval_key: u64) -> Result<f64> {
        let u = self.chip.unitary(x)?;
        let targets = self.dataset.select(inputs)?;
        let estimates = inputs
            .iter()
            .map(|input| {
                let exact = distribution(&u, *input)?;
                Ok(match self.config.shots {
                    None => exact,
                    Some(shots) => {
                        let mut rng = substream(eval_key, &[tag::INPUT, input_tag(input)]);
                        estimate_distribution(&sample_counts(&exact, shots, &mut rng))
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        mae_loss(&estimates, &targets)
    }

    fn clamp(&self, v: f64) -> f64 {
        let (lo, hi) = self.chip.control().bounds();
        v.clamp(lo, hi)
    }

    /// Runs one epoch and appends its record to the state.
    pub fn epoch_step(&self, state: &mut TrainingState) -> Result<EpochRecord> {
        let n = state.params.len();
        if n != self.chip.control_count() {
            return Err(Error::DimensionMismatch { expected: self.chip.control_count(), found: n });
        }
        if state.cursor >= state.order.len() {
            state.reshuffles += 1;
            let mut rng = substream(self.config.seed, &[tag::ORDER, state.reshuffles]);
            state.order.shuffle(&mut rng);
            state.cursor = 0;
        }
        let i0 = state.order[state.cursor];
        state.cursor += 1;

        let epoch = state.epoch;
        let inputs = self.inputs_for_epoch(epoch)?;
        let key = |j: u64| derive(self.config.seed, &[tag::EVAL, epoch as u64, j]);

        let delta = self.config.delta_schedule.delta_at(state.delta_level);
        let l_prev = match (self.config.reuse_previous_loss, state.last_loss) {
            (true, Some(l)) => l,
            _ => self.evaluate_loss(&state.params, &inputs, key(0))?,
        };
        let mut probe = state.params.clone();
        probe[i0] = self.clamp(state.params[i0] + delta);
        let l_up = self.evaluate_loss(&probe, &inputs, key(1))?;
        probe[i0] = self.clamp(state.params[i0] - delta);
        let l_down = self.evaluate_loss(&probe, &inputs, key(2))?;

        let (action, best) = if l_up < l_prev && l_up <= l_down {
            (Action::Up, l_up)
        } else if l_down < l_prev {
            (Action::Down, l_down)
        } else {
            (Action::Stay, l_prev)
        };
        let sign = match action {
            Action::Up => 1.0,
            Action::Down => -1.0,
            Action::Stay => 0.0,
        };
        let step = match self.config.update {
            UpdateMethod::FixedStep => delta,
            UpdateMethod::GradientProportional { gain } => gain * (l_prev - best) / delta,
        };
        state.params[i0] = self.clamp(state.params[i0] + sign * step);
        // The accepted loss is a measurement of the new point only when the
        // move landed exactly on an evaluated probe.
        state.last_loss = match (action, self.config.update) {
            (Action::Stay, _) | (_, UpdateMethod::FixedStep) => Some(best),
            _ => None,
        };

        let initial = *state.initial_loss.get_or_insert(l_prev);
        state.delta_level = self.config.delta_schedule.level(state.delta_level, best, initial);

        let fid = if self.config.track_fidelity {
            Some(fidelity(&self.target, &self.chip.unitary(&state.params)?)?)
        } else {
            None
        };
        let record = EpochRecord { epoch, index: i0, l_prev, l_up, l_down, action, delta, loss: best, fidelity: fid };
        state.trajectory.push(record.clone());
        state.epoch += 1;
        Ok(record)
    }

    /// Trains from controls `initial` for the configured number of epochs.
    pub fn run(&self, initial: &[f64]) -> Result<TrainOutcome> {
        let mut state = TrainingState::new(initial.iter().map(|&v| self.clamp(v)).collect());
        self.resume(&mut state)?;
        self.finish(state)
    }

    /// Continues `state` until the configured epoch count.
    pub fn resume(&self, state: &mut TrainingState) -> Result<()> {
        while state.epoch < self.config.epochs {
            self.epoch_step(state)?;
        }
        Ok(())
    }

    pub fn finish(&self, state: TrainingState) -> Result<TrainOutcome> {
        let final_fidelity = fidelity(&self.target, &self.chip.unitary(&state.params)?)?;
        let final_loss = state.trajectory.last().map_or(f64::NAN, |r| r.loss);
        let stuck = self
            .config
            .stuck_loss_threshold
            .is_some_and(|t| super::flag_stuck(&state.trajectory, t));
        Ok(TrainOutcome { params: state.params, trajectory: state.trajectory, final_loss, final_fidelity, stuck })
    }
}

/// Trains `chip` from `initial` towards `target`.
pub fn train(chip: &Chip, target: &Unitary, initial: &[f64], config: &TrainerConfig) -> Result<TrainOutcome> {
    Trainer::new(chip, target.clone(), config.clone())?.run(initial)
}
