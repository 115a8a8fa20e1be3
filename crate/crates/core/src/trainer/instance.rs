// SPDX-License-Identifier: Apache-2.0

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chip::{sample_couplings, Chip, ChipGeometry, ChipParameters, ControlModel};
use crate::error::{Error, Result};
use crate::unitary::{fidelity, Unitary};

/// Maximum number of perturbation draws before giving up on a window.
pub const WINDOW_RETRY_CAP: usize = 10_000;

/// Default half-width of the uniform perturbation applied to target controls.
pub const DEFAULT_PERTURBATION: f64 = 0.1;

/// Slack on the window bounds so that `[1, 1]` accepts an unperturbed start.
const WINDOW_SLACK: f64 = 1e-12;

/// How the starting controls of a run are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StartPolicy {
    /// Perturb the target controls until the starting fidelity is in `[lo, hi]`.
    Window {
        lo: f64,
        hi: f64,
        #[serde(default = "default_perturbation")]
        perturbation: f64,
    },
    /// Uniform draw over the control bounds, no filtering.
    Random,
}

fn default_perturbation() -> f64 {
    DEFAULT_PERTURBATION
}

impl StartPolicy {
    pub fn window(lo: f64, hi: f64) -> Self {
        StartPolicy::Window { lo, hi, perturbation: DEFAULT_PERTURBATION }
    }
}

/// A training problem: one chip, a target and a start.
#[derive(Debug, Clone)]
pub struct Instance {
    pub chip: Chip,
    pub target_controls: Vec<f64>,
    pub initial_controls: Vec<f64>,
    pub target_unitary: Unitary,
    pub initial_fidelity: f64,
    /// Number of start draws taken.
    pub draws: usize,
}

/// Draws couplings, target controls and a starting point for `geom` under `model`.
///
/// Direct control samples target β uniformly in range and perturbs each β
/// independently. Mesh control draws target and start uniformly in the
/// control bounds; a window policy perturbs in control space instead.
pub fn generate_instance<R: Rng + ?Sized>(
    geom: &ChipGeometry,
    model: &ControlModel,
    start: &StartPolicy,
    rng: &mut R,
) -> Result<Instance> {
    let (chip, target_controls, direct_target) = if model.is_mesh() {
        let couplings = sample_couplings(geom, rng);
        let (lo, hi) = model.bounds();
        let x: Vec<f64> = (0..model.control_count(geom)).map(|_| rng.random_range(lo..=hi)).collect();
        (Chip::new(geom.clone(), model.clone(), couplings)?, x, None)
    } else {
        let target = ChipParameters::sample_target(geom, rng);
        let x = target.beta()[0].clone();
        (Chip::new(geom.clone(), model.clone(), target.couplings().clone())?, x, Some(target))
    };
    let target_unitary = chip.unitary(&target_controls)?;
    let (blo, bhi) = model.bounds();

    let (lo, hi, perturbation) = match *start {
        StartPolicy::Random => {
            let x0: Vec<f64> = target_controls.iter().map(|_| rng.random_range(blo..=bhi)).collect();
            let f = fidelity(&target_unitary, &chip.unitary(&x0)?)?;
            return Ok(Instance {
                chip,
                target_controls,
                initial_controls: x0,
                target_unitary,
                initial_fidelity: f,
                draws: 1,
            });
        }
        StartPolicy::Window { lo, hi, perturbation } => (lo, hi, perturbation),
    };
    if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
        return Err(Error::InvalidConfig(format!("fidelity window [{lo}, {hi}] must lie in (0, 1]")));
    }
    for draw in 1..=WINDOW_RETRY_CAP {
        let x0 = match &direct_target {
            Some(t) => t.perturb(perturbation, rng).beta()[0].clone(),
            None => target_controls
                .iter()
                .map(|&v| {
                    let s = if perturbation > 0.0 { rng.random_range(-perturbation..=perturbation) } else { 0.0 };
                    (v + s).clamp(blo, bhi)
                })
                .collect(),
        };
        let f = fidelity(&target_unitary, &chip.unitary(&x0)?)?;
        if f >= lo - WINDOW_SLACK && f <= hi + WINDOW_SLACK {
            return Ok(Instance { chip, target_controls, initial_controls: x0, target_unitary, initial_fidelity: f, draws: draw });
        }
    }
    Err(Error::WindowUnreachable { lo, hi, attempts: WINDOW_RETRY_CAP })
}
