// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use ccwave::chip::{parameters_unitary, Chip, ChipDocument, ChipParameters};
use ccwave::photonics::{distribution, full_input_set, sample_counts, InputState, OutcomeRecord};
use ccwave::rng::{substream, tag};
use ccwave::unitary::UnitaryDoc;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{ControlKind, Experiment, ScenarioConfig};
use crate::error::{HarnessError, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub chip: ChipDocument,
    pub unitary: UnitaryDoc,
    pub unitarity_error: f64,
    pub records: Vec<OutcomeRecord>,
}

/// Unitary and output statistics of a loaded or freshly drawn device.
pub fn simulate(cfg: &ScenarioConfig) -> Result<SimulationResult> {
    let Experiment::Simulate { chip, inputs, shots } = &cfg.experiment else {
        return Err(HarnessError::Config(format!("expected a simulate scenario, got {}", cfg.kind())));
    };
    let (geom, params) = match chip {
        Some(path) => io::read_json::<ChipDocument>(path)?.into_parts()?,
        None => {
            let geom = cfg.geometry()?;
            let mut rng = substream(cfg.seed, &[tag::INSTANCE]);
            let params = match cfg.control {
                ControlKind::Direct => ChipParameters::sample_target(&geom, &mut rng),
                ControlKind::Mesh => {
                    let model = cfg.control_model(&geom)?;
                    let couplings = ccwave::chip::sample_couplings(&geom, &mut rng);
                    let (lo, hi) = model.bounds();
                    let x: Vec<f64> = (0..model.control_count(&geom)).map(|_| rng.random_range(lo..=hi)).collect();
                    Chip::new(geom.clone(), model, couplings)?.parameters(&x)?
                }
            };
            (geom, params)
        }
    };
    let u = parameters_unitary(&geom, &params)?;
    let states: Vec<InputState> = match inputs {
        Some(list) => list.iter().map(|modes| InputState::from_one_based(modes)).collect::<ccwave::Result<_>>()?,
        None => full_input_set(&geom).iter().copied().collect(),
    };
    let records = states
        .iter()
        .map(|&input| {
            let d = distribution(&u, input)?;
            Ok(match shots {
                None => OutcomeRecord::from(&d),
                Some(n) => {
                    let mut rng = substream(cfg.seed, &[tag::INPUT, input.one_based().iter().fold(0, |a, &m| a * 1024 + m as u64)]);
                    OutcomeRecord::from(&sample_counts(&d, *n, &mut rng))
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationResult {
        chip: ChipDocument::new(&geom, &params),
        unitarity_error: u.unitarity_error(),
        unitary: UnitaryDoc::from(&u),
        records,
    })
}

pub fn write_simulation(dir: &Path, result: &SimulationResult) -> Result<()> {
    io::ensure_dir(dir)?;
    io::write_json(&dir.join("simulate.json"), result)
}
