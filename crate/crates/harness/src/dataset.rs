// SPDX-License-Identifier: Apache-2.0

//! JSON-lines unitary datasets and scoring of predicted starting points.

use std::path::{Path, PathBuf};

use ccwave::chip::{
    sample_couplings, Chip, ChipDocument, ChipGeometry, ChipParameters, ControlModel, CouplingEntry, Layout, Segment,
    BETA_RANGE,
};
use ccwave::rng::{substream, tag};
use ccwave::trainer::{train, TrainerConfig};
use ccwave::unitary::{fidelity, random_unitary_noise, Unitary, UnitaryDoc};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohort::run_seed;
use crate::config::{Experiment, ScenarioConfig};
use crate::error::{HarnessError, Result};
use crate::io;

/// Predicted starting point counts as a success above this fidelity.
pub const WARMSTART_FIDELITY: f64 = 0.69;
/// Chained training counts as converged above this fidelity.
pub const CHAINED_FIDELITY: f64 = 0.98;

/// Coupling set shared by every record of a dataset. Modes are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedCouplings {
    pub layout: Layout,
    pub m: usize,
    pub edges: Vec<[usize; 2]>,
    pub segments: Vec<Segment>,
    pub couplings: Vec<CouplingEntry>,
}

impl SharedCouplings {
    pub fn new(geom: &ChipGeometry, params: &ChipParameters) -> Self {
        let doc = ChipDocument::new(geom, params);
        SharedCouplings { layout: doc.layout, m: doc.m, edges: doc.edges, segments: doc.segments, couplings: doc.couplings }
    }

    /// Direct-control chip carrying these couplings.
    pub fn chip(&self) -> Result<Chip> {
        let doc = ChipDocument {
            layout: self.layout,
            m: self.m,
            edges: self.edges.clone(),
            segments: self.segments.clone(),
            beta: vec![vec![1.0; self.m]; self.segments.len()],
            couplings: self.couplings.clone(),
        };
        let (geom, params) = doc.into_parts()?;
        Ok(Chip::new(geom, ControlModel::direct(), params.couplings().clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: usize,
    pub beta: Vec<f64>,
    pub unitary: UnitaryDoc,
    /// File name of the shared coupling set, next to the dataset.
    pub couplings: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_epsilon: Option<f64>,
}

/// One line of a predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: usize,
    pub beta: Vec<f64>,
}

/// Sidecar path holding the shared couplings of `dataset`.
pub fn couplings_path(dataset: &Path) -> PathBuf {
    let stem = dataset.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    dataset.with_file_name(format!("{stem}.couplings.json"))
}

/// Draws one coupling set and `count` random β vectors, optionally
/// right-multiplying each unitary by a random noise unitary.
pub fn gen_dataset(cfg: &ScenarioConfig) -> Result<(SharedCouplings, Vec<DatasetRecord>)> {
    let Experiment::GenDataset { count, noise_epsilon, .. } = &cfg.experiment else {
        return Err(HarnessError::Config(format!("expected a gen_dataset scenario, got {}", cfg.kind())));
    };
    let path = cfg.dataset_path().expect("gen_dataset scenario");
    let geom = cfg.geometry()?;
    let couplings = sample_couplings(&geom, &mut substream(cfg.seed, &[tag::INSTANCE]));
    let chip = Chip::new(geom.clone(), ControlModel::direct(), couplings.clone())?;
    let shared = SharedCouplings::new(&geom, &ChipParameters::uniform(&geom, vec![1.0; geom.modes()], couplings)?);
    let sidecar = couplings_path(&path).file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string();

    let records = (0..*count)
        .into_par_iter()
        .map(|id| {
            let mut rng = substream(cfg.seed, &[tag::RUN, id as u64]);
            let beta: Vec<f64> = (0..geom.modes()).map(|_| rng.random_range(BETA_RANGE.0..=BETA_RANGE.1)).collect();
            let mut u = chip.unitary(&beta)?;
            if let Some(eps) = noise_epsilon {
                u = u.mul(&random_unitary_noise(geom.modes(), *eps, &mut rng))?;
            }
            Ok(DatasetRecord {
                id,
                beta,
                unitary: UnitaryDoc::from(&u),
                couplings: sidecar.clone(),
                noise_epsilon: *noise_epsilon,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((shared, records))
}

pub fn write_dataset(path: &Path, shared: &SharedCouplings, records: &[DatasetRecord]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        io::ensure_dir(dir)?;
    }
    io::write_json(&couplings_path(path), shared)?;
    io::write_json_lines(path, records)
}

pub fn read_dataset(path: &Path) -> Result<(SharedCouplings, Vec<DatasetRecord>)> {
    let records: Vec<DatasetRecord> = io::read_json_lines(path)?;
    let sidecar = match records.first() {
        Some(r) => path.with_file_name(&r.couplings),
        None => couplings_path(path),
    };
    if records.iter().any(|r| path.with_file_name(&r.couplings) != sidecar) {
        return Err(HarnessError::Misaligned("records reference different coupling sets".into()));
    }
    Ok((io::read_json(&sidecar)?, records))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: usize,
    pub fidelity: f64,
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trained_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub trained: usize,
    pub reached: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub count: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_fidelity: f64,
    pub records: Vec<EvalRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chained: Option<ChainSummary>,
}

/// Scores predicted β against the dataset unitaries; optionally trains from
/// every successful prediction with `trainer`.
pub fn eval_warmstart(
    shared: &SharedCouplings,
    records: &[DatasetRecord],
    predictions: &[Prediction],
    trainer: Option<(&TrainerConfig, u64)>,
) -> Result<EvalResult> {
    if records.len() != predictions.len() {
        return Err(HarnessError::Misaligned(format!(
            "{} dataset records vs {} predictions",
            records.len(),
            predictions.len()
        )));
    }
    if let Some((r, p)) = records.iter().zip(predictions).find(|(r, p)| r.id != p.id) {
        return Err(HarnessError::Misaligned(format!("record id {} paired with prediction id {}", r.id, p.id)));
    }
    let chip = shared.chip()?;
    let evals = records
        .par_iter()
        .zip(predictions)
        .enumerate()
        .map(|(n, (rec, pred))| {
            let target = Unitary::try_from(&rec.unitary)?;
            let f = fidelity(&target, &chip.unitary(&pred.beta)?)?;
            let success = f > WARMSTART_FIDELITY;
            let trained_fidelity = match trainer {
                Some((cfg, master)) if success => {
                    let config = TrainerConfig { seed: run_seed(master, n), ..cfg.clone() };
                    Some(train(&chip, &target, &pred.beta, &config)?.final_fidelity)
                }
                _ => None,
            };
            Ok(EvalRecord { id: rec.id, fidelity: f, success, trained_fidelity })
        })
        .collect::<Result<Vec<_>>>()?;
    let count = evals.len();
    let successes = evals.iter().filter(|e| e.success).count();
    let chained = trainer.map(|_| {
        let trained = evals.iter().filter(|e| e.trained_fidelity.is_some()).count();
        let reached = evals.iter().filter(|e| e.trained_fidelity.is_some_and(|f| f > CHAINED_FIDELITY)).count();
        ChainSummary { trained, reached, fraction: if trained == 0 { 0.0 } else { reached as f64 / trained as f64 } }
    });
    Ok(EvalResult {
        count,
        successes,
        success_rate: if count == 0 { 0.0 } else { successes as f64 / count as f64 },
        mean_fidelity: if count == 0 { 0.0 } else { evals.iter().map(|e| e.fidelity).sum::<f64>() / count as f64 },
        records: evals,
        chained,
    })
}

/// Loads the files named by an `eval_warmstart` scenario and scores them.
pub fn eval_from_config(cfg: &ScenarioConfig) -> Result<EvalResult> {
    let Experiment::EvalWarmstart { predictions, dataset, chain_training } = &cfg.experiment else {
        return Err(HarnessError::Config(format!("expected an eval_warmstart scenario, got {}", cfg.kind())));
    };
    let (shared, records) = read_dataset(dataset)?;
    let preds: Vec<Prediction> = io::read_json_lines(predictions)?;
    let trainer = chain_training.then_some((&cfg.trainer, cfg.seed));
    eval_warmstart(&shared, &records, &preds, trainer)
}
