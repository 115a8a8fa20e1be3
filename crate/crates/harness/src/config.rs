// SPDX-License-Identifier: Apache-2.0

//! Scenario files: one JSON document per experiment.

use std::path::{Path, PathBuf};

use ccwave::chip::{ChipGeometry, ControlModel, TriangularControl};
use ccwave::trainer::{StartPolicy, TrainerConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    Planar { modes: usize },
    /// The 32-mode four-row triangular lattice.
    Triangular,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    /// One trainable β per mode.
    #[default]
    Direct,
    /// Resistor drives with thermal cross-talk, segmented triangular chip only.
    Mesh,
}

/// Threshold used to discard stuck runs from cohort statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscardRule {
    /// Flag runs whose trailing loss exceeds this multiple of the cohort median.
    pub median_factor: f64,
    /// Fixed threshold; takes precedence over `median_factor` when set.
    pub absolute: Option<f64>,
}

impl Default for DiscardRule {
    fn default() -> Self {
        DiscardRule { median_factor: 2.5, absolute: None }
    }
}

/// Which parameters stay at their target values during a landscape sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandscapeContext {
    #[default]
    Target,
    /// Other parameters at a generated starting point.
    Start,
}

fn default_window() -> StartPolicy {
    StartPolicy::window(0.68, 0.72)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Unitary and output statistics of one device.
    Simulate {
        /// Chip document to load; a target is drawn from the seed when absent.
        #[serde(default)]
        chip: Option<PathBuf>,
        /// 1-based input modes, e.g. `[[1], [1, 2]]`; all inputs when absent.
        #[serde(default)]
        inputs: Option<Vec<Vec<usize>>>,
        /// Report sampled counts instead of exact probabilities.
        #[serde(default)]
        shots: Option<u64>,
    },
    TrainCohort {
        #[serde(default = "default_window")]
        start: StartPolicy,
        #[serde(default)]
        discard: DiscardRule,
    },
    Landscape {
        /// 1-based index of the swept parameter.
        parameter: usize,
        /// Number of sweep points.
        resolution: usize,
        /// Half-width of the sweep around the midpoint; 0.6 when absent.
        #[serde(default)]
        span: Option<f64>,
        #[serde(default)]
        context: LandscapeContext,
        #[serde(default = "default_window")]
        start: StartPolicy,
    },
    Offdiag {
        delta_c: f64,
        #[serde(default = "default_window")]
        start: StartPolicy,
    },
    Geodesic {
        steps: usize,
        #[serde(default = "random_start")]
        start: StartPolicy,
    },
    GenDataset {
        count: usize,
        #[serde(default)]
        noise_epsilon: Option<f64>,
        /// File name under `output_dir`.
        #[serde(default = "default_dataset_file")]
        file: String,
    },
    EvalWarmstart {
        predictions: PathBuf,
        dataset: PathBuf,
        /// Train every successful prediction and report how many reach 0.98.
        #[serde(default)]
        chain_training: bool,
    },
}

fn default_dataset_file() -> String {
    "dataset.jsonl".into()
}

fn random_start() -> StartPolicy {
    StartPolicy::Random
}

fn one() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub control: ControlKind,
    #[serde(default = "one")]
    pub runs: usize,
    /// Per-run settings. Its `seed` is replaced by the derived run seed.
    #[serde(default)]
    pub trainer: TrainerConfig,
    pub experiment: Experiment,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Master seed.
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: ScenarioConfig = crate::io::read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(HarnessError::Config("runs must be at least 1".into()));
        }
        if let (GeometrySpec::Planar { .. }, ControlKind::Mesh) = (self.geometry, self.control) {
            return Err(HarnessError::Config("mesh control needs the triangular layout".into()));
        }
        self.trainer.validate()?;
        match &self.experiment {
            Experiment::Landscape { parameter: 0, .. } => {
                return Err(HarnessError::Config("landscape parameter is 1-based".into()))
            }
            Experiment::Landscape { resolution, .. } if *resolution < 2 => {
                return Err(HarnessError::Config("landscape resolution must be at least 2".into()))
            }
            Experiment::Geodesic { steps: 0, .. } => {
                return Err(HarnessError::Config("geodesic steps must be at least 1".into()))
            }
            Experiment::GenDataset { count: 0, .. } => {
                return Err(HarnessError::Config("dataset count must be at least 1".into()))
            }
            Experiment::GenDataset { .. } if self.control == ControlKind::Mesh => {
                return Err(HarnessError::Config("datasets are defined for direct control only".into()))
            }
            Experiment::Offdiag { delta_c, .. } if delta_c.is_nan() || *delta_c < 0.0 => {
                return Err(HarnessError::Config("delta_c must be non-negative".into()))
            }
            _ => {}
        }
        self.geometry()?;
        Ok(())
    }

    pub fn geometry(&self) -> Result<ChipGeometry> {
        Ok(match (self.geometry, self.control) {
            (GeometrySpec::Planar { modes }, _) => ChipGeometry::planar(modes)?,
            (GeometrySpec::Triangular, ControlKind::Direct) => ChipGeometry::triangular(TriangularControl::Direct),
            (GeometrySpec::Triangular, ControlKind::Mesh) => ChipGeometry::triangular(TriangularControl::MultiPhase),
        })
    }

    /// Dataset path of a `gen_dataset` scenario.
    pub fn dataset_path(&self) -> Option<PathBuf> {
        match &self.experiment {
            Experiment::GenDataset { file, .. } => Some(self.output_dir.join(file)),
            _ => None,
        }
    }

    pub fn control_model(&self, geom: &ChipGeometry) -> Result<ControlModel> {
        Ok(match self.control {
            ControlKind::Direct => ControlModel::direct(),
            ControlKind::Mesh => ControlModel::mesh(geom)?,
        })
    }

    /// Short name of the experiment kind, as used by the CLI verbs.
    pub fn kind(&self) -> &'static str {
        match self.experiment {
            Experiment::Simulate { .. } => "simulate",
            Experiment::TrainCohort { .. } => "train_cohort",
            Experiment::Landscape { .. } => "landscape",
            Experiment::Offdiag { .. } => "offdiag",
            Experiment::Geodesic { .. } => "geodesic",
            Experiment::GenDataset { .. } => "gen_dataset",
            Experiment::EvalWarmstart { .. } => "eval_warmstart",
        }
    }
}
