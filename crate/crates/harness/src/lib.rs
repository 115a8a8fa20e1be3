// SPDX-License-Identifier: Apache-2.0

//! Scenario runner for the `ccwave` simulator.
//!
//! A scenario is a JSON file naming a geometry, a control model, trainer
//! settings and one experiment. [`execute`] runs it, writes its output files
//! under `output_dir` and returns a short JSON summary.

pub mod cohort;
pub mod config;
pub mod dataset;
mod error;
pub mod geodesic;
pub mod io;
pub mod landscape;
pub mod offdiag;
pub mod simulate;

use serde_json::{json, Value};

pub use config::ScenarioConfig;
pub use error::{ErrorReport, HarnessError, Result};

/// Command-line verbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Simulate,
    Train,
    Cohort,
    Landscape,
    Offdiag,
    Geodesic,
    GenDataset,
    EvalWarmstart,
}

impl Verb {
    /// Experiment kind a scenario must declare to be run by this verb.
    pub fn kind(self) -> &'static str {
        match self {
            Verb::Simulate => "simulate",
            Verb::Train | Verb::Cohort => "train_cohort",
            Verb::Landscape => "landscape",
            Verb::Offdiag => "offdiag",
            Verb::Geodesic => "geodesic",
            Verb::GenDataset => "gen_dataset",
            Verb::EvalWarmstart => "eval_warmstart",
        }
    }
}

/// Runs `cfg` with `verb`, writing outputs, and returns a summary.
pub fn execute(verb: Verb, cfg: &ScenarioConfig) -> Result<Value> {
    cfg.validate()?;
    if verb.kind() != cfg.kind() {
        return Err(HarnessError::Config(format!(
            "verb expects a {} scenario but the file declares {}",
            verb.kind(),
            cfg.kind()
        )));
    }
    let dir = cfg.output_dir.as_path();
    Ok(match verb {
        Verb::Simulate => {
            let r = simulate::simulate(cfg)?;
            simulate::write_simulation(dir, &r)?;
            json!({"modes": r.chip.m, "unitarity_error": r.unitarity_error, "inputs": r.records.len()})
        }
        Verb::Train => {
            let out = cohort::run_single(cfg, 0)?;
            io::ensure_dir(dir)?;
            cohort::write_run(dir, "trajectory", &out)?;
            serde_json::to_value(ccwave::trainer::RunSummary::new(&out.outcome, &out.config)).expect("serializable")
        }
        Verb::Cohort => {
            let (result, outputs) = cohort::run_cohort(cfg)?;
            cohort::write_cohort(dir, &result, &outputs)?;
            json!({
                "runs": result.runs.len(),
                "discarded": result.discarded,
                "mean_fidelity": result.mean_fidelity,
                "min_fidelity": result.min_fidelity,
            })
        }
        Verb::Landscape => {
            let r = landscape::loss_landscape(cfg)?;
            landscape::write_landscape(dir, &r)?;
            json!({"parameter": r.parameter, "points": r.points.len(), "argmin_shift": r.argmin_shift})
        }
        Verb::Offdiag => {
            let r = offdiag::offdiag_experiment(cfg)?;
            offdiag::write_offdiag(dir, &r)?;
            json!({"delta_c": r.delta_c, "mean_f_base": r.mean_f_base, "mean_f_noise": r.mean_f_noise, "mean_delta_f": r.mean_delta_f})
        }
        Verb::Geodesic => {
            let r = geodesic::geodesic_experiment(cfg)?;
            geodesic::write_geodesic(dir, &r)?;
            json!({"steps": r.steps, "runs": r.runs.len(), "success_rate": r.success_rate})
        }
        Verb::GenDataset => {
            let (shared, records) = dataset::gen_dataset(cfg)?;
            let path = cfg.dataset_path().expect("kind checked");
            dataset::write_dataset(&path, &shared, &records)?;
            json!({"records": records.len(), "path": path, "couplings": dataset::couplings_path(&path)})
        }
        Verb::EvalWarmstart => {
            let r = dataset::eval_from_config(cfg)?;
            io::ensure_dir(dir)?;
            io::write_json(&dir.join("eval.json"), &r)?;
            json!({"count": r.count, "success_rate": r.success_rate, "mean_fidelity": r.mean_fidelity, "chained": r.chained})
        }
    })
}
