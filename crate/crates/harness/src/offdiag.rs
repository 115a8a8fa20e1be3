// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use ccwave::rng::{substream, tag};
use ccwave::trainer::{generate_instance, train, TrainerConfig};
use ccwave::unitary::fidelity;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohort::run_seed;
use crate::config::{Experiment, ScenarioConfig};
use crate::error::{HarnessError, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffdiagRow {
    pub run: usize,
    /// Target controls on the mis-estimated couplings vs. the true device.
    pub f_base: f64,
    /// Trained controls on the mis-estimated couplings vs. the true device.
    pub f_noise: f64,
    pub delta_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffdiagResult {
    pub delta_c: f64,
    pub rows: Vec<OffdiagRow>,
    pub mean_f_base: f64,
    pub mean_f_noise: f64,
    pub mean_delta_f: f64,
}

/// Trains with a forward model whose couplings are shifted by up to `±δC`
/// while the targets come from the true device.
pub fn offdiag_experiment(cfg: &ScenarioConfig) -> Result<OffdiagResult> {
    let Experiment::Offdiag { delta_c, start } = &cfg.experiment else {
        return Err(HarnessError::Config(format!("expected an offdiag scenario, got {}", cfg.kind())));
    };
    let geom = cfg.geometry()?;
    let model = cfg.control_model(&geom)?;
    let rows: Vec<OffdiagRow> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let seed = run_seed(cfg.seed, run);
            let mut rng = substream(seed, &[tag::INSTANCE]);
            let inst = generate_instance(&geom, &model, start, &mut rng)?;
            let shifted = inst.chip.parameters(&inst.target_controls)?.shift_couplings(*delta_c, &mut rng);
            let model_chip = inst.chip.with_couplings(shifted.couplings().clone())?;
            let f_base = fidelity(&inst.target_unitary, &model_chip.unitary(&inst.target_controls)?)?;
            let config = TrainerConfig { seed, ..cfg.trainer.clone() };
            let out = train(&model_chip, &inst.target_unitary, &inst.initial_controls, &config)?;
            let f_noise = out.final_fidelity;
            Ok(OffdiagRow { run, f_base, f_noise, delta_f: f_noise - f_base })
        })
        .collect::<Result<_>>()?;
    let mean = |f: fn(&OffdiagRow) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
    Ok(OffdiagResult {
        delta_c: *delta_c,
        mean_f_base: mean(|r| r.f_base),
        mean_f_noise: mean(|r| r.f_noise),
        mean_delta_f: mean(|r| r.delta_f),
        rows,
    })
}

pub fn write_offdiag(dir: &Path, result: &OffdiagResult) -> Result<()> {
    io::ensure_dir(dir)?;
    io::write_with(&dir.join("offdiag.csv"), |w| {
        use std::io::Write;
        writeln!(w, "run,f_base,f_noise,delta_f")?;
        for r in &result.rows {
            writeln!(w, "{},{},{},{}", r.run, r.f_base, r.f_noise, r.delta_f)?;
        }
        Ok(())
    })?;
    io::write_json(&dir.join("offdiag.json"), result)
}
