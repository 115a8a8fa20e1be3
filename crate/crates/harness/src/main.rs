// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use ccwave_harness::{execute, HarnessError, ScenarioConfig, Verb};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ccwave", version, about = "Simulate and train continuously coupled waveguide chips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the one in the scenario file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir` in the scenario file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Unitary and output statistics of one device.
    Simulate(Common),
    /// Train a single instance.
    Train(Common),
    /// Train a cohort of independent instances.
    Cohort(Common),
    /// Single-parameter loss landscape.
    Landscape(Common),
    /// Training with mis-estimated couplings.
    Offdiag(Common),
    /// Staged training along a unitary geodesic.
    Geodesic(Common),
    /// Write a JSON-lines dataset of random unitaries.
    GenDataset(Common),
    /// Score predicted starting points against a dataset.
    EvalWarmstart(Common),
}

fn fail(err: &HarnessError) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&err.report()).expect("serializable"));
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail(&HarnessError::Usage(e.to_string().trim().to_string())),
    };
    let (verb, common) = match cli.command {
        Command::Simulate(c) => (Verb::Simulate, c),
        Command::Train(c) => (Verb::Train, c),
        Command::Cohort(c) => (Verb::Cohort, c),
        Command::Landscape(c) => (Verb::Landscape, c),
        Command::Offdiag(c) => (Verb::Offdiag, c),
        Command::Geodesic(c) => (Verb::Geodesic, c),
        Command::GenDataset(c) => (Verb::GenDataset, c),
        Command::EvalWarmstart(c) => (Verb::EvalWarmstart, c),
    };
    let run = || -> Result<serde_json::Value, HarnessError> {
        let mut cfg = ScenarioConfig::load(&common.config)?;
        if let Some(seed) = common.seed {
            cfg.seed = seed;
        }
        if let Some(out) = common.out {
            cfg.output_dir = out;
        }
        execute(verb, &cfg)
    };
    match run() {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
