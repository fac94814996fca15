use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use barforest::runner::{self, RunManifest};
use barforest::{io, report, synth, RunConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "barforest", version, about = "Minute-bar random-forest backtests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic bars.csv and rates.csv
    Synth {
        #[command(flatten)]
        common: Common,
    },
    /// Export each model's feature matrix as CSV
    Features {
        #[command(flatten)]
        common: Common,
    },
    /// Fit the forests and save them
    Train {
        #[command(flatten)]
        common: Common,
    },
    /// Simulate trading with previously trained forests
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Build comparison tables from a finished run
    Report {
        #[command(flatten)]
        common: Common,
    },
    /// Train, simulate and report every model
    RunAll {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// JSON config file; defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Minute bars CSV
    #[arg(long)]
    bars: Option<PathBuf>,
    /// Treasury yields CSV (`date,yield` in percent)
    #[arg(long)]
    rates: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Overrides the forest seed (and the generator seed for `synth`)
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated model names
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
}

impl Common {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::load_or_default(self.config.as_deref())?;
        if let Some(seed) = self.seed {
            cfg.experiment.forest.random_seed = seed;
            cfg.synth.seed = seed;
        }
        Ok(cfg)
    }

    fn bars(&self) -> anyhow::Result<&Path> {
        match &self.bars {
            Some(p) => Ok(p),
            None => bail!(barforest::Error::Config("--bars is required".into())),
        }
    }

    fn inputs(&self, cfg: &RunConfig) -> anyhow::Result<runner::Inputs> {
        Ok(runner::load_inputs(self.bars()?, self.rates.as_deref(), cfg)?)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Synth { common } => {
            let cfg = common.config()?;
            let data = synth::generate(&cfg.synth, &cfg.symbol)?;
            std::fs::create_dir_all(&common.out)
                .with_context(|| format!("creating {}", common.out.display()))?;
            io::write_bars(&common.out.join("bars.csv"), &data.bars)?;
            io::write_rates(&common.out.join("rates.csv"), &data.yields)?;
            println!("wrote {} bars to {}", data.bars.len(), common.out.display());
        }
        Command::Features { common } => {
            let cfg = common.config()?;
            let inputs = common.inputs(&cfg)?;
            let models = cfg.select_models(common.models.as_deref())?;
            for p in runner::export_features(&inputs, &models, &cfg.experiment, &common.out)? {
                println!("{}", p.display());
            }
        }
        Command::Train { common } => {
            let cfg = common.config()?;
            let inputs = common.inputs(&cfg)?;
            let models = cfg.select_models(common.models.as_deref())?;
            runner::train(&inputs, &models, &cfg.experiment, &common.out)?;
            println!("trained {} models into {}", models.len(), common.out.display());
        }
        Command::Simulate { common } => {
            let cfg = common.config()?;
            let inputs = common.inputs(&cfg)?;
            let models = cfg.select_models(common.models.as_deref())?;
            runner::simulate(&inputs, &models, &cfg.experiment, &common.out)?;
            write_manifest(&common, &cfg, models)?;
            println!("simulated models into {}", common.out.display());
        }
        Command::Report { common } => {
            let r = report::build(&common.out)?;
            print!("{}", r.render());
        }
        Command::RunAll { common } => {
            let cfg = common.config()?;
            let inputs = common.inputs(&cfg)?;
            let models = cfg.select_models(common.models.as_deref())?;
            let manifest = manifest(&common, &cfg, models)?;
            let summary = runner::run_all(&inputs, &manifest)?;
            if !summary.failures.is_empty() {
                let names: Vec<&str> = summary.failures.iter().map(|f| f.0.as_str()).collect();
                bail!("{} model(s) failed: {}", names.len(), names.join(", "));
            }
            let r = report::build(&common.out)?;
            print!("{}", r.render());
        }
    }
    Ok(())
}

fn manifest(
    common: &Common,
    cfg: &RunConfig,
    models: Vec<barforest_core::experiment::ModelConfig>,
) -> anyhow::Result<RunManifest> {
    Ok(RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        bars: common.bars()?.to_path_buf(),
        rates: common.rates.clone(),
        out: common.out.clone(),
        split_ratio: cfg.experiment.split_ratio,
        seed: cfg.experiment.forest.random_seed,
        models,
        config: cfg.clone(),
    })
}

fn write_manifest(
    common: &Common,
    cfg: &RunConfig,
    models: Vec<barforest_core::experiment::ModelConfig>,
) -> anyhow::Result<()> {
    let m = manifest(common, cfg, models)?;
    io::write_json(&common.out.join("manifest.json"), &m)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e
                .downcast_ref::<barforest::Error>()
                .map_or("error", barforest::Error::kind);
            let body = serde_json::json!({
                "error": { "kind": kind, "message": format!("{e:#}") }
            });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
