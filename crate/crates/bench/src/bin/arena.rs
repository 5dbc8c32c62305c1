use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use arena_bench::calibration::{calibrate_sigma, CalibrationTable};
use arena_bench::config::RunConfig;
use arena_bench::{export, protocols, replay, runner};
use clap::{Args, Parser, Subcommand};

/// Team-vs-team benchmark for the arena simulator.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Run config (TOML). Defaults apply when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override a config value, e.g. `--set episodes=2 --set model.mock.latency=1.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        Ok(match &self.config {
            Some(path) => RunConfig::load(path, &self.overrides)?,
            None => RunConfig::from_overrides(&self.overrides)?,
        })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Play every scenario × opponent × repeat and write a run folder.
    Run(ConfigArgs),
    /// Compute (or show cached) σ for every configured opponent.
    Calibrate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Recompute even when cached.
        #[arg(long)]
        force: bool,
    },
    /// Train against each opponent, checkpoint, then play every opponent once.
    Adapt(ConfigArgs),
    /// Self-play with periodic checkpoints evaluated against the built-ins.
    Selfplay(ConfigArgs),
    /// Re-run a recorded episode and compare it with the log.
    Replay {
        /// Run folder holding the episode.
        #[arg(long)]
        run: PathBuf,
        /// Episode id, e.g. `mushroom_war/tactics_vs_passive/r0/e3`.
        episode: String,
    },
    /// Rebuild the CSV, JSON and summary exports of a run folder.
    Export { run: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let config = args.load()?;
            let out = runner::run_benchmark(&config)?;
            print!("{}", export::summary_text(&out.report));
            println!("\n{} episodes written to {}", out.records.len(), out.folder.display());
            if !out.failures.is_empty() {
                for f in &out.failures {
                    eprintln!("failed: {}: {}", f.matchup, f.error);
                }
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Calibrate { config, force } => {
            let config = config.load()?;
            let mut table = CalibrationTable::load_or_default(&config.calibration_path())?;
            for &k in &config.scenarios {
                for blue in config.opponents_for(k) {
                    let entry = match table.get(k, &blue, &config) {
                        Some(e) if !force => e.clone(),
                        _ => {
                            let e = calibrate_sigma(k, &blue, &config)?;
                            table.insert(e.clone(), &config);
                            e
                        }
                    };
                    println!("{:<14} {:<12} sigma {:.3} over {} episodes", k.id(), blue.label(), entry.sigma, entry.episodes);
                }
            }
            table.save()?;
            println!("cache: {}", config.calibration_path().display());
        }
        Command::Adapt(args) => {
            let (dir, report) = protocols::run_adaptation(&args.load()?)?;
            print!("{}", report.to_csv());
            println!("written to {}", dir.display());
        }
        Command::Selfplay(args) => {
            let (dir, report) = protocols::run_selfplay(&args.load()?)?;
            print!("{}", report.checkpoints_csv());
            println!("written to {}", dir.display());
        }
        Command::Replay { run, episode } => {
            let out = replay::replay(&run, &episode)?;
            println!(
                "{}: recorded {}-{}, replayed {}-{} after {} episodes; record {}, events {}",
                out.id,
                out.recorded.0,
                out.recorded.1,
                out.replayed.0,
                out.replayed.1,
                out.episodes_played,
                if out.record_matches { "identical" } else { "DIFFERENT" },
                if out.events_match { "identical" } else { "DIFFERENT" },
            );
            if !out.identical() {
                bail!("replay diverged from the recorded episode");
            }
        }
        Command::Export { run } => {
            let report = export::export_run(&run)?;
            print!("{}", export::summary_text(&report));
        }
    }
    Ok(ExitCode::SUCCESS)
}
