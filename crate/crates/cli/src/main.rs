use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nuwalk_cli::commands::{
    check_table, embed_dump, kraus_dump, kraus_family, simulate, summary, validate,
};
use nuwalk_cli::format::{series_csv, write_atomic};
use nuwalk_cli::{CliError, CliResult, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "nuwalk",
    version,
    about = "Neutrino flavor oscillations as reduced quantum-walk dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write the probability series as CSV.
    Simulate {
        config: PathBuf,
        /// Overrides the config's `output` key; `-` writes to standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the oracle-equivalence checks for a scenario.
    Validate {
        config: PathBuf,
        #[arg(long, hide = true)]
        corrupt_coin: bool,
    },
    /// Dump the Kraus operators after `t` steps.
    Kraus {
        config: PathBuf,
        #[arg(long)]
        t: usize,
        /// Dump the family extended over the configured initial position.
        #[arg(long)]
        extended: bool,
    },
    /// Dump the three-qubit mixing factors and their product.
    Embed { config: PathBuf },
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => write_atomic(p, text),
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { config, output } => {
            let cfg = ScenarioConfig::load(&config)?;
            let sim = simulate(&cfg)?;
            let csv = series_csv(&sim.series, sim.entropy.as_deref());
            let target = output.or_else(|| cfg.output.clone());
            let to_stdout = target.as_deref().is_none_or(|p| p == Path::new("-"));
            emit(target.as_deref(), &csv)?;
            let text = summary(&sim, cfg.energy_model);
            if to_stdout {
                eprint!("{text}");
            } else {
                print!("{text}");
                println!(
                    "wrote {} ({} rows)",
                    target.unwrap().display(),
                    sim.series.rows.len()
                );
            }
            Ok(())
        }
        Command::Validate {
            config,
            corrupt_coin,
        } => {
            let cfg = ScenarioConfig::load(&config)?;
            let checks = validate(&cfg, corrupt_coin)?;
            print!("{}", check_table(&checks));
            if checks.iter().all(|c| c.passed()) {
                Ok(())
            } else {
                Err(CliError::ValidationFailed)
            }
        }
        Command::Kraus {
            config,
            t,
            extended,
        } => {
            let cfg = ScenarioConfig::load(&config)?;
            let fam = kraus_family(&cfg, t, extended)?;
            print!("{}", kraus_dump(&fam, &cfg.coin_angles()?, extended));
            Ok(())
        }
        Command::Embed { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            print!("{}", embed_dump(&cfg)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nuwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
