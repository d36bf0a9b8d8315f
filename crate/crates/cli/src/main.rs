use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use finbath_cli::{emit, load_config, run_scenario, CliError, Format, Overrides, Scenario};

#[derive(Parser)]
#[command(name = "finbath", version, about = "Entropy production with finite baths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file and write its tables.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Check a config file and print it with all defaults filled in.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// List the available scenarios.
    ListScenarios,
}

#[derive(Args)]
struct OverrideArgs {
    /// Directory for output files (overrides output.directory).
    #[arg(long)]
    output_dir: Option<String>,
    /// RNG seed (overrides seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Output formats, comma separated (overrides output.formats).
    #[arg(long, value_delimiter = ',', value_enum)]
    format: Option<Vec<Format>>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides { output_dir: a.output_dir, seed: a.seed, formats: a.format }
    }
}

fn run(config: &Path, overrides: &Overrides) -> Result<(), CliError> {
    let cfg = load_config(config, overrides)?;
    let out = run_scenario(&cfg)?;
    let dir = PathBuf::from(cfg.output_directory());
    for path in emit(&cfg, &out, &dir, &cfg.formats())? {
        println!("{}", path.display());
    }
    Ok(())
}

fn validate(config: &Path, overrides: &Overrides) -> Result<(), CliError> {
    let cfg = load_config(config, overrides)?;
    println!("{}", serde_json::to_string_pretty(&cfg.to_json()).expect("config serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, overrides } => run(&config, &overrides.into()),
        Command::Validate { config, overrides } => validate(&config, &overrides.into()),
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<24}{}", s.name(), s.description());
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
