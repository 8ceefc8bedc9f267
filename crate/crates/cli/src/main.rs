use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gausspacket_cli::{
    presets, run_config_file, run_config_text, CliError, RunOptions, RunSummary,
};

#[derive(Parser)]
#[command(
    name = "gausspacket",
    version,
    about = "Gaussian wave packet autocorrelation scenarios"
)]
struct Cli {
    /// Multiplies every comparison tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,

    /// Only report failures.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenarios of a config file.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a built-in scenario.
    Preset {
        name: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the built-in scenario names.
    ListPresets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let options = |out: PathBuf| RunOptions {
        out_dir: out,
        tolerance_scale: cli.tolerance_scale,
        quiet: cli.quiet,
    };
    let result = match cli.command {
        Command::ListPresets => {
            for name in presets::names() {
                println!("{name}");
            }
            return ExitCode::SUCCESS;
        }
        Command::Run {
            ref config,
            ref out,
        } => run_config_file(config, &options(out.clone())),
        Command::Preset { ref name, ref out } => match presets::preset(name) {
            Some(text) => run_config_text(text, &options(out.clone())),
            None => Err(CliError::Config(format!(
                "unknown preset `{name}` (try `list-presets`)"
            ))),
        },
    };
    ExitCode::from(exit_code(result) as u8)
}

fn exit_code(result: Result<RunSummary, CliError>) -> i32 {
    match result {
        Ok(summary) => {
            for s in summary.scenarios.iter().filter(|s| !s.passed()) {
                let report = s
                    .artifacts
                    .iter()
                    .find(|p| p.to_string_lossy().ends_with(".report.json"));
                match report {
                    Some(p) => eprintln!("{}: checks failed, see {}", s.name, p.display()),
                    None => eprintln!("{}: checks failed", s.name),
                }
            }
            summary.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
