use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand};

use nullgauge::cli;

#[derive(Parser)]
#[command(
    name = "nullgauge",
    version,
    about = "Lattice scalar electrodynamics in the unitary gauge"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by an INI config.
    Run {
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// `section.key=value`, applied after the file.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run a built-in check suite (majorana, cancellation, dirac-flow, all).
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Observed orders from three refinement levels of the same series.
    Converge {
        #[arg(num_args = 3, required = true)]
        csv: Vec<PathBuf>,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("NULLGAUGE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("NULLGAUGE_THREADS = {raw:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let code = match args.command {
        Command::Run {
            config,
            out,
            seed,
            overrides,
        } => cli::run_command(&config, out.as_deref(), seed, &overrides),
        Command::Verify { suite, seed } => cli::verify_command(&suite, seed),
        Command::Converge { csv } => cli::converge_command(&csv),
    };
    ExitCode::from(code as u8)
}
