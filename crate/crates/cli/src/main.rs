use std::process::ExitCode;

use clap::Parser;
use noon_coherence_cli::args::Cli;

fn main() -> ExitCode {
    // Usage errors exit with 2 and --help/--version with 0.
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match noon_coherence_cli::configure_threads().and_then(|()| noon_coherence_cli::run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
