//! Command-line front end for `noon-coherence`.

pub mod args;
pub mod commands;
pub mod error;
pub mod lists;
pub mod report;

use args::{resolve, Cli, Command, Format};
pub use error::{CliError, CliResult};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "NOON_COHERENCE_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Validation(format!("{THREADS_ENV} must be a positive integer (got '{raw}')")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot size thread pool: {e}")))
}

/// Runs one parsed command and writes its output.
pub fn run(cli: Cli) -> CliResult<()> {
    let output = cli.output;
    let (settings, report) = match cli.command {
        Command::Attenuate(a) => {
            let (s, a) = resolve(output, a, Format::Csv)?;
            (s, commands::attenuate(a)?)
        }
        Command::Splitter(a) => {
            let (s, a) = resolve(output, a, Format::Csv)?;
            (s, commands::splitter(a)?)
        }
        Command::Dynamics(a) => {
            let (s, a) = resolve(output, a, Format::Csv)?;
            (s, commands::dynamics(a)?)
        }
        Command::Fringes(a) => {
            let (s, a) = resolve(output, a, Format::Csv)?;
            (s, commands::fringes(a)?)
        }
        Command::Infer(a) => {
            let (s, a) = resolve(output, a, Format::Json)?;
            (s, commands::infer(a)?)
        }
    };
    report::emit(&report, &settings)?;
    for note in &report.notes {
        eprintln!("{note}");
    }
    Ok(())
}
