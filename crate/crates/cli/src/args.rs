//! Flags, and their JSON config-file equivalents.
//!
//! A config file holds the same keys as the flags of the chosen subcommand
//! (snake_case) plus `output`, `format` and `precision`. Flags given on the
//! command line take precedence over the file; unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noon_coherence::states::StateRecipe;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::lists::{OrderList, TimeList, ValueList};

#[derive(Debug, Parser)]
#[command(
    name = "noon-coherence",
    version,
    about = "Higher-order quantum coherence of two-mode bosonic states",
    long_about = "Computes coherence spectra, catness fidelities and their measurable bounds for \
                  lossy NOON states, beam-splitter outputs and two-well Josephson dynamics; \
                  simulates fringe scans; and checks spin-squeezing data for two-atom coherence.\n\n\
                  Exit codes: 0 success, 2 invalid input, 3 numerical failure.\n\
                  NOON_COHERENCE_THREADS caps the worker threads."
)]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputArgs {
    /// JSON file supplying this command's options; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Output file; further tables go to sibling files named `<stem>.<table>.<ext>`.
    /// Defaults to stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Output format (csv by default, json for `infer`).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Significant digits for floating-point output [default: 12].
    #[arg(long, global = true, value_name = "DIGITS")]
    pub precision: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lossy NOON state: number-difference distribution and C_n, c_n versus transmission.
    Attenuate(AttenuateArgs),
    /// Beam-splitter output state, optionally after loss: C_n and c_n versus order.
    Splitter(SplitterArgs),
    /// Two-well Josephson evolution of a number state: P(m), <Jz> and c_n versus time.
    Dynamics(DynamicsArgs),
    /// Binned count probability versus interferometer phase and its Fourier spectrum.
    Fringes(FringesArgs),
    /// Squeezing parameter, coherence-order bound and two-atom coherence inference from spin data.
    Infer(InferArgs),
}

/// State description as JSON, e.g. `{"kind": "embedded_cat", "n": 20, "n_l": 4}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(transparent)]
pub struct StateArg(pub StateRecipe);

impl FromStr for StateArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        serde_json::from_str(s).map(StateArg).map_err(|e| format!("invalid state recipe: {e}"))
    }
}

/// Fills every unset field of `self` from `file`.
pub trait Merge {
    fn merge(self, file: Self) -> Self;
}

macro_rules! merge_fields {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl Merge for $ty {
            fn merge(self, file: Self) -> Self {
                Self { $($field: self.$field.or(file.$field)),* }
            }
        }
    };
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttenuateArgs {
    /// Total number N of the NOON state.
    #[arg(long)]
    pub n: Option<usize>,
    /// Transmissions η: a value, a list `0.2,0.5`, or a range `0..1:11`.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<ValueList>,
    /// Coherence orders, e.g. `1..5` or `2,5` [default: 1..N].
    #[arg(long)]
    pub orders: Option<OrderList>,
    /// Relative phase φ of the NOON state [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub phase: Option<f64>,
}
merge_fields!(AttenuateArgs { n, eta, orders, phase });

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitterArgs {
    /// Total number N entering the beam splitter.
    #[arg(long)]
    pub n: Option<usize>,
    /// Transmission of both output modes [default: no loss].
    #[arg(long)]
    pub eta: Option<f64>,
    /// Coherence orders [default: 1..N].
    #[arg(long)]
    pub orders: Option<OrderList>,
}
merge_fields!(SplitterArgs { n, eta, orders });

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsArgs {
    /// Total number N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Interaction strength g.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<f64>,
    /// Initial quanta in well b; the rest start in well a [default: 0].
    #[arg(long)]
    pub nl: Option<usize>,
    /// Tunnelling strength κ [default: 1].
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Coherence orders [default: 1..N].
    #[arg(long)]
    pub orders: Option<OrderList>,
    /// Times, e.g. `0,T/6,T/3` or `0..T/2:201`, with T the tunnelling period.
    #[arg(long)]
    pub times: Option<TimeList>,
    /// Samples in the scan that validates the period estimate [default: 4096].
    #[arg(long)]
    pub scan_samples: Option<usize>,
    /// Scan length in periods [default: 5].
    #[arg(long)]
    pub scan_window: Option<f64>,
}
merge_fields!(DynamicsArgs { n, g, nl, kappa, orders, times, scan_samples, scan_window });

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FringesArgs {
    /// State recipe as JSON, e.g. `{"kind": "noon", "n": 3}`.
    #[arg(long)]
    pub state: Option<StateArg>,
    /// Bin threshold M: the scan records P(n_c ≥ M).
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of phases K, a power of two [default: 64].
    #[arg(long)]
    pub k: Option<usize>,
}
merge_fields!(FringesArgs { state, m, k });

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferArgs {
    /// CSV with columns mean_n, jx, jy, jz, jy_var, jz_var and optional label.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Allowed |<Jy>|, |<Jz>| in units of sqrt(N) [default: 0.05].
    #[arg(long)]
    pub mean_tolerance: Option<f64>,
}
merge_fields!(InferArgs { data, mean_tolerance });

/// Output settings after merging flags and config.
#[derive(Debug, Clone)]
pub struct OutputSettings {
    pub output: Option<PathBuf>,
    pub format: Format,
    pub precision: usize,
}

pub const DEFAULT_PRECISION: usize = 12;

fn read_config(path: &Path) -> CliResult<serde_json::Map<String, serde_json::Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(serde_json::Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Validation(format!("config {} must be a JSON object", path.display()))),
        Err(e) => Err(CliError::Validation(format!("config {}: {e}", path.display()))),
    }
}

fn from_map<T: DeserializeOwned>(map: serde_json::Map<String, serde_json::Value>, what: &str) -> CliResult<T> {
    serde_json::from_value(serde_json::Value::Object(map))
        .map_err(|e| CliError::Validation(format!("config {what}: {e}")))
}

/// Applies the config file, if any, to the subcommand and output flags.
pub fn resolve<T: Merge + Default + DeserializeOwned>(
    output: OutputArgs,
    args: T,
    default_format: Format,
) -> CliResult<(OutputSettings, T)> {
    let (file_output, file_args) = match &output.config {
        Some(path) => {
            let mut map = read_config(path)?;
            let mut common = serde_json::Map::new();
            for key in ["output", "format", "precision"] {
                if let Some(v) = map.remove(key) {
                    common.insert(key.to_string(), v);
                }
            }
            (from_map::<OutputArgs>(common, "output settings")?, from_map::<T>(map, "parameters")?)
        }
        None => (OutputArgs::default(), T::default()),
    };
    let precision = output.precision.or(file_output.precision).unwrap_or(DEFAULT_PRECISION);
    if !(1..=17).contains(&precision) {
        return Err(CliError::Validation(format!("precision must be between 1 and 17 (got {precision})")));
    }
    let settings = OutputSettings {
        output: output.output.or(file_output.output),
        format: output.format.or(file_output.format).unwrap_or(default_format),
        precision,
    };
    Ok((settings, args.merge(file_args)))
}

/// Unwraps a required option, naming the flag when missing.
pub fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Validation(format!("missing required option --{flag}")))
}
