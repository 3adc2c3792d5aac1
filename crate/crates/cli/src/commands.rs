//! The five subcommands, each producing a [`Report`].

use std::path::Path;

use noon_coherence::channels::{apply_loss, LossSetting};
use noon_coherence::coherence::{CoherenceReport, DEFAULT_SUPPORT_THRESHOLD};
use noon_coherence::dynamics::{JosephsonSystem, ScanSettings};
use noon_coherence::interferometry::binned_probability_scan;
use noon_coherence::squeezing::{
    coherence_bound, infer_two_atom_coherence, spread_lower_bound, squeeze_parameter, SqueezeData,
    SqueezeNormalization, DEFAULT_MEAN_TOLERANCE,
};
use noon_coherence::states::{make_binomial_splitter, make_noon, make_number_pair};
use noon_coherence::{Error, TwoModeState};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{required, AttenuateArgs, DynamicsArgs, FringesArgs, InferArgs, SplitterArgs};
use crate::error::{CliError, CliResult};
use crate::report::{Cell, Report, Table};

const COHERENCE_COLUMNS: [&str; 7] = ["n", "C_n", "c_n", "moment_abs", "norm", "S", "delta"];

fn orders_or_all(orders: Option<Vec<usize>>, n: usize) -> CliResult<Vec<usize>> {
    let orders = orders.unwrap_or_else(|| (1..=n).collect());
    if orders.is_empty() {
        return Err(CliError::Validation("at least one coherence order is required".into()));
    }
    if let Some(&bad) = orders.iter().find(|&&o| o == 0) {
        return Err(CliError::Validation(format!("coherence orders must be ≥ 1 (got {bad})")));
    }
    Ok(orders)
}

fn positive_n(n: usize) -> CliResult<usize> {
    if n == 0 {
        return Err(CliError::Validation("--n must be ≥ 1".into()));
    }
    Ok(n)
}

/// Rows `n, C_n, c_n, |moment|, 𝒩, S, δ`, prefixed by `lead`.
fn coherence_rows(report: &CoherenceReport, lead: &[Cell]) -> Vec<Vec<Cell>> {
    report
        .orders
        .iter()
        .map(|o| {
            let mut row = lead.to_vec();
            row.extend([
                Cell::from(o.order),
                Cell::from(o.fidelity),
                Cell::from(o.bound),
                Cell::from(o.moment_re.hypot(o.moment_im)),
                Cell::from(o.norm),
                Cell::from(o.s.map(|s| s.s)),
                Cell::from(report.delta),
            ]);
            row
        })
        .collect()
}

pub fn attenuate(args: AttenuateArgs) -> CliResult<Report> {
    let n = positive_n(required(args.n, "n")?)?;
    let etas = required(args.eta, "eta")?.0;
    let orders = orders_or_all(args.orders.map(|o| o.0), n)?;
    let phase = args.phase.unwrap_or(0.0);
    let rho = make_noon(n, phase)?.to_density_matrix();

    let per_eta: Vec<(CoherenceReport, Vec<(i64, f64)>)> = etas
        .par_iter()
        .map(|&eta| {
            let lossy = apply_loss(&rho, LossSetting::symmetric(eta)?)?;
            let report = CoherenceReport::mixed(&lossy, &orders, DEFAULT_SUPPORT_THRESHOLD)?;
            let dist = lossy.number_distribution();
            let full = (-(n as i64)..=n as i64).map(|j| (j, dist.get(&j).copied().unwrap_or(0.0))).collect();
            Ok((report, full))
        })
        .collect::<Result<_, Error>>()?;

    let mut columns = vec!["eta"];
    columns.extend(COHERENCE_COLUMNS);
    let mut coherence = Table::new("coherence", &columns);
    let mut distribution = Table::new("distribution", &["eta", "two_jz", "probability"]);
    for (&eta, (report, dist)) in etas.iter().zip(&per_eta) {
        for row in coherence_rows(report, &[Cell::from(eta)]) {
            coherence.push(row);
        }
        for &(j, p) in dist {
            distribution.push(vec![Cell::from(eta), Cell::from(j), Cell::from(p)]);
        }
    }
    let mut out = Report::new("attenuate");
    out.meta("n", n);
    out.meta("phase", phase);
    out.meta("support_threshold", DEFAULT_SUPPORT_THRESHOLD);
    out.tables = vec![coherence, distribution];
    Ok(out)
}

pub fn splitter(args: SplitterArgs) -> CliResult<Report> {
    let n = positive_n(required(args.n, "n")?)?;
    let orders = orders_or_all(args.orders.map(|o| o.0), n)?;
    let state = make_binomial_splitter(n)?;
    let report = match args.eta {
        None => CoherenceReport::pure(&state, &orders, DEFAULT_SUPPORT_THRESHOLD)?,
        Some(eta) => {
            let lossy = apply_loss(&state.to_density_matrix(), LossSetting::symmetric(eta)?)?;
            CoherenceReport::mixed(&lossy, &orders, DEFAULT_SUPPORT_THRESHOLD)?
        }
    };
    let mut table = Table::new("coherence", &COHERENCE_COLUMNS);
    for row in coherence_rows(&report, &[]) {
        table.push(row);
    }
    let mut out = Report::new("splitter");
    out.meta("n", n);
    out.meta("eta", args.eta);
    out.meta("support_threshold", DEFAULT_SUPPORT_THRESHOLD);
    out.tables = vec![table];
    Ok(out)
}

pub fn dynamics(args: DynamicsArgs) -> CliResult<Report> {
    let n = positive_n(required(args.n, "n")?)?;
    let g = required(args.g, "g")?;
    let times = required(args.times, "times")?;
    let n_l = args.nl.unwrap_or(0);
    let kappa = args.kappa.unwrap_or(1.0);
    let orders = orders_or_all(args.orders.map(|o| o.0), n)?;
    let defaults = ScanSettings::default();
    let scan = ScanSettings {
        window_periods: args.scan_window.unwrap_or(defaults.window_periods),
        samples: args.scan_samples.unwrap_or(defaults.samples),
    };
    if !(scan.window_periods > 0.0 && scan.window_periods.is_finite()) || scan.samples < 3 {
        return Err(CliError::Validation("scan window must be positive and use at least 3 samples".into()));
    }

    let system = JosephsonSystem::new(n, g, kappa)?;
    let initial = make_number_pair(n_l, n)?;
    let period = system.tunnelling_period(&initial, &scan);
    let period = match period {
        Ok(p) => Some(p),
        // Absolute times do not need the period, so its failure is only reported.
        Err(e) if !times.uses_period() && e.is_numerical() => None,
        Err(e) => return Err(e.into()),
    };
    let times = times.resolve(period.map(|p| p.period)).map_err(CliError::Validation)?;
    if let Some(&bad) = times.iter().find(|t| !t.is_finite()) {
        return Err(CliError::Validation(format!("time {bad} is not finite")));
    }
    let trace = system.evolve(&initial, &times, &orders)?;

    let mut columns: Vec<String> = vec!["t".into()];
    columns.extend((0..=n).map(|m| format!("P{m}")));
    columns.push("jz".into());
    columns.extend(orders.iter().map(|o| format!("c{o}")));
    let mut table = Table { name: "trace".into(), columns, rows: Vec::new() };
    for (k, &t) in trace.times.iter().enumerate() {
        let mut row = vec![Cell::from(t)];
        row.extend(trace.distributions[k].iter().map(|&p| Cell::from(p)));
        row.push(Cell::from(trace.jz_mean[k]));
        row.extend(trace.cn_series.iter().map(|series| Cell::from(series[k])));
        table.push(row);
    }

    let mut out = Report::new("dynamics");
    out.meta("n", n);
    out.meta("g", g);
    out.meta("kappa", kappa);
    out.meta("n_l", n_l);
    out.meta("period", period.map(|p| p.period));
    out.meta("transfer_time", period.map(|p| p.transfer_time));
    out.meta("scanned_period", period.map(|p| p.scanned_period));
    out.meta("period_relative_difference", period.map(|p| p.relative_difference));
    match period {
        Some(p) => out.notes.push(format!(
            "T_N = {:.6e} (scan {:.6e}, relative difference {:.2e})",
            p.period, p.scanned_period, p.relative_difference
        )),
        None => out.notes.push("no two-state oscillation: T_N unavailable".into()),
    }
    out.tables = vec![table];
    Ok(out)
}

pub fn fringes(args: FringesArgs) -> CliResult<Report> {
    let recipe = required(args.state, "state")?.0;
    let threshold = required(args.m, "m")?;
    let k = args.k.unwrap_or(64);
    let state = recipe.build()?;
    // Fringes oscillate at frequencies up to the spread; K must resolve them.
    let spread = state.spread(0.0) as usize;
    if k <= 2 * spread {
        return Err(Error::Aliasing { samples: k, frequency: spread }.into());
    }
    let scan = binned_probability_scan(&state, threshold, k)?;

    let mut table = Table::new("scan", &["phi", "p_geq_M"]);
    for (&phi, &p) in scan.phases.iter().zip(&scan.probabilities) {
        table.push(vec![Cell::from(phi), Cell::from(p)]);
    }
    let mut spectrum = Table::new("spectrum", &["omega", "magnitude"]);
    for (omega, &mag) in scan.spectrum.iter().enumerate() {
        spectrum.push(vec![Cell::from(omega), Cell::from(mag)]);
    }
    let dominant = scan.dominant_frequency();
    let mut out = Report::new("fringes");
    out.meta("state", serde_json::to_value(&recipe).expect("recipes serialize"));
    out.meta("m", threshold);
    out.meta("k", k);
    out.meta("dominant_omega", dominant.map(|d| d.0));
    out.meta("dominant_magnitude", dominant.map(|d| d.1));
    out.notes.push(match dominant {
        Some((w, mag)) => format!("dominant ω = {w} (magnitude {mag:.6e})"),
        None => "no ω ≥ 1 content".into(),
    });
    out.tables = vec![table, spectrum];
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataRow {
    #[serde(default)]
    label: Option<String>,
    mean_n: f64,
    jx: f64,
    jy: f64,
    jz: f64,
    jy_var: f64,
    jz_var: f64,
}

fn read_rows(path: &Path) -> CliResult<Vec<DataRow>> {
    let err = |e: csv::Error| CliError::Validation(format!("malformed data {}: {e}", path.display()));
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(err)?;
    let rows: Vec<DataRow> = reader.deserialize().collect::<Result<_, _>>().map_err(err)?;
    if rows.is_empty() {
        return Err(CliError::Validation(format!("data {} has no rows", path.display())));
    }
    Ok(rows)
}

pub fn infer(args: InferArgs) -> CliResult<Report> {
    let path = required(args.data, "data")?;
    let tolerance = args.mean_tolerance.unwrap_or(DEFAULT_MEAN_TOLERANCE);
    let rows = read_rows(&path)?;

    let mut table = Table::new(
        "inference",
        &[
            "row",
            "label",
            "mean_n",
            "xi_jx",
            "xi_n",
            "min_order",
            "order_certified",
            "spread_lower_bound",
            "inferred_xi",
            "squeezed_axis",
            "two_atom_certified",
            "rotated_moment_lower_bound",
        ],
    );
    let mut details = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let data = SqueezeData::new(row.mean_n, row.jx, row.jy, row.jz, row.jy_var, row.jz_var)
            .map_err(|e| CliError::Validation(format!("row {}: {e}", i + 1)))?;
        let xi = |mode| match squeeze_parameter(&data, mode) {
            Ok(p) => Ok(Some(p.xi)),
            Err(Error::Inapplicable(_)) => Ok(None),
            Err(e) => Err(CliError::from(e)),
        };
        let (xi_jx, xi_n) = (xi(SqueezeNormalization::JxNormalized)?, xi(SqueezeNormalization::NNormalized)?);
        let bound = match xi_n {
            Some(x) if x > 0.0 => Some(coherence_bound(x, data.mean_n)?),
            _ => None,
        };
        let spread = spread_lower_bound(&data);
        let inference = infer_two_atom_coherence(&data, tolerance)?;
        table.push(vec![
            Cell::from(i + 1),
            row.label.clone().map_or(Cell::Missing, Cell::Text),
            Cell::from(data.mean_n),
            Cell::from(xi_jx),
            Cell::from(xi_n),
            Cell::from(bound.map(|b| b.min_order)),
            Cell::from(bound.map(|b| b.certified)),
            Cell::from(spread),
            Cell::from(inference.xi),
            Cell::Text(inference.squeezed_axis.clone()),
            Cell::from(inference.certified),
            Cell::from(inference.rotated_moment_lower_bound),
        ]);
        details.push(json!({
            "row": i + 1,
            "label": row.label,
            "squeezing": { "jx_normalized": xi_jx, "n_normalized": xi_n },
            "coherence_bound": bound,
            "spread_lower_bound": if spread.is_finite() { json!(spread) } else { Value::Null },
            "inference": inference,
        }));
    }
    let mut out = Report::new("infer");
    out.meta("data", path.display().to_string());
    out.meta("mean_tolerance", tolerance);
    out.meta("rows", rows.len());
    out.tables = vec![table];
    out.details = Some(Value::Array(details));
    Ok(out)
}
