//! Resource-matched shot sampling over an α grid.

use bqr_core::bqr::{Locality, RefrigeratorConfig};
use bqr_core::sampling::{
    resource_comparison_from_tallies, resource_matched_experiments, tally_trials, ResourceComparison,
    ShotExperiment, SignErrorTally,
};
use bqr_core::Polarization;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::grid::{AlphaGrid, GridDomain};
use crate::sweep::SweepSpec;
use crate::table::{Cell, Table};

/// Trials per parallel work item. Fixed, so the partition never depends on
/// the thread count (the merge is exact anyway).
const CHUNK: u64 = 256;

pub const DEFAULT_SAMPLE_N: usize = 5;
pub const DEFAULT_SAMPLE_ROUNDS: usize = 5;

pub fn default_grid() -> AlphaGrid {
    AlphaGrid::new(0.1, 0.9, 0.1).expect("static grid")
}

/// Monte Carlo tally with trials split across the rayon pool.
pub fn parallel_tally(exp: &ShotExperiment) -> SignErrorTally {
    let chunks = exp.trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| tally_trials(exp, c * CHUNK..((c + 1) * CHUNK).min(exp.trials)))
        .reduce(SignErrorTally::default, SignErrorTally::merge)
}

pub fn sample_config(spec: &SweepSpec) -> CliResult<RefrigeratorConfig> {
    let n = match spec.n_list.as_deref() {
        None => DEFAULT_SAMPLE_N,
        Some([n]) => *n,
        Some(_) => return Err(CliError::Usage("sample takes a single --n".into())),
    };
    let rounds = match spec.rounds_list.as_deref() {
        None => DEFAULT_SAMPLE_ROUNDS,
        Some([r]) => *r,
        Some(_) => return Err(CliError::Usage("sample takes a single --rounds".into())),
    };
    Ok(RefrigeratorConfig::new(n, spec.m, rounds, spec.locality)?)
}

pub fn comparison(alpha: f64, cfg: &RefrigeratorConfig, spec: &SweepSpec) -> CliResult<ResourceComparison> {
    let alpha = Polarization::new(alpha)?;
    let (raw, cooled) = resource_matched_experiments(alpha, cfg, spec.budget, spec.seed, spec.trials)?;
    let (mc_raw, mc_cooled) = rayon::join(|| parallel_tally(&raw), || parallel_tally(&cooled));
    Ok(resource_comparison_from_tallies(cfg, &raw, &cooled, mc_raw, mc_cooled)?)
}

pub const COLUMNS: [&str; 17] = [
    "alpha",
    "alpha_cooled",
    "k_raw",
    "k_cool",
    "exact_raw",
    "exact_cooled",
    "bound_raw",
    "bound_cooled",
    "mc_raw",
    "mc_cooled",
    "mc_raw_wrong",
    "mc_raw_ties",
    "mc_cooled_wrong",
    "mc_cooled_ties",
    "trials",
    "empirical_ratio",
    "reduction_factor",
];

fn opt(v: Option<f64>) -> Cell {
    Cell::Real(v.unwrap_or(f64::NAN))
}

pub fn sample_table(spec: &SweepSpec) -> CliResult<Table> {
    let grid = spec.alpha_grid.unwrap_or_else(default_grid);
    grid.check(GridDomain::Closed)?;
    if spec.trials == 0 {
        return Err(CliError::Usage("need at least one trial".into()));
    }
    let cfg = sample_config(spec)?;
    let rows: Vec<Vec<Cell>> = grid
        .points()
        .into_par_iter()
        .map(|a| {
            let c = comparison(a, &cfg, spec)?;
            Ok(vec![
                Cell::Real(a),
                c.alpha_cooled.value().into(),
                c.k_raw.into(),
                c.k_cool.into(),
                c.exact_raw.into(),
                c.exact_cooled.into(),
                opt(c.bound_raw),
                opt(c.bound_cooled),
                c.monte_carlo_raw.error_rate().into(),
                c.monte_carlo_cooled.error_rate().into(),
                c.monte_carlo_raw.wrong.into(),
                c.monte_carlo_raw.ties.into(),
                c.monte_carlo_cooled.wrong.into(),
                c.monte_carlo_cooled.ties.into(),
                c.monte_carlo_raw.trials.into(),
                c.empirical_ratio().into(),
                opt(c.reduction_factor),
            ])
        })
        .collect::<CliResult<_>>()?;
    let mut table = Table::new(COLUMNS.iter().map(|s| s.to_string()).collect());
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

/// Locality name accepted on the command line.
pub fn parse_locality(s: &str) -> Result<Locality, String> {
    match s {
        "full" => Ok(Locality::Full),
        "3local" | "3-local" => Ok(Locality::ThreeLocal),
        other => Err(format!("unknown locality {other:?}; expected full or 3local")),
    }
}
