//! Curve data for the single-shot, BQR and 3-local figures.

use std::fmt;
use std::str::FromStr;

use bqr_core::bqr::{
    alpha_infinity, optimal_bound_simulate, reduction_factor, steady_state, Locality,
    RefrigeratorConfig, DEFAULT_MAX_CYCLES, DEFAULT_TOLERANCE,
};
use bqr_core::klocal::alpha_infinity_3local;
use bqr_core::single_shot::{alpha_ac, reduction_factor_ac};
use bqr_core::Polarization;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::grid::{AlphaGrid, GridDomain};
use crate::sweep::SweepSpec;
use crate::table::{Cell, Table};

/// Fig.-1/2 style qubit counts used when `--n` is absent.
pub const DEFAULT_N_LIST: [usize; 4] = [3, 5, 11, 21];
/// Refrigerator size used when `--n` is absent.
pub const DEFAULT_BQR_N: usize = 5;
pub const DEFAULT_ROUNDS: std::ops::RangeInclusive<usize> = 3..=9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureName {
    SingleShotPolarization,
    SingleShotReduction,
    BqrPolarization,
    BqrReduction,
    KlocalReduction,
}

impl FigureName {
    pub const ALL: [FigureName; 5] = [
        FigureName::SingleShotPolarization,
        FigureName::SingleShotReduction,
        FigureName::BqrPolarization,
        FigureName::BqrReduction,
        FigureName::KlocalReduction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureName::SingleShotPolarization => "single-shot-polarization",
            FigureName::SingleShotReduction => "single-shot-reduction",
            FigureName::BqrPolarization => "bqr-polarization",
            FigureName::BqrReduction => "bqr-reduction",
            FigureName::KlocalReduction => "klocal-reduction",
        }
    }

    fn is_reduction(self) -> bool {
        !matches!(self, FigureName::SingleShotPolarization | FigureName::BqrPolarization)
    }

    pub fn default_grid(self) -> AlphaGrid {
        let start = if self.is_reduction() { 0.01 } else { 0.0 };
        AlphaGrid::new(start, 0.99, 0.01).expect("static grid")
    }
}

impl fmt::Display for FigureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = FigureName::ALL.iter().map(|f| f.as_str()).collect();
                format!("unknown figure {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// Builds the data table for `name`.
pub fn figure_table(name: FigureName, spec: &SweepSpec) -> CliResult<Table> {
    let grid = spec.alpha_grid.unwrap_or_else(|| name.default_grid());
    let domain = if name.is_reduction() { GridDomain::Open } else { GridDomain::Closed };
    grid.check(domain)?;
    match name {
        FigureName::SingleShotPolarization => single_shot(spec, &grid, false),
        FigureName::SingleShotReduction => single_shot(spec, &grid, true),
        FigureName::BqrPolarization => bqr_polarization(spec, &grid),
        FigureName::BqrReduction => bqr_reduction(spec, &grid, spec.locality),
        FigureName::KlocalReduction => bqr_reduction(spec, &grid, Locality::ThreeLocal),
    }
}

fn pol(a: f64) -> CliResult<Polarization> {
    Ok(Polarization::new(a)?)
}

fn fill<F>(columns: Vec<String>, grid: &AlphaGrid, row: F) -> CliResult<Table>
where
    F: Fn(f64) -> CliResult<Vec<Cell>> + Sync,
{
    let rows: Vec<Vec<Cell>> = grid.points().into_par_iter().map(&row).collect::<CliResult<_>>()?;
    let mut table = Table::new(columns);
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

fn single_shot(spec: &SweepSpec, grid: &AlphaGrid, reduction: bool) -> CliResult<Table> {
    let ns = spec.n_list.clone().unwrap_or_else(|| DEFAULT_N_LIST.to_vec());
    if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
        return Err(CliError::Usage(format!("single-shot compression needs n >= 2, got {bad}")));
    }
    let mut columns = vec!["alpha".to_string()];
    columns.extend(ns.iter().map(|n| format!("n{n}")));
    columns.push("baseline".into());
    fill(columns, grid, |a| {
        let alpha = pol(a)?;
        let mut row = vec![Cell::Real(a)];
        for &n in &ns {
            let v = if reduction {
                reduction_factor_ac(n, alpha)?
            } else {
                alpha_ac(n, alpha)?.value()
            };
            row.push(v.into());
        }
        row.push(if reduction { 1.0 } else { a }.into());
        Ok(row)
    })
}

struct BqrSetup {
    n: usize,
    m: usize,
    rounds: Vec<usize>,
}

fn bqr_setup(spec: &SweepSpec) -> CliResult<BqrSetup> {
    let n = match spec.n_list.as_deref() {
        None => DEFAULT_BQR_N,
        Some([n]) => *n,
        Some(_) => return Err(CliError::Usage("refrigerator figures take a single --n".into())),
    };
    let rounds = spec.rounds_list.clone().unwrap_or_else(|| DEFAULT_ROUNDS.collect());
    for &r in &rounds {
        RefrigeratorConfig::new(n, spec.m, r, Locality::Full)?;
    }
    Ok(BqrSetup { n, m: spec.m, rounds })
}

fn bqr_polarization(spec: &SweepSpec, grid: &AlphaGrid) -> CliResult<Table> {
    let s = bqr_setup(spec)?;
    let locality = spec.locality;
    let show_limit = locality == Locality::Full || s.m == 2;
    let mut columns = vec!["alpha".to_string()];
    columns.extend(s.rounds.iter().map(|r| format!("rounds{r}")));
    columns.push(format!("single_shot_n{}", s.n));
    if show_limit {
        columns.push("alpha_infinity".into());
    }
    columns.push("baseline".into());
    fill(columns, grid, |a| {
        let alpha = pol(a)?;
        let mut row = vec![Cell::Real(a)];
        for &r in &s.rounds {
            let cfg = RefrigeratorConfig::new(s.n, s.m, r, locality)?;
            let st = steady_state(&cfg, alpha, DEFAULT_TOLERANCE, DEFAULT_MAX_CYCLES)?;
            row.push(st.alpha_enhanced.value().into());
        }
        row.push(alpha_ac(s.n, alpha)?.value().into());
        if show_limit {
            let lim = match locality {
                Locality::Full => alpha_infinity(s.n, s.m, alpha)?,
                Locality::ThreeLocal => alpha_infinity_3local(s.n, alpha)?,
            };
            row.push(lim.value().into());
        }
        row.push(a.into());
        Ok(row)
    })
}

fn bqr_reduction(spec: &SweepSpec, grid: &AlphaGrid, locality: Locality) -> CliResult<Table> {
    let s = bqr_setup(spec)?;
    let bound_rounds = *s.rounds.iter().max().expect("non-empty rounds");
    let mut columns = vec!["alpha".to_string()];
    columns.extend(s.rounds.iter().map(|r| format!("rounds{r}")));
    columns.push(format!("single_shot_n{}", s.n));
    columns.push(format!("optimal_bound_rounds{bound_rounds}"));
    columns.push("baseline".into());
    fill(columns, grid, |a| {
        let alpha = pol(a)?;
        let mut row = vec![Cell::Real(a)];
        for &r in &s.rounds {
            let cfg = RefrigeratorConfig::new(s.n, s.m, r, locality)?;
            let st = steady_state(&cfg, alpha, DEFAULT_TOLERANCE, DEFAULT_MAX_CYCLES)?;
            row.push(st.reduction_factor(alpha, cfg.cost())?.into());
        }
        row.push(reduction_factor_ac(s.n, alpha)?.into());
        let cfg = RefrigeratorConfig::new(s.n, s.m, bound_rounds, Locality::Full)?;
        let bound = optimal_bound_simulate(&cfg, alpha)?;
        row.push(reduction_factor(alpha, &bound.target, cfg.cost())?.into());
        row.push(1.0.into());
        Ok(row)
    })
}
