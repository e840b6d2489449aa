//! Argument parsing and command dispatch.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use bqr_core::bqr::Locality;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};
use crate::figures::{figure_table, FigureName};
use crate::grid::{parse_usize_list, AlphaGrid};
use crate::sample::{parse_locality, sample_table};
use crate::sweep::SweepSpec;
use crate::table::{Format, Table};
use crate::verify::{run_suite, Check, Suite};

#[derive(Debug, Parser)]
#[command(name = "bqr", version, about = "Entropy-compression and refrigerator sweeps for sign estimation")]
pub struct Cli {
    /// Worker threads (0 uses all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write curve data for one figure.
    Figure {
        /// Figure name (alternatively --figure).
        #[arg(value_parser = parse_figure, required_unless_present = "figure")]
        name: Option<FigureName>,
        #[arg(long = "figure", value_parser = parse_figure, conflicts_with = "name")]
        figure: Option<FigureName>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run an invariant suite and report per-check results.
    Verify {
        /// Suite name (alternatively --suite).
        #[arg(value_parser = parse_suite, required_unless_present = "suite")]
        name: Option<Suite>,
        #[arg(long = "suite", value_parser = parse_suite, conflicts_with = "name")]
        suite: Option<Suite>,
    },
    /// Compare raw and cooled shots at equal qubit budget over an alpha grid.
    Sample {
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Qubit counts, e.g. `3,5,11,21` or `3..9`.
    #[arg(long = "n", value_parser = parse_list)]
    pub n: Option<List>,
    /// Reset qubits per round.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Rounds per cycle, e.g. `3..9` or `5`.
    #[arg(long, value_parser = parse_list)]
    pub rounds: Option<List>,
    #[arg(long, value_parser = parse_locality, default_value = "full")]
    pub locality: Locality,
    /// Polarization grid `start:stop:step`.
    #[arg(long = "alpha-grid")]
    pub alpha_grid: Option<AlphaGrid>,
    /// Qubit budget for sampling.
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    /// Monte Carlo trials per grid point.
    #[arg(long, default_value_t = 1_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

/// Integer list argument; a newtype so clap treats it as one value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List(pub Vec<usize>);

fn parse_list(s: &str) -> Result<List, String> {
    parse_usize_list(s).map(List)
}

fn parse_figure(s: &str) -> Result<FigureName, String> {
    s.parse()
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

impl From<SweepArgs> for SweepSpec {
    fn from(a: SweepArgs) -> Self {
        SweepSpec {
            alpha_grid: a.alpha_grid,
            n_list: a.n.map(|l| l.0),
            m: a.m,
            rounds_list: a.rounds.map(|l| l.0),
            locality: a.locality,
            budget: a.budget,
            trials: a.trials,
            seed: a.seed,
            out: a.out,
            format: match a.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
        }
    }
}

fn emit(table: &Table, spec: &SweepSpec) -> CliResult<()> {
    match &spec.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(spec.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            table.write(spec.format, stdout.lock())?;
        }
    }
    Ok(())
}

enum Output {
    Data(Table, SweepSpec),
    Report(Suite, Vec<Check>),
}

/// Runs a parsed command. Report text goes to `report`.
pub fn run(cli: Cli, report: &mut dyn Write) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build()?;
    let output = pool.install(|| -> CliResult<Output> {
        match cli.command {
            Command::Figure { name, figure, sweep } => {
                let name = name.or(figure).ok_or_else(|| CliError::Usage("missing figure name".into()))?;
                let spec = SweepSpec::from(sweep);
                Ok(Output::Data(figure_table(name, &spec)?, spec))
            }
            Command::Sample { sweep } => {
                let spec = SweepSpec::from(sweep);
                Ok(Output::Data(sample_table(&spec)?, spec))
            }
            Command::Verify { name, suite } => {
                let suite = name.or(suite).ok_or_else(|| CliError::Usage("missing suite name".into()))?;
                Ok(Output::Report(suite, run_suite(suite)?))
            }
        }
    })?;
    match output {
        Output::Data(table, spec) => emit(&table, &spec),
        Output::Report(suite, checks) => {
            let mut failed = 0;
            for c in &checks {
                writeln!(report, "{c}")?;
                failed += usize::from(!c.passed);
            }
            writeln!(report, "{suite}: {} of {} checks passed", checks.len() - failed, checks.len())?;
            if failed > 0 {
                return Err(CliError::Verify(format!("{failed} check(s) failed in {suite}")));
            }
            Ok(())
        }
    }
}
