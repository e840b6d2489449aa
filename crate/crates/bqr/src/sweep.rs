use std::path::PathBuf;

use bqr_core::bqr::Locality;

use crate::grid::AlphaGrid;
use crate::table::Format;

/// Everything a sweep command needs. `None` fields fall back to the
/// command's own defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub alpha_grid: Option<AlphaGrid>,
    pub n_list: Option<Vec<usize>>,
    pub m: usize,
    pub rounds_list: Option<Vec<usize>>,
    pub locality: Locality,
    pub budget: u64,
    pub trials: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            alpha_grid: None,
            n_list: None,
            m: 2,
            rounds_list: None,
            locality: Locality::Full,
            budget: 10_000,
            trials: 1_000,
            seed: 0,
            out: None,
            format: Format::Csv,
        }
    }
}
