//! Parameter grids for sweeps.

use std::fmt;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Decimal places kept when materializing grid points, so `0.01:0.99:0.01`
/// yields the doubles nearest to the decimal literals.
const GRID_DECIMALS: f64 = 1e12;

/// `start:stop:step`, inclusive of `stop` when it lies on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// Which interval a grid must lie in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridDomain {
    /// `[0, 1]`.
    Closed,
    /// `(0, 1)`: reduction factors are undefined at 0 and infinite at 1.
    Open,
}

impl AlphaGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> CliResult<Self> {
        if !step.is_finite() || step <= 0.0 {
            return Err(CliError::Usage(format!("grid step must be positive, got {step}")));
        }
        if !(start.is_finite() && stop.is_finite()) || stop < start {
            return Err(CliError::Usage(format!("grid needs start <= stop, got {start}:{stop}")));
        }
        Ok(AlphaGrid { start, stop, step })
    }

    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((self.start + i as f64 * self.step) * GRID_DECIMALS).round() / GRID_DECIMALS)
            .collect()
    }

    pub fn check(&self, domain: GridDomain) -> CliResult<()> {
        let pts = self.points();
        let (lo, hi) = (pts[0], pts[pts.len() - 1]);
        let ok = match domain {
            GridDomain::Closed => lo >= 0.0 && hi <= 1.0,
            GridDomain::Open => lo > 0.0 && hi < 1.0,
        };
        if !ok {
            let want = match domain {
                GridDomain::Closed => "[0, 1]",
                GridDomain::Open => "(0, 1)",
            };
            return Err(CliError::Usage(format!("alpha grid {self} must lie in {want}")));
        }
        Ok(())
    }
}

impl fmt::Display for AlphaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl FromStr for AlphaGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:step, got {s:?}"));
        }
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        AlphaGrid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?).map_err(|e| e.to_string())
    }
}

/// Parses `3,5,11` or `3..9` (inclusive) or a mix such as `1,3..5`.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|e| format!("{part:?}: {e}"))?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{part:?}: {e}"))?;
            if b < a {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|e| format!("{part:?}: {e}"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_hits_decimals() {
        let g: AlphaGrid = "0.01:0.99:0.01".parse().unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 99);
        assert_eq!(pts[6], 0.07);
        assert_eq!(pts[98], 0.99);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        g.check(GridDomain::Open).unwrap();
    }

    #[test]
    fn grid_validation() {
        assert!("0:1".parse::<AlphaGrid>().is_err());
        assert!("0:1:0".parse::<AlphaGrid>().is_err());
        assert!("0.5:0.1:0.1".parse::<AlphaGrid>().is_err());
        let g: AlphaGrid = "0:0.99:0.01".parse().unwrap();
        assert!(g.check(GridDomain::Open).is_err());
        g.check(GridDomain::Closed).unwrap();
        assert_eq!(g.points().len(), 100);
        let g: AlphaGrid = "0.1:0.9:0.1".parse().unwrap();
        assert_eq!(g.points().len(), 9);
        assert!("0.5:1.5:0.5".parse::<AlphaGrid>().unwrap().check(GridDomain::Closed).is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_usize_list("3,5,11,21").unwrap(), vec![3, 5, 11, 21]);
        assert_eq!(parse_usize_list("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_usize_list("1, 3..=4").unwrap(), vec![1, 3, 4]);
        assert!(parse_usize_list("").is_err());
        assert!(parse_usize_list("5..3").is_err());
        assert!(parse_usize_list("x").is_err());
    }
}
