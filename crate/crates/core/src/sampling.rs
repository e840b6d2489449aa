//! Finite-sampling error of sign-based decisions.
//!
//! A data point is classified by the sign of `⟨Z⟩ = α`, estimated from `k`
//! single-qubit shots. This module holds the analytical bounds, the exact
//! binomial error, a seeded Monte Carlo harness and the resource-matched
//! comparison between raw and refrigerator-cooled shots.
//!
//! Monte Carlo trials draw from independent ChaCha8 streams (`stream =
//! trial index`), so any partition of the trial range yields the same tally.

use alloc::format;
use core::ops::Range;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bqr::{reduction_factor_qr, steady_state, RefrigeratorConfig, DEFAULT_MAX_CYCLES, DEFAULT_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::math::{ln_binomial, pairwise_sum};
use crate::state::Polarization;

/// Chebyshev tail `min(1, σ²/(k ε²))`.
pub fn chebyshev_bound(variance: f64, k: u64, epsilon: f64) -> Result<f64> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if variance.is_nan() || variance < 0.0 {
        return Err(invalid(format!("variance must be non-negative, got {variance}")));
    }
    if k == 0 {
        return Err(invalid("need at least one shot"));
    }
    Ok((variance / (k as f64 * epsilon * epsilon)).min(1.0))
}

/// Bound on the wrong-sign probability, `min(1, (1 − α²)/(k α²))`.
pub fn predict_error_bound(alpha: Polarization, k: u64) -> Result<f64> {
    let a = alpha.value();
    if a == 0.0 {
        return Err(Error::UndefinedAtZero);
    }
    chebyshev_bound(1.0 - a * a, k, a.abs())
}

/// Bound on a wrong margin decision, `min(1, (1 − α²)/(k (α − b)²))`.
pub fn train_error_bound(alpha: Polarization, b: f64, k: u64) -> Result<f64> {
    check_margin(b)?;
    let a = alpha.value();
    if a == b {
        return Err(Error::DecisionBoundary);
    }
    chebyshev_bound(1.0 - a * a, k, (a - b).abs())
}

fn check_margin(b: f64) -> Result<()> {
    if !(0.0..1.0).contains(&b) {
        return Err(invalid(format!("margin must be in [0, 1), got {b}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn value(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginConfig {
    b: f64,
    label: Label,
    score: f64,
}

impl MarginConfig {
    pub fn new(b: f64, label: Label, score: f64) -> Result<Self> {
        check_margin(b)?;
        if !(-1.0..=1.0).contains(&score) {
            return Err(invalid(format!("score must be in [-1, 1], got {score}")));
        }
        Ok(MarginConfig { b, label, score })
    }

    pub fn margin(&self) -> f64 {
        self.b
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn score(&self) -> f64 {
        self.score
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HingeActivity {
    /// The hinge term contributes; its gradient carries `prefactor = −y`.
    Active { prefactor: f64 },
    Inactive,
}

/// Whether `max(0, b − y q)` has a non-zero gradient.
pub fn hinge_gradient_activity(mc: &MarginConfig) -> HingeActivity {
    let y = mc.label.value();
    if y * mc.score < mc.b {
        HingeActivity::Active { prefactor: -y }
    } else {
        HingeActivity::Inactive
    }
}

/// Class-averaged polarizations of two equally sized ensembles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsemblePair {
    pub alpha_plus: Polarization,
    pub alpha_minus: Polarization,
}

impl EnsemblePair {
    pub fn new(alpha_plus: Polarization, alpha_minus: Polarization) -> Self {
        EnsemblePair {
            alpha_plus,
            alpha_minus,
        }
    }
}

/// Minimum error of telling the two averaged states apart, `1/2 − |ᾱ₊ − ᾱ₋|/4`.
pub fn discrimination_error(e: &EnsemblePair) -> f64 {
    0.5 - (e.alpha_plus.value() - e.alpha_minus.value()).abs() / 4.0
}

/// Probability that the `k`-shot mean has the wrong sign; a tie counts 1/2.
pub fn exact_sign_error(alpha: Polarization, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(invalid("need at least one shot"));
    }
    let a = alpha.value().abs();
    if a == 0.0 {
        return Ok(0.5);
    }
    if a == 1.0 {
        return Ok(0.0);
    }
    // X ~ Bin(k, p) counts the ground outcomes; the estimate is wrong when 2X < k.
    let ln_p = libm::log((1.0 + a) / 2.0);
    let ln_q = libm::log((1.0 - a) / 2.0);
    let ln_pmf = |j: u64| ln_binomial(k, j) + j as f64 * ln_p + (k - j) as f64 * ln_q;
    let below = (k - 1) / 2;
    let terms: alloc::vec::Vec<f64> = (0..=below).map(|j| libm::exp(ln_pmf(j))).collect();
    let mut total = pairwise_sum(&terms);
    if k.is_multiple_of(2) {
        total += 0.5 * libm::exp(ln_pmf(k / 2));
    }
    Ok(total.min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotExperiment {
    pub alpha_true: Polarization,
    pub shots: u64,
    pub trials: u64,
    pub seed: u64,
}

impl ShotExperiment {
    pub fn new(alpha_true: Polarization, shots: u64, trials: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(invalid("need at least one shot"));
        }
        if trials == 0 {
            return Err(invalid("need at least one trial"));
        }
        Ok(ShotExperiment {
            alpha_true,
            shots,
            trials,
            seed,
        })
    }
}

/// Result of one trial's sign decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Correct,
    Wrong,
    Tie,
}

/// Integer counts, so merging partial tallies is exact and order-free.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SignErrorTally {
    pub wrong: u64,
    pub ties: u64,
    pub trials: u64,
}

impl SignErrorTally {
    pub fn record(&mut self, outcome: Outcome) {
        self.trials += 1;
        match outcome {
            Outcome::Correct => {}
            Outcome::Wrong => self.wrong += 1,
            Outcome::Tie => self.ties += 1,
        }
    }

    pub fn merge(self, other: SignErrorTally) -> SignErrorTally {
        SignErrorTally {
            wrong: self.wrong + other.wrong,
            ties: self.ties + other.ties,
            trials: self.trials + other.trials,
        }
    }

    /// `(wrong + ties/2) / trials`.
    pub fn error_rate(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.wrong as f64 + 0.5 * self.ties as f64) / self.trials as f64
    }

    /// Binomial standard error of an error rate `rate` over these trials.
    pub fn standard_error(&self, rate: f64) -> f64 {
        libm::sqrt(rate * (1.0 - rate) / self.trials as f64)
    }
}

/// Uniform draw in `[0, 1)` with 53 random bits.
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Simulates trial number `trial` of `exp`: `k` Bernoulli Z-measurements on
/// `(I + αZ)/2`, then a sign decision. At `α = 0` there is no correct sign
/// and every trial counts as a tie.
pub fn run_trial(exp: &ShotExperiment, trial: u64) -> Outcome {
    let a = exp.alpha_true.value();
    if a == 0.0 {
        return Outcome::Tie;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
    rng.set_stream(trial);
    let p = (1.0 + a) / 2.0;
    let ground = (0..exp.shots).filter(|_| uniform(&mut rng) < p).count() as u64;
    let twice = 2 * ground;
    if twice == exp.shots {
        Outcome::Tie
    } else if (twice > exp.shots) == (a > 0.0) {
        Outcome::Correct
    } else {
        Outcome::Wrong
    }
}

/// Tally over a sub-range of trial indices.
pub fn tally_trials(exp: &ShotExperiment, trials: Range<u64>) -> SignErrorTally {
    let mut tally = SignErrorTally::default();
    for t in trials {
        tally.record(run_trial(exp, t));
    }
    tally
}

pub fn monte_carlo_tally(exp: &ShotExperiment) -> SignErrorTally {
    tally_trials(exp, 0..exp.trials)
}

/// Fraction of wrong-sign estimates over `exp.trials` trials.
pub fn monte_carlo_sign_error(exp: &ShotExperiment) -> f64 {
    monte_carlo_tally(exp).error_rate()
}

/// Raw versus cooled shots for one fixed qubit budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceComparison {
    pub budget: u64,
    pub k_raw: u64,
    pub k_cool: u64,
    pub alpha_raw: Polarization,
    pub alpha_cooled: Polarization,
    pub exact_raw: f64,
    pub exact_cooled: f64,
    /// `None` at `α = 0`, where the bound is undefined.
    pub bound_raw: Option<f64>,
    pub bound_cooled: Option<f64>,
    pub monte_carlo_raw: SignErrorTally,
    pub monte_carlo_cooled: SignErrorTally,
    pub reduction_factor: Option<f64>,
}

impl ResourceComparison {
    /// Empirical raw error over empirical cooled error.
    pub fn empirical_ratio(&self) -> f64 {
        self.monte_carlo_raw.error_rate() / self.monte_carlo_cooled.error_rate()
    }

    pub fn exact_ratio(&self) -> f64 {
        self.exact_raw / self.exact_cooled
    }
}

/// The two experiments compared by [`resource_matched_comparison`]. Cooled
/// shots use seed `seed + 1`.
pub fn resource_matched_experiments(
    alpha: Polarization,
    cfg: &RefrigeratorConfig,
    budget: u64,
    seed: u64,
    trials: u64,
) -> Result<(ShotExperiment, ShotExperiment)> {
    let cost = cfg.cost() as u64;
    let k_cool = budget / cost;
    if k_cool == 0 {
        return Err(Error::BudgetTooSmall {
            budget: budget as usize,
            cost: cost as usize,
        });
    }
    let cooled = steady_state(cfg, alpha, DEFAULT_TOLERANCE, DEFAULT_MAX_CYCLES)?.alpha_enhanced;
    Ok((
        ShotExperiment::new(alpha, budget, trials, seed)?,
        ShotExperiment::new(cooled, k_cool, trials, seed.wrapping_add(1))?,
    ))
}

/// Assembles a [`ResourceComparison`] from Monte Carlo tallies computed by
/// the caller (possibly in parallel).
pub fn resource_comparison_from_tallies(
    cfg: &RefrigeratorConfig,
    raw: &ShotExperiment,
    cooled: &ShotExperiment,
    monte_carlo_raw: SignErrorTally,
    monte_carlo_cooled: SignErrorTally,
) -> Result<ResourceComparison> {
    let alpha = raw.alpha_true;
    let defined = alpha.value() != 0.0;
    Ok(ResourceComparison {
        budget: raw.shots,
        k_raw: raw.shots,
        k_cool: cooled.shots,
        alpha_raw: alpha,
        alpha_cooled: cooled.alpha_true,
        exact_raw: exact_sign_error(alpha, raw.shots)?,
        exact_cooled: exact_sign_error(cooled.alpha_true, cooled.shots)?,
        bound_raw: defined.then(|| predict_error_bound(alpha, raw.shots)).transpose()?,
        bound_cooled: defined
            .then(|| predict_error_bound(cooled.alpha_true, cooled.shots))
            .transpose()?,
        monte_carlo_raw,
        monte_carlo_cooled,
        reduction_factor: defined.then(|| reduction_factor_qr(cfg, alpha)).transpose()?,
    })
}

/// `budget` raw shots at `α` against `⌊budget/(m N + 1)⌋` shots at `α_QR`.
pub fn resource_matched_comparison(
    alpha: Polarization,
    cfg: &RefrigeratorConfig,
    budget: u64,
    seed: u64,
    trials: u64,
) -> Result<ResourceComparison> {
    let (raw, cooled) = resource_matched_experiments(alpha, cfg, budget, seed, trials)?;
    let mc_raw = monte_carlo_tally(&raw);
    let mc_cooled = monte_carlo_tally(&cooled);
    resource_comparison_from_tallies(cfg, &raw, &cooled, mc_raw, mc_cooled)
}
