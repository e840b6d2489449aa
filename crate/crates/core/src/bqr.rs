//! The bidirectional quantum refrigerator (BQR).
//!
//! A string of `n` qubits holds one target, `n − m − 1` auxiliaries and `m`
//! reset qubits. Each round applies a staircase of compressions and then
//! replaces the last `m` qubits with fresh copies of `ρ_α`. After
//! `rounds` rounds the target is extracted; the remaining qubits, plus one
//! fresh qubit appended at the end of the string, are recycled as the next
//! input. The recycled state converges to the refrigerator's steady state.
//!
//! Between rounds the reset qubits are always in `ρ_α^{⊗m}`, so a round is
//! a linear map on the diagonal of the first `n − m` qubits (the
//! [`AVector`]). Two routes compute it: [`RoundMatrix`] (the stochastic
//! matrix) and [`FullStateRound`] (permute the full `2^n` diagonal and trace
//! out). They must agree.
//!
//! Nothing in the protocol code branches on the sign of `α`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::klocal::build_uqr_3local;
use crate::math::pairwise_sum;
use crate::permutation::Permutation;
use crate::NORMALIZATION_TOLERANCE;
use crate::state::{
    apply_permutation, product_state, tensor, trace_out_first, trace_out_last, DiagonalState,
    Polarization, TargetMarginal,
};

/// Default L1 tolerance for the recycling fixed point.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Default cap on recycling cycles.
pub const DEFAULT_MAX_CYCLES: usize = 10_000;

/// Accumulated rounding drift beyond which renormalization is refused.
pub const RENORMALIZATION_LIMIT: f64 = 1e-9;

/// Which compression staircase a round uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Locality {
    /// `U_QR(n) = U_Cn (𝟙 ⊗ U_C(n−1)) … (𝟙 ⊗ U_C3)`.
    Full,
    /// `U_C3` slid along the string from the end towards the target.
    ThreeLocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RefrigeratorConfig {
    pub qubits: usize,
    pub reset: usize,
    pub rounds: usize,
    pub locality: Locality,
}

impl RefrigeratorConfig {
    pub fn new(qubits: usize, reset: usize, rounds: usize, locality: Locality) -> Result<Self> {
        if qubits < 3 {
            return Err(invalid(format!("refrigerator needs n >= 3 qubits, got {qubits}")));
        }
        if qubits >= 24 {
            return Err(invalid(format!("{qubits} qubits is beyond the supported range")));
        }
        if reset == 0 || reset >= qubits {
            return Err(invalid(format!("reset count {reset} must be in 1..={}", qubits - 1)));
        }
        if rounds == 0 {
            return Err(invalid("need at least one round"));
        }
        Ok(RefrigeratorConfig {
            qubits,
            reset,
            rounds,
            locality,
        })
    }

    /// Qubits that survive the reset: target plus auxiliaries.
    pub fn kept(&self) -> usize {
        self.qubits - self.reset
    }

    /// Fresh qubits consumed per enhanced qubit in steady operation.
    pub fn cost(&self) -> usize {
        self.reset * self.rounds + 1
    }

    pub fn with_locality(self, locality: Locality) -> Self {
        RefrigeratorConfig { locality, ..self }
    }

    pub fn with_rounds(self, rounds: usize) -> Result<Self> {
        Self::new(self.qubits, self.reset, rounds, self.locality)
    }
}

/// `U_Cj` on `j` qubits: swaps `|0 1^{j−1}⟩` with `|1 0^{j−1}⟩`.
pub fn build_ucj(j: usize) -> Result<Permutation> {
    if j < 2 {
        return Err(invalid(format!("U_C{j} needs j >= 2")));
    }
    let half = 1usize << (j - 1);
    Permutation::from_transpositions(j, &[(half - 1, half)])
}

/// The full staircase `U_QR(n)`; `U_C3` on the last three qubits acts first.
pub fn build_uqr(n: usize) -> Result<Permutation> {
    if n < 3 {
        return Err(invalid(format!("U_QR needs n >= 3, got {n}")));
    }
    let mut total = Permutation::identity(n)?;
    for j in 3..=n {
        total = total.then(&build_ucj(j)?.embed(n, 0)?)?;
    }
    Ok(total)
}

/// The compression permutation applied in each round of `cfg`.
pub fn round_permutation(cfg: &RefrigeratorConfig) -> Result<Permutation> {
    match cfg.locality {
        Locality::Full => build_uqr(cfg.qubits),
        Locality::ThreeLocal => build_uqr_3local(cfg.qubits),
    }
}

/// One round on the full diagonal: compress, trace out the last `m`
/// qubits, append `ρ_α^{⊗m}`.
pub fn round_channel(
    d: &DiagonalState,
    cfg: &RefrigeratorConfig,
    alpha: Polarization,
) -> Result<DiagonalState> {
    if d.qubits() != cfg.qubits {
        return Err(invalid(format!(
            "state has {} qubits, refrigerator expects {}",
            d.qubits(),
            cfg.qubits
        )));
    }
    let perm = round_permutation(cfg)?;
    let compressed = apply_permutation(d, &perm)?;
    let kept = trace_out_last(&compressed, cfg.reset)?;
    Ok(tensor(&kept, &product_state(alpha, cfg.reset)?))
}

/// Diagonal of the non-reset subsystem (target first).
#[derive(Debug, Clone, PartialEq)]
pub struct AVector(DiagonalState);

impl AVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        DiagonalState::new(probs).map(AVector)
    }

    pub fn from_state(state: DiagonalState) -> Self {
        AVector(state)
    }

    pub fn fresh(alpha: Polarization, qubits: usize) -> Result<Self> {
        product_state(alpha, qubits).map(AVector)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn qubits(&self) -> usize {
        self.0.qubits()
    }

    pub fn probs(&self) -> &[f64] {
        self.0.probs()
    }

    pub fn as_state(&self) -> &DiagonalState {
        &self.0
    }

    pub fn into_state(self) -> DiagonalState {
        self.0
    }

    pub fn target_marginal(&self) -> TargetMarginal {
        self.0.target_marginal()
    }

    pub fn l1_distance(&self, other: &AVector) -> f64 {
        self.0.l1_distance(&other.0)
    }

    /// Rescales to unit trace when the drift exceeds [`NORMALIZATION_TOLERANCE`].
    /// Returns whether a rescale happened; drift above
    /// [`RENORMALIZATION_LIMIT`] is an error.
    pub fn renormalized(self) -> Result<(Self, bool)> {
        let total = pairwise_sum(self.probs());
        let drift = (total - 1.0).abs();
        if drift <= NORMALIZATION_TOLERANCE {
            return Ok((self, false));
        }
        if drift > RENORMALIZATION_LIMIT {
            return Err(Error::NormalizationDrift { drift });
        }
        let probs = self.0.into_probs().into_iter().map(|x| x / total).collect();
        Ok((AVector(DiagonalState::from_raw(probs)), true))
    }
}

/// A linear action of one round on [`AVector`]s.
pub trait RoundMap {
    /// Number of qubits in the vectors the map acts on (`n − m`).
    fn kept_qubits(&self) -> usize;

    fn apply_round(&self, a: &AVector) -> Result<AVector>;

    fn apply_rounds(&self, a: &AVector, rounds: usize) -> Result<AVector> {
        let mut current = a.clone();
        for _ in 0..rounds {
            current = self.apply_round(&current)?;
        }
        Ok(current)
    }
}

/// Column-stochastic matrix of one round, `A' = M · A`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundMatrix {
    dim: usize,
    /// Row-major entries.
    entries: Vec<f64>,
}

impl RoundMatrix {
    /// Builds `M` column by column from basis vectors `e_j ⊗ ρ_α^{⊗m}`.
    pub fn from_permutation(perm: &Permutation, reset: usize, alpha: Polarization) -> Result<Self> {
        let n = perm.qubits();
        if reset == 0 || reset >= n {
            return Err(invalid(format!("reset count {reset} invalid for {n} qubits")));
        }
        let kept = n - reset;
        let dim = 1usize << kept;
        let fresh = product_state(alpha, reset)?;
        let mut entries = alloc::vec![0.0; dim * dim];
        for col in 0..dim {
            let input = tensor(&DiagonalState::basis(kept, col)?, &fresh);
            let output = trace_out_last(&apply_permutation(&input, perm)?, reset)?;
            for (row, &v) in output.probs().iter().enumerate() {
                entries[row * dim + col] = v;
            }
        }
        Ok(RoundMatrix { dim, entries })
    }

    pub fn for_config(cfg: &RefrigeratorConfig, alpha: Polarization) -> Result<Self> {
        Self::from_permutation(&round_permutation(cfg)?, cfg.reset, alpha)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|c| {
                let col: Vec<f64> = (0..self.dim).map(|r| self.get(r, c)).collect();
                pairwise_sum(&col)
            })
            .collect()
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Iterates `A ← M·A` from the fresh product state until the L1 step is
    /// at most `tol`. Returns the vector and the number of iterations.
    pub fn fixed_point(&self, alpha: Polarization, tol: f64, max_iter: usize) -> Result<(AVector, usize)> {
        let mut current = AVector::fresh(alpha, self.kept_qubits())?;
        let mut residual = f64::INFINITY;
        for iter in 1..=max_iter {
            let (next, _) = self.apply_round(&current)?.renormalized()?;
            residual = next.l1_distance(&current);
            current = next;
            if residual <= tol {
                return Ok((current, iter));
            }
        }
        Err(Error::ConvergenceFailure {
            cycles: max_iter,
            residual,
        })
    }
}

impl RoundMap for RoundMatrix {
    fn kept_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    fn apply_round(&self, a: &AVector) -> Result<AVector> {
        if a.dim() != self.dim {
            return Err(invalid(format!(
                "vector of length {} for a {}-dimensional round matrix",
                a.dim(),
                self.dim
            )));
        }
        let x = a.probs();
        let mut terms = alloc::vec![0.0; self.dim];
        let out = (0..self.dim)
            .map(|r| {
                for (t, (m, v)) in terms.iter_mut().zip(self.row(r).iter().zip(x)) {
                    *t = m * v;
                }
                pairwise_sum(&terms)
            })
            .collect();
        Ok(AVector(DiagonalState::from_raw(out)))
    }
}

/// One round evaluated on the full `2^n` diagonal.
#[derive(Debug, Clone)]
pub struct FullStateRound {
    perm: Permutation,
    reset: usize,
    fresh: DiagonalState,
}

impl FullStateRound {
    pub fn new(perm: Permutation, reset: usize, alpha: Polarization) -> Result<Self> {
        if reset == 0 || reset >= perm.qubits() {
            return Err(invalid(format!("reset count {reset} invalid for {} qubits", perm.qubits())));
        }
        let fresh = product_state(alpha, reset)?;
        Ok(FullStateRound { perm, reset, fresh })
    }

    pub fn for_config(cfg: &RefrigeratorConfig, alpha: Polarization) -> Result<Self> {
        Self::new(round_permutation(cfg)?, cfg.reset, alpha)
    }
}

impl RoundMap for FullStateRound {
    fn kept_qubits(&self) -> usize {
        self.perm.qubits() - self.reset
    }

    fn apply_round(&self, a: &AVector) -> Result<AVector> {
        let full = tensor(a.as_state(), &self.fresh);
        let compressed = apply_permutation(&full, &self.perm)?;
        trace_out_last(&compressed, self.reset).map(AVector)
    }
}

/// Oracle round: sorts the full diagonal (descending for `α > 0`,
/// ascending otherwise), the optimal compression for a known sign.
#[derive(Debug, Clone)]
pub struct SortedRound {
    qubits: usize,
    reset: usize,
    fresh: DiagonalState,
    descending: bool,
}

impl SortedRound {
    pub fn new(qubits: usize, reset: usize, alpha: Polarization) -> Result<Self> {
        if reset == 0 || reset >= qubits {
            return Err(invalid(format!("reset count {reset} invalid for {qubits} qubits")));
        }
        Ok(SortedRound {
            qubits,
            reset,
            fresh: product_state(alpha, reset)?,
            descending: alpha.value() > 0.0,
        })
    }
}

impl RoundMap for SortedRound {
    fn kept_qubits(&self) -> usize {
        self.qubits - self.reset
    }

    fn apply_round(&self, a: &AVector) -> Result<AVector> {
        let mut probs = tensor(a.as_state(), &self.fresh).into_probs();
        if self.descending {
            probs.sort_by(|x, y| y.total_cmp(x));
        } else {
            probs.sort_by(|x, y| x.total_cmp(y));
        }
        trace_out_last(&DiagonalState::from_raw(probs), self.reset).map(AVector)
    }
}

/// One recycling cycle's output.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleOutput {
    /// Input for the next cycle: target removed, fresh qubit appended.
    pub recycled: AVector,
    /// Target populations after the last round.
    pub target: TargetMarginal,
    /// Whether rounding drift was removed before extraction.
    pub renormalized: bool,
}

impl CycleOutput {
    pub fn alpha_enhanced(&self) -> Polarization {
        clamp(self.target.polarization())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateResult {
    pub a_fixed: AVector,
    pub alpha_enhanced: Polarization,
    pub target: TargetMarginal,
    pub cycles_used: usize,
    pub residual: f64,
    /// Cycles in which accumulated rounding drift was rescaled away.
    pub renormalizations: usize,
}

impl SteadyStateResult {
    /// `(α⁻² − 1)/(α_enh⁻² − 1) / cost`.
    pub fn reduction_factor(&self, alpha: Polarization, cost: usize) -> Result<f64> {
        reduction_factor(alpha, &self.target, cost)
    }
}

/// A refrigerator driven by some [`RoundMap`].
#[derive(Debug, Clone)]
pub struct Refrigerator<R> {
    cfg: RefrigeratorConfig,
    alpha: Polarization,
    map: R,
    fresh_one: DiagonalState,
}

impl Refrigerator<RoundMatrix> {
    pub fn matrix(cfg: RefrigeratorConfig, alpha: Polarization) -> Result<Self> {
        Self::with_map(cfg, alpha, RoundMatrix::for_config(&cfg, alpha)?)
    }
}

impl Refrigerator<FullStateRound> {
    pub fn full_state(cfg: RefrigeratorConfig, alpha: Polarization) -> Result<Self> {
        Self::with_map(cfg, alpha, FullStateRound::for_config(&cfg, alpha)?)
    }
}

impl Refrigerator<SortedRound> {
    pub fn optimal_bound(cfg: RefrigeratorConfig, alpha: Polarization) -> Result<Self> {
        let map = SortedRound::new(cfg.qubits, cfg.reset, alpha)?;
        Self::with_map(cfg, alpha, map)
    }
}

impl<R: RoundMap> Refrigerator<R> {
    pub fn with_map(cfg: RefrigeratorConfig, alpha: Polarization, map: R) -> Result<Self> {
        if map.kept_qubits() != cfg.kept() {
            return Err(invalid("round map does not match the configuration"));
        }
        Ok(Refrigerator {
            cfg,
            alpha,
            map,
            fresh_one: product_state(alpha, 1)?,
        })
    }

    pub fn config(&self) -> &RefrigeratorConfig {
        &self.cfg
    }

    pub fn round_map(&self) -> &R {
        &self.map
    }

    /// The all-fresh starting vector `diag(ρ_α^{⊗(n−m)})`.
    pub fn fresh_start(&self) -> Result<AVector> {
        AVector::fresh(self.alpha, self.cfg.kept())
    }

    /// Runs `rounds` rounds, extracts the target, recycles the rest.
    pub fn recycle_cycle(&self, a: &AVector) -> Result<CycleOutput> {
        if a.qubits() != self.cfg.kept() {
            return Err(invalid(format!(
                "vector on {} qubits, refrigerator keeps {}",
                a.qubits(),
                self.cfg.kept()
            )));
        }
        let (after, renormalized) = self.map.apply_rounds(a, self.cfg.rounds)?.renormalized()?;
        let target = after.target_marginal();
        let recycled = if after.qubits() == 1 {
            self.fresh_one.clone()
        } else {
            tensor(&trace_out_first(after.as_state())?, &self.fresh_one)
        };
        Ok(CycleOutput {
            recycled: AVector(recycled),
            target,
            renormalized,
        })
    }

    /// Recycles from the fresh start until `‖A_{t+1} − A_t‖₁ ≤ tol`.
    pub fn steady_state(&self, tol: f64, max_cycles: usize) -> Result<SteadyStateResult> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(invalid("tolerance must be positive"));
        }
        let mut current = self.fresh_start()?;
        let mut residual = f64::INFINITY;
        let mut renormalizations = 0;
        for cycle in 1..=max_cycles {
            let out = self.recycle_cycle(&current)?;
            renormalizations += usize::from(out.renormalized);
            residual = out.recycled.l1_distance(&current);
            if residual <= tol {
                return Ok(SteadyStateResult {
                    alpha_enhanced: out.alpha_enhanced(),
                    target: out.target,
                    a_fixed: current,
                    cycles_used: cycle,
                    residual,
                    renormalizations,
                });
            }
            current = out.recycled;
        }
        Err(Error::ConvergenceFailure {
            cycles: max_cycles,
            residual,
        })
    }
}

fn clamp(a: f64) -> Polarization {
    Polarization::new(a.clamp(-1.0, 1.0)).expect("clamped polarization")
}

/// [`Refrigerator::recycle_cycle`] on the matrix route, returning the
/// recycled vector and the enhanced target polarization.
pub fn recycle_cycle(
    a: &AVector,
    cfg: &RefrigeratorConfig,
    alpha: Polarization,
) -> Result<(AVector, Polarization)> {
    let out = Refrigerator::matrix(*cfg, alpha)?.recycle_cycle(a)?;
    let enhanced = out.alpha_enhanced();
    Ok((out.recycled, enhanced))
}

/// `α_QR(n, m, rounds, α)`: the refrigerator's steady-state target polarization.
pub fn steady_state(
    cfg: &RefrigeratorConfig,
    alpha: Polarization,
    tol: f64,
    max_cycles: usize,
) -> Result<SteadyStateResult> {
    Refrigerator::matrix(*cfg, alpha)?.steady_state(tol, max_cycles)
}

/// Same recycling as [`steady_state`] but with every round replaced by a
/// sign-aware sort of the full diagonal. An upper-bound oracle, not a protocol.
pub fn optimal_bound_simulate(cfg: &RefrigeratorConfig, alpha: Polarization) -> Result<SteadyStateResult> {
    optimal_bound_steady_state(cfg, alpha, DEFAULT_TOLERANCE, DEFAULT_MAX_CYCLES)
}

pub fn optimal_bound_steady_state(
    cfg: &RefrigeratorConfig,
    alpha: Polarization,
    tol: f64,
    max_cycles: usize,
) -> Result<SteadyStateResult> {
    Refrigerator::optimal_bound(*cfg, alpha)?.steady_state(tol, max_cycles)
}

/// Asymptotic polarization `tanh(m 2^{n−m−1} artanh α)` as rounds → ∞.
pub fn alpha_infinity(n: usize, m: usize, alpha: Polarization) -> Result<Polarization> {
    if m == 0 || m >= n {
        return Err(invalid(format!("need 1 <= m < n, got n={n} m={m}")));
    }
    let exponent = m as f64 * libm::pow(2.0, (n - m - 1) as f64);
    Ok(tanh_power(exponent, alpha))
}

/// `tanh(k artanh α)`, exact at `α = ±1`.
///
/// Integer `k` uses `(p^k − q^k)/(p^k + q^k)` while `p^k` stays normal, which
/// is exact for dyadic `α` and keeps `α → −α` an exact negation.
pub(crate) fn tanh_power(k: f64, alpha: Polarization) -> Polarization {
    let a = alpha.value();
    if a.abs() == 1.0 {
        return alpha;
    }
    if k == libm::trunc(k) {
        let pk = libm::pow(alpha.ground(), k);
        let qk = libm::pow(alpha.excited(), k);
        if pk.max(qk) >= f64::MIN_POSITIVE {
            return clamp((pk - qk) / (pk + qk));
        }
    }
    clamp(libm::tanh(k * libm::atanh(a)))
}

/// `(α⁻² − 1) / (α_enh⁻² − 1) / cost`, evaluated from target populations.
pub fn reduction_factor(alpha: Polarization, enhanced: &TargetMarginal, cost: usize) -> Result<f64> {
    let a = alpha.value();
    if a == 0.0 {
        return Err(Error::UndefinedAtZero);
    }
    if cost == 0 {
        return Err(invalid("cost must be positive"));
    }
    if a.abs() == 1.0 {
        return Ok(f64::INFINITY);
    }
    let before = TargetMarginal::from_polarization(alpha).variance_to_signal();
    Ok(before / enhanced.variance_to_signal() / cost as f64)
}

/// `r_QR` for `cfg` at the default steady-state tolerance.
pub fn reduction_factor_qr(cfg: &RefrigeratorConfig, alpha: Polarization) -> Result<f64> {
    if alpha.value() == 0.0 {
        return Err(Error::UndefinedAtZero);
    }
    steady_state(cfg, alpha, DEFAULT_TOLERANCE, DEFAULT_MAX_CYCLES)?.reduction_factor(alpha, cfg.cost())
}

/// Round matrix of the full staircase on `n` qubits with `m` resets.
pub fn build_round_matrix(n: usize, m: usize, alpha: Polarization) -> Result<RoundMatrix> {
    if m == 0 || m >= n {
        return Err(invalid(format!("need 1 <= m < n, got n={n} m={m}")));
    }
    RoundMatrix::from_permutation(&build_uqr(n)?, m, alpha)
}
