//! Diagonal-state algebra.
//!
//! A [`DiagonalState`] of `n` qubits stores the `2^n` populations of a density
//! matrix that is diagonal in the computational basis. The target qubit is
//! the most significant bit of the basis index.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::pairwise_sum;
use crate::permutation::Permutation;
use crate::NORMALIZATION_TOLERANCE;

/// Single-qubit polarization `α = Tr(Zρ)`, in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Polarization(f64);

impl Polarization {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha.abs() > 1.0 {
            return Err(invalid(format!("polarization {alpha} outside [-1, 1]")));
        }
        Ok(Polarization(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Ground-state population `p = (1 + α) / 2`.
    pub fn ground(self) -> f64 {
        (1.0 + self.0) / 2.0
    }

    /// Excited-state population `(1 − α) / 2`, computed without going through `1 − p`.
    pub fn excited(self) -> f64 {
        (1.0 - self.0) / 2.0
    }
}

impl core::ops::Neg for Polarization {
    type Output = Polarization;

    fn neg(self) -> Polarization {
        Polarization(-self.0)
    }
}

/// Ground and excited populations of a single (target) qubit.
///
/// Kept separate from [`Polarization`] because derived quantities such as
/// `1 − α²` lose all precision when `α` is within a few ulps of `±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetMarginal {
    pub ground: f64,
    pub excited: f64,
}

impl TargetMarginal {
    pub fn polarization(&self) -> f64 {
        self.ground - self.excited
    }

    /// `(1 − α²) / α²`, the variance-to-squared-mean ratio that sets the
    /// shot count needed to resolve the sign.
    pub fn variance_to_signal(&self) -> f64 {
        let diff = self.ground - self.excited;
        4.0 * self.ground * self.excited / (diff * diff)
    }

    pub(crate) fn from_polarization(alpha: Polarization) -> Self {
        TargetMarginal {
            ground: alpha.ground(),
            excited: alpha.excited(),
        }
    }
}

/// Probability vector over the computational basis of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    qubits: usize,
    probs: Vec<f64>,
}

impl DiagonalState {
    /// Validates length `2^n`, non-negativity and total mass within
    /// [`NORMALIZATION_TOLERANCE`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let len = probs.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(invalid(format!("length {len} is not 2^n with n >= 1")));
        }
        if let Some(bad) = probs.iter().find(|p| p.is_nan() || **p < 0.0) {
            return Err(invalid(format!("negative or NaN population {bad}")));
        }
        let drift = (pairwise_sum(&probs) - 1.0).abs();
        if drift > NORMALIZATION_TOLERANCE {
            return Err(Error::NormalizationDrift { drift });
        }
        Ok(Self::from_raw(probs))
    }

    /// Builds a state without validation. `probs.len()` must be a power of two.
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        debug_assert!(probs.len().is_power_of_two());
        DiagonalState {
            qubits: probs.len().trailing_zeros() as usize,
            probs,
        }
    }

    /// The single basis state `|index⟩` on `n` qubits.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = dim_of(qubits)?;
        if index >= dim {
            return Err(invalid(format!("basis index {index} out of range for {qubits} qubits")));
        }
        let mut probs = vec![0.0; dim];
        probs[index] = 1.0;
        Ok(Self::from_raw(probs))
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.probs)
    }

    /// Largest absolute difference between corresponding populations.
    pub fn max_abs_diff(&self, other: &DiagonalState) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `‖self − other‖₁`, or infinity on dimension mismatch.
    pub fn l1_distance(&self, other: &DiagonalState) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum()
    }

    /// Populations of the target (most significant) qubit.
    pub fn target_marginal(&self) -> TargetMarginal {
        let (lo, hi) = self.probs.split_at(self.dim() / 2);
        TargetMarginal {
            ground: pairwise_sum(lo),
            excited: pairwise_sum(hi),
        }
    }
}

pub(crate) fn dim_of(qubits: usize) -> Result<usize> {
    if qubits == 0 || qubits >= usize::BITS as usize - 1 {
        return Err(invalid(format!("unsupported qubit count {qubits}")));
    }
    Ok(1usize << qubits)
}

/// `ρ_α^{⊗n}`: entry `i` is `p^{n−w(i)} (1−p)^{w(i)}` with `w` the Hamming weight.
pub fn product_state(alpha: Polarization, qubits: usize) -> Result<DiagonalState> {
    let dim = dim_of(qubits)?;
    let (p, q) = (alpha.ground(), alpha.excited());
    // powers[w] = p^(n-w) q^w, evaluated so that swapping p and q maps
    // powers[w] onto powers[n-w] bit for bit.
    let powers: Vec<f64> = (0..=qubits)
        .map(|w| libm::pow(p, (qubits - w) as f64) * libm::pow(q, w as f64))
        .collect();
    let probs = (0..dim).map(|i| powers[i.count_ones() as usize]).collect();
    Ok(DiagonalState::from_raw(probs))
}

/// `a ⊗ b`; `a` occupies the high bits of the index.
pub fn tensor(a: &DiagonalState, b: &DiagonalState) -> DiagonalState {
    let mut probs = Vec::with_capacity(a.dim() * b.dim());
    for &x in &a.probs {
        probs.extend(b.probs.iter().map(|&y| x * y));
    }
    DiagonalState::from_raw(probs)
}

/// Traces out the last `m` qubits.
pub fn trace_out_last(d: &DiagonalState, m: usize) -> Result<DiagonalState> {
    if m == 0 || m >= d.qubits {
        return Err(invalid(format!(
            "cannot trace {m} of {} qubits (need 1 <= m < n)",
            d.qubits
        )));
    }
    let block = 1usize << m;
    let probs: Vec<f64> = d.probs.chunks_exact(block).map(pairwise_sum).collect();
    check_drift(&probs)?;
    Ok(DiagonalState::from_raw(probs))
}

/// Traces out the first (target) qubit.
pub fn trace_out_first(d: &DiagonalState) -> Result<DiagonalState> {
    if d.qubits < 2 {
        return Err(invalid("cannot trace the only qubit of a 1-qubit state"));
    }
    let (lo, hi) = d.probs.split_at(d.dim() / 2);
    let probs: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| a + b).collect();
    check_drift(&probs)?;
    Ok(DiagonalState::from_raw(probs))
}

fn check_drift(probs: &[f64]) -> Result<()> {
    let drift = (pairwise_sum(probs) - 1.0).abs();
    if drift > NORMALIZATION_TOLERANCE {
        return Err(Error::NormalizationDrift { drift });
    }
    Ok(())
}

/// Polarization of the target qubit, `Tr(Z ρ_target)`.
pub fn marginal_target(d: &DiagonalState) -> Polarization {
    let alpha = d.target_marginal().polarization();
    // Rounding can push |α| past 1 by an ulp for near-pure states.
    Polarization(alpha.clamp(-1.0, 1.0))
}

/// `probs'[π(i)] = probs[i]`.
pub fn apply_permutation(d: &DiagonalState, perm: &Permutation) -> Result<DiagonalState> {
    if perm.qubits() != d.qubits {
        return Err(invalid(format!(
            "permutation on {} qubits applied to a {}-qubit state",
            perm.qubits(),
            d.qubits
        )));
    }
    let mut probs = vec![0.0; d.dim()];
    for (i, &target) in perm.map().iter().enumerate() {
        probs[target] = d.probs[i];
    }
    Ok(DiagonalState::from_raw(probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pol(a: f64) -> Polarization {
        Polarization::new(a).unwrap()
    }

    fn state(v: &[f64]) -> DiagonalState {
        DiagonalState::new(v.to_vec()).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn product_state_examples() {
        assert_eq!(product_state(pol(0.0), 2).unwrap().probs(), &[0.25; 4]);
        let pure = product_state(pol(1.0), 3).unwrap();
        assert_eq!(pure.probs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(product_state(pol(0.5), 1).unwrap().probs(), &[0.75, 0.25]);
    }

    #[test]
    fn product_state_rejects_bad_input() {
        assert!(product_state(pol(0.3), 0).is_err());
        assert!(Polarization::new(1.5).is_err());
        assert!(Polarization::new(f64::NAN).is_err());
    }

    #[test]
    fn tensor_examples() {
        let t = tensor(&state(&[1.0, 0.0]), &state(&[0.75, 0.25]));
        assert_eq!(t.probs(), &[0.75, 0.25, 0.0, 0.0]);
        let t = tensor(&state(&[0.5, 0.5]), &state(&[0.5, 0.5]));
        assert_eq!(t.probs(), &[0.25; 4]);
        let t = tensor(&state(&[0.75, 0.25]), &state(&[0.6, 0.4]));
        assert_close(t.probs(), &[0.45, 0.30, 0.15, 0.10], 1e-15);
        assert_eq!(t.qubits(), 2);
    }

    #[test]
    fn trace_examples() {
        let d = state(&[0.45, 0.30, 0.15, 0.10]);
        assert_close(trace_out_last(&d, 1).unwrap().probs(), &[0.75, 0.25], 1e-15);
        let pure = state(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(trace_out_last(&pure, 1).unwrap().probs(), &[1.0, 0.0]);
        let big = product_state(pol(0.3), 5).unwrap();
        let reduced = trace_out_last(&big, 2).unwrap();
        assert!(reduced.max_abs_diff(&product_state(pol(0.3), 3).unwrap()) < 1e-15);
        assert!(trace_out_last(&big, 5).is_err());
        assert!(trace_out_last(&big, 0).is_err());
    }

    #[test]
    fn trace_out_first_sums_halves() {
        let d = state(&[0.45, 0.30, 0.15, 0.10]);
        assert_close(trace_out_first(&d).unwrap().probs(), &[0.6, 0.4], 1e-15);
        assert!(trace_out_first(&state(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn marginal_examples() {
        let d = product_state(pol(0.5), 3).unwrap();
        assert!((marginal_target(&d).value() - 0.5).abs() < 1e-15);
        assert_eq!(marginal_target(&state(&[0.0, 0.0, 0.0, 1.0])).value(), -1.0);
        // MSB = 0 mass of 0.84375 gives 2p - 1.
        let d = state(&[0.5, 0.25, 0.0625, 0.03125, 0.0625, 0.0625, 0.03125, 0.0]);
        assert_eq!(marginal_target(&d).value(), 0.6875);
    }

    #[test]
    fn permutation_examples() {
        let d = product_state(pol(0.5), 3).unwrap();
        assert_eq!(apply_permutation(&d, &Permutation::identity(3).unwrap()).unwrap(), d);
        let swap = Permutation::from_transpositions(3, &[(3, 4)]).unwrap();
        let out = apply_permutation(&d, &swap).unwrap();
        for i in 0..8 {
            let src = match i {
                3 => 4,
                4 => 3,
                _ => i,
            };
            assert_eq!(out.probs()[i], d.probs()[src]);
        }
        assert_eq!(out.total(), d.total());
        assert!(apply_permutation(&d, &Permutation::identity(2).unwrap()).is_err());
    }

    #[test]
    fn new_validates() {
        assert!(DiagonalState::new(vec![0.5, 0.5, 0.0]).is_err());
        assert!(DiagonalState::new(vec![1.2, -0.2]).is_err());
        assert!(matches!(
            DiagonalState::new(vec![0.5, 0.4]),
            Err(Error::NormalizationDrift { .. })
        ));
    }

    #[test]
    fn marginal_of_product_on_grid() {
        for step in 0..=200 {
            let a = -1.0 + step as f64 * 0.01;
            for n in 1..=8 {
                let d = product_state(pol(a), n).unwrap();
                assert!((marginal_target(&d).value() - a).abs() <= 1e-14, "a={a} n={n}");
            }
        }
    }

    fn arb_state(max_qubits: usize) -> impl Strategy<Value = DiagonalState> {
        (1..=max_qubits)
            .prop_flat_map(|n| proptest::collection::vec(0.0f64..1.0, 1 << n))
            .prop_filter("non-zero mass", |v| v.iter().sum::<f64>() > 1e-3)
            .prop_map(|v| {
                let s: f64 = v.iter().sum();
                DiagonalState::from_raw(v.into_iter().map(|x| x / s).collect())
            })
    }

    proptest! {
        #[test]
        fn tensor_then_trace_recovers_first_factor(a in arb_state(4), b in arb_state(3)) {
            let t = tensor(&a, &b);
            prop_assert!((t.total() - 1.0).abs() <= 1e-12);
            let back = trace_out_last(&t, b.qubits()).unwrap();
            prop_assert!(back.max_abs_diff(&a) <= 1e-15);
            prop_assert!(t.probs().iter().all(|p| *p >= 0.0));
        }

        #[test]
        fn permutation_roundtrip_is_exact(d in arb_state(5), seed in any::<u64>()) {
            let perm = Permutation::pseudo_random(d.qubits(), seed).unwrap();
            let there = apply_permutation(&d, &perm).unwrap();
            let back = apply_permutation(&there, &perm.inverse()).unwrap();
            prop_assert_eq!(back, d);
        }
    }
}
