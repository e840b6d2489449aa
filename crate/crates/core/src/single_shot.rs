//! Optimal bidirectional single-shot entropy compression on identical qubits.
//!
//! For `n` copies of `ρ_α` the optimal compression for `α > 0` reorders the
//! diagonal by Hamming weight, lightest first. The same fixed reordering
//! turns into the optimal compression towards `|1⟩` when `α < 0`, so it
//! never needs to know the sign.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::{binomial, ln_binomial};
use crate::permutation::Permutation;
use crate::state::{apply_permutation, marginal_target, product_state, DiagonalState, Polarization, TargetMarginal};

/// Maximum deviation from a product state tolerated by [`optimal_compression`].
pub const PRODUCT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionResult {
    pub state_after: DiagonalState,
    pub alpha_target: Polarization,
    pub n: usize,
}

/// The fixed reordering: basis index `i` moves to its rank under
/// `(Hamming weight, index)`.
pub fn compression_permutation(qubits: usize) -> Result<Permutation> {
    let identity = Permutation::identity(qubits)?;
    let mut order: Vec<usize> = identity.map().to_vec();
    order.sort_by_key(|&i| (i.count_ones(), i));
    let mut map = alloc::vec![0; order.len()];
    for (rank, &i) in order.iter().enumerate() {
        map[i] = rank;
    }
    Permutation::from_map(map)
}

/// Applies the optimal bidirectional compression to `ρ_α^{⊗n}`.
///
/// Inputs that are not identical-qubit product states are rejected with
/// [`Error::ContractViolation`].
pub fn optimal_compression(d: &DiagonalState) -> Result<CompressionResult> {
    let n = d.qubits();
    let alpha = marginal_target(d);
    let reference = product_state(alpha, n)?;
    let deviation = d.max_abs_diff(&reference);
    if deviation > PRODUCT_TOLERANCE {
        return Err(Error::ContractViolation(format!(
            "input is not a product of identical qubits (deviation {deviation:e})"
        )));
    }
    let state_after = apply_permutation(d, &compression_permutation(n)?)?;
    let alpha_target = marginal_target(&state_after);
    Ok(CompressionResult {
        state_after,
        alpha_target,
        n,
    })
}

/// `C(n, i) a^{n−i} b^i`, switching to log space for large `n`.
fn shell_weight(n: u64, i: u64, a: f64, b: f64) -> f64 {
    if n <= 60 {
        return binomial(n, i) * (libm::pow(a, (n - i) as f64) * libm::pow(b, i as f64));
    }
    if (a == 0.0 && i < n) || (b == 0.0 && i > 0) {
        return 0.0;
    }
    let mut log = ln_binomial(n, i);
    if i < n {
        log += (n - i) as f64 * libm::log(a);
    }
    if i > 0 {
        log += i as f64 * libm::log(b);
    }
    libm::exp(log)
}

/// Target populations after the optimal compression of `ρ_α^{⊗n}`.
///
/// Shells of weight `< n/2` land in the target's `|0⟩` half and shells of
/// weight `> n/2` in its `|1⟩` half; for even `n` the weight-`n/2` shell
/// straddles the boundary and is split evenly.
pub fn compressed_target_marginal(n: usize, alpha: Polarization) -> Result<TargetMarginal> {
    if n == 0 {
        return Err(invalid("need at least one qubit"));
    }
    let n = n as u64;
    let (p, q) = (alpha.ground(), alpha.excited());
    let mut ground = 0.0;
    let mut excited = 0.0;
    for i in 0..n.div_ceil(2) {
        if 2 * i == n {
            break;
        }
        ground += shell_weight(n, i, p, q);
        excited += shell_weight(n, i, q, p);
    }
    if n.is_multiple_of(2) {
        let middle = 0.5 * shell_weight(n, n / 2, p, q);
        ground += middle;
        excited += middle;
    }
    Ok(TargetMarginal { ground, excited })
}

/// Closed-form enhanced polarization `α_AC(n, α)`.
///
/// For odd `n` this is `2 Σ_{i≤(n−1)/2} C(n,i) p^{n−i}(1−p)^i − 1`.
pub fn alpha_ac(n: usize, alpha: Polarization) -> Result<Polarization> {
    let marginal = compressed_target_marginal(n, alpha)?;
    Ok(clamp(marginal.polarization()))
}

/// `erf(nα / √(2n(1−α²)))`, the Gaussian approximation of [`alpha_ac`].
pub fn alpha_ac_erf(n: usize, alpha: Polarization) -> Result<Polarization> {
    if n == 0 {
        return Err(invalid("need at least one qubit"));
    }
    let a = alpha.value();
    if a.abs() == 1.0 {
        return Ok(alpha);
    }
    Ok(clamp(libm::erf(erf_argument(n, a))))
}

fn erf_argument(n: usize, a: f64) -> f64 {
    let n = n as f64;
    n * a / libm::sqrt(2.0 * n * (1.0 - a) * (1.0 + a))
}

fn clamp(a: f64) -> Polarization {
    Polarization::new(a.clamp(-1.0, 1.0)).expect("clamped polarization")
}

/// Reduction factor of the sampling-error bound at matched qubit budget:
/// `(1/n) (α⁻² − 1) / (α_AC⁻² − 1)`.
///
/// Returns `+∞` at `|α| = 1`.
pub fn reduction_factor_ac(n: usize, alpha: Polarization) -> Result<f64> {
    let a = alpha.value();
    if a == 0.0 {
        return Err(Error::UndefinedAtZero);
    }
    if n == 0 {
        return Err(invalid("need at least one qubit"));
    }
    if a.abs() == 1.0 {
        return Ok(f64::INFINITY);
    }
    let before = TargetMarginal::from_polarization(alpha).variance_to_signal();
    let after = compressed_target_marginal(n, alpha)?.variance_to_signal();
    Ok(before / after / n as f64)
}

/// [`reduction_factor_ac`] with `α_AC` replaced by its erf approximation.
pub fn reduction_factor_ac_erf(n: usize, alpha: Polarization) -> Result<f64> {
    let a = alpha.value();
    if a == 0.0 {
        return Err(Error::UndefinedAtZero);
    }
    if n == 0 {
        return Err(invalid("need at least one qubit"));
    }
    if a.abs() == 1.0 {
        return Ok(f64::INFINITY);
    }
    let xi = erf_argument(n, a.abs());
    let erf = libm::erf(xi);
    let erfc = libm::erfc(xi);
    // (erf⁻² − 1) = erfc (2 − erfc) / erf², without cancellation near erf = 1.
    let after = erfc * (2.0 - erfc) / (erf * erf);
    let before = TargetMarginal::from_polarization(alpha).variance_to_signal();
    Ok(before / after / n as f64)
}

/// Low-polarization approximation `2(1 − α²) / (π − 2nα²)`.
pub fn reduction_factor_ac_low_approx(n: usize, alpha: Polarization) -> Result<f64> {
    let a = alpha.value();
    let denominator = core::f64::consts::PI - 2.0 * n as f64 * a * a;
    if denominator <= 0.0 {
        return Err(Error::OutOfRegime);
    }
    Ok(2.0 * (1.0 - a * a) / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::product_state;

    fn pol(a: f64) -> Polarization {
        Polarization::new(a).unwrap()
    }

    /// Oracle: sort the diagonal of ρ_α^{⊗n} by value (descending for α ≥ 0,
    /// ascending otherwise) and read off the target marginal.
    fn sort_oracle(n: usize, a: f64) -> f64 {
        let mut v = product_state(pol(a), n).unwrap().into_probs();
        if a >= 0.0 {
            v.sort_by(|x, y| y.partial_cmp(x).unwrap());
        } else {
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        }
        let h = v.len() / 2;
        v[..h].iter().sum::<f64>() - v[h..].iter().sum::<f64>()
    }

    #[test]
    fn oracle_values() {
        assert_eq!(sort_oracle(3, 0.5), 0.6875);
        assert!((sort_oracle(5, 0.2) - 0.36512).abs() < 1e-14);
    }

    #[test]
    fn optimal_compression_examples() {
        let r = optimal_compression(&product_state(pol(0.5), 3).unwrap()).unwrap();
        assert_eq!(r.alpha_target.value(), 0.6875);
        assert_eq!(r.n, 3);
        let r = optimal_compression(&product_state(pol(0.0), 5).unwrap()).unwrap();
        assert_eq!(r.alpha_target.value(), 0.0);
        let r = optimal_compression(&product_state(pol(-0.5), 3).unwrap()).unwrap();
        assert_eq!(r.alpha_target.value(), -0.6875);
    }

    #[test]
    fn optimal_compression_sorts_by_sign() {
        for &a in &[0.3, -0.3, 0.8, -0.8] {
            let out = optimal_compression(&product_state(pol(a), 4).unwrap()).unwrap();
            let v = out.state_after.probs();
            let ordered = v.windows(2).all(|w| if a > 0.0 { w[0] >= w[1] } else { w[0] <= w[1] });
            assert!(ordered, "a={a}: {v:?}");
        }
    }

    #[test]
    fn optimal_compression_rejects_non_product() {
        let d = DiagonalState::new(vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        assert!(matches!(optimal_compression(&d), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn compression_permutation_for_three_qubits() {
        // Weight order for n = 3 only exchanges |011⟩ and |100⟩.
        let p = compression_permutation(3).unwrap();
        assert_eq!(p.moved(), vec![3, 4]);
    }

    #[test]
    fn alpha_ac_examples() {
        assert_eq!(alpha_ac(3, pol(0.5)).unwrap().value(), 0.6875);
        assert!((alpha_ac(5, pol(0.2)).unwrap().value() - 0.36512).abs() < 1e-14);
        for n in 1..=12 {
            assert_eq!(alpha_ac(n, pol(0.0)).unwrap().value(), 0.0, "n={n}");
        }
        assert!(alpha_ac(0, pol(0.2)).is_err());
    }

    #[test]
    fn alpha_ac_matches_sort_oracle() {
        for n in 1..=10 {
            for step in -99..=99 {
                let a = step as f64 / 100.0;
                let closed = alpha_ac(n, pol(a)).unwrap().value();
                assert!((closed - sort_oracle(n, a)).abs() < 1e-12, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn even_n_matches_preceding_odd_n() {
        for step in 1..100 {
            let a = pol(step as f64 / 100.0);
            for n in [2, 4, 6, 8] {
                let even = alpha_ac(n, a).unwrap().value();
                let odd = alpha_ac(n - 1, a).unwrap().value();
                assert!((even - odd).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn alpha_ac_large_n_uses_log_space() {
        let small = alpha_ac(61, pol(0.1)).unwrap().value();
        let erf = alpha_ac_erf(61, pol(0.1)).unwrap().value();
        assert!((small - erf).abs() < 0.01);
        assert!(alpha_ac(201, pol(0.3)).unwrap().value() > 0.99);
        assert_eq!(alpha_ac(101, pol(1.0)).unwrap().value(), 1.0);
    }

    #[test]
    fn alpha_ac_odd_symmetry_is_exact() {
        for n in 1..=9 {
            for step in 1..100 {
                let a = step as f64 / 100.0;
                let plus = alpha_ac(n, pol(a)).unwrap().value();
                let minus = alpha_ac(n, pol(-a)).unwrap().value();
                assert_eq!(plus, -minus);
            }
        }
    }

    #[test]
    fn alpha_ac_erf_examples() {
        let v = alpha_ac_erf(3, pol(0.5)).unwrap().value();
        assert!((v - 0.682689492137086).abs() < 1e-12);
        assert_eq!(alpha_ac_erf(7, pol(0.0)).unwrap().value(), 0.0);
        assert!((v - alpha_ac(3, pol(0.5)).unwrap().value()).abs() < 0.01);
        assert_eq!(alpha_ac_erf(3, pol(1.0)).unwrap().value(), 1.0);
        assert_eq!(alpha_ac_erf(3, pol(-1.0)).unwrap().value(), -1.0);
    }

    #[test]
    fn reduction_factor_examples() {
        let r = reduction_factor_ac(3, pol(0.5)).unwrap();
        assert!((r - 0.896296296296296).abs() < 1e-12, "{r}");
        assert_eq!(reduction_factor_ac(3, pol(0.0)), Err(Error::UndefinedAtZero));
        assert_eq!(reduction_factor_ac(3, pol(1.0)).unwrap(), f64::INFINITY);
        // Divergence toward α = 1.
        let mut last = 0.0;
        for a in [0.9, 0.99, 0.999, 0.9999] {
            let r = reduction_factor_ac(3, pol(a)).unwrap();
            assert!(r > last);
            last = r;
        }
        assert!(last > 1e3);
    }

    #[test]
    fn reduction_factor_exact_small_alpha_limit() {
        // α_AC ≈ α n C(n−1, (n−1)/2) / 2^(n−1) as α → 0.
        for (n, limit) in [(3usize, 0.75), (5, 0.703125), (7, 0.68359375)] {
            let r = reduction_factor_ac(n, pol(1e-4)).unwrap();
            assert!((r - limit).abs() < 1e-6, "n={n} r={r}");
        }
    }

    #[test]
    fn erf_form_reaches_two_over_pi() {
        for n in [3, 5, 7] {
            let r = reduction_factor_ac_erf(n, pol(1e-3)).unwrap();
            assert!((r / core::f64::consts::FRAC_2_PI - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn low_approx_examples() {
        let r = reduction_factor_ac_low_approx(3, pol(0.0)).unwrap();
        assert!((r - core::f64::consts::FRAC_2_PI).abs() < 1e-15);
        let r = reduction_factor_ac_low_approx(5, pol(0.1)).unwrap();
        assert!((r - 1.98 / (core::f64::consts::PI - 0.1)).abs() < 1e-15);
        assert!((r - 0.650975).abs() < 1e-6);
        assert_eq!(reduction_factor_ac_low_approx(5, pol(0.9)), Err(Error::OutOfRegime));
    }

    #[test]
    fn low_approx_tracks_erf_form() {
        for n in 1..=7 {
            for step in 1..=5 {
                let a = pol(step as f64 / 100.0);
                let approx = reduction_factor_ac_low_approx(n, a).unwrap();
                let erf = reduction_factor_ac_erf(n, a).unwrap();
                assert!((approx / erf - 1.0).abs() < 0.05, "n={n} a={a:?}");
            }
        }
    }

    #[test]
    fn bidirectional_growth() {
        for n in 3..=9 {
            for step in 1..100 {
                let a = step as f64 / 100.0;
                for s in [a, -a] {
                    let out = alpha_ac(n, pol(s)).unwrap().value();
                    assert_eq!(out.signum(), s.signum());
                    assert!(out.abs() > s.abs(), "n={n} a={s}");
                }
            }
        }
        // Two qubits cannot help: the weight-1 shell straddles the target boundary.
        assert!((alpha_ac(2, pol(0.4)).unwrap().value() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_n_by_two() {
        for n in 1..=15 {
            for step in 1..100 {
                let a = pol(step as f64 / 100.0);
                assert!(alpha_ac(n + 2, a).unwrap().value() >= alpha_ac(n, a).unwrap().value());
            }
        }
    }

    #[test]
    fn output_majorizes_input() {
        for n in 2..=7 {
            for &a in &[0.1, 0.5, 0.9] {
                let input = product_state(pol(a), n).unwrap();
                let out = optimal_compression(&input).unwrap().state_after;
                // Prefix sums in basis order: the compressed state front-loads mass.
                let (mut acc_in, mut acc_out) = (0.0, 0.0);
                for (x, y) in input.probs().iter().zip(out.probs()) {
                    acc_in += x;
                    acc_out += y;
                    assert!(acc_out >= acc_in - 1e-15);
                }
            }
        }
    }
}
