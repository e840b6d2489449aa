//! BQR with 3-local compressions.
//!
//! Every round slides `U_C3` along the string, starting on the last three
//! qubits and ending on the first three. With `m = 2` the asymptotic state
//! is a product whose populations follow the Fibonacci numbers.

use alloc::format;
use alloc::vec::Vec;

use crate::bqr::{
    build_ucj, reduction_factor_qr, tanh_power, Locality, RefrigeratorConfig,
};
use crate::error::{invalid, Result};
use crate::permutation::Permutation;
use crate::state::Polarization;

/// `(U_C3 ⊗ 𝟙)(𝟙 ⊗ U_C3 ⊗ 𝟙) … (𝟙 ⊗ U_C3)`; the rightmost window acts first.
pub fn build_uqr_3local(n: usize) -> Result<Permutation> {
    build_sliding_staircase(&build_ucj(3)?, n)
}

/// Composes `block` on every window of consecutive qubits, from the end of
/// the string towards the first qubit.
pub fn build_sliding_staircase(block: &Permutation, n: usize) -> Result<Permutation> {
    let k = block.qubits();
    if n < k {
        return Err(invalid(format!("a {k}-local staircase needs n >= {k}, got {n}")));
    }
    let mut total = Permutation::identity(n)?;
    for shift in 0..=(n - k) {
        total = total.then(&block.embed(n, shift)?)?;
    }
    Ok(total)
}

/// `F_1 = F_2 = 1`. Returns 0 for `j = 0`.
pub fn fibonacci(j: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..j {
        let next = a.checked_add(b).expect("fibonacci overflow");
        a = b;
        b = next;
    }
    a
}

/// `tanh(F_n artanh α)`.
pub fn alpha_infinity_3local(n: usize, alpha: Polarization) -> Result<Polarization> {
    if n < 3 {
        return Err(invalid(format!("need n >= 3, got {n}")));
    }
    Ok(tanh_power(fibonacci(n) as f64, alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KLocalAsymptotics {
    pub n: usize,
    /// Ground-state populations, from the end of the string to the target.
    pub populations: Vec<f64>,
    pub alpha_target_infinity: Polarization,
}

impl KLocalAsymptotics {
    /// Populations ordered target first, as in the basis index.
    pub fn populations_target_first(&self) -> Vec<f64> {
        self.populations.iter().rev().copied().collect()
    }
}

/// Asymptotic per-qubit populations `p^F/(p^F + q^F)` for `m = 2`.
pub fn asymptotic_population_vector(n: usize, alpha: Polarization) -> Result<KLocalAsymptotics> {
    if n < 3 {
        return Err(invalid(format!("need n >= 3, got {n}")));
    }
    let populations = (1..=n)
        .map(|j| {
            let a = tanh_power(fibonacci(j) as f64, alpha);
            (1.0 + a.value()) / 2.0
        })
        .collect();
    Ok(KLocalAsymptotics {
        n,
        populations,
        alpha_target_infinity: alpha_infinity_3local(n, alpha)?,
    })
}

/// [`reduction_factor_qr`] with the 3-local round.
pub fn reduction_factor_qr_3local(cfg: &RefrigeratorConfig, alpha: Polarization) -> Result<f64> {
    reduction_factor_qr(&cfg.with_locality(Locality::ThreeLocal), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqr::{
        build_uqr, steady_state, AVector, Refrigerator, FullStateRound, RoundMap, RoundMatrix, DEFAULT_MAX_CYCLES,
        DEFAULT_TOLERANCE,
    };

    fn pol(a: f64) -> Polarization {
        Polarization::new(a).unwrap()
    }

    fn local_cfg(n: usize, m: usize, rounds: usize) -> RefrigeratorConfig {
        RefrigeratorConfig::new(n, m, rounds, Locality::ThreeLocal).unwrap()
    }

    #[test]
    fn fibonacci_values() {
        assert_eq!(fibonacci(1), 1);
        assert_eq!(fibonacci(2), 1);
        assert_eq!(fibonacci(5), 5);
        assert_eq!(fibonacci(10), 55);
        assert_eq!(fibonacci(0), 0);
    }

    #[test]
    fn staircase_examples() {
        assert_eq!(build_uqr_3local(3).unwrap(), build_uqr(3).unwrap());
        let u4 = build_uqr_3local(4).unwrap();
        let lo = build_ucj(3).unwrap().embed(4, 0).unwrap();
        let hi = build_ucj(3).unwrap().embed(4, 1).unwrap();
        assert_eq!(u4.map(), lo.then(&hi).unwrap().map());
        assert_eq!(lo.moved(), vec![3, 4, 11, 12]);
        assert_eq!(hi.moved(), vec![6, 7, 8, 9]);
        assert!(u4.then(&u4.inverse()).unwrap().is_identity());
        assert!(build_uqr_3local(2).is_err());
    }

    #[test]
    fn m4_3local_matches_reference_entries() {
        for &p in &[0.52, 0.66, 0.75, 0.88, 0.99] {
            let c = local_cfg(4, 2, 1);
            let m = RoundMatrix::for_config(&c, pol(2.0 * p - 1.0)).unwrap();
            let q = 1.0 - p;
            let expected = [
                [p * (2.0 - p), p * p, 0.0, 0.0],
                [q * q, p * q, p, 0.0],
                [0.0, q, p * q, p * p],
                [0.0, 0.0, q * q, 1.0 - p * p],
            ];
            for (r, row) in expected.iter().enumerate() {
                for (col, &e) in row.iter().enumerate() {
                    assert!((m.get(r, col) - e).abs() < 1e-12, "p={p} ({r},{col})");
                }
            }
        }
    }

    #[test]
    fn m5_3local_rows_match_reference_rows() {
        // The reference lists the same rows in another order; compare as multisets.
        let p = 0.7;
        let q = 1.0 - p;
        let reference: [[f64; 8]; 8] = [
            [p * (2.0 - p), p * p, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [q * q, p * q, p, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, q, p * q, p * p, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, p * (2.0 - p), p * p, 0.0, 0.0],
            [0.0, 0.0, q * q, 1.0 - p * p, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, q * q, p * q, p, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, q, p * q, p * p],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, q * q, 1.0 - p * p],
        ];
        let m = RoundMatrix::for_config(&local_cfg(5, 2, 1), pol(2.0 * p - 1.0)).unwrap();
        let mut unmatched: Vec<usize> = (0..8).collect();
        for r in 0..8 {
            let hit = unmatched
                .iter()
                .position(|&k| (0..8).all(|c| (m.get(r, c) - reference[k][c]).abs() < 1e-12));
            if let Some(i) = hit {
                unmatched.remove(i);
            }
        }
        // At most the two unusual rows differ.
        assert!(unmatched.len() <= 2, "unmatched reference rows {unmatched:?}");
        for s in m.column_sums() {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_route_equals_full_state_route() {
        for n in 3..=7 {
            for m in 1..n {
                let c = local_cfg(n, m, 1);
                for a in [-0.6, 0.25, 0.8] {
                    let mat = RoundMatrix::for_config(&c, pol(a)).unwrap();
                    let full = FullStateRound::for_config(&c, pol(a)).unwrap();
                    let mut v = AVector::fresh(pol(a), n - m).unwrap();
                    for _ in 0..4 {
                        let x = mat.apply_round(&v).unwrap();
                        let y = full.apply_round(&v).unwrap();
                        assert!(x.as_state().max_abs_diff(y.as_state()) <= 1e-12);
                        v = y;
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_infinity_examples() {
        let a = alpha_infinity_3local(5, pol(0.5)).unwrap().value();
        assert!((a - 242.0 / 244.0).abs() < 1e-12);
        assert_eq!(alpha_infinity_3local(7, pol(0.0)).unwrap().value(), 0.0);
        for a in [0.1, 0.4, 0.9] {
            let expected = 2.0 * a / (1.0 + a * a);
            assert!((alpha_infinity_3local(3, pol(a)).unwrap().value() - expected).abs() < 1e-14);
            let full = crate::bqr::alpha_infinity(3, 2, pol(a)).unwrap().value();
            assert!((alpha_infinity_3local(3, pol(a)).unwrap().value() - full).abs() < 1e-14);
        }
    }

    #[test]
    fn population_vector_examples() {
        let v = asymptotic_population_vector(4, pol(0.5)).unwrap();
        let expected = [0.75, 0.75, 0.9, 27.0 / 28.0];
        for (x, e) in v.populations.iter().zip(expected) {
            assert!((x - e).abs() < 1e-14);
        }
        let v = asymptotic_population_vector(5, pol(0.5)).unwrap();
        assert!((v.populations[4] - 243.0 / 244.0).abs() < 1e-14);
        assert!((v.alpha_target_infinity.value() - (2.0 * v.populations[4] - 1.0)).abs() < 1e-14);
        let v = asymptotic_population_vector(6, pol(0.0)).unwrap();
        assert!(v.populations.iter().all(|&x| x == 0.5));
        // Closed forms for the third and fourth qubits.
        let p: f64 = 0.8;
        let v = asymptotic_population_vector(4, pol(2.0 * p - 1.0)).unwrap();
        assert!((v.populations[2] - p * p / (1.0 - 2.0 * p + 2.0 * p * p)).abs() < 1e-14);
        assert!((v.populations[3] - p.powi(3) / (1.0 - 3.0 * p + 3.0 * p * p)).abs() < 1e-14);
        for w in v.populations.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn fixed_point_is_the_fibonacci_product() {
        for n in 4..=6 {
            for a in [0.2, 0.5, 0.8] {
                let c = local_cfg(n, 2, 1);
                let mat = RoundMatrix::for_config(&c, pol(a)).unwrap();
                let (fixed, _) = mat.fixed_point(pol(a), 1e-15, 200_000).unwrap();
                let pops = asymptotic_population_vector(n, pol(a)).unwrap();
                // The kept qubits are the target and auxiliaries: positions n..3 from the end.
                let kept: Vec<f64> = pops.populations_target_first()[..n - 2].to_vec();
                let dim = 1usize << (n - 2);
                for (i, &x) in fixed.probs().iter().enumerate() {
                    let mut expected = 1.0;
                    for (bit, &pj) in kept.iter().enumerate() {
                        let excited = (i >> (n - 3 - bit)) & 1 == 1;
                        expected *= if excited { 1.0 - pj } else { pj };
                    }
                    assert!((x - expected).abs() < 1e-9, "n={n} a={a} i={i}/{dim}");
                }
            }
        }
    }

    #[test]
    fn iterated_limit_matches_tanh_form() {
        for n in 3..=6 {
            let a = pol(0.3);
            let c = local_cfg(n, 2, 400);
            let r = steady_state(&c, a, 1e-13, DEFAULT_MAX_CYCLES).unwrap();
            let limit = alpha_infinity_3local(n, a).unwrap().value();
            assert!((r.alpha_enhanced.value() - limit).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn full_staircase_dominates_at_nine_rounds() {
        let full = RefrigeratorConfig::new(5, 2, 9, Locality::Full).unwrap();
        for k in 0..=60 {
            let a = pol(0.3 + 0.01 * k as f64);
            let x = steady_state(&full, a, DEFAULT_TOLERANCE, DEFAULT_MAX_CYCLES).unwrap();
            let y = steady_state(&full.with_locality(Locality::ThreeLocal), a, DEFAULT_TOLERANCE, DEFAULT_MAX_CYCLES)
                .unwrap();
            assert!(y.alpha_enhanced.value() <= x.alpha_enhanced.value(), "a={}", a.value());
        }
    }

    #[test]
    fn three_local_can_win_with_few_rounds() {
        // Dominance is not universal: at two rounds and low α the 3-local
        // staircase keeps more polarization in the recycled qubits.
        let full = RefrigeratorConfig::new(5, 2, 2, Locality::Full).unwrap();
        let a = pol(0.2);
        let x = steady_state(&full, a, DEFAULT_TOLERANCE, DEFAULT_MAX_CYCLES).unwrap();
        let y = steady_state(&full.with_locality(Locality::ThreeLocal), a, DEFAULT_TOLERANCE, DEFAULT_MAX_CYCLES).unwrap();
        assert!(y.alpha_enhanced.value() > x.alpha_enhanced.value());
        let oracle = Refrigerator::full_state(full, a).unwrap().steady_state(DEFAULT_TOLERANCE, DEFAULT_MAX_CYCLES).unwrap();
        assert!((oracle.alpha_enhanced.value() - x.alpha_enhanced.value()).abs() < 1e-12);
    }

    #[test]
    fn reduction_examples() {
        let a = pol(0.5);
        let c = local_cfg(3, 2, 2);
        let full = c.with_locality(Locality::Full);
        assert_eq!(reduction_factor_qr_3local(&c, a).unwrap(), reduction_factor_qr(&full, a).unwrap());
        for rounds in 1..=9 {
            assert!(reduction_factor_qr_3local(&local_cfg(5, 2, rounds), pol(0.05)).unwrap() < 1.0);
        }
    }
}
