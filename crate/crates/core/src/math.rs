//! Small numeric helpers shared across modules.

/// Pairwise summation that splits at the midpoint.
///
/// For power-of-two lengths this is invariant under reversing the slice
/// (floating-point addition is commutative and the split tree is mirror
/// symmetric), which is what makes `α → −α` exactly odd in the protocols.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        len => {
            let (lo, hi) = xs.split_at(len / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Largest `n` for which binomial coefficients use the multiplicative recurrence.
const DIRECT_BINOMIAL_MAX: u64 = 60;

/// `C(n, k)` in double precision.
pub(crate) fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= DIRECT_BINOMIAL_MAX {
        let mut c = 1.0_f64;
        for i in 0..k {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        c
    } else {
        libm::exp(ln_binomial(n, k))
    }
}

pub(crate) fn ln_binomial(n: u64, k: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}
