//! Permutations of computational-basis indices.
//!
//! On diagonal states every compression unitary used here acts as a
//! classical permutation of the populations.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::state::dim_of;

/// A bijection on `{0, …, 2^n − 1}`.
///
/// `map[i]` is the image `π(i)`. `transpositions` is a sequence of swaps
/// which, applied left to right, produces the same map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    qubits: usize,
    map: Vec<usize>,
    transpositions: Vec<(usize, usize)>,
}

impl Permutation {
    pub fn identity(qubits: usize) -> Result<Self> {
        let dim = dim_of(qubits)?;
        Ok(Permutation {
            qubits,
            map: (0..dim).collect(),
            transpositions: Vec::new(),
        })
    }

    /// Applies the swaps in order, starting from the identity.
    pub fn from_transpositions(qubits: usize, swaps: &[(usize, usize)]) -> Result<Self> {
        let mut perm = Self::identity(qubits)?;
        let dim = perm.map.len();
        let mut at: Vec<usize> = (0..dim).collect();
        for &(a, b) in swaps {
            if a >= dim || b >= dim {
                return Err(invalid(format!("swap ({a}, {b}) out of range for {qubits} qubits")));
            }
            at.swap(a, b);
        }
        // at[slot] = original index now sitting in `slot`.
        for (slot, &origin) in at.iter().enumerate() {
            perm.map[origin] = slot;
        }
        perm.transpositions = swaps.iter().copied().filter(|(a, b)| a != b).collect();
        Ok(perm)
    }

    /// Builds a permutation from an index map, checking that it is a bijection.
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let dim = map.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(invalid(format!("map length {dim} is not 2^n with n >= 1")));
        }
        let mut seen = alloc::vec![false; dim];
        for &x in &map {
            if x >= dim || seen[x] {
                return Err(invalid(format!("map is not a bijection (value {x})")));
            }
            seen[x] = true;
        }
        let transpositions = cycle_transpositions(&map);
        Ok(Permutation {
            qubits: dim.trailing_zeros() as usize,
            map,
            transpositions,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn transpositions(&self) -> &[(usize, usize)] {
        &self.transpositions
    }

    pub fn image(&self, index: usize) -> usize {
        self.map[index]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Indices not fixed by the permutation, in increasing order.
    pub fn moved(&self) -> Vec<usize> {
        self.map
            .iter()
            .enumerate()
            .filter(|(i, x)| i != *x)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![0; self.dim()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Permutation {
            qubits: self.qubits,
            map: inv,
            transpositions: self.transpositions.iter().rev().copied().collect(),
        }
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &Permutation) -> Result<Self> {
        if self.qubits != other.qubits {
            return Err(invalid(format!(
                "cannot compose permutations on {} and {} qubits",
                self.qubits, other.qubits
            )));
        }
        let map = self.map.iter().map(|&x| other.map[x]).collect();
        let mut transpositions = self.transpositions.clone();
        transpositions.extend_from_slice(&other.transpositions);
        Ok(Permutation {
            qubits: self.qubits,
            map,
            transpositions,
        })
    }

    /// Lifts a permutation on `k` consecutive qubits into an `n`-qubit system.
    ///
    /// `shift` counts qubits from the end of the string: `shift = 0` acts on
    /// the last `k` qubits, `shift = n − k` on the first `k`.
    pub fn embed(&self, qubits: usize, shift: usize) -> Result<Self> {
        let k = self.qubits;
        if k + shift > qubits {
            return Err(invalid(format!(
                "cannot place a {k}-qubit block at shift {shift} in {qubits} qubits"
            )));
        }
        let dim = dim_of(qubits)?;
        let mask = ((1usize << k) - 1) << shift;
        let map = (0..dim)
            .map(|i| {
                let window = (i & mask) >> shift;
                (i & !mask) | (self.map[window] << shift)
            })
            .collect();
        let low = 1usize << shift;
        let high_count = dim >> (k + shift);
        let mut transpositions = Vec::with_capacity(self.transpositions.len() * dim / (1 << k));
        for &(a, b) in &self.transpositions {
            for hi in 0..high_count {
                for lo in 0..low {
                    let base = (hi << (k + shift)) | lo;
                    transpositions.push((base | (a << shift), base | (b << shift)));
                }
            }
        }
        Ok(Permutation {
            qubits,
            map,
            transpositions,
        })
    }

    /// Deterministic pseudo-random permutation for tests.
    #[cfg(test)]
    pub(crate) fn pseudo_random(qubits: usize, seed: u64) -> Result<Self> {
        let dim = dim_of(qubits)?;
        let mut map: Vec<usize> = (0..dim).collect();
        let mut s = seed | 1;
        for i in (1..dim).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            map.swap(i, (s % (i as u64 + 1)) as usize);
        }
        Self::from_map(map)
    }
}

/// Decomposes a map into swaps whose left-to-right application reproduces it.
fn cycle_transpositions(map: &[usize]) -> Vec<(usize, usize)> {
    let dim = map.len();
    let mut visited = alloc::vec![false; dim];
    let mut swaps = Vec::new();
    for start in 0..dim {
        if visited[start] || map[start] == start {
            visited[start] = true;
            continue;
        }
        // cycle start → map[start] → …; contents move forward along the cycle.
        let mut cycle = Vec::new();
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            cycle.push(i);
            i = map[i];
        }
        // Swapping (c0, c1), (c0, c2), …, (c0, c_{len-1}) moves the content
        // of c_j to c_{j+1} and the last one back to c0.
        for j in 1..cycle.len() {
            swaps.push((cycle[0], cycle[j]));
        }
    }
    swaps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpositions_reproduce_map() {
        for seed in 1..20u64 {
            let p = Permutation::pseudo_random(4, seed).unwrap();
            let rebuilt = Permutation::from_transpositions(4, p.transpositions()).unwrap();
            assert_eq!(rebuilt.map(), p.map(), "seed {seed}");
        }
    }

    #[test]
    fn from_map_rejects_non_bijection() {
        assert!(Permutation::from_map(vec![0, 0, 1, 2]).is_err());
        assert!(Permutation::from_map(vec![0, 1, 2]).is_err());
        assert!(Permutation::from_map(vec![0, 1, 2, 7]).is_err());
    }

    #[test]
    fn swap_sequence_order_matters() {
        // (0 1) then (1 2) carries the content of slot 0 to slot 2.
        let p = Permutation::from_transpositions(2, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p.map(), &[2, 0, 1, 3]);
    }

    #[test]
    fn compose_and_invert() {
        let a = Permutation::pseudo_random(3, 5).unwrap();
        let b = Permutation::pseudo_random(3, 9).unwrap();
        let ab = a.then(&b).unwrap();
        for i in 0..8 {
            assert_eq!(ab.image(i), b.image(a.image(i)));
        }
        assert!(a.then(&a.inverse()).unwrap().is_identity());
        let rebuilt = Permutation::from_transpositions(3, ab.transpositions()).unwrap();
        assert_eq!(rebuilt.map(), ab.map());
        let inv = Permutation::from_transpositions(3, a.inverse().transpositions()).unwrap();
        assert_eq!(inv.map(), a.inverse().map());
    }

    #[test]
    fn embed_places_block() {
        let swap = Permutation::from_transpositions(1, &[(0, 1)]).unwrap();
        // X on the last of three qubits flips bit 0.
        let x_last = swap.embed(3, 0).unwrap();
        assert_eq!(x_last.map(), &[1, 0, 3, 2, 5, 4, 7, 6]);
        // X on the first qubit flips bit 2.
        let x_first = swap.embed(3, 2).unwrap();
        assert_eq!(x_first.map(), &[4, 5, 6, 7, 0, 1, 2, 3]);
        let rebuilt = Permutation::from_transpositions(3, x_first.transpositions()).unwrap();
        assert_eq!(rebuilt.map(), x_first.map());
        assert!(swap.embed(3, 3).is_err());
    }
}
