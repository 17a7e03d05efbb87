//! Discrete population states of `n` types and total size `N`.
//!
//! States are the compositions of `N` into `n` non-negative parts. They are
//! kept in reverse-lexicographic order on the count vector, so for two types
//! the rank is simply the count of the second type. Ranks use the
//! combinatorial number system over a precomputed binomial table.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense index of a state in the canonical order.
pub type StateIndex = usize;

/// The unit move `+1` at `gain`, `-1` at `lose`: one individual of type
/// `lose` is replaced by one of type `gain`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub gain: usize,
    pub lose: usize,
}

impl Step {
    pub fn is_zero(&self) -> bool {
        self.gain == self.lose
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PopulationState {
    counts: Vec<u32>,
}

impl PopulationState {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        let size: u64 = counts.iter().map(|&c| c as u64).sum();
        if counts.len() < 2 || size == 0 {
            return Err(Error::InvalidDimension {
                types: counts.len(),
                size: size as usize,
            });
        }
        Ok(PopulationState { counts })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.counts
    }

    pub fn types(&self) -> usize {
        self.counts.len()
    }

    /// Population size `N`.
    pub fn size(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// The population distribution `a / N`.
    pub fn distribution(&self) -> Vec<f64> {
        let size = self.size() as f64;
        self.counts.iter().map(|&c| c as f64 / size).collect()
    }

    /// No type is absent.
    pub fn is_interior(&self) -> bool {
        self.counts.iter().all(|&c| c > 0)
    }

    /// Applies `step`, or returns `None` when the losing type is absent.
    pub fn apply(&self, step: Step) -> Option<PopulationState> {
        if step.is_zero() {
            return Some(self.clone());
        }
        if self.counts[step.lose] == 0 {
            return None;
        }
        let mut counts = self.counts.clone();
        counts[step.lose] -= 1;
        counts[step.gain] += 1;
        Some(PopulationState { counts })
    }
}

/// The state space for fixed `n` and `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    types: usize,
    size: u32,
    len: usize,
    // binom[m * types + k] = C(m, k), m <= size + types - 1, k < types
    binom: Vec<usize>,
}

impl Lattice {
    pub fn new(types: usize, size: u32) -> Result<Self> {
        if types < 2 || size < 1 {
            return Err(Error::InvalidDimension {
                types,
                size: size as usize,
            });
        }
        let too_large = Error::LatticeTooLarge {
            types,
            size: size as usize,
        };
        let rows = size as usize + types;
        let mut binom = vec![0usize; rows * types];
        for m in 0..rows {
            binom[m * types] = 1;
            for k in 1..types.min(m + 1) {
                let value = binom[(m - 1) * types + k - 1]
                    .checked_add(binom[(m - 1) * types + k])
                    .ok_or_else(|| too_large.clone())?;
                binom[m * types + k] = value;
            }
            if m < types {
                binom[m * types + m] = 1;
            }
        }
        let len = binom[(size as usize + types - 1) * types + types - 1];
        if len > u32::MAX as usize {
            return Err(too_large);
        }
        Ok(Lattice {
            types,
            size,
            len,
            binom,
        })
    }

    pub fn types(&self) -> usize {
        self.types
    }

    /// Population size `N`.
    pub fn size(&self) -> u32 {
        self.size
    }

    /// Number of states, `C(N + n - 1, n - 1)`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `C(m, k)` for `k < n`; zero when `k > m`.
    fn choose(&self, m: usize, k: usize) -> usize {
        if k > m {
            0
        } else {
            self.binom[m * self.types + k]
        }
    }

    fn check_counts(&self, counts: &[u32]) -> Result<()> {
        if counts.len() != self.types {
            return Err(Error::DimensionMismatch {
                expected: self.types,
                found: counts.len(),
            });
        }
        let total: u64 = counts.iter().map(|&c| c as u64).sum();
        if total != self.size as u64 {
            return Err(Error::InvalidState(alloc::format!(
                "counts {counts:?} sum to {total}, expected {}",
                self.size
            )));
        }
        Ok(())
    }

    /// Position of `counts` in the canonical order.
    pub fn rank(&self, counts: &[u32]) -> Result<StateIndex> {
        self.check_counts(counts)?;
        Ok(self.rank_unchecked(counts))
    }

    pub(crate) fn rank_unchecked(&self, counts: &[u32]) -> StateIndex {
        let n = self.types;
        let mut remaining = self.size as usize;
        let mut rank = 0;
        for (i, &a) in counts[..n - 1].iter().enumerate() {
            let a = a as usize;
            // compositions of `remaining` into n - i parts whose first part exceeds a
            rank += self.choose(remaining - a + n - i - 2, n - i - 1);
            remaining -= a;
        }
        rank
    }

    pub fn unrank(&self, index: StateIndex) -> Result<PopulationState> {
        if index >= self.len {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.len,
            });
        }
        let mut counts = vec![0u32; self.types];
        self.unrank_into(index, &mut counts);
        Ok(PopulationState { counts })
    }

    pub(crate) fn unrank_into(&self, mut index: StateIndex, counts: &mut [u32]) {
        let n = self.types;
        let mut remaining = self.size as usize;
        for (i, slot) in counts[..n - 1].iter_mut().enumerate() {
            let parts = n - i;
            let mut value = remaining;
            loop {
                // compositions of remaining - value into parts - 1 pieces
                let block = self.choose(remaining - value + parts - 2, parts - 2);
                if index < block {
                    break;
                }
                index -= block;
                value -= 1;
            }
            *slot = value as u32;
            remaining -= value;
        }
        counts[n - 1] = remaining as u32;
    }

    /// All states in canonical order.
    pub fn states(&self) -> States {
        let mut first = vec![0u32; self.types];
        first[0] = self.size;
        States { next: Some(first) }
    }

    /// Every `a + i_jk` with `j != k` and `a_k >= 1`, ordered by `(j, k)`.
    /// The zero step is not listed.
    pub fn neighbors(&self, state: &PopulationState) -> Result<Vec<(Step, PopulationState)>> {
        self.check_counts(state.counts())?;
        let n = self.types;
        let mut out = Vec::with_capacity(n * (n - 1));
        for gain in 0..n {
            for lose in 0..n {
                let step = Step { gain, lose };
                if step.is_zero() {
                    continue;
                }
                if let Some(next) = state.apply(step) {
                    out.push((step, next));
                }
            }
        }
        Ok(out)
    }

    /// The most balanced compositions: `N mod n` types hold `floor(N/n) + 1`
    /// and the rest hold `floor(N/n)`, in every arrangement. Ranks ascending.
    pub fn central_states(&self) -> Vec<StateIndex> {
        let n = self.types as u32;
        let low = self.size / n;
        let extra = (self.size % n) as usize;
        let mut out: Vec<StateIndex> = self
            .states()
            .filter(|s| {
                s.counts().iter().all(|&c| c == low || c == low + 1)
                    && s.counts().iter().filter(|&&c| c == low + 1).count() == extra
            })
            .map(|s| self.rank_unchecked(s.counts()))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Iterator over a lattice in canonical order.
#[derive(Debug, Clone)]
pub struct States {
    next: Option<Vec<u32>>,
}

impl Iterator for States {
    type Item = PopulationState;

    fn next(&mut self) -> Option<PopulationState> {
        let current = self.next.take()?;
        let n = current.len();
        if let Some(i) = (0..n - 1).rev().find(|&i| current[i] > 0) {
            let mut next = current.clone();
            let tail: u32 = next[i + 1..].iter().sum();
            next[i] -= 1;
            next[i + 1] = tail + 1;
            for c in &mut next[i + 2..] {
                *c = 0;
            }
            self.next = Some(next);
        }
        Some(PopulationState { counts: current })
    }
}

/// All compositions of `size` into `types` parts in canonical order.
pub fn enumerate_states(types: usize, size: u32) -> Result<Vec<PopulationState>> {
    Ok(Lattice::new(types, size)?.states().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(states: &[PopulationState]) -> Vec<Vec<u32>> {
        states.iter().map(|s| s.counts().to_vec()).collect()
    }

    #[test]
    fn enumerates_in_reverse_lex_order() {
        let two = enumerate_states(2, 3).unwrap();
        assert_eq!(counts(&two), vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);

        let three = enumerate_states(3, 2).unwrap();
        assert_eq!(
            counts(&three),
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
        assert_eq!(enumerate_states(3, 30).unwrap().len(), 496);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(
            Lattice::new(1, 5),
            Err(Error::InvalidDimension { .. })
        ));
        assert!(matches!(
            Lattice::new(3, 0),
            Err(Error::InvalidDimension { .. })
        ));
        assert!(matches!(
            Lattice::new(40, 400),
            Err(Error::LatticeTooLarge { .. })
        ));
    }

    #[test]
    fn rank_endpoints_and_errors() {
        let lattice = Lattice::new(2, 3).unwrap();
        assert_eq!(lattice.rank(&[3, 0]).unwrap(), 0);
        assert_eq!(lattice.rank(&[0, 3]).unwrap(), 3);
        assert_eq!(lattice.unrank(0).unwrap().counts(), &[3, 0]);
        assert_eq!(lattice.unrank(3).unwrap().counts(), &[0, 3]);
        assert!(matches!(
            lattice.rank(&[1, 1]),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            lattice.unrank(4),
            Err(Error::IndexOutOfRange { index: 4, len: 4 })
        ));
    }

    #[test]
    fn rank_matches_enumeration_exhaustively() {
        for (n, size) in [(2, 7), (3, 30), (4, 9), (5, 6)] {
            let lattice = Lattice::new(n, size).unwrap();
            let states: Vec<_> = lattice.states().collect();
            assert_eq!(states.len(), lattice.len());
            for (i, s) in states.iter().enumerate() {
                assert_eq!(lattice.rank(s.counts()).unwrap(), i);
                assert_eq!(&lattice.unrank(i).unwrap(), s);
            }
        }
    }

    #[test]
    fn unrank_is_injective_on_small_lattice() {
        let lattice = Lattice::new(3, 4).unwrap();
        let mut seen: Vec<_> = (0..15).map(|r| lattice.unrank(r).unwrap()).collect();
        assert!(seen.iter().all(|s| s.size() == 4));
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn neighbors_examples() {
        let lattice = Lattice::new(2, 3).unwrap();
        let mid = PopulationState::new(vec![2, 1]).unwrap();
        let adj = lattice.neighbors(&mid).unwrap();
        assert_eq!(adj.len(), 2);
        assert_eq!(adj[0].0, Step { gain: 0, lose: 1 });
        assert_eq!(adj[0].1.counts(), &[3, 0]);
        assert_eq!(adj[1].0, Step { gain: 1, lose: 0 });
        assert_eq!(adj[1].1.counts(), &[1, 2]);

        let corner = PopulationState::new(vec![3, 0]).unwrap();
        let adj = lattice.neighbors(&corner).unwrap();
        assert_eq!(adj.len(), 1);
        assert_eq!(adj[0].0, Step { gain: 1, lose: 0 });
        assert_eq!(adj[0].1.counts(), &[2, 1]);

        let lattice = Lattice::new(3, 3).unwrap();
        let centre = PopulationState::new(vec![1, 1, 1]).unwrap();
        assert_eq!(lattice.neighbors(&centre).unwrap().len(), 6);
    }

    #[test]
    fn central_states() {
        let l = Lattice::new(2, 10).unwrap();
        assert_eq!(l.central_states(), vec![l.rank(&[5, 5]).unwrap()]);
        let l = Lattice::new(2, 11).unwrap();
        assert_eq!(
            l.central_states(),
            vec![l.rank(&[6, 5]).unwrap(), l.rank(&[5, 6]).unwrap()]
        );
        let l = Lattice::new(3, 10).unwrap();
        assert_eq!(l.central_states().len(), 3);
    }
}
