use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::mask::{full_bits, RelaySet, StateMask, MAX_WIDTH};

/// Probabilities must sum to one within this.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A distribution over the `2^n` listen/transmit states. Only states with
/// positive probability are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    n: usize,
    entries: BTreeMap<u32, f64>,
}

impl Schedule {
    pub fn new<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (StateMask, f64)>,
    {
        if n == 0 || n > MAX_WIDTH {
            return Err(Error::InvalidSchedule(format!("relay count {n} out of range")));
        }
        let mut map = BTreeMap::new();
        let mut total = 0.0;
        for (state, p) in entries {
            if state.width() != n {
                return Err(Error::MaskWidth {
                    expected: n,
                    got: state.width(),
                });
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidSchedule(format!(
                    "probability {p} of state {state} is not a non-negative number"
                )));
            }
            if map.contains_key(&state.bits()) {
                return Err(Error::InvalidSchedule(format!("state {state} listed twice")));
            }
            total += p;
            if p > 0.0 {
                map.insert(state.bits(), p);
            }
        }
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidSchedule(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { n, entries: map })
    }

    /// From a dense vector indexed by state bits. Entries are rescaled to
    /// sum to exactly one after validation.
    pub fn from_dense(n: usize, probs: &[f64]) -> Result<Self> {
        if probs.len() != 1usize << n {
            return Err(Error::LengthMismatch {
                what: "dense schedule",
                left: probs.len(),
                right: 1 << n,
            });
        }
        let mut sched = Self::new(
            n,
            probs
                .iter()
                .enumerate()
                .map(|(b, &p)| (StateMask::raw(b as u32, n), p)),
        )?;
        sched.renormalize();
        Ok(sched)
    }

    pub(crate) fn renormalize(&mut self) {
        let total: f64 = self.entries.values().sum();
        if total > 0.0 {
            for p in self.entries.values_mut() {
                *p /= total;
            }
        }
    }

    /// All mass on one state.
    pub fn point(state: StateMask) -> Self {
        Self {
            n: state.width(),
            entries: BTreeMap::from([(state.bits(), 1.0)]),
        }
    }

    pub fn uniform(n: usize) -> Result<Self> {
        let count = 1usize << n;
        Self::from_dense(n, &vec![1.0 / count as f64; count])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Positive-probability states in increasing bit order.
    pub fn iter(&self) -> impl Iterator<Item = (StateMask, f64)> + '_ {
        self.entries
            .iter()
            .map(move |(&b, &p)| (StateMask::raw(b, self.n), p))
    }

    pub(crate) fn raw_entries(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().map(|(&b, &p)| (b, p))
    }

    pub fn prob(&self, state: StateMask) -> f64 {
        self.entries.get(&state.bits()).copied().unwrap_or(0.0)
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; 1 << self.n];
        for (b, p) in self.raw_entries() {
            v[b as usize] = p;
        }
        v
    }

    /// The schedule a subnetwork inherits: the marginal over the kept relays.
    /// A sub-state collects the mass of every full state that agrees with it
    /// on `keep`.
    pub fn derive_natural(&self, keep: RelaySet) -> Result<Schedule> {
        if keep.width() != self.n {
            return Err(Error::MaskWidth {
                expected: self.n,
                got: keep.width(),
            });
        }
        if keep.is_empty() {
            return Err(Error::EmptySubset);
        }
        let m = keep.len();
        let mut entries: BTreeMap<u32, f64> = BTreeMap::new();
        for (b, p) in self.raw_entries() {
            *entries.entry(keep.restrict(b)).or_insert(0.0) += p;
        }
        debug_assert!(entries.keys().all(|&b| b & !full_bits(m) == 0));
        Ok(Schedule { n: m, entries })
    }

    /// Marginal onto the 1-based relays in `keep`.
    pub fn derive_natural_of(&self, keep: &[usize]) -> Result<Schedule> {
        if keep.is_empty() {
            return Err(Error::EmptySubset);
        }
        self.derive_natural(RelaySet::from_relays(self.n, keep.iter().copied())?)
    }

    /// Largest absolute probability difference between two schedules over
    /// the same relays.
    pub fn max_abs_diff(&self, other: &Schedule) -> f64 {
        assert_eq!(self.n, other.n);
        let keys = self.entries.keys().chain(other.entries.keys());
        keys.map(|k| {
            let a = self.entries.get(k).copied().unwrap_or(0.0);
            let b = other.entries.get(k).copied().unwrap_or(0.0);
            (a - b).abs()
        })
        .fold(0.0, f64::max)
    }
}
