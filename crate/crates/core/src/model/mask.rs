//! Relay bitmasks.
//!
//! Bit `i - 1` corresponds to relay `i`. The textual form is the string
//! `s_1 s_2 ... s_n` read left to right, so `"011"` over three relays has
//! relay 1 clear and relays 2 and 3 set.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Widest mask the crate will build. Exhaustive routines carry their own,
/// much smaller guards.
pub const MAX_WIDTH: usize = 30;

#[inline]
pub(crate) fn full_bits(width: usize) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

/// Iterates the set bit positions of `bits` as 1-based relay indices.
pub(crate) fn relays_of(bits: u32) -> impl Iterator<Item = usize> {
    let mut rest = bits;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let pos = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(pos + 1)
    })
}

macro_rules! relay_mask {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name {
            bits: u32,
            width: u8,
        }

        impl $name {
            pub fn new(bits: u32, width: usize) -> Result<Self> {
                if width > MAX_WIDTH {
                    return Err(Error::GuardExceeded { what: "mask width", n: width, guard: MAX_WIDTH });
                }
                if bits & !full_bits(width) != 0 {
                    return Err(Error::MaskBits { bits, width });
                }
                Ok(Self { bits, width: width as u8 })
            }

            /// Caller guarantees `bits` fits in `width`.
            #[inline]
            pub(crate) fn raw(bits: u32, width: usize) -> Self {
                debug_assert!(width <= MAX_WIDTH && bits & !full_bits(width) == 0);
                Self { bits, width: width as u8 }
            }

            pub fn empty(width: usize) -> Result<Self> {
                Self::new(0, width)
            }

            pub fn full(width: usize) -> Result<Self> {
                Self::new(full_bits(width.min(MAX_WIDTH)), width)
            }

            /// Builds a mask from 1-based relay indices.
            pub fn from_relays<I: IntoIterator<Item = usize>>(width: usize, relays: I) -> Result<Self> {
                let mut bits = 0u32;
                for r in relays {
                    if r == 0 || r > width {
                        return Err(Error::IndexOutOfRange { index: r, n: width });
                    }
                    bits |= 1 << (r - 1);
                }
                Self::new(bits, width)
            }

            #[inline]
            pub fn bits(self) -> u32 {
                self.bits
            }

            #[inline]
            pub fn width(self) -> usize {
                self.width as usize
            }

            /// Whether 1-based relay `relay` is set.
            #[inline]
            pub fn contains(self, relay: usize) -> bool {
                relay >= 1 && relay <= self.width() && self.bits & (1 << (relay - 1)) != 0
            }

            #[inline]
            pub fn complement(self) -> Self {
                Self::raw(!self.bits & full_bits(self.width()), self.width())
            }

            /// Set relays, ascending, 1-based.
            pub fn relays(self) -> impl Iterator<Item = usize> {
                relays_of(self.bits)
            }

            #[inline]
            pub fn len(self) -> usize {
                self.bits.count_ones() as usize
            }

            #[inline]
            pub fn is_empty(self) -> bool {
                self.bits == 0
            }

            /// All `2^width` masks in increasing bit order.
            pub fn all(width: usize) -> impl Iterator<Item = Self> {
                let width = width.min(MAX_WIDTH);
                (0..=full_bits(width)).map(move |b| Self::raw(b, width))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for i in 0..self.width() {
                    f.write_str(if self.bits & (1 << i) != 0 { "1" } else { "0" })?;
                }
                Ok(())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                let mut bits = 0u32;
                let mut width = 0usize;
                for (i, c) in s.trim().chars().enumerate() {
                    match c {
                        '0' => {}
                        '1' if i < 32 => bits |= 1 << i,
                        '1' => {}
                        other => {
                            return Err(Error::Parse(format!(
                                "invalid character {other:?} in mask {s:?}"
                            )))
                        }
                    }
                    width = i + 1;
                }
                Self::new(bits, width)
            }
        }
    };
}

relay_mask!(
    /// Joint listen/transmit state: bit set means the relay transmits.
    StateMask
);

relay_mask!(
    /// Cut: bit set means the relay sits on the destination side.
    CutMask
);

relay_mask!(
    /// A subset of relays, e.g. the relays kept in a subnetwork.
    RelaySet
);

impl StateMask {
    /// Relays listening in this state.
    pub fn listening(self) -> RelaySet {
        RelaySet::raw(self.complement().bits(), self.width())
    }

    /// Relays transmitting in this state.
    pub fn transmitting(self) -> RelaySet {
        RelaySet::raw(self.bits(), self.width())
    }
}

impl RelaySet {
    /// Projects `bits` (a mask over the parent's relays) onto the relays of
    /// this set, packing them into `self.len()` low bits in ascending order.
    pub fn restrict(self, bits: u32) -> u32 {
        let mut out = 0u32;
        for (j, relay) in self.relays().enumerate() {
            if bits & (1 << (relay - 1)) != 0 {
                out |= 1 << j;
            }
        }
        out
    }

    /// All subsets of size `k` out of `width` relays, in lexicographic order
    /// of their sorted index lists.
    pub fn subsets_of_size(width: usize, k: usize) -> Vec<RelaySet> {
        use itertools::Itertools;
        (1..=width)
            .combinations(k)
            .map(|c| Self::from_relays(width, c).expect("indices in range"))
            .collect()
    }
}
