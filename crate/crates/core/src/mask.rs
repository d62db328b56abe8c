//! Bitmask over the ordered context list of a hypergraph.

use std::fmt;

use crate::{Error, Result};

/// Subset of contexts, stored as a bitset over the ordered context list.
/// Mask arithmetic requires at most 63 contexts.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ContextMask(u64);

pub const MAX_CONTEXTS: usize = 63;

impl ContextMask {
    pub const EMPTY: ContextMask = ContextMask(0);

    pub fn from_bits(bits: u64) -> Self {
        ContextMask(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(index: usize) -> Self {
        debug_assert!(index < MAX_CONTEXTS);
        ContextMask(1 << index)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut bits = 0u64;
        for i in indices {
            debug_assert!(i < MAX_CONTEXTS);
            bits |= 1 << i;
        }
        ContextMask(bits)
    }

    /// Mask containing contexts `0..n`. Errors when `n` exceeds the mask
    /// capacity.
    pub fn full(n: usize) -> Result<Self> {
        if n > MAX_CONTEXTS {
            return Err(Error::SizeCap(format!(
                "{n} contexts exceed the {MAX_CONTEXTS}-context mask limit"
            )));
        }
        Ok(ContextMask(if n == 64 { u64::MAX } else { (1u64 << n) - 1 }))
    }

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 >> index & 1 == 1
    }

    pub fn insert(self, index: usize) -> Self {
        ContextMask(self.0 | 1 << index)
    }

    pub fn remove(self, index: usize) -> Self {
        ContextMask(self.0 & !(1 << index))
    }

    pub fn union(self, other: Self) -> Self {
        ContextMask(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ContextMask(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for ContextMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContextMask{{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for ContextMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
