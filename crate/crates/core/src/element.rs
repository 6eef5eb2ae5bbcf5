//! Elements of finite atomic algebras as fixed-width atom sets.

use std::sync::atomic::{AtomicU64, Ordering};

/// Bit mask over atom indices; bit `i` set means atom `i` lies below the element.
pub type Mask = u32;

/// Largest supported number of atoms.
pub const MAX_ATOMS: usize = 30;

/// Identity of a constructed algebra, used to reject mixed-algebra operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraId(u64);

impl AlgebraId {
    pub(crate) fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        AlgebraId(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

/// An element of a finite atomic relation algebra: the join of the atoms in `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Element {
    pub(crate) bits: Mask,
    pub(crate) owner: AlgebraId,
}

impl Element {
    pub fn bits(self) -> Mask {
        self.bits
    }

    pub fn owner(self) -> AlgebraId {
        self.owner
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    pub fn contains_atom(self, atom: usize) -> bool {
        atom < 32 && self.bits >> atom & 1 == 1
    }

    /// Boolean order; elements of different algebras are incomparable.
    pub fn leq(self, other: Element) -> bool {
        self.owner == other.owner && self.bits & !other.bits == 0
    }

    pub fn atoms(self) -> Atoms {
        Atoms(self.bits)
    }
}

/// Iterator over the set bits of a mask, lowest first.
#[derive(Debug, Clone, Copy)]
pub struct Atoms(pub Mask);

impl Iterator for Atoms {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Atoms {}

pub fn full_mask(m: usize) -> Mask {
    if m >= 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

pub fn is_subset(x: Mask, y: Mask) -> bool {
    x & !y == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_iterates_low_to_high() {
        assert_eq!(Atoms(0b1010_0101).collect::<Vec<_>>(), vec![0, 2, 5, 7]);
        assert_eq!(Atoms(0).count(), 0);
        assert_eq!(Atoms(1 << 29).collect::<Vec<_>>(), vec![29]);
    }

    #[test]
    fn full_mask_widths() {
        assert_eq!(full_mask(1), 1);
        assert_eq!(full_mask(4), 0b1111);
        assert_eq!(full_mask(30), (1 << 30) - 1);
    }
}
