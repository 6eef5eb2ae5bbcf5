//! Subalgebras of a finite algebra, presented by their atoms (blocks).
//!
//! A subalgebra of a finite atomic algebra is atomic; its atoms are pairwise
//! disjoint joins of atoms of the parent that cover `1`. Closure under the
//! operations reduces to: the identity and the converse of each block are
//! unions of blocks, and so is the composition of any two blocks.

use crate::algebra::FiniteRelationAlgebra;
use crate::element::{Atoms, Mask};
use crate::error::{Error, Result};
use crate::structure::AtomStructure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subalgebra {
    blocks: Vec<Mask>,
}

fn is_union_of(blocks: &[Mask], x: Mask) -> bool {
    blocks.iter().all(|&b| b & x == 0 || b & x == b)
}

impl Subalgebra {
    /// Checks that `blocks` partition the parent's atoms and are closed under
    /// the operations. Blocks are kept in order of their least atom.
    pub fn from_blocks(a: &FiniteRelationAlgebra, blocks: &[Mask]) -> Result<Self> {
        let mut blocks = blocks.to_vec();
        blocks.sort_by_key(|b| b.trailing_zeros());
        let mut cover = 0;
        for &b in &blocks {
            if b == 0 || b & cover != 0 || b & !a.full() != 0 {
                return Err(Error::BadParameters(
                    "blocks must be nonempty, disjoint atom sets of the parent".into(),
                ));
            }
            cover |= b;
        }
        if cover != a.full() {
            return Err(Error::BadParameters("blocks do not cover 1".into()));
        }
        let s = a.structure();
        if !is_union_of(&blocks, a.identity_mask()) {
            return Err(Error::NotClosed("1' is not a union of blocks".into()));
        }
        for &x in &blocks {
            if !is_union_of(&blocks, a.converse_mask(x)) {
                return Err(Error::NotClosed(format!(
                    "converse of {} is not a union of blocks",
                    s.render_mask(x)
                )));
            }
            for &y in &blocks {
                if !is_union_of(&blocks, a.compose_mask(x, y)) {
                    return Err(Error::NotClosed(format!(
                        "({});({}) is not a union of blocks",
                        s.render_mask(x),
                        s.render_mask(y)
                    )));
                }
            }
        }
        Ok(Subalgebra { blocks })
    }

    /// The subalgebra whose carrier is exactly `elements`, which must be
    /// closed under all operations.
    pub fn from_elements(a: &FiniteRelationAlgebra, elements: &[Mask]) -> Result<Self> {
        // Atoms of the boolean subalgebra: for each parent atom, the meet of
        // every member containing it and every complement of a member that
        // does not.
        let full = a.full();
        let mut blocks: Vec<Mask> = Vec::new();
        for atom in Atoms(full) {
            let block = elements.iter().fold(full, |acc, &x| {
                if x >> atom & 1 == 1 {
                    acc & x
                } else {
                    acc & !x
                }
            });
            if !blocks.contains(&block) {
                blocks.push(block);
            }
        }
        let sub = Self::from_blocks(a, &blocks)?;
        if sub.len() != elements.len() as u64 {
            return Err(Error::NotClosed(
                "element set is not closed under the boolean operations".into(),
            ));
        }
        Ok(sub)
    }

    pub fn blocks(&self) -> &[Mask] {
        &self.blocks
    }

    pub fn atom_count(&self) -> usize {
        self.blocks.len()
    }

    /// Number of elements, `2^blocks`.
    pub fn len(&self) -> u64 {
        1 << self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: Mask) -> bool {
        is_union_of(&self.blocks, x)
    }

    /// Every element, in increasing order of its block index set.
    pub fn elements(&self) -> Vec<Mask> {
        (0u64..self.len())
            .map(|sel| self.from_block_set(sel as Mask))
            .collect()
    }

    /// Join of the blocks selected by `sel`.
    pub fn from_block_set(&self, sel: Mask) -> Mask {
        Atoms(sel).fold(0, |acc, i| acc | self.blocks[i])
    }

    /// Block index set of a member element.
    pub fn to_block_set(&self, x: Mask) -> Mask {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, &b)| b & x != 0)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Default block names: a single parent atom keeps its name; a fused
    /// block is named `x<k>` by position.
    pub fn default_names(&self, a: &FiniteRelationAlgebra) -> Vec<String> {
        let s = a.structure();
        let taken: Vec<&str> = s.names().iter().map(String::as_str).collect();
        self.blocks
            .iter()
            .enumerate()
            .map(|(k, &b)| {
                if b.count_ones() == 1 {
                    s.name(b.trailing_zeros() as usize).to_string()
                } else {
                    let mut name = format!("x{k}");
                    while taken.contains(&name.as_str()) {
                        name.push('_');
                    }
                    name
                }
            })
            .collect()
    }

    /// The atom structure of the subalgebra, blocks becoming atoms.
    pub fn to_structure(&self, a: &FiniteRelationAlgebra) -> AtomStructure {
        self.to_structure_named(a, self.default_names(a))
            .expect("default names are valid")
    }

    pub fn to_structure_named(
        &self,
        a: &FiniteRelationAlgebra,
        names: Vec<String>,
    ) -> Result<AtomStructure> {
        let k = self.blocks.len();
        let identity = self.to_block_set(a.identity_mask());
        let converse =
            self.blocks
                .iter()
                .map(|&b| {
                    let c = a.converse_mask(b);
                    self.blocks.iter().position(|&x| x == c).ok_or_else(|| {
                        Error::NotClosed("converse of a block is not a block".into())
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        let mut comp = vec![vec![0; k]; k];
        for i in 0..k {
            for j in 0..k {
                comp[i][j] = self.to_block_set(a.compose_mask(self.blocks[i], self.blocks[j]));
            }
        }
        AtomStructure::new(names, identity, converse, comp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{lyndon, mackenzie, GammaSet};

    #[test]
    fn fused_pair_in_lyndon_is_closed() {
        let a =
            FiniteRelationAlgebra::new(lyndon(5, GammaSet::projective_line()).unwrap().structure)
                .unwrap();
        let sub = Subalgebra::from_blocks(&a, &[0b1, 0b110, 0b1000, 0b10000, 0b100000]).unwrap();
        assert_eq!(sub.atom_count(), 5);
        let s = sub.to_structure(&a);
        assert!(s.violation().is_none());
        assert_eq!(s.name(1), "x1");
        assert_eq!(s.comp(1, 1), 0b11111);
        let again = Subalgebra::from_elements(&a, &sub.elements()).unwrap();
        assert_eq!(again, sub);
    }

    #[test]
    fn non_closed_blocks_rejected() {
        let a =
            FiniteRelationAlgebra::new(lyndon(5, GammaSet::projective_line()).unwrap().structure)
                .unwrap();
        let m = FiniteRelationAlgebra::new(mackenzie()).unwrap();
        // the converse of a is a~, which the block a~+b splits
        let r = Subalgebra::from_blocks(&m, &[0b1, 0b10, 0b1100]);
        assert!(matches!(r, Err(Error::NotClosed(_))));
        assert!(Subalgebra::from_blocks(&a, &[0b1, 0b10]).is_err());
    }
}
