//! The complex algebra of an atom structure.
//!
//! Every element is a set of atoms. Boolean operations act on the bit masks
//! directly; composition and converse are computed atomwise from the table,
//! which is exact because `;` distributes over arbitrary joins and converse is
//! a boolean automorphism.

use crate::element::{full_mask, AlgebraId, Atoms, Element, Mask, MAX_ATOMS};
use crate::error::{Error, Result};
use crate::structure::AtomStructure;

#[derive(Debug, Clone)]
pub struct FiniteRelationAlgebra {
    id: AlgebraId,
    s: AtomStructure,
    full: Mask,
}

/// Validates every atom-level invariant and returns the algebra.
pub fn make_algebra(s: AtomStructure) -> Result<FiniteRelationAlgebra> {
    FiniteRelationAlgebra::new(s)
}

impl FiniteRelationAlgebra {
    pub fn new(s: AtomStructure) -> Result<Self> {
        if let Some(v) = s.violation() {
            return Err(Error::InvalidStructure(v.to_string()));
        }
        Ok(Self::unchecked(s))
    }

    /// Wraps a table without validating it, so that checkers can inspect
    /// tables that fail the axioms.
    pub fn unchecked(s: AtomStructure) -> Self {
        let full = full_mask(s.atom_count());
        FiniteRelationAlgebra {
            id: AlgebraId::fresh(),
            s,
            full,
        }
    }

    pub fn id(&self) -> AlgebraId {
        self.id
    }

    pub fn structure(&self) -> &AtomStructure {
        &self.s
    }

    pub fn atom_count(&self) -> usize {
        self.s.atom_count()
    }

    pub fn full(&self) -> Mask {
        self.full
    }

    pub fn identity_mask(&self) -> Mask {
        self.s.identity()
    }

    pub fn element(&self, bits: Mask) -> Result<Element> {
        if bits & !self.full != 0 {
            return Err(Error::WidthMismatch {
                width: 32 - bits.leading_zeros(),
                atoms: self.atom_count(),
            });
        }
        Ok(self.wrap(bits))
    }

    pub(crate) fn wrap(&self, bits: Mask) -> Element {
        Element {
            bits,
            owner: self.id,
        }
    }

    pub fn atom(&self, i: usize) -> Element {
        assert!(i < self.atom_count(), "atom index out of range");
        self.wrap(1 << i)
    }

    pub fn zero(&self) -> Element {
        self.wrap(0)
    }

    pub fn one(&self) -> Element {
        self.wrap(self.full)
    }

    pub fn identity(&self) -> Element {
        self.wrap(self.s.identity())
    }

    pub fn diversity(&self) -> Element {
        self.wrap(self.full & !self.s.identity())
    }

    fn own(&self, x: Element) -> Result<Mask> {
        if x.owner != self.id {
            return Err(Error::AlgebraMismatch);
        }
        Ok(x.bits)
    }

    pub(crate) fn check_owner(&self, x: Element) -> Result<()> {
        self.own(x).map(|_| ())
    }

    pub fn join(&self, x: Element, y: Element) -> Result<Element> {
        Ok(self.wrap(self.own(x)? | self.own(y)?))
    }

    pub fn meet(&self, x: Element, y: Element) -> Result<Element> {
        Ok(self.wrap(self.own(x)? & self.own(y)?))
    }

    pub fn complement(&self, x: Element) -> Result<Element> {
        Ok(self.wrap(self.complement_mask(self.own(x)?)))
    }

    pub fn symdiff(&self, x: Element, y: Element) -> Result<Element> {
        Ok(self.wrap(self.own(x)? ^ self.own(y)?))
    }

    pub fn compose(&self, x: Element, y: Element) -> Result<Element> {
        Ok(self.wrap(self.compose_mask(self.own(x)?, self.own(y)?)))
    }

    pub fn converse(&self, x: Element) -> Result<Element> {
        Ok(self.wrap(self.converse_mask(self.own(x)?)))
    }

    /// `1;x;1`, the smallest converse-fixed ideal generator above `x`.
    pub fn closure(&self, x: Element) -> Result<Element> {
        Ok(self.wrap(self.closure_mask(self.own(x)?)))
    }

    pub fn complement_mask(&self, x: Mask) -> Mask {
        self.full & !x
    }

    pub fn compose_mask(&self, x: Mask, y: Mask) -> Mask {
        let m = self.atom_count();
        let table = self.s.comp_flat();
        let mut acc = 0;
        for a in Atoms(x) {
            let row = &table[a * m..a * m + m];
            for b in Atoms(y) {
                acc |= row[b];
            }
        }
        acc
    }

    pub fn converse_mask(&self, x: Mask) -> Mask {
        let conv = self.s.converse_table();
        Atoms(x).fold(0, |acc, a| acc | 1 << conv[a])
    }

    pub fn closure_mask(&self, x: Mask) -> Mask {
        self.compose_mask(self.full, self.compose_mask(x, self.full))
    }

    /// `1'` is a single atom.
    pub fn is_integral(&self) -> bool {
        self.s.identity().count_ones() == 1
    }

    /// Converse is the identity map on atoms.
    pub fn is_symmetric(&self) -> bool {
        (0..self.atom_count()).all(|a| self.s.converse_of(a) == a)
    }

    /// `1;x;1 = 1` for every nonzero `x`; by monotonicity it is enough to
    /// test atoms.
    pub fn is_simple(&self) -> bool {
        (0..self.atom_count()).all(|a| self.closure_mask(1 << a) == self.full)
    }

    pub fn render(&self, x: Element) -> String {
        self.s.render_mask(x.bits)
    }

    pub fn parse_element(&self, text: &str) -> Result<Element> {
        Ok(self.wrap(self.s.parse_mask(text)?))
    }

    /// Direct product: atoms are the disjoint union, cross compositions are 0.
    pub fn product(&self, other: &FiniteRelationAlgebra) -> Result<FiniteRelationAlgebra> {
        Ok(FiniteRelationAlgebra::unchecked(product_structure(
            &self.s, &other.s,
        )?))
    }
}

fn tag_name(name: &str, tag: &str) -> String {
    match name.strip_suffix('~') {
        Some(core) => format!("{core}_{tag}~"),
        None => format!("{name}_{tag}"),
    }
}

pub fn product_structure(a: &AtomStructure, b: &AtomStructure) -> Result<AtomStructure> {
    let (ma, mb) = (a.atom_count(), b.atom_count());
    let m = ma + mb;
    if m > MAX_ATOMS {
        return Err(Error::TooManyAtoms(m));
    }
    let clash = a.names().iter().any(|n| b.index_of(n).is_some());
    let names: Vec<String> = if clash {
        a.names()
            .iter()
            .map(|n| tag_name(n, "1"))
            .chain(b.names().iter().map(|n| tag_name(n, "2")))
            .collect()
    } else {
        a.names().iter().chain(b.names()).cloned().collect()
    };
    let identity = a.identity() | b.identity() << ma;
    let converse = (0..ma)
        .map(|i| a.converse_of(i))
        .chain((0..mb).map(|i| b.converse_of(i) + ma))
        .collect();
    let mut comp = vec![vec![0; m]; m];
    for i in 0..ma {
        for j in 0..ma {
            comp[i][j] = a.comp(i, j);
        }
    }
    for i in 0..mb {
        for j in 0..mb {
            comp[ma + i][ma + j] = b.comp(i, j) << ma;
        }
    }
    AtomStructure::new(names, identity, converse, comp)
}

/// Finds an atom bijection `f` from `a` to `b` preserving identity, converse
/// and composition, if one exists.
pub fn find_isomorphism(a: &AtomStructure, b: &AtomStructure) -> Option<Vec<usize>> {
    let m = a.atom_count();
    if m != b.atom_count() || a.identity().count_ones() != b.identity().count_ones() {
        return None;
    }
    let signature = |s: &AtomStructure, x: usize| {
        let row: u32 = (0..m).map(|y| s.comp(x, y).count_ones()).sum();
        let col: u32 = (0..m).map(|y| s.comp(y, x).count_ones()).sum();
        let nonzero = (0..m).filter(|&y| s.comp(x, y) != 0).count();
        (
            s.identity() >> x & 1,
            s.converse_of(x) == x,
            s.comp(x, x).count_ones(),
            row,
            col,
            nonzero,
        )
    };
    let sig_a: Vec<_> = (0..m).map(|x| signature(a, x)).collect();
    let sig_b: Vec<_> = (0..m).map(|x| signature(b, x)).collect();
    let mut map = vec![usize::MAX; m];
    let mut used = vec![false; m];

    fn consistent(a: &AtomStructure, b: &AtomStructure, map: &[usize], x: usize) -> bool {
        let m = a.atom_count();
        let cx = a.converse_of(x);
        if map[cx] != usize::MAX && b.converse_of(map[x]) != map[cx] {
            return false;
        }
        let assigned: Vec<usize> = (0..m).filter(|&i| map[i] != usize::MAX).collect();
        for &p in &assigned {
            for &q in &assigned {
                if p != x && q != x {
                    continue;
                }
                for &r in &assigned {
                    let lhs = a.comp(p, q) >> r & 1;
                    let rhs = b.comp(map[p], map[q]) >> map[r] & 1;
                    if lhs != rhs {
                        return false;
                    }
                }
            }
            // triples where x appears only as the output
            for &q in &assigned {
                let lhs = a.comp(p, q) >> x & 1;
                let rhs = b.comp(map[p], map[q]) >> map[x] & 1;
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        x: usize,
        a: &AtomStructure,
        b: &AtomStructure,
        sig_a: &[(u32, bool, u32, u32, u32, usize)],
        sig_b: &[(u32, bool, u32, u32, u32, usize)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let m = a.atom_count();
        if x == m {
            return true;
        }
        for y in 0..m {
            if used[y] || sig_a[x] != sig_b[y] {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if consistent(a, b, map, x) && go(x + 1, a, b, sig_a, sig_b, map, used) {
                return true;
            }
            map[x] = usize::MAX;
            used[y] = false;
        }
        false
    }

    if go(0, a, b, &sig_a, &sig_b, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial() -> FiniteRelationAlgebra {
        make_algebra(AtomStructure::new(vec!["1'".into()], 1, vec![0], vec![vec![1]]).unwrap())
            .unwrap()
    }

    /// Three identity atoms with `x;y = x.y`.
    fn diagonal3() -> FiniteRelationAlgebra {
        let comp = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 1 << i } else { 0 }).collect())
            .collect();
        make_algebra(
            AtomStructure::new(
                vec!["a".into(), "b".into(), "c".into()],
                0b111,
                vec![0, 1, 2],
                comp,
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_composition_is_meet() {
        let a = diagonal3();
        let x = a.parse_element("a+b").unwrap();
        let y = a.parse_element("b+c").unwrap();
        assert_eq!(a.render(a.compose(x, y).unwrap()), "b");
        assert!(!a.is_integral());
        assert!(a.is_symmetric());
        assert!(!a.is_simple());
    }

    #[test]
    fn trivial_algebra_flags() {
        let a = trivial();
        assert!(a.is_integral());
        assert!(a.is_simple());
        assert_eq!(a.closure(a.zero()).unwrap(), a.zero());
    }

    #[test]
    fn mixing_algebras_is_rejected() {
        let a = trivial();
        let b = trivial();
        assert_eq!(a.join(a.one(), b.one()), Err(Error::AlgebraMismatch));
        assert_eq!(a.compose(b.zero(), a.zero()), Err(Error::AlgebraMismatch));
        assert!(a.element(0b10).is_err());
    }

    #[test]
    fn product_of_trivials() {
        let p = trivial().product(&trivial()).unwrap();
        assert_eq!(p.atom_count(), 2);
        assert_eq!(p.identity_mask().count_ones(), 2);
        assert!(!p.is_integral());
        assert!(p.structure().violation().is_none());
        assert_eq!(p.compose_mask(0b01, 0b10), 0);
    }

    #[test]
    fn isomorphism_respects_structure() {
        let d = diagonal3();
        let p = trivial()
            .product(&trivial())
            .unwrap()
            .product(&trivial())
            .unwrap();
        assert!(find_isomorphism(d.structure(), p.structure()).is_some());
        assert!(find_isomorphism(d.structure(), trivial().structure()).is_none());
    }
}
