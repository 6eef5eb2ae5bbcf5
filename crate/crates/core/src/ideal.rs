//! Relational ideals and quotients of finite algebras.
//!
//! In a finite algebra every relational ideal is principal: it is the set of
//! elements below its largest member `c`, and closure under `x ↦ 1;x;1`
//! means `1;c;1 = c`. Such a `c` is an ideal element, the algebra splits as
//! the product of its relativizations to `c` and to `−c`, and the quotient by
//! `↓c` is the relativization to `−c`: `x ↦ x·−c`. Closure under
//! `x ↦ 1;x;1` is equivalent to closure under `1;x`, `x;1` and `x˘` for
//! downward-closed sets, since `x ≤ 1;x;1` and `1;x;1` is converse-fixed.

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteRelationAlgebra;
use crate::axioms::subsets;
use crate::element::{is_subset, Atoms, Element, Mask};
use crate::error::{Error, Result};
use crate::structure::AtomStructure;
use crate::subalgebra::Subalgebra;

/// The ideal `↓top` of a finite algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationalIdeal {
    top: Element,
}

impl RelationalIdeal {
    /// `↓c`, provided `1;c;1 ≤ c`.
    pub fn principal(a: &FiniteRelationAlgebra, c: Element) -> Result<Self> {
        a.check_owner(c)?;
        if !is_subset(a.closure_mask(c.bits()), c.bits()) {
            return Err(Error::NotClosed(format!(
                "1;({});1 is not below it",
                a.render(c)
            )));
        }
        Ok(RelationalIdeal { top: c })
    }

    pub fn top(&self) -> Element {
        self.top
    }

    pub fn contains(&self, x: Element) -> bool {
        x.owner() == self.top.owner() && x.leq(self.top)
    }

    pub fn contains_mask(&self, x: Mask) -> bool {
        is_subset(x, self.top.bits())
    }

    /// `1 ∉ I`.
    pub fn is_proper(&self, a: &FiniteRelationAlgebra) -> bool {
        self.top.bits() != a.full()
    }

    /// All members, as masks in increasing numeric order.
    pub fn members(&self) -> Vec<Mask> {
        let mut v = subsets(self.top.bits());
        v.sort_unstable();
        v
    }
}

/// The least relational ideal containing `seeds`.
pub fn ideal_generate(a: &FiniteRelationAlgebra, seeds: &[Element]) -> Result<RelationalIdeal> {
    let mut join = 0;
    for &s in seeds {
        a.check_owner(s)?;
        join |= s.bits();
    }
    RelationalIdeal::principal(a, a.wrap(a.closure_mask(join)))
}

/// A maximal proper ideal containing `i`, found by trying the atoms in
/// declaration order and keeping each one whose addition stays proper.
pub fn extend_to_maximal(
    a: &FiniteRelationAlgebra,
    i: &RelationalIdeal,
) -> Result<RelationalIdeal> {
    if !i.is_proper(a) {
        return Err(Error::ImproperIdeal);
    }
    let mut c = i.top.bits();
    for atom in 0..a.atom_count() {
        if c >> atom & 1 == 1 {
            continue;
        }
        let next = a.closure_mask(c | 1 << atom);
        if next != a.full() {
            c = next;
        }
    }
    RelationalIdeal::principal(a, a.wrap(c))
}

/// The natural map `A → A/I`, sending each atom outside `I` to the quotient
/// atom of the same name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMap {
    /// Quotient atom index of each parent atom, `None` for atoms in `I`.
    index: Vec<Option<usize>>,
}

impl QuotientMap {
    pub fn apply_mask(&self, x: Mask) -> Mask {
        Atoms(x)
            .filter_map(|i| self.index[i])
            .fold(0, |acc, j| acc | 1 << j)
    }

    pub fn apply(&self, q: &FiniteRelationAlgebra, x: Element) -> Element {
        q.wrap(self.apply_mask(x.bits()))
    }

    pub fn atom_image(&self, atom: usize) -> Option<usize> {
        self.index[atom]
    }

    /// Parent atoms surviving in the quotient, in quotient order.
    pub fn surviving_atoms(&self) -> Vec<usize> {
        (0..self.index.len())
            .filter(|&i| self.index[i].is_some())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Quotient {
    pub algebra: FiniteRelationAlgebra,
    pub map: QuotientMap,
}

pub fn quotient(a: &FiniteRelationAlgebra, i: &RelationalIdeal) -> Result<Quotient> {
    if !i.is_proper(a) {
        return Err(Error::ImproperIdeal);
    }
    a.check_owner(i.top)?;
    let c = i.top.bits();
    let s = a.structure();
    let kept: Vec<usize> = (0..a.atom_count()).filter(|&k| c >> k & 1 == 0).collect();
    let mut index = vec![None; a.atom_count()];
    for (j, &k) in kept.iter().enumerate() {
        index[k] = Some(j);
    }
    let map = QuotientMap { index };
    let names = kept.iter().map(|&k| s.name(k).to_string()).collect();
    let identity = map.apply_mask(s.identity());
    let converse = kept
        .iter()
        .map(|&k| map.index[s.converse_of(k)].expect("ideal elements are converse-fixed"))
        .collect();
    let comp = kept
        .iter()
        .map(|&x| kept.iter().map(|&y| map.apply_mask(s.comp(x, y))).collect())
        .collect();
    let structure = AtomStructure::new(names, identity, converse, comp)?;
    Ok(Quotient {
        algebra: FiniteRelationAlgebra::new(structure)?,
        map,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    /// Top element of `J`, the downward closure of `I` in the larger algebra.
    pub extended_top: String,
    pub j_is_ideal: bool,
    pub restriction_matches: bool,
    pub sub_elements_checked: u64,
    pub passed: bool,
    pub failure: Option<String>,
}

/// Builds `J = {x ∈ A' : x ≤ y for some y ∈ I}` for an ideal `I` of the
/// subalgebra `sub` of `big`, and checks that `J` is a relational ideal of
/// `A'` with `J ∩ A = I`. `i_top` is the largest member of `I`, as an
/// element of `A'`.
pub fn congruence_extension_check(
    big: &FiniteRelationAlgebra,
    sub: &Subalgebra,
    i_top: Element,
) -> Result<ExtensionReport> {
    big.check_owner(i_top)?;
    let c = i_top.bits();
    if !sub.contains(c) {
        return Err(Error::BadParameters(
            "ideal top is not in the subalgebra".into(),
        ));
    }
    // I must itself be an ideal of the subalgebra; closure there agrees with
    // closure in A' because the operations are inherited.
    if !is_subset(big.closure_mask(c), c) {
        return Err(Error::NotClosed(
            "I is not a relational ideal of the subalgebra".into(),
        ));
    }
    let j_is_ideal = is_subset(big.closure_mask(c), c);
    let mut failure = None;
    let mut checked = 0;
    for x in sub.elements() {
        checked += 1;
        let in_j = is_subset(x, c);
        // membership in I: below some member of I, and I = ↓c within A
        let in_i = sub.contains(x) && is_subset(x, c);
        if in_j != in_i {
            failure = Some(format!(
                "{} separates J ∩ A from I",
                big.structure().render_mask(x)
            ));
            break;
        }
    }
    let restriction_matches = failure.is_none();
    Ok(ExtensionReport {
        extended_top: big.structure().render_mask(c),
        j_is_ideal,
        restriction_matches,
        sub_elements_checked: checked,
        passed: j_is_ideal && restriction_matches,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::find_isomorphism;
    use crate::constructions::mackenzie;
    use crate::proper::{abstract_structure, full_re, full_sb};
    use crate::relation::ConcreteRelation;

    fn sb(classes: &[usize]) -> FiniteRelationAlgebra {
        let e = ConcreteRelation::from_classes(classes).unwrap();
        FiniteRelationAlgebra::new(abstract_structure(&full_sb(&e).unwrap()).unwrap()).unwrap()
    }

    fn block_mask(a: &FiniteRelationAlgebra, class: &[usize]) -> Mask {
        let s = a.structure();
        let mut m = 0;
        for &i in class {
            for &j in class {
                m |= 1 << s.index_of(&format!("r{i}_{j}")).unwrap();
            }
        }
        m
    }

    #[test]
    fn zero_ideal_and_simple_algebras() {
        let a = FiniteRelationAlgebra::new(mackenzie()).unwrap();
        let z = ideal_generate(&a, &[a.zero()]).unwrap();
        assert_eq!(z.members(), vec![0]);
        let q = quotient(&a, &z).unwrap();
        assert!(find_isomorphism(a.structure(), q.algebra.structure()).is_some());
        for atom in 0..a.atom_count() {
            let i = ideal_generate(&a, &[a.atom(atom)]).unwrap();
            assert_eq!(i.top(), a.one());
            assert_eq!(extend_to_maximal(&a, &i), Err(Error::ImproperIdeal));
        }
        assert_eq!(extend_to_maximal(&a, &z).unwrap(), z);
    }

    #[test]
    fn block_ideal_quotient_is_re3() {
        let a = sb(&[2, 3]);
        let seed = a.element(block_mask(&a, &[0, 1])).unwrap();
        let i = ideal_generate(&a, &[seed]).unwrap();
        assert_eq!(i.top(), seed);
        let j = extend_to_maximal(&a, &i).unwrap();
        assert_eq!(j, i);
        let q = quotient(&a, &j).unwrap();
        assert!(q.algebra.is_simple());
        let re3 = abstract_structure(&full_re(3).unwrap()).unwrap();
        assert!(find_isomorphism(q.algebra.structure(), &re3).is_some());
        // kernel is exactly I and the map is onto
        for &x in &subsets(a.full()) {
            let img = q.map.apply_mask(x);
            assert_eq!(img == 0, j.contains_mask(x));
        }
        assert_eq!(q.map.apply_mask(a.full()), q.algebra.full());
    }

    #[test]
    fn maximal_from_zero_on_product_picks_first_factor_out() {
        let a = sb(&[2, 2]);
        let z = ideal_generate(&a, &[a.zero()]).unwrap();
        let j = extend_to_maximal(&a, &z).unwrap();
        // greedy: the first atom r0_0 belongs to the first block
        assert_eq!(j.top().bits(), block_mask(&a, &[0, 1]));
        assert!(quotient(&a, &j).unwrap().algebra.is_simple());
    }

    #[test]
    fn ideals_are_closed_exhaustively() {
        let a = sb(&[1, 2]);
        for seed in subsets(a.full()) {
            let i = ideal_generate(&a, &[a.element(seed).unwrap()]).unwrap();
            let members = i.members();
            for &x in &members {
                assert!(members.contains(&a.closure_mask(x)));
                assert!(members.contains(&a.compose_mask(a.full(), x)));
                assert!(members.contains(&a.converse_mask(x)));
                for &y in &members {
                    assert!(members.contains(&(x | y)));
                }
                for y in subsets(x) {
                    assert!(i.contains_mask(y));
                }
            }
        }
    }

    #[test]
    fn extension_from_identity_subalgebra() {
        let a = sb(&[2, 2]);
        let s = a.structure();
        let id0 = 1 << s.index_of("r0_0").unwrap() | 1 << s.index_of("r1_1").unwrap();
        let id1 = 1 << s.index_of("r2_2").unwrap() | 1 << s.index_of("r3_3").unwrap();
        let div0 = block_mask(&a, &[0, 1]) & !id0;
        let div1 = block_mask(&a, &[2, 3]) & !id1;
        let sub = Subalgebra::from_blocks(&a, &[id0, id1, div0, div1]).unwrap();
        let top = a.element(block_mask(&a, &[0, 1])).unwrap();
        let r = congruence_extension_check(&a, &sub, top).unwrap();
        assert!(r.passed, "{r:?}");
        let r0 = congruence_extension_check(&a, &sub, a.zero()).unwrap();
        assert!(r0.passed);
        assert_eq!(r0.extended_top, "0");
        assert!(congruence_extension_check(&a, &sub, a.element(id0).unwrap()).is_err());
    }
}
