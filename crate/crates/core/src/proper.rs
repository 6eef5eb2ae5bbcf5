//! Proper relation algebras: algebras of actual binary relations inside an
//! equivalence relation `E`, presented by the partition of `E` into carrier
//! atoms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::element::{Atoms, Mask, MAX_ATOMS};
use crate::error::{Error, Result};
use crate::relation::ConcreteRelation;
use crate::structure::AtomStructure;

/// Largest unit accepted by [`full_sb`]: every pair becomes one atom.
pub const MAX_SB_PAIRS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperAlgebra {
    unit: ConcreteRelation,
    atoms: Vec<ConcreteRelation>,
    names: Vec<String>,
}

impl ProperAlgebra {
    /// `atoms` must be nonempty, pairwise disjoint and cover the nonempty
    /// equivalence relation `unit`. Closure under `|` and `⁻¹` is checked by
    /// [`abstract_structure`].
    pub fn new(
        unit: ConcreteRelation,
        atoms: Vec<ConcreteRelation>,
        names: Vec<String>,
    ) -> Result<Self> {
        if unit.is_empty() || !unit.is_equivalence() {
            return Err(Error::NotEquivalence);
        }
        if atoms.is_empty() || atoms.len() > MAX_ATOMS {
            return Err(Error::SizeLimit(format!(
                "{} carrier atoms (allowed 1..={MAX_ATOMS})",
                atoms.len()
            )));
        }
        if names.len() != atoms.len() {
            return Err(Error::BadParameters("one name per carrier atom".into()));
        }
        let n = unit.base_size();
        let mut cover = ConcreteRelation::empty(n)?;
        for (k, a) in atoms.iter().enumerate() {
            if a.base_size() != n {
                return Err(Error::BaseMismatch(a.base_size(), n));
            }
            if a.is_empty() {
                return Err(Error::BadParameters(format!(
                    "carrier atom {} is empty",
                    names[k]
                )));
            }
            if !cover.intersection(a)?.is_empty() {
                return Err(Error::BadParameters(format!(
                    "carrier atom {} overlaps an earlier atom",
                    names[k]
                )));
            }
            cover = cover.union(a)?;
        }
        if cover != unit {
            return Err(Error::BadParameters(
                "carrier atoms do not cover the unit".into(),
            ));
        }
        Ok(ProperAlgebra { unit, atoms, names })
    }

    pub fn unit(&self) -> &ConcreteRelation {
        &self.unit
    }

    pub fn base_size(&self) -> usize {
        self.unit.base_size()
    }

    pub fn atoms(&self) -> &[ConcreteRelation] {
        &self.atoms
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `Id_E = Id ∩ E`.
    pub fn identity_relation(&self) -> ConcreteRelation {
        let n = self.base_size();
        ConcreteRelation::from_pairs(
            n,
            (0..n).filter(|&i| self.unit.contains(i, i)).map(|i| (i, i)),
        )
        .expect("base already validated")
    }

    /// The relation denoted by a set of carrier atoms.
    pub fn relation_of(&self, mask: Mask) -> ConcreteRelation {
        let mut r = ConcreteRelation::empty(self.base_size()).expect("base already validated");
        for i in Atoms(mask) {
            r = r.union(&self.atoms[i]).expect("same base");
        }
        r
    }

    /// Writes `r` as a union of carrier atoms, if it is one.
    pub fn mask_of(&self, r: &ConcreteRelation) -> Option<Mask> {
        let mut mask = 0;
        let mut cover = ConcreteRelation::empty(self.base_size()).ok()?;
        for (i, a) in self.atoms.iter().enumerate() {
            let meet = a.intersection(r).ok()?;
            if meet == *a {
                mask |= 1 << i;
                cover = cover.union(a).ok()?;
            } else if !meet.is_empty() {
                return None;
            }
        }
        (cover == *r).then_some(mask)
    }
}

fn pair_name(i: usize, j: usize) -> String {
    format!("r{i}_{j}")
}

/// `Sb(E)` with one carrier atom per pair of `E`.
pub fn full_sb(unit: &ConcreteRelation) -> Result<ProperAlgebra> {
    if unit.is_empty() || !unit.is_equivalence() {
        return Err(Error::NotEquivalence);
    }
    if unit.len() > MAX_SB_PAIRS {
        return Err(Error::SizeLimit(format!(
            "unit has {} pairs, at most {MAX_SB_PAIRS} supported",
            unit.len()
        )));
    }
    let n = unit.base_size();
    let pairs: Vec<(usize, usize)> = unit.pairs().collect();
    let atoms = pairs
        .iter()
        .map(|&p| ConcreteRelation::from_pairs(n, [p]))
        .collect::<Result<Vec<_>>>()?;
    let names = pairs.iter().map(|&(i, j)| pair_name(i, j)).collect();
    ProperAlgebra::new(unit.clone(), atoms, names)
}

/// `Re(n) = Sb(n×n)`.
pub fn full_re(n: usize) -> Result<ProperAlgebra> {
    if n * n > MAX_SB_PAIRS {
        return Err(Error::SizeLimit(format!("Re({n}) has {} atoms", n * n)));
    }
    full_sb(&ConcreteRelation::full(n)?)
}

/// Reads the atom table off the carrier atoms by computing `R|S`, `R⁻¹` and
/// `Id_E` concretely.
pub fn abstract_structure(p: &ProperAlgebra) -> Result<AtomStructure> {
    let m = p.atoms.len();
    let identity = p.mask_of(&p.identity_relation()).ok_or_else(|| {
        Error::NotClosed("the identity Id_E is not a union of carrier atoms".into())
    })?;
    let mut converse = Vec::with_capacity(m);
    for (i, a) in p.atoms.iter().enumerate() {
        let inv = a.converse();
        let c = p.atoms.iter().position(|b| *b == inv).ok_or_else(|| {
            Error::NotClosed(format!("converse of {} is not an atom", p.names[i]))
        })?;
        converse.push(c);
    }
    let mut comp = vec![vec![0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let r = p.atoms[i].compose(&p.atoms[j])?;
            comp[i][j] = p.mask_of(&r).ok_or_else(|| {
                Error::NotClosed(format!(
                    "{};{} is not a union of carrier atoms",
                    p.names[i], p.names[j]
                ))
            })?;
        }
    }
    AtomStructure::new(p.names.clone(), identity, converse, comp)
}

/// `Sb(E) ≅ ∏ Re(U_α)` via `R ↦ ⟨R ∩ U_α²⟩` and the disjoint union back.
#[derive(Debug, Clone)]
pub struct Decomposition {
    unit: ConcreteRelation,
    classes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub class_sizes: Vec<usize>,
    pub carrier_atoms_checked: usize,
    pub random_elements_checked: usize,
    pub passed: bool,
    pub failure: Option<String>,
}

pub fn decompose(unit: &ConcreteRelation) -> Result<Decomposition> {
    if unit.is_empty() {
        return Err(Error::NotEquivalence);
    }
    let classes = unit.classes()?;
    Ok(Decomposition {
        unit: unit.clone(),
        classes,
    })
}

impl Decomposition {
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn unit(&self) -> &ConcreteRelation {
        &self.unit
    }

    /// Components, each relabelled onto `0..|U_α|`.
    pub fn forward(&self, r: &ConcreteRelation) -> Result<Vec<ConcreteRelation>> {
        if !r.is_subset(&self.unit) {
            return Err(Error::BadParameters(
                "relation is not inside the unit".into(),
            ));
        }
        self.classes
            .iter()
            .map(|class| {
                let local = |x: usize| class.iter().position(|&c| c == x);
                ConcreteRelation::from_pairs(
                    class.len(),
                    r.pairs().filter_map(|(i, j)| Some((local(i)?, local(j)?))),
                )
            })
            .collect()
    }

    pub fn backward(&self, parts: &[ConcreteRelation]) -> Result<ConcreteRelation> {
        if parts.len() != self.classes.len() {
            return Err(Error::BadParameters("one component per class".into()));
        }
        let mut out = ConcreteRelation::empty(self.unit.base_size())?;
        for (class, part) in self.classes.iter().zip(parts) {
            if part.base_size() != class.len() {
                return Err(Error::BaseMismatch(part.base_size(), class.len()));
            }
            for (i, j) in part.pairs() {
                out.insert(class[i], class[j]);
            }
        }
        Ok(out)
    }

    /// Checks that `forward` and `backward` are mutually inverse
    /// homomorphisms on every carrier atom (singleton pair of `E`) and on
    /// `samples` random subsets of `E`.
    pub fn verify(&self, samples: usize, seed: u64) -> Result<DecompositionReport> {
        let n = self.unit.base_size();
        let pairs: Vec<(usize, usize)> = self.unit.pairs().collect();
        let singletons = pairs
            .iter()
            .map(|&p| ConcreteRelation::from_pairs(n, [p]))
            .collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random: Vec<ConcreteRelation> = (0..samples)
            .map(|_| {
                ConcreteRelation::from_pairs(n, pairs.iter().copied().filter(|_| rng.gen::<bool>()))
            })
            .collect::<Result<_>>()?;
        let locals: Vec<(ConcreteRelation, ConcreteRelation)> = self
            .classes
            .iter()
            .map(|c| {
                Ok((
                    ConcreteRelation::full(c.len())?,
                    ConcreteRelation::identity(c.len())?,
                ))
            })
            .collect::<Result<_>>()?;
        let ident = ConcreteRelation::from_pairs(
            n,
            (0..n).filter(|&i| self.unit.contains(i, i)).map(|i| (i, i)),
        )?;

        let zip = |a: &[ConcreteRelation],
                   b: &[ConcreteRelation],
                   f: &dyn Fn(&ConcreteRelation, &ConcreteRelation) -> Result<ConcreteRelation>|
         -> Result<Vec<ConcreteRelation>> {
            a.iter().zip(b).map(|(x, y)| f(x, y)).collect()
        };

        let mut failure = None;
        let mut check = |ok: bool, what: String| {
            if !ok && failure.is_none() {
                failure = Some(what);
            }
        };

        let fid = self.forward(&ident)?;
        check(
            fid.iter().zip(&locals).all(|(x, (_, id))| x == id),
            "identity is not preserved".into(),
        );

        let mut run = |xs: &[ConcreteRelation], ys: &[ConcreteRelation]| -> Result<()> {
            for x in xs {
                let fx = self.forward(x)?;
                check(
                    self.backward(&fx)? == *x,
                    format!("backward(forward({x})) differs"),
                );
                check(
                    self.forward(&self.backward(&fx)?)? == fx,
                    format!("forward(backward(...)) differs at {x}"),
                );
                let conv = self.forward(&x.converse())?;
                check(
                    conv.iter().zip(&fx).all(|(c, f)| *c == f.converse()),
                    format!("converse not preserved at {x}"),
                );
                let compl = self.forward(&self.unit.difference(x)?)?;
                let expected: Vec<ConcreteRelation> = fx
                    .iter()
                    .zip(&locals)
                    .map(|(f, (full, _))| full.difference(f))
                    .collect::<Result<_>>()?;
                check(
                    compl == expected,
                    format!("complement not preserved at {x}"),
                );
                for y in ys {
                    let fy = self.forward(y)?;
                    let comp = self.forward(&x.compose(y)?)?;
                    check(
                        comp == zip(&fx, &fy, &|a, b| a.compose(b))?,
                        format!("composition not preserved at {x} | {y}"),
                    );
                    let join = self.forward(&x.union(y)?)?;
                    check(
                        join == zip(&fx, &fy, &|a, b| a.union(b))?,
                        format!("union not preserved at {x} + {y}"),
                    );
                }
            }
            Ok(())
        };
        run(&singletons, &singletons)?;
        for pair in random.chunks(2) {
            run(&pair[..1], pair)?;
        }

        Ok(DecompositionReport {
            class_sizes: self.classes.iter().map(Vec::len).collect(),
            carrier_atoms_checked: singletons.len(),
            random_elements_checked: random.len(),
            passed: failure.is_none(),
            failure,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{find_isomorphism, FiniteRelationAlgebra};
    use crate::axioms::check_ra_axioms;

    #[test]
    fn full_re_sizes() {
        assert_eq!(full_re(2).unwrap().atoms().len(), 4);
        assert_eq!(full_re(1).unwrap().atoms().len(), 1);
        assert!(matches!(full_re(5), Err(Error::SizeLimit(_))));
        let s = abstract_structure(&full_re(2).unwrap()).unwrap();
        let a = FiniteRelationAlgebra::new(s).unwrap();
        assert!(!a.is_symmetric());
        assert!(!a.is_integral());
        assert!(a.is_simple());
    }

    #[test]
    fn diagonal_unit_gives_meet_composition() {
        let id3 = ConcreteRelation::identity(3).unwrap();
        let p = full_sb(&id3).unwrap();
        assert_eq!(p.atoms().len(), 3);
        assert_eq!(p.unit(), &id3);
        let s = abstract_structure(&p).unwrap();
        assert_eq!(s.identity(), 0b111);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s.comp(i, j), if i == j { 1 << i } else { 0 });
            }
        }
        assert!(!FiniteRelationAlgebra::new(s).unwrap().is_integral());
    }

    #[test]
    fn two_point_square_subalgebra() {
        let full = ConcreteRelation::full(2).unwrap();
        let id = ConcreteRelation::identity(2).unwrap();
        let div = full.difference(&id).unwrap();
        let p = ProperAlgebra::new(full, vec![id, div], vec!["1'".into(), "d".into()]).unwrap();
        let s = abstract_structure(&p).unwrap();
        assert_eq!(s.atom_count(), 2);
        assert_eq!(s.comp(1, 1), 0b01);
        assert!(check_ra_axioms(&FiniteRelationAlgebra::new(s).unwrap()).passed());
    }

    #[test]
    fn unclosed_carrier_is_rejected() {
        let full = ConcreteRelation::full(3).unwrap();
        let id = ConcreteRelation::identity(3).unwrap();
        let a = ConcreteRelation::from_pairs(3, [(0, 1), (1, 0)]).unwrap();
        let rest = full.difference(&id).unwrap().difference(&a).unwrap();
        let p = ProperAlgebra::new(
            full,
            vec![id, a, rest],
            vec!["1'".into(), "a".into(), "b".into()],
        )
        .unwrap();
        assert!(matches!(abstract_structure(&p), Err(Error::NotClosed(_))));
    }

    #[test]
    fn non_equivalence_units_are_rejected() {
        let r = ConcreteRelation::from_pairs(2, [(0, 1)]).unwrap();
        assert_eq!(full_sb(&r).unwrap_err(), Error::NotEquivalence);
        assert_eq!(decompose(&r).unwrap_err(), Error::NotEquivalence);
    }

    #[test]
    fn decomposition_of_two_blocks() {
        let e = ConcreteRelation::from_classes(&[2, 3]).unwrap();
        let d = decompose(&e).unwrap();
        let report = d.verify(100, 1).unwrap();
        assert!(report.passed, "{:?}", report.failure);
        assert_eq!(report.carrier_atoms_checked, 13);
        let whole = decompose(&ConcreteRelation::full(3).unwrap()).unwrap();
        assert_eq!(whole.classes().len(), 1);
        let r = ConcreteRelation::from_pairs(3, [(0, 2)]).unwrap();
        assert_eq!(whole.forward(&r).unwrap(), vec![r]);
        let diag = decompose(&ConcreteRelation::identity(3).unwrap()).unwrap();
        assert_eq!(diag.classes().len(), 3);
        assert!(diag.verify(50, 2).unwrap().passed);
    }

    #[test]
    fn sb_of_two_blocks_is_product_of_squares() {
        let e = ConcreteRelation::from_classes(&[2, 3]).unwrap();
        let sb = abstract_structure(&full_sb(&e).unwrap()).unwrap();
        let re2 =
            FiniteRelationAlgebra::new(abstract_structure(&full_re(2).unwrap()).unwrap()).unwrap();
        let re3 =
            FiniteRelationAlgebra::new(abstract_structure(&full_re(3).unwrap()).unwrap()).unwrap();
        let prod = re2.product(&re3).unwrap();
        assert!(find_isomorphism(prod.structure(), &sb).is_some());
    }
}
