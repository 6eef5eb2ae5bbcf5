//! Checking the relation-algebra axioms and the derived arithmetic laws.
//!
//! The ten defining identities are checked on the finite complex algebra of
//! an atom table. The three boolean identities (with Huntington's law) are checked on an element
//! pool (every element for small algebras, atoms and their complements
//! otherwise) plus random triples.
//!
//! Associativity and the converse-of-composition law are checked exhaustively on
//! atoms. Both sides of each identity distribute over arbitrary joins in every
//! argument, so agreement on atoms implies agreement on all elements of a
//! finite atomic algebra.
//!
//! The Schröder axiom `-y + x˘;-(x;y) = -y` is not additive in `y`. For atoms it
//! is equivalent to the implication `b ≤ a˘;c  ⟹  c ≤ a;b`: with `x = a`,
//! `y = b` the identity says no atom `c` outside `a;b` has `b ≤ a˘;c`, and
//! conversely if the implication holds then `x˘;-(x;y)·y = 0` for all `x, y`
//! because any atom `b ≤ y` with `b ≤ a˘;c` (`a ≤ x`, `c ≤ -(x;y)`) would force
//! `c ≤ a;b ≤ x;y`. The atom-level form is checked exhaustively.
//!
//! All atom-level checks are complemented by the same identities evaluated on
//! random element triples drawn from a seeded generator, so a report is
//! reproducible from its recorded seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteRelationAlgebra;
use crate::element::{is_subset, Mask};

pub const DEFAULT_SEED: u64 = 0x5EED_2004;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Number of random element triples evaluated per law.
    pub samples: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawCheck {
    pub id: String,
    pub law: String,
    pub passed: bool,
    /// Number of instances evaluated.
    pub cases: u64,
    /// First counterexample, rendered in the algebra's atom names.
    pub witness: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<LawCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&LawCheck> {
        self.checks.iter().find(|c| c.id == id)
    }
}

struct Law {
    id: &'static str,
    law: &'static str,
    cases: u64,
    witness: Option<Vec<Mask>>,
}

impl Law {
    fn new(id: &'static str, law: &'static str) -> Self {
        Law {
            id,
            law,
            cases: 0,
            witness: None,
        }
    }

    fn probe(&mut self, ok: bool, args: &[Mask]) {
        self.cases += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(args.to_vec());
        }
    }

    fn finish(self, a: &FiniteRelationAlgebra) -> LawCheck {
        LawCheck {
            id: self.id.to_string(),
            law: self.law.to_string(),
            passed: self.witness.is_none(),
            cases: self.cases,
            witness: self
                .witness
                .map(|w| w.iter().map(|&x| a.structure().render_report(x)).collect()),
        }
    }
}

struct Ctx<'a> {
    a: &'a FiniteRelationAlgebra,
    atoms: Vec<Mask>,
    triples: Vec<[Mask; 3]>,
    pool: Vec<Mask>,
}

impl<'a> Ctx<'a> {
    fn new(a: &'a FiniteRelationAlgebra, opts: CheckOptions) -> Self {
        let m = a.atom_count();
        let full = a.full();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let triples = (0..opts.samples)
            .map(|_| {
                [
                    rng.gen::<u32>() & full,
                    rng.gen::<u32>() & full,
                    rng.gen::<u32>() & full,
                ]
            })
            .collect();
        let atoms: Vec<Mask> = (0..m).map(|i| 1 << i).collect();
        let pool = if m <= 6 {
            (0..=full).collect()
        } else {
            let mut p = vec![0, full, a.identity_mask(), full & !a.identity_mask()];
            p.extend(atoms.iter().copied());
            p.extend(atoms.iter().map(|&x| full & !x));
            p
        };
        Ctx {
            a,
            atoms,
            triples,
            pool,
        }
    }

    fn c(&self, x: Mask, y: Mask) -> Mask {
        self.a.compose_mask(x, y)
    }

    fn v(&self, x: Mask) -> Mask {
        self.a.converse_mask(x)
    }

    fn n(&self, x: Mask) -> Mask {
        self.a.complement_mask(x)
    }

    fn each_atom(&self, law: &mut Law, f: impl Fn(Mask) -> bool) {
        for &x in &self.atoms {
            law.probe(f(x), &[x]);
        }
    }

    fn each_atom_pair(&self, law: &mut Law, f: impl Fn(Mask, Mask) -> bool) {
        for &x in &self.atoms {
            for &y in &self.atoms {
                law.probe(f(x, y), &[x, y]);
            }
        }
    }

    fn each_atom_triple(&self, law: &mut Law, f: impl Fn(Mask, Mask, Mask) -> bool) {
        for &x in &self.atoms {
            for &y in &self.atoms {
                for &z in &self.atoms {
                    law.probe(f(x, y, z), &[x, y, z]);
                }
            }
        }
    }

    fn each_pool_pair(&self, law: &mut Law, f: impl Fn(Mask, Mask) -> bool) {
        for &x in &self.pool {
            for &y in &self.pool {
                law.probe(f(x, y), &[x, y]);
            }
        }
    }

    fn each_random(&self, law: &mut Law, f: impl Fn(Mask, Mask, Mask) -> bool) {
        for &[x, y, z] in &self.triples {
            law.probe(f(x, y, z), &[x, y, z]);
        }
    }
}

pub fn check_ra_axioms(a: &FiniteRelationAlgebra) -> AxiomReport {
    check_ra_axioms_with(a, CheckOptions::default())
}

pub fn check_ra_axioms_with(a: &FiniteRelationAlgebra, opts: CheckOptions) -> AxiomReport {
    let cx = Ctx::new(a, opts);
    let mut checks = Vec::with_capacity(10);

    let mut l = Law::new("join-assoc", "(x+y)+z = x+(y+z)");
    cx.each_random(&mut l, |x, y, z| (x | y) | z == x | (y | z));
    checks.push(l.finish(a));

    let mut l = Law::new("join-comm", "x+y = y+x");
    let join = |x: Mask, y: Mask| x | y;
    cx.each_pool_pair(&mut l, |x, y| join(x, y) == join(y, x));
    cx.each_random(&mut l, |x, y, _| join(x, y) == join(y, x));
    checks.push(l.finish(a));

    let mut l = Law::new("huntington", "x = -(-x+y) + -(-x+-y)");
    let hunt = |x: Mask, y: Mask| x == cx.n(cx.n(x) | y) | cx.n(cx.n(x) | cx.n(y));
    cx.each_pool_pair(&mut l, hunt);
    cx.each_random(&mut l, |x, y, _| hunt(x, y));
    checks.push(l.finish(a));

    let mut l = Law::new("comp-assoc", "x;(y;z) = (x;y);z");
    let assoc = |x, y, z| cx.c(x, cx.c(y, z)) == cx.c(cx.c(x, y), z);
    cx.each_atom_triple(&mut l, assoc);
    cx.each_random(&mut l, assoc);
    checks.push(l.finish(a));

    let mut l = Law::new("comp-distrib", "(x+y);z = x;z + y;z");
    let rdist = |x, y, z| cx.c(x | y, z) == cx.c(x, z) | cx.c(y, z);
    cx.each_atom_triple(&mut l, rdist);
    cx.each_random(&mut l, rdist);
    checks.push(l.finish(a));

    let id = a.identity_mask();
    let mut l = Law::new("right-identity", "x;1' = x");
    cx.each_atom(&mut l, |x| cx.c(x, id) == x);
    cx.each_random(&mut l, |x, _, _| cx.c(x, id) == x);
    checks.push(l.finish(a));

    let mut l = Law::new("converse-involution", "x~~ = x");
    cx.each_atom(&mut l, |x| cx.v(cx.v(x)) == x);
    cx.each_random(&mut l, |x, _, _| cx.v(cx.v(x)) == x);
    checks.push(l.finish(a));

    let mut l = Law::new("converse-join", "(x+y)~ = x~ + y~");
    let cdist = |x, y| cx.v(x | y) == cx.v(x) | cx.v(y);
    cx.each_atom_pair(&mut l, cdist);
    cx.each_random(&mut l, |x, y, _| cdist(x, y));
    checks.push(l.finish(a));

    let mut l = Law::new("converse-comp", "(x;y)~ = y~;x~");
    let crev = |x, y| cx.v(cx.c(x, y)) == cx.c(cx.v(y), cx.v(x));
    cx.each_atom_pair(&mut l, crev);
    cx.each_random(&mut l, |x, y, _| crev(x, y));
    checks.push(l.finish(a));

    let mut l = Law::new("schroeder", "-y + x~;-(x;y) = -y");
    cx.each_atom_triple(&mut l, |x, y, z| {
        // x, y, z play a, b, c: b <= a~;c implies c <= a;b
        !is_subset(y, cx.c(cx.v(x), z)) || is_subset(z, cx.c(x, y))
    });
    let tenth = |x, y| cx.n(y) | cx.c(cx.v(x), cx.n(cx.c(x, y))) == cx.n(y);
    cx.each_atom_pair(&mut l, tenth);
    cx.each_random(&mut l, |x, y, _| tenth(x, y));
    checks.push(l.finish(a));

    AxiomReport {
        seed: opts.seed,
        samples: opts.samples,
        checks,
    }
}

pub fn derived_laws(a: &FiniteRelationAlgebra) -> AxiomReport {
    derived_laws_with(a, CheckOptions::default())
}

pub fn derived_laws_with(a: &FiniteRelationAlgebra, opts: CheckOptions) -> AxiomReport {
    let cx = Ctx::new(a, opts);
    let full = a.full();
    let id = a.identity_mask();
    let mut checks = Vec::with_capacity(10);

    let mut l = Law::new("left-distrib", "x;(y+z) = x;y + x;z");
    let ldist = |x, y, z| cx.c(x, y | z) == cx.c(x, y) | cx.c(x, z);
    cx.each_atom_triple(&mut l, ldist);
    cx.each_random(&mut l, ldist);
    checks.push(l.finish(a));

    let mut l = Law::new("converse-boolean", "(-x)~ = -(x~) and (x.y)~ = x~.y~");
    let auto = |x, y| cx.v(cx.n(x)) == cx.n(cx.v(x)) && cx.v(x & y) == cx.v(x) & cx.v(y);
    cx.each_atom_pair(&mut l, auto);
    cx.each_random(&mut l, |x, y, _| auto(x, y));
    checks.push(l.finish(a));

    let mut l = Law::new("comp-monotone", "x <= y implies x;z <= y;z and z;x <= z;y");
    let mono = |x: Mask, y: Mask, z: Mask| {
        let y = x | y;
        is_subset(cx.c(x, z), cx.c(y, z)) && is_subset(cx.c(z, x), cx.c(z, y))
    };
    cx.each_atom_triple(&mut l, mono);
    cx.each_random(&mut l, mono);
    checks.push(l.finish(a));

    let mut l = Law::new("peirce", "x;y.z~ = 0 iff y;z.x~ = 0");
    let peirce = |x, y, z| (cx.c(x, y) & cx.v(z) == 0) == (cx.c(y, z) & cx.v(x) == 0);
    cx.each_atom_triple(&mut l, peirce);
    cx.each_random(&mut l, peirce);
    checks.push(l.finish(a));

    let mut l = Law::new("identity-laws", "1'~ = 1', 1';x = x, 0;x = 0 = x;0");
    l.probe(cx.v(id) == id, &[id]);
    let unit = |x| cx.c(id, x) == x && cx.c(0, x) == 0 && cx.c(x, 0) == 0;
    cx.each_atom(&mut l, unit);
    cx.each_random(&mut l, |x, _, _| unit(x));
    checks.push(l.finish(a));

    let mut l = Law::new("symmetric-commutes", "symmetric implies x;y = y;x");
    if a.is_symmetric() {
        let comm = |x, y| cx.c(x, y) == cx.c(y, x);
        cx.each_atom_pair(&mut l, comm);
        cx.each_random(&mut l, |x, y, _| comm(x, y));
    }
    checks.push(l.finish(a));

    let mut l = Law::new("x-below-xx~x", "x <= x;x~;x");
    let rot = |x| is_subset(x, cx.c(cx.c(x, cx.v(x)), x));
    cx.each_atom(&mut l, rot);
    cx.each_random(&mut l, |x, _, _| rot(x));
    checks.push(l.finish(a));

    let mut l = Law::new("subidentities", "x,y <= 1' implies x~ = x and x;y = x.y");
    let sub = |x: Mask, y: Mask| cx.v(x) == x && cx.c(x, y) == x & y;
    if id.count_ones() <= 8 {
        let subs = subsets(id);
        for &x in &subs {
            for &y in &subs {
                l.probe(sub(x, y), &[x, y]);
            }
        }
    } else {
        cx.each_random(&mut l, |x, y, _| sub(x & id, y & id));
    }
    checks.push(l.finish(a));

    let mut l = Law::new("integrality", "integral iff 1' is an atom");
    let zero_pair = cx
        .atoms
        .iter()
        .flat_map(|&x| cx.atoms.iter().map(move |&y| (x, y)))
        .find(|&(x, y)| cx.c(x, y) == 0);
    let integral_by_definition = zero_pair.is_none();
    let witness = match zero_pair {
        Some((x, y)) => vec![x, y, id],
        None => vec![id],
    };
    l.probe(integral_by_definition == a.is_integral(), &witness);
    checks.push(l.finish(a));

    let mut l = Law::new("ideal-symmetry", "(1;x;1)~ = 1;x;1");
    let cl = |x| {
        let c = cx.c(cx.c(full, x), full);
        cx.v(c) == c
    };
    cx.each_atom(&mut l, cl);
    cx.each_random(&mut l, |x, _, _| cl(x));
    checks.push(l.finish(a));

    AxiomReport {
        seed: opts.seed,
        samples: opts.samples,
        checks,
    }
}

/// Every submask of `mask`, including 0 and `mask`.
pub(crate) fn subsets(mask: Mask) -> Vec<Mask> {
    let mut out = Vec::with_capacity(1 << mask.count_ones());
    let mut s: Mask = 0;
    loop {
        out.push(s);
        if s == mask {
            break;
        }
        s = (s.wrapping_sub(mask)) & mask;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::AtomStructure;

    fn diagonal(k: usize) -> FiniteRelationAlgebra {
        let names = (0..k).map(|i| format!("e{i}")).collect();
        let comp = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1 << i } else { 0 }).collect())
            .collect();
        FiniteRelationAlgebra::new(
            AtomStructure::new(names, (1 << k) - 1, (0..k).collect(), comp).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn subsets_enumerates_submasks() {
        let mut s = subsets(0b1010);
        s.sort();
        assert_eq!(s, vec![0, 0b10, 0b1000, 0b1010]);
        assert_eq!(subsets(0), vec![0]);
    }

    #[test]
    fn diagonal_algebra_passes_everything() {
        let a = diagonal(3);
        let r = check_ra_axioms(&a);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let d = derived_laws(&a);
        assert!(d.passed(), "{:?}", d.failures().collect::<Vec<_>>());
        assert_eq!(r.seed, DEFAULT_SEED);
        assert_eq!(r.checks.len(), 10);
        assert_eq!(d.checks.len(), 10);
    }

    #[test]
    fn broken_unit_fails_with_witness() {
        let a = diagonal(2);
        let bad = a.structure().with_entry(0, 0, 0b11).unwrap();
        let r = check_ra_axioms(&FiniteRelationAlgebra::unchecked(bad));
        assert!(!r.passed());
        for f in r.failures() {
            assert!(f.witness.as_ref().is_some_and(|w| !w.is_empty()));
        }
        assert!(!r.get("right-identity").unwrap().passed);
    }

    #[test]
    fn same_seed_same_report() {
        let a = diagonal(4);
        let opts = CheckOptions {
            seed: 7,
            samples: 200,
        };
        assert_eq!(
            check_ra_axioms_with(&a, opts),
            check_ra_axioms_with(&a, opts)
        );
    }
}
