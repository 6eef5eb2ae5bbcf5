//! Points of an equivalence relation and the quotient representation
//! pipeline for `Sb(E)`.
//!
//! A point of `E` picks one diagonal pair `⟨u,u⟩` from every class. Given a
//! homomorphism `h` of `Sb(E)` with maximal kernel,
//! `σ(R) = {⟨p,q⟩ : h(E) = h(E|p|R|q|E)}` is a near-homomorphism into
//! `Re(Pt_E)`; collapsing `Pt_E` by the equivalence `σ(Id_E)` turns it into
//! an embedding of the image of `h` into a square algebra.
//!
//! With kernel `↓C`, `h(X) = h(E)` holds exactly when `E \ X ⊆ C`, which is
//! how `σ` is evaluated here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteRelationAlgebra;
use crate::element::Mask;
use crate::error::{Error, Result};
use crate::ideal::{quotient, Quotient, RelationalIdeal};
use crate::proper::{abstract_structure, full_sb, ProperAlgebra};
use crate::relation::ConcreteRelation;
use crate::search::{verify_representation, RepresentationMap, VerifyReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    unit: ConcreteRelation,
    classes: Vec<Vec<usize>>,
    points: Vec<ConcreteRelation>,
}

/// `Pt_E`, ordered lexicographically by the chosen representative of each
/// class (first class varying slowest).
pub fn points(unit: &ConcreteRelation) -> Result<PointSet> {
    let classes = unit.classes()?;
    let n = unit.base_size();
    let mut points = Vec::new();
    let mut choice = vec![0usize; classes.len()];
    loop {
        points.push(ConcreteRelation::from_pairs(
            n,
            classes.iter().zip(&choice).map(|(c, &k)| (c[k], c[k])),
        )?);
        // odometer, last class fastest
        let mut pos = classes.len();
        loop {
            if pos == 0 {
                return Ok(PointSet {
                    unit: unit.clone(),
                    classes,
                    points,
                });
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < classes[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ConcreteRelation] {
        &self.points
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn unit(&self) -> &ConcreteRelation {
        &self.unit
    }

    /// The defining predicates: `E|p|E = E` and `p|E|p ⊆ Id_E`.
    pub fn is_point(&self, p: &ConcreteRelation) -> bool {
        let e = &self.unit;
        let id = ConcreteRelation::identity(e.base_size())
            .and_then(|i| i.intersection(e))
            .expect("same base");
        let epe = e.compose(p).and_then(|x| x.compose(e));
        let pep = p.compose(e).and_then(|x| x.compose(p));
        matches!((epe, pep), (Ok(a), Ok(b)) if a == *e && b.is_subset(&id))
    }
}

fn chain(rels: &[&ConcreteRelation]) -> ConcreteRelation {
    rels[1..]
        .iter()
        .fold(rels[0].clone(), |acc, r| acc.compose(r).expect("same base"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub id: String,
    pub passed: bool,
    pub cases: u64,
    pub witness: Option<String>,
}

impl PropertyCheck {
    fn new(id: &str) -> Self {
        PropertyCheck {
            id: id.to_string(),
            passed: true,
            cases: 0,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.passed {
            self.passed = false;
            self.witness = Some(witness());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointsLemmaReport {
    pub point_count: usize,
    pub points_valid: bool,
    pub checks: Vec<PropertyCheck>,
    pub passed: bool,
}

fn random_subrelation(rng: &mut ChaCha8Rng, e: &ConcreteRelation) -> ConcreteRelation {
    ConcreteRelation::from_pairs(e.base_size(), e.pairs().filter(|_| rng.gen_bool(0.5)))
        .expect("subset of a valid relation")
}

/// Point with representative `pick(class)` in each class.
fn point_from(e: &ConcreteRelation, reps: impl Iterator<Item = usize>) -> ConcreteRelation {
    ConcreteRelation::from_pairs(e.base_size(), reps.map(|u| (u, u))).expect("valid base")
}

/// The proof's choice for `E|R|E = E|p|R|q|E`: per class, an `R`-pair
/// `⟨u,v⟩` if there is one, else any member.
pub fn choose_endpoints(
    ps: &PointSet,
    r: &ConcreteRelation,
) -> (ConcreteRelation, ConcreteRelation) {
    let mut us = Vec::new();
    let mut vs = Vec::new();
    for c in &ps.classes {
        let hit = c
            .iter()
            .flat_map(|&u| c.iter().map(move |&v| (u, v)))
            .find(|&(u, v)| r.contains(u, v));
        let (u, v) = hit.unwrap_or((c[0], c[0]));
        us.push(u);
        vs.push(v);
    }
    (
        point_from(&ps.unit, us.into_iter()),
        point_from(&ps.unit, vs.into_iter()),
    )
}

/// The proof's choice for `E|R|S|E = E|R|p|S|E`: per class, a middle point
/// of some `R|S` pair inside it, else any member.
pub fn choose_midpoint(
    ps: &PointSet,
    r: &ConcreteRelation,
    s: &ConcreteRelation,
) -> ConcreteRelation {
    let mids = ps.classes.iter().map(|c| {
        c.iter()
            .flat_map(|&x| c.iter().map(move |&y| (x, y)))
            .find_map(|(x, y)| {
                c.iter()
                    .copied()
                    .find(|&u| r.contains(x, u) && s.contains(u, y))
            })
            .unwrap_or(c[0])
    });
    point_from(&ps.unit, mids)
}

/// Checks the algebraic facts about points: the three intersection and
/// converse laws on random draws of `R, S ⊆ E` and points `p, q`, and the two
/// constructive existence claims with the proof's explicit choices.
pub fn check_points_lemma(
    unit: &ConcreteRelation,
    trials: usize,
    seed: u64,
) -> Result<PointsLemmaReport> {
    if unit.base_size() > 8 {
        return Err(Error::SizeLimit(
            "points lemma check needs base <= 8".into(),
        ));
    }
    let ps = points(unit)?;
    let e = unit;
    let points_valid = ps
        .points
        .iter()
        .all(|p| ps.is_point(p) && *p == p.converse());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut iii_a = PropertyCheck::new("iii(a)");
    let mut iii_b = PropertyCheck::new("iii(b)");
    let mut iii_c = PropertyCheck::new("iii(c)");
    let mut iv = PropertyCheck::new("iv");
    let mut v = PropertyCheck::new("v");
    let empty = ConcreteRelation::empty(e.base_size())?;
    for t in 0..trials + 2 {
        // two fixed draws first: R = S = ∅ and R = S = E
        let (r, s) = match t {
            0 => (empty.clone(), empty.clone()),
            1 => (e.clone(), e.clone()),
            _ => (
                random_subrelation(&mut rng, e),
                random_subrelation(&mut rng, e),
            ),
        };
        let p = &ps.points[rng.gen_range(0..ps.len())];
        let q = &ps.points[rng.gen_range(0..ps.len())];
        let w = || format!("R = {r}, S = {s}, p = {p}, q = {q}");
        let rs = r.intersection(&s)?;
        let lhs = chain(&[e, p, &r, q, e]).intersection(&chain(&[e, p, &s, q, e]))?;
        iii_a.record(lhs == chain(&[e, p, &rs, q, e]), w);
        let lhs = chain(&[e, &r, p, e]).intersection(&chain(&[e, p, &s, e]))?;
        iii_b.record(lhs == chain(&[e, &r, p, &s, e]), w);
        let rc = r.converse();
        iii_c.record(chain(&[e, p, &r, q, e]) == chain(&[e, q, &rc, p, e]), w);
        let (pu, qv) = choose_endpoints(&ps, &r);
        iv.record(chain(&[e, &r, e]) == chain(&[e, &pu, &r, &qv, e]), || {
            format!("R = {r}, p = {pu}, q = {qv}")
        });
        let mid = choose_midpoint(&ps, &r, &s);
        v.record(
            chain(&[e, &r, &s, e]) == chain(&[e, &r, &mid, &s, e]),
            || format!("R = {r}, S = {s}, p = {mid}"),
        );
    }
    let checks = vec![iii_a, iii_b, iii_c, iv, v];
    let passed = points_valid && checks.iter().all(|c| c.passed);
    Ok(PointsLemmaReport {
        point_count: ps.len(),
        points_valid,
        checks,
        passed,
    })
}

/// `Sb(E)` both as relations and as an abstract algebra; carrier atom `k` is
/// the `k`-th pair of `E` in row-major order.
#[derive(Debug, Clone)]
pub struct SbAlgebra {
    proper: ProperAlgebra,
    algebra: FiniteRelationAlgebra,
    points: PointSet,
}

impl SbAlgebra {
    pub fn new(unit: &ConcreteRelation) -> Result<Self> {
        let proper = full_sb(unit)?;
        let algebra = FiniteRelationAlgebra::new(abstract_structure(&proper)?)?;
        let points = points(unit)?;
        Ok(SbAlgebra {
            proper,
            algebra,
            points,
        })
    }

    pub fn unit(&self) -> &ConcreteRelation {
        self.proper.unit()
    }

    pub fn proper(&self) -> &ProperAlgebra {
        &self.proper
    }

    pub fn algebra(&self) -> &FiniteRelationAlgebra {
        &self.algebra
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn relation_of(&self, mask: Mask) -> ConcreteRelation {
        self.proper.relation_of(mask)
    }

    pub fn mask_of(&self, r: &ConcreteRelation) -> Option<Mask> {
        self.proper.mask_of(r)
    }

    /// The ideal generated by `U×U` for the class with the given index.
    pub fn block_ideal(&self, class: usize) -> Result<RelationalIdeal> {
        let c = self
            .points
            .classes()
            .get(class)
            .ok_or_else(|| Error::BadParameters(format!("no class {class}")))?;
        let block = ConcreteRelation::from_pairs(
            self.unit().base_size(),
            c.iter().flat_map(|&u| c.iter().map(move |&v| (u, v))),
        )?;
        let mask = self.mask_of(&block).expect("blocks are unions of pairs");
        RelationalIdeal::principal(&self.algebra, self.algebra.element(mask)?)
    }
}

impl SbAlgebra {
    /// The maximal ideal generated by the blocks of every class except
    /// `keep`; its quotient is `Re` of the kept class.
    pub fn maximal_ideal_keeping(&self, keep: usize) -> Result<RelationalIdeal> {
        let classes = self.points.classes().len();
        if keep >= classes {
            return Err(Error::BadParameters(format!("no class {keep}")));
        }
        let mut top = 0;
        for c in (0..classes).filter(|&c| c != keep) {
            top |= self.block_ideal(c)?.top().bits();
        }
        RelationalIdeal::principal(&self.algebra, self.algebra.element(top)?)
    }
}

/// `σ` for the quotient of `Sb(E)` by a maximal ideal.
#[derive(Debug, Clone)]
pub struct Sigma<'a> {
    sb: &'a SbAlgebra,
    kernel: ConcreteRelation,
}

impl Sigma<'_> {
    /// `σ(R)` as a relation on point indices.
    pub fn apply(&self, r: &ConcreteRelation) -> ConcreteRelation {
        let e = self.sb.unit();
        let pts = self.sb.points.points();
        let mut out = ConcreteRelation::empty(pts.len()).expect("point count within limits");
        for (i, p) in pts.iter().enumerate() {
            let left = chain(&[e, p, r]);
            for (j, q) in pts.iter().enumerate() {
                let x = chain(&[&left, q, e]);
                if e.difference(&x).expect("same base").is_subset(&self.kernel) {
                    out.insert(i, j);
                }
            }
        }
        out
    }

    pub fn apply_mask(&self, mask: Mask) -> ConcreteRelation {
        self.apply(&self.sb.relation_of(mask))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearHomReport {
    pub point_count: usize,
    pub kernel_top: String,
    pub checks: Vec<PropertyCheck>,
    pub passed: bool,
}

fn check_maximal(sb: &SbAlgebra, j: &RelationalIdeal) -> Result<Quotient> {
    let q = quotient(sb.algebra(), j)?;
    if !q.algebra.is_simple() {
        return Err(Error::KernelNotMaximal);
    }
    Ok(q)
}

/// Computes `σ` and checks the nine near-homomorphism properties on all
/// carrier atoms and atom pairs, plus `samples` random unions.
pub fn sigma_near_hom<'a>(
    sb: &'a SbAlgebra,
    j: &RelationalIdeal,
    samples: usize,
    seed: u64,
) -> Result<(Sigma<'a>, NearHomReport)> {
    if sb.unit().base_size() > 6 {
        return Err(Error::SizeLimit("sigma needs base <= 6".into()));
    }
    check_maximal(sb, j)?;
    let sigma = Sigma {
        sb,
        kernel: sb.relation_of(j.top().bits()),
    };
    let a = sb.algebra();
    let e = sb.unit();
    let np = sb.points.len();
    let all = ConcreteRelation::full(np)?;
    let m = a.atom_count();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut singles: Vec<Mask> = (0..m).map(|k| 1 << k).collect();
    let mut pairs: Vec<(Mask, Mask)> = (0..m)
        .flat_map(|x| (0..m).map(move |y| (1 << x, 1 << y)))
        .collect();
    for _ in 0..samples {
        let x = rng.gen_range(0..=a.full());
        let y = rng.gen_range(0..=a.full());
        singles.push(x);
        pairs.push((x, y));
    }
    let cache: std::collections::HashMap<Mask, ConcreteRelation> = singles
        .iter()
        .chain(pairs.iter().flat_map(|(x, y)| [x, y]))
        .map(|&x| (x, sigma.apply_mask(x)))
        .collect();
    let sig = |x: Mask| {
        cache
            .get(&x)
            .cloned()
            .unwrap_or_else(|| sigma.apply_mask(x))
    };
    let render = |x: Mask| a.structure().render_mask(x);

    let mut c: Vec<PropertyCheck> = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix"]
        .iter()
        .map(|id| PropertyCheck::new(id))
        .collect();
    c[0].record(sigma.apply_mask(0).is_empty(), || "σ(∅) ≠ ∅".into());
    c[1].record(sigma.apply(e) == all, || "σ(E) ≠ Pt²".into());
    for &x in &singles {
        let sx = sig(x);
        let sc = sigma.apply_mask(a.complement_mask(x));
        c[4].record(sc.intersection(&sx)?.is_empty(), || {
            format!("R = {}", render(x))
        });
        c[5].record(sc.union(&sx)? == all, || format!("R = {}", render(x)));
        let conv = sigma.apply_mask(a.converse_mask(x));
        c[7].record(conv == sx.converse(), || format!("R = {}", render(x)));
    }
    for &(x, y) in &pairs {
        let (sx, sy) = (sig(x), sig(y));
        let sxy = sigma.apply_mask(x | y);
        c[2].record(sx.is_subset(&sxy), || {
            format!("R = {}, S = R + {}", render(x), render(y))
        });
        c[3].record(sxy == sx.union(&sy)?, || {
            format!("R = {}, S = {}", render(x), render(y))
        });
        let comp = sigma.apply(&sb.relation_of(x).compose(&sb.relation_of(y))?);
        c[6].record(comp == sx.compose(&sy)?, || {
            format!("R = {}, S = {}", render(x), render(y))
        });
    }
    let sid = sigma.apply_mask(a.identity_mask());
    c[8].record(ConcreteRelation::identity(np)?.is_subset(&sid), || {
        format!("σ(Id_E) = {sid}")
    });
    let passed = c.iter().all(|k| k.passed);
    Ok((
        sigma,
        NearHomReport {
            point_count: np,
            kernel_top: render(j.top().bits()),
            checks: c,
            passed,
        },
    ))
}

#[derive(Debug, Clone)]
pub struct QuotientRepresentation {
    pub quotient: Quotient,
    /// Representation of the quotient over the classes of `σ(Id_E)`.
    pub rep: RepresentationMap,
    /// Point indices in each base class.
    pub base_classes: Vec<Vec<usize>>,
    pub near_hom: NearHomReport,
    pub verification: VerifyReport,
}

/// Runs the whole pipeline: quotient by `j`, `σ`, and the collapse of `Pt_E`
/// by `σ(Id_E)`, returning a square representation of `Sb(E)/J`.
pub fn represent_quotient(
    sb: &SbAlgebra,
    j: &RelationalIdeal,
    seed: u64,
) -> Result<QuotientRepresentation> {
    let q = check_maximal(sb, j)?;
    let (sigma, near_hom) = sigma_near_hom(sb, j, 100, seed)?;
    let a = sb.algebra();
    let sid = sigma.apply_mask(a.identity_mask());
    let base_classes = sid
        .classes()
        .map_err(|_| Error::InvalidCertificate("σ(Id_E) is not an equivalence relation".into()))?;
    if base_classes.iter().map(Vec::len).sum::<usize>() != sb.points.len() {
        return Err(Error::InvalidCertificate(
            "σ(Id_E) is not reflexive on Pt_E".into(),
        ));
    }
    let class_of = |pt: usize| {
        base_classes
            .iter()
            .position(|c| c.contains(&pt))
            .expect("covered")
    };
    let nb = base_classes.len();
    let mut labels = vec![usize::MAX; nb * nb];
    for parent in q.map.surviving_atoms() {
        let atom = q.map.atom_image(parent).expect("surviving");
        for (pi, pj) in sigma.apply_mask(1 << parent).pairs() {
            let slot = &mut labels[class_of(pi) * nb + class_of(pj)];
            if *slot != usize::MAX && *slot != atom {
                return Err(Error::InvalidCertificate(format!(
                    "base pair ({},{}) receives two atoms",
                    class_of(pi),
                    class_of(pj)
                )));
            }
            *slot = atom;
        }
    }
    if labels.contains(&usize::MAX) {
        return Err(Error::InvalidCertificate(
            "some base pair receives no atom".into(),
        ));
    }
    let rep = RepresentationMap::new(nb, labels)?;
    let verification = verify_representation(&q.algebra, &rep);
    Ok(QuotientRepresentation {
        quotient: q,
        rep,
        base_classes,
        near_hom,
        verification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::find_isomorphism;
    use crate::ideal::{extend_to_maximal, ideal_generate};
    use crate::proper::full_re;
    use crate::search::representation_to_proper;

    fn classes(c: &[usize]) -> ConcreteRelation {
        ConcreteRelation::from_classes(c).unwrap()
    }

    #[test]
    fn point_counts() {
        assert_eq!(points(&classes(&[2, 3])).unwrap().len(), 6);
        let id = ConcreteRelation::identity(4).unwrap();
        let ps = points(&id).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps.points()[0], id);
        let ps = points(&classes(&[2, 2, 3])).unwrap();
        assert_eq!(ps.len(), 12);
        for p in ps.points() {
            assert!(ps.is_point(p));
        }
        assert!(points(&ConcreteRelation::from_pairs(2, [(0, 1)]).unwrap()).is_err());
    }

    #[test]
    fn lemma_on_two_two() {
        let r = check_points_lemma(&classes(&[2, 2]), 200, 7).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.checks[0].cases, 202);
    }

    #[test]
    fn sigma_on_two_two() {
        let sb = SbAlgebra::new(&classes(&[2, 2])).unwrap();
        let a = sb.algebra();
        let j = extend_to_maximal(a, &ideal_generate(a, &[a.zero()]).unwrap()).unwrap();
        let (sigma, report) = sigma_near_hom(&sb, &j, 50, 1).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(sigma.apply_mask(0).is_empty());
        // a non-maximal kernel is refused
        let zero = ideal_generate(a, &[a.zero()]).unwrap();
        assert!(matches!(
            sigma_near_hom(&sb, &zero, 1, 1),
            Err(Error::KernelNotMaximal)
        ));
    }

    #[test]
    fn pipeline_two_three() {
        let sb = SbAlgebra::new(&classes(&[2, 3])).unwrap();
        let j = sb.block_ideal(0).unwrap();
        let out = represent_quotient(&sb, &j, 3).unwrap();
        assert!(out.near_hom.passed);
        assert!(out.verification.passed, "{:?}", out.verification);
        assert_eq!(out.rep.base_size(), 3);
        let p = representation_to_proper(&out.quotient.algebra, &out.rep).unwrap();
        let re3 = abstract_structure(&full_re(3).unwrap()).unwrap();
        assert!(find_isomorphism(&abstract_structure(&p).unwrap(), &re3).is_some());
    }

    #[test]
    fn pipeline_keeps_chosen_class() {
        let sb = SbAlgebra::new(&classes(&[1, 2, 2])).unwrap();
        let j = sb.maximal_ideal_keeping(2).unwrap();
        let out = represent_quotient(&sb, &j, 3).unwrap();
        assert!(out.verification.passed);
        assert_eq!(out.rep.base_size(), 2);
        assert!(sb.maximal_ideal_keeping(3).is_err());
    }

    #[test]
    fn pipeline_single_class() {
        let sb = SbAlgebra::new(&classes(&[3])).unwrap();
        let a = sb.algebra();
        let zero = ideal_generate(a, &[a.zero()]).unwrap();
        let out = represent_quotient(&sb, &zero, 3).unwrap();
        assert!(out.verification.passed);
        assert_eq!(out.rep.base_size(), 3);
        let one = ideal_generate(a, &[a.one()]).unwrap();
        assert_eq!(
            represent_quotient(&sb, &one, 3).err(),
            Some(Error::ImproperIdeal)
        );
    }
}
