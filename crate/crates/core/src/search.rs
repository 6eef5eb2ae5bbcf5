//! Square representations of finite simple algebras as total atom labelings
//! of `base × base`, their verification, and a bounded backtracking search.
//!
//! A labeling `ℓ` represents the algebra exactly when
//!
//! * (a) every triangle is consistent: `ℓ(i,k) ∈ ℓ(i,j);ℓ(j,k)`, and
//! * (b) every demanded witness exists: if `ℓ(i,k) ∈ a;b` then some `j` has
//!   `ℓ(i,j) = a` and `ℓ(j,k) = b`.
//!
//! Sending an element to the union of its atoms' label classes is then a
//! homomorphism: (a) gives `rep(a)|rep(b) ⊆ rep(a;b)` for atoms, (b) gives the
//! reverse inclusion, and both extend to all elements because composition
//! distributes over joins on both sides. It is injective when every atom
//! labels at least one pair.

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteRelationAlgebra;
use crate::element::{Atoms, Mask};
use crate::error::{Error, Result};
use crate::proper::ProperAlgebra;
use crate::relation::{ConcreteRelation, MAX_BASE};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepresentationMap {
    base: usize,
    /// Row-major `base * base` atom indices.
    labels: Vec<usize>,
}

impl RepresentationMap {
    pub fn new(base: usize, labels: Vec<usize>) -> Result<Self> {
        if base == 0 || labels.len() != base * base {
            return Err(Error::InvalidCertificate(format!(
                "expected {} labels for base {base}, got {}",
                base * base,
                labels.len()
            )));
        }
        Ok(RepresentationMap { base, labels })
    }

    pub fn from_fn(base: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let labels = (0..base * base).map(|k| f(k / base, k % base)).collect();
        Self::new(base, labels)
    }

    pub fn base_size(&self) -> usize {
        self.base
    }

    /// Row-major labels.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize, j: usize) -> usize {
        self.labels[i * self.base + j]
    }

    /// Moves point `i` to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.base;
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::BadParameters("not a permutation of the base".into()));
        }
        let mut labels = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                labels[perm[i] * n + perm[j]] = self.label(i, j);
            }
        }
        Self::new(n, labels)
    }

    /// The pairs labeled by atoms in `mask`.
    pub fn pairs_of(&self, mask: Mask) -> Vec<(usize, usize)> {
        (0..self.base * self.base)
            .filter(|&k| mask >> self.labels[k] & 1 == 1)
            .map(|k| (k / self.base, k % self.base))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepFailure {
    Malformed {
        msg: String,
    },
    Triangle {
        i: usize,
        j: usize,
        k: usize,
        labels: [String; 3],
    },
    Witness {
        i: usize,
        k: usize,
        left: String,
        right: String,
    },
    UnusedAtom {
        atom: String,
    },
}

impl fmt::Display for RepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepFailure::Malformed { msg } => write!(f, "malformed labeling: {msg}"),
            RepFailure::Triangle { i, j, k, labels } => write!(
                f,
                "triangle ({i},{j},{k}): {} not in {};{}",
                labels[2], labels[0], labels[1]
            ),
            RepFailure::Witness { i, k, left, right } => write!(
                f,
                "pair ({i},{k}) has no witness j with ({i},j) in {left} and (j,{k}) in {right}"
            ),
            RepFailure::UnusedAtom { atom } => write!(f, "atom {atom} labels no pair"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub base: usize,
    pub passed: bool,
    pub failure: Option<RepFailure>,
}

/// For each atom `c` and atom `a`, the atoms `b` with `c ∈ a;b`.
fn demand_table(a: &FiniteRelationAlgebra) -> Vec<Mask> {
    let m = a.atom_count();
    let s = a.structure();
    let mut need = vec![0; m * m];
    for x in 0..m {
        for y in 0..m {
            for c in Atoms(s.comp(x, y)) {
                need[c * m + x] |= 1 << y;
            }
        }
    }
    need
}

pub fn verify_representation(a: &FiniteRelationAlgebra, rep: &RepresentationMap) -> VerifyReport {
    let n = rep.base;
    let m = a.atom_count();
    let s = a.structure();
    let fail = |failure| VerifyReport {
        base: n,
        passed: false,
        failure: Some(failure),
    };
    let name = |x: usize| s.name(x).to_string();
    if let Some(&bad) = rep.labels.iter().find(|&&l| l >= m) {
        return fail(RepFailure::Malformed {
            msg: format!("label {bad} out of range"),
        });
    }
    let id = a.identity_mask();
    for i in 0..n {
        for j in 0..n {
            let l = rep.label(i, j);
            if (i == j) != (id >> l & 1 == 1) {
                return fail(RepFailure::Malformed {
                    msg: format!("({i},{j}) labeled {}", name(l)),
                });
            }
            if rep.label(j, i) != s.converse_of(l) {
                return fail(RepFailure::Malformed {
                    msg: format!("({j},{i}) is not labeled with the converse of ({i},{j})"),
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y, z) = (rep.label(i, j), rep.label(j, k), rep.label(i, k));
                if s.comp(x, y) >> z & 1 == 0 {
                    return fail(RepFailure::Triangle {
                        i,
                        j,
                        k,
                        labels: [name(x), name(y), name(z)],
                    });
                }
            }
        }
    }
    let need = demand_table(a);
    for i in 0..n {
        for k in 0..n {
            let mut realized = vec![0 as Mask; m];
            for j in 0..n {
                realized[rep.label(i, j)] |= 1 << rep.label(j, k);
            }
            let c = rep.label(i, k);
            for x in 0..m {
                let missing = need[c * m + x] & !realized[x];
                if missing != 0 {
                    return fail(RepFailure::Witness {
                        i,
                        k,
                        left: name(x),
                        right: name(missing.trailing_zeros() as usize),
                    });
                }
            }
        }
    }
    let used = rep.labels.iter().fold(0 as Mask, |acc, &l| acc | 1 << l);
    if used != a.full() {
        return fail(RepFailure::UnusedAtom {
            atom: name((a.full() & !used).trailing_zeros() as usize),
        });
    }
    VerifyReport {
        base: n,
        passed: true,
        failure: None,
    }
}

/// Materializes each atom's relation over `0..base` with unit `base × base`.
pub fn representation_to_proper(
    a: &FiniteRelationAlgebra,
    rep: &RepresentationMap,
) -> Result<ProperAlgebra> {
    let report = verify_representation(a, rep);
    if let Some(f) = report.failure {
        return Err(Error::InvalidCertificate(f.to_string()));
    }
    let n = rep.base;
    if n > MAX_BASE {
        return Err(Error::SizeLimit(format!("base {n} exceeds {MAX_BASE}")));
    }
    let atoms = (0..a.atom_count())
        .map(|x| ConcreteRelation::from_pairs(n, rep.pairs_of(1 << x)))
        .collect::<Result<Vec<_>>>()?;
    ProperAlgebra::new(
        ConcreteRelation::full(n)?,
        atoms,
        a.structure().names().to_vec(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeOrdering {
    /// Diagonal first, then edges `(i,j)`, `i < j`, in lexicographic order.
    Lexicographic,
    /// The unassigned pair with the fewest consistent labels.
    FewestCandidates,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_base: usize,
    pub ordering: NodeOrdering,
    /// Per base size.
    pub budget: Duration,
    pub deterministic: bool,
    pub jobs: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_base: 6,
            ordering: NodeOrdering::Lexicographic,
            budget: Duration::from_secs(60),
            deterministic: true,
            jobs: 1,
        }
    }
}

pub const MAX_SEARCH_BASE: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeOutcome {
    pub base: usize,
    /// The whole space at this size was searched.
    pub exhausted: bool,
    pub nodes: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found {
        rep: RepresentationMap,
        sizes: Vec<SizeOutcome>,
    },
    NotFoundWithinBounds {
        sizes: Vec<SizeOutcome>,
    },
}

impl SearchOutcome {
    pub fn sizes(&self) -> &[SizeOutcome] {
        match self {
            SearchOutcome::Found { sizes, .. } | SearchOutcome::NotFoundWithinBounds { sizes } => {
                sizes
            }
        }
    }

    pub fn representation(&self) -> Option<&RepresentationMap> {
        match self {
            SearchOutcome::Found { rep, .. } => Some(rep),
            SearchOutcome::NotFoundWithinBounds { .. } => None,
        }
    }
}

const UNSET: u8 = u8::MAX;

struct Problem<'a> {
    alg: &'a FiniteRelationAlgebra,
    n: usize,
    m: usize,
    comp: Vec<Mask>,
    conv: Vec<usize>,
    identity: Mask,
    diversity: Mask,
    need: Vec<Mask>,
    vars: Vec<(usize, usize)>,
    ordering: NodeOrdering,
    deadline: Instant,
    stop: &'a AtomicBool,
}

struct Worker<'p, 'a, 'c> {
    p: &'p Problem<'a>,
    labels: Vec<u8>,
    assigned: Vec<bool>,
    nodes: u64,
    timed_out: bool,
    /// Returns true when this worker should abandon its subtree.
    cancel: &'c dyn Fn() -> bool,
}

impl Problem<'_> {
    fn comp(&self, a: u8, b: u8) -> Mask {
        self.comp[a as usize * self.m + b as usize]
    }
}

impl<'p, 'a, 'c> Worker<'p, 'a, 'c> {
    fn new(p: &'p Problem<'a>, cancel: &'c dyn Fn() -> bool) -> Self {
        Worker {
            p,
            labels: vec![UNSET; p.n * p.n],
            assigned: vec![false; p.vars.len()],
            nodes: 0,
            timed_out: false,
            cancel,
        }
    }

    fn get(&self, i: usize, j: usize) -> u8 {
        self.labels[i * self.p.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u8) {
        let n = self.p.n;
        self.labels[i * n + j] = v;
        self.labels[j * n + i] = if v == UNSET {
            UNSET
        } else {
            self.p.conv[v as usize] as u8
        };
    }

    fn domain(&self, i: usize, j: usize) -> Mask {
        if i == j {
            self.p.identity
        } else {
            self.p.diversity
        }
    }

    /// Triangles through `(i,j)` whose other two sides are labeled, plus the
    /// ordering constraint on the first row.
    fn consistent(&mut self, i: usize, j: usize, v: u8) -> bool {
        let p = self.p;
        if i == 0 && j > 0 {
            for k in 1..p.n {
                let l = self.get(0, k);
                if l != UNSET && k != j && ((k < j && l > v) || (k > j && l < v)) {
                    return false;
                }
            }
        }
        self.set(i, j, v);
        let mut ok = true;
        for k in 0..p.n {
            let (ik, kj, jk, ki) = (
                self.get(i, k),
                self.get(k, j),
                self.get(j, k),
                self.get(k, i),
            );
            if ik != UNSET && kj != UNSET && p.comp(ik, kj) >> v & 1 == 0 {
                ok = false;
                break;
            }
            if ik != UNSET && jk != UNSET && p.comp(v, jk) >> ik & 1 == 0 {
                ok = false;
                break;
            }
            if ki != UNSET && kj != UNSET && p.comp(ki, v) >> kj & 1 == 0 {
                ok = false;
                break;
            }
        }
        self.set(i, j, UNSET);
        ok
    }

    fn candidates(&mut self, i: usize, j: usize) -> Mask {
        let mut out = 0;
        for v in Atoms(self.domain(i, j)) {
            if self.consistent(i, j, v as u8) {
                out |= 1 << v;
            }
        }
        out
    }

    fn complete(&self, x: usize) -> bool {
        (0..self.p.n).all(|k| self.get(x, k) != UNSET)
    }

    fn witnesses_ok(&self, x: usize, y: usize) -> bool {
        let p = self.p;
        let mut realized = [0 as Mask; crate::element::MAX_ATOMS];
        for z in 0..p.n {
            realized[self.get(x, z) as usize] |= 1 << self.get(z, y);
        }
        let c = self.get(x, y) as usize;
        (0..p.m).all(|a| p.need[c * p.m + a] & !realized[a] == 0)
    }

    /// Witness checks for pairs between newly completed nodes and all
    /// completed nodes.
    fn saturated_after(&self, i: usize, j: usize) -> bool {
        for x in [i, j] {
            if !self.complete(x) {
                continue;
            }
            for y in 0..self.p.n {
                if self.complete(y) && !(self.witnesses_ok(x, y) && self.witnesses_ok(y, x)) {
                    return false;
                }
            }
        }
        true
    }

    fn next_var(&mut self) -> Option<(usize, Mask)> {
        let p = self.p;
        match p.ordering {
            NodeOrdering::Lexicographic => {
                let k = self.assigned.iter().position(|&a| !a)?;
                let (i, j) = p.vars[k];
                Some((k, self.candidates(i, j)))
            }
            NodeOrdering::FewestCandidates => {
                let mut best: Option<(usize, Mask)> = None;
                for k in 0..p.vars.len() {
                    if self.assigned[k] {
                        continue;
                    }
                    let (i, j) = p.vars[k];
                    let c = self.candidates(i, j);
                    if best.is_none_or(|(_, b)| c.count_ones() < b.count_ones()) {
                        best = Some((k, c));
                        if c == 0 {
                            break;
                        }
                    }
                }
                best
            }
        }
    }

    fn interrupted(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if self.nodes.is_multiple_of(1024) {
            if Instant::now() >= self.p.deadline {
                self.timed_out = true;
                self.p.stop.store(true, Ordering::Relaxed);
                return true;
            }
            if (self.cancel)() {
                return true;
            }
        }
        false
    }

    fn solve(&mut self) -> Option<RepresentationMap> {
        self.nodes += 1;
        if self.interrupted() {
            return None;
        }
        let Some((k, cands)) = self.next_var() else {
            let rep = RepresentationMap {
                base: self.p.n,
                labels: self.labels.iter().map(|&l| l as usize).collect(),
            };
            return verify_representation(self.p.alg, &rep)
                .passed
                .then_some(rep);
        };
        let (i, j) = self.p.vars[k];
        self.assigned[k] = true;
        for v in Atoms(cands) {
            self.set(i, j, v as u8);
            if self.saturated_after(i, j) {
                if let Some(rep) = self.solve() {
                    return Some(rep);
                }
            }
            if self.timed_out || (self.cancel)() {
                break;
            }
        }
        self.set(i, j, UNSET);
        self.assigned[k] = false;
        None
    }
}

fn search_size(
    a: &FiniteRelationAlgebra,
    n: usize,
    cfg: &SearchConfig,
) -> (Option<RepresentationMap>, SizeOutcome) {
    let start = Instant::now();
    let s = a.structure();
    let m = a.atom_count();
    let identity = a.identity_mask();
    let mut vars: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            vars.push((i, j));
        }
    }
    let stop = AtomicBool::new(false);
    let problem = Problem {
        alg: a,
        n,
        m,
        comp: (0..m * m).map(|k| s.comp(k / m, k % m)).collect(),
        conv: s.converse_table().to_vec(),
        identity,
        diversity: a.full() & !identity,
        need: demand_table(a),
        vars,
        ordering: cfg.ordering,
        deadline: start + cfg.budget,
        stop: &stop,
    };
    let never = || false;
    let (found, nodes, timed_out) = if cfg.jobs <= 1 {
        let mut w = Worker::new(&problem, &never);
        let r = w.solve();
        (r, w.nodes, w.timed_out)
    } else {
        // Fan out over the labels of the first variable. Branch `b` gives up
        // once a branch with a smaller index has succeeded, so the result is
        // the one the sequential search would return.
        let mut root = Worker::new(&problem, &never);
        let (k0, cands) = root.next_var().expect("at least one variable");
        let branches: Vec<usize> = Atoms(cands).collect();
        let best = AtomicUsize::new(usize::MAX);
        let any = AtomicBool::new(false);
        let total = AtomicU64::new(1);
        let deterministic = cfg.deterministic;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .expect("thread pool");
        let (stop, best, any) = (&stop, &best, &any);
        let results: Vec<(Option<RepresentationMap>, bool)> = pool.install(|| {
            branches
                .par_iter()
                .enumerate()
                .map(|(b, &v)| {
                    let cancel = move || {
                        stop.load(Ordering::Relaxed)
                            || if deterministic {
                                best.load(Ordering::Relaxed) < b
                            } else {
                                any.load(Ordering::Relaxed)
                            }
                    };
                    let mut w = Worker::new(&problem, &cancel);
                    let (i, j) = problem.vars[k0];
                    w.assigned[k0] = true;
                    w.set(i, j, v as u8);
                    let r = if w.saturated_after(i, j) {
                        w.solve()
                    } else {
                        None
                    };
                    if r.is_some() {
                        best.fetch_min(b, Ordering::Relaxed);
                        any.store(true, Ordering::Relaxed);
                    }
                    total.fetch_add(w.nodes, Ordering::Relaxed);
                    (r, w.timed_out)
                })
                .collect()
        });
        let timed_out = results.iter().any(|(_, t)| *t);
        let found = results.into_iter().find_map(|(r, _)| r);
        (found, total.load(Ordering::Relaxed), timed_out)
    };
    let outcome = SizeOutcome {
        base: n,
        exhausted: found.is_none() && !timed_out,
        nodes,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    (found, outcome)
}

/// Tries base sizes `1..=max_base` in order and returns the first labeling
/// that verifies.
pub fn find_square_representation(
    a: &FiniteRelationAlgebra,
    cfg: &SearchConfig,
) -> Result<SearchOutcome> {
    if !a.is_simple() {
        return Err(Error::NotSimple);
    }
    if !(1..=MAX_SEARCH_BASE).contains(&cfg.max_base) {
        return Err(Error::BadParameters(format!(
            "max_base must be in 1..={MAX_SEARCH_BASE}"
        )));
    }
    if cfg.budget.is_zero() {
        return Err(Error::BadParameters("time budget must be positive".into()));
    }
    let mut sizes = Vec::new();
    for n in 1..=cfg.max_base {
        let (found, outcome) = search_size(a, n, cfg);
        sizes.push(outcome);
        if let Some(rep) = found {
            return Ok(SearchOutcome::Found { rep, sizes });
        }
    }
    Ok(SearchOutcome::NotFoundWithinBounds { sizes })
}

/// `.rep` text as read, before names are resolved against an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCertificate {
    pub algebra: String,
    pub base: usize,
    pub rows: Vec<Vec<String>>,
}

impl RawCertificate {
    pub fn resolve(&self, a: &FiniteRelationAlgebra) -> Result<RepresentationMap> {
        let s = a.structure();
        let mut labels = Vec::with_capacity(self.base * self.base);
        for row in &self.rows {
            for name in row {
                labels.push(
                    s.index_of(name).ok_or_else(|| {
                        Error::InvalidCertificate(format!("unknown atom `{name}`"))
                    })?,
                );
            }
        }
        RepresentationMap::new(self.base, labels)
    }
}

pub fn parse_rep(text: &str) -> Result<RawCertificate> {
    let err = |line: usize, msg: &str| Error::Format {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (no, l) = lines
        .next()
        .ok_or_else(|| err(0, "missing `algebra:` line"))?;
    let algebra = l
        .strip_prefix("algebra:")
        .ok_or_else(|| err(no, "expected `algebra:`"))?
        .trim()
        .to_string();
    let (no, l) = lines.next().ok_or_else(|| err(0, "missing `base:` line"))?;
    let base: usize = l
        .strip_prefix("base:")
        .and_then(|b| b.trim().parse().ok())
        .ok_or_else(|| err(no, "expected `base: <n>`"))?;
    let mut rows = Vec::with_capacity(base);
    for (no, l) in lines {
        let row: Vec<String> = l.split_whitespace().map(String::from).collect();
        if row.len() != base {
            return Err(err(
                no,
                &format!("expected {base} labels, got {}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != base {
        return Err(err(0, &format!("expected {base} rows, got {}", rows.len())));
    }
    Ok(RawCertificate {
        algebra,
        base,
        rows,
    })
}

pub fn write_rep(a: &FiniteRelationAlgebra, rep: &RepresentationMap, algebra_path: &str) -> String {
    let s = a.structure();
    let mut out = format!("algebra: {algebra_path}\nbase: {}\n", rep.base);
    for i in 0..rep.base {
        let row: Vec<&str> = (0..rep.base).map(|j| s.name(rep.label(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::find_isomorphism;
    use crate::constructions::{lyndon, mackenzie, GammaSet};
    use crate::proper::{abstract_structure, full_re};
    use crate::structure::AtomStructure;

    fn re(n: usize) -> FiniteRelationAlgebra {
        FiniteRelationAlgebra::new(abstract_structure(&full_re(n).unwrap()).unwrap()).unwrap()
    }

    fn trivial() -> FiniteRelationAlgebra {
        FiniteRelationAlgebra::new(
            AtomStructure::new(vec!["1'".into()], 1, vec![0], vec![vec![1]]).unwrap(),
        )
        .unwrap()
    }

    /// The pair `(i,j)` of `Re(n)` labeled by its own atom `r{i}_{j}`.
    fn self_labeling(a: &FiniteRelationAlgebra, n: usize) -> RepresentationMap {
        let s = a.structure();
        RepresentationMap::from_fn(n, |i, j| s.index_of(&format!("r{i}_{j}")).unwrap()).unwrap()
    }

    #[test]
    fn self_representation_verifies() {
        let a = re(3);
        let rep = self_labeling(&a, 3);
        assert!(verify_representation(&a, &rep).passed);
        let p = representation_to_proper(&a, &rep).unwrap();
        assert_eq!(abstract_structure(&p).unwrap(), *a.structure());
    }

    #[test]
    fn mackenzie_diagram_has_monochromatic_triangle() {
        let a = FiniteRelationAlgebra::new(mackenzie()).unwrap();
        let s = a.structure();
        let at = |n: &str| s.index_of(n).unwrap();
        // w v x y z = 0 1 2 3 4
        let mut lab = vec![at("1'"); 25];
        let mut put = |i: usize, j: usize, l: &str| {
            lab[i * 5 + j] = at(l);
            lab[j * 5 + i] = s.converse_of(at(l));
        };
        put(0, 2, "a");
        put(0, 3, "a");
        put(2, 1, "a");
        put(3, 1, "a");
        put(0, 1, "a");
        put(0, 4, "b");
        put(4, 1, "b");
        put(2, 3, "b");
        put(4, 2, "b");
        put(4, 3, "b");
        let rep = RepresentationMap::new(5, lab).unwrap();
        let r = verify_representation(&a, &rep);
        assert!(!r.passed);
        match r.failure.unwrap() {
            RepFailure::Triangle { i, j, k, labels } => {
                assert_eq!(labels, ["b", "b", "b"].map(String::from));
                let mut pts = [i, j, k];
                pts.sort();
                assert_eq!(pts, [2, 3, 4]);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn search_small_cases() {
        let t = search(&trivial(), 3);
        assert_eq!(t.representation().unwrap().base_size(), 1);
        let a = re(2);
        let out = search(&a, 4);
        let rep = out.representation().unwrap();
        assert_eq!(rep.base_size(), 2);
        assert!(verify_representation(&a, rep).passed);
        let p = representation_to_proper(&a, rep).unwrap();
        assert!(find_isomorphism(&abstract_structure(&p).unwrap(), a.structure()).is_some());
    }

    fn search(a: &FiniteRelationAlgebra, max_base: usize) -> SearchOutcome {
        let cfg = SearchConfig {
            max_base,
            ..SearchConfig::default()
        };
        find_square_representation(a, &cfg).unwrap()
    }

    #[test]
    fn mackenzie_not_found_small() {
        let a = FiniteRelationAlgebra::new(mackenzie()).unwrap();
        match search(&a, 4) {
            SearchOutcome::NotFoundWithinBounds { sizes } => {
                assert!(sizes.iter().all(|s| s.exhausted));
                assert_eq!(sizes.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_simple_is_rejected() {
        let p = re(1).product(&re(1)).unwrap();
        assert_eq!(
            find_square_representation(&p, &SearchConfig::default()),
            Err(Error::NotSimple)
        );
    }

    #[test]
    fn parallel_matches_sequential() {
        let a =
            FiniteRelationAlgebra::new(lyndon(4, GammaSet::projective_line()).unwrap().structure)
                .unwrap();
        let seq = search(&a, 9);
        for ordering in [NodeOrdering::Lexicographic, NodeOrdering::FewestCandidates] {
            let cfg = SearchConfig {
                max_base: 9,
                jobs: 4,
                ordering,
                ..SearchConfig::default()
            };
            let par = find_square_representation(&a, &cfg).unwrap();
            let rep = par.representation().expect("E5 is representable");
            assert!(verify_representation(&a, rep).passed);
            if ordering == NodeOrdering::Lexicographic {
                assert_eq!(par.representation(), seq.representation());
            }
        }
    }

    #[test]
    fn rep_format_round_trip() {
        let a = re(2);
        let rep = self_labeling(&a, 2);
        let text = write_rep(&a, &rep, "re2.ra");
        let raw = parse_rep(&text).unwrap();
        assert_eq!(raw.algebra, "re2.ra");
        assert_eq!(raw.resolve(&a).unwrap(), rep);
        assert!(parse_rep("algebra: x\nbase: 2\nr0_0 r0_1\n").is_err());
        let bad = RawCertificate {
            rows: vec![
                vec!["zz".into(), "r0_1".into()],
                vec!["r1_0".into(), "r1_1".into()],
            ],
            ..raw
        };
        assert!(matches!(bad.resolve(&a), Err(Error::InvalidCertificate(_))));
    }
}
