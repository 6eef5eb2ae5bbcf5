//! Independent reference implementations used to cross-check the library.
//! Everything here works directly from raw atom tables with plain loops.

#![allow(dead_code)]

use relalg_core::constructions::{lyndon, mackenzie, GammaSet};
use relalg_core::eqlogic::{Equation, Term};
use relalg_core::proper::{abstract_structure, full_re, full_sb};
use relalg_core::relation::ConcreteRelation;
use relalg_core::AtomStructure;

/// A bare atom table: `comp[a][b]` is a bitmask of atoms.
#[derive(Debug, Clone)]
pub struct Table {
    pub names: Vec<String>,
    pub identity: u32,
    pub conv: Vec<usize>,
    pub comp: Vec<Vec<u32>>,
}

impl Table {
    pub fn of(s: &AtomStructure) -> Table {
        let m = s.atom_count();
        Table {
            names: s.names().to_vec(),
            identity: s.identity(),
            conv: (0..m).map(|a| s.converse_of(a)).collect(),
            comp: (0..m)
                .map(|a| (0..m).map(|b| s.comp(a, b)).collect())
                .collect(),
        }
    }

    pub fn build(&self) -> relalg_core::Result<AtomStructure> {
        AtomStructure::new(
            self.names.clone(),
            self.identity,
            self.conv.clone(),
            self.comp.clone(),
        )
    }

    pub fn m(&self) -> usize {
        self.names.len()
    }

    pub fn full(&self) -> u32 {
        (1u32 << self.m()) - 1
    }

    pub fn compose(&self, x: u32, y: u32) -> u32 {
        let mut out = 0;
        for a in 0..self.m() {
            if x >> a & 1 == 0 {
                continue;
            }
            for b in 0..self.m() {
                if y >> b & 1 == 1 {
                    out |= self.comp[a][b];
                }
            }
        }
        out
    }

    pub fn converse(&self, x: u32) -> u32 {
        let mut out = 0;
        for a in 0..self.m() {
            if x >> a & 1 == 1 {
                out |= 1 << self.conv[a];
            }
        }
        out
    }

    pub fn complement(&self, x: u32) -> u32 {
        !x & self.full()
    }

    /// Relabels atoms: atom `a` becomes atom `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Table {
        let m = self.m();
        let map = |x: u32| {
            (0..m)
                .filter(|&a| x >> a & 1 == 1)
                .fold(0u32, |acc, a| acc | 1 << perm[a])
        };
        let mut names = vec![String::new(); m];
        let mut conv = vec![0; m];
        let mut comp = vec![vec![0; m]; m];
        for a in 0..m {
            names[perm[a]] = self.names[a].clone();
            conv[perm[a]] = perm[self.conv[a]];
            for b in 0..m {
                comp[perm[a]][perm[b]] = map(self.comp[a][b]);
            }
        }
        Table {
            names,
            identity: map(self.identity),
            conv,
            comp,
        }
    }

    /// Element-level relation algebra axioms, checked over every element
    /// (every pair/triple). Returns the first failing law.
    pub fn element_axiom_failure(&self) -> Option<&'static str> {
        let els: Vec<u32> = (0..=self.full()).collect();
        let id = self.identity;
        for &x in &els {
            if self.compose(x, id) != x || self.compose(id, x) != x {
                return Some("identity");
            }
            if self.converse(self.converse(x)) != x {
                return Some("converse involution");
            }
        }
        for &x in &els {
            for &y in &els {
                if self.converse(self.compose(x, y))
                    != self.compose(self.converse(y), self.converse(x))
                {
                    return Some("converse of composition");
                }
                let lhs = self.compose(self.converse(x), self.complement(self.compose(x, y)));
                if lhs & y != 0 {
                    return Some("Schroeder");
                }
            }
        }
        for &x in &els {
            for &y in &els {
                let xy = self.compose(x, y);
                for &z in &els {
                    if self.compose(xy, z) != self.compose(x, self.compose(y, z)) {
                        return Some("associativity");
                    }
                }
            }
        }
        None
    }
}

pub fn eval(t: &Term, a: &Table, env: &[(String, u32)]) -> u32 {
    match t {
        Term::Var(v) => env.iter().find(|(n, _)| n == v).expect("bound").1,
        Term::Zero => 0,
        Term::One => a.full(),
        Term::Ident => a.identity,
        Term::Join(x, y) => eval(x, a, env) | eval(y, a, env),
        Term::Meet(x, y) => eval(x, a, env) & eval(y, a, env),
        Term::Compl(x) => a.complement(eval(x, a, env)),
        Term::Comp(x, y) => a.compose(eval(x, a, env), eval(y, a, env)),
        Term::Conv(x) => a.converse(eval(x, a, env)),
    }
}

/// First counterexample with variables in `eq.vars` order, last fastest.
pub fn first_counterexample(eq: &Equation, a: &Table) -> Option<Vec<u32>> {
    fn go(eq: &Equation, a: &Table, env: &mut Vec<(String, u32)>) -> Option<Vec<u32>> {
        if env.len() == eq.vars.len() {
            return (eval(&eq.lhs, a, env) != eval(&eq.rhs, a, env))
                .then(|| env.iter().map(|p| p.1).collect());
        }
        let name = eq.vars[env.len()].clone();
        for x in 0..=a.full() {
            env.push((name.clone(), x));
            if let Some(w) = go(eq, a, env) {
                return Some(w);
            }
            env.pop();
        }
        None
    }
    go(eq, a, &mut Vec::new())
}

/// Whether `labels` (row-major `n×n` atoms) is a square representation.
pub fn is_representation(a: &Table, n: usize, labels: &[usize]) -> bool {
    let l = |i: usize, j: usize| labels[i * n + j];
    let mut used = 0u32;
    for i in 0..n {
        for j in 0..n {
            let x = l(i, j);
            used |= 1 << x;
            if (i == j) != (a.identity >> x & 1 == 1) || a.conv[x] != l(j, i) {
                return false;
            }
            for k in 0..n {
                if a.comp[x][l(j, k)] >> l(i, k) & 1 == 0 {
                    return false;
                }
            }
        }
    }
    if used != a.full() {
        return false;
    }
    for i in 0..n {
        for k in 0..n {
            for x in 0..a.m() {
                for y in 0..a.m() {
                    if a.comp[x][y] >> l(i, k) & 1 == 1
                        && !(0..n).any(|j| l(i, j) == x && l(j, k) == y)
                    {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Smallest base `≤ max` admitting a square representation. Tries every
/// labeling with identity atoms on the diagonal, diversity atoms above it,
/// and converses below.
pub fn brute_force_min_base(a: &Table, max: usize) -> Option<usize> {
    let ids: Vec<usize> = (0..a.m()).filter(|&x| a.identity >> x & 1 == 1).collect();
    let divs: Vec<usize> = (0..a.m()).filter(|&x| a.identity >> x & 1 == 0).collect();
    (1..=max).find(|&n| {
        let upper: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        if !upper.is_empty() && divs.is_empty() {
            return false;
        }
        let total =
            (ids.len() as u64).pow(n as u32) * (divs.len().max(1) as u64).pow(upper.len() as u32);
        (0..total).any(|mut code| {
            let mut labels = vec![0; n * n];
            for i in 0..n {
                labels[i * n + i] = ids[(code % ids.len() as u64) as usize];
                code /= ids.len() as u64;
            }
            for &(i, j) in &upper {
                let x = divs[(code % divs.len() as u64) as usize];
                code /= divs.len() as u64;
                labels[i * n + j] = x;
                labels[j * n + i] = a.conv[x];
            }
            is_representation(a, n, &labels)
        })
    })
}

pub fn cyclic3() -> AtomStructure {
    AtomStructure::from_named_table(
        &["1'", "a", "a~"],
        &["1'"],
        &[("1'", "1'"), ("a", "a~"), ("a~", "a")],
        &[
            ("1'", "1'", &["1'"]),
            ("1'", "a", &["a"]),
            ("1'", "a~", &["a~"]),
            ("a", "1'", &["a"]),
            ("a~", "1'", &["a~"]),
            ("a", "a", &["a~"]),
            ("a", "a~", &["1'"]),
            ("a~", "a", &["1'"]),
            ("a~", "a~", &["a"]),
        ],
    )
    .unwrap()
}

pub fn sb(classes: &[usize]) -> AtomStructure {
    abstract_structure(&full_sb(&ConcreteRelation::from_classes(classes).unwrap()).unwrap())
        .unwrap()
}

pub fn re(n: usize) -> AtomStructure {
    abstract_structure(&full_re(n).unwrap()).unwrap()
}

/// Every valid Lyndon algebra with `n` diversity atoms.
pub fn lyndon_family(n: usize) -> Vec<AtomStructure> {
    let mut out = Vec::new();
    for bits in 0u8..8 {
        let members: Vec<u8> = (1..=3).filter(|k| bits >> (k - 1) & 1 == 1).collect();
        let gamma = GammaSet::new(&members).unwrap();
        if let Ok(l) = lyndon(n, gamma) {
            if l.structure.violation().is_none() {
                out.push(l.structure);
            }
        }
    }
    out
}

/// Valid algebras with at most three atoms.
pub fn small_algebras() -> Vec<(String, AtomStructure)> {
    let mut out = vec![
        ("Re(1)".to_string(), re(1)),
        ("Sb(1,1)".to_string(), sb(&[1, 1])),
        ("Sb(1,1,1)".to_string(), sb(&[1, 1, 1])),
        ("cyclic3".to_string(), cyclic3()),
    ];
    for (k, s) in lyndon_family(2).into_iter().enumerate() {
        out.push((format!("lyndon2#{k}"), s));
    }
    out
}

/// Valid simple algebras for mutation and relabeling.
pub fn seed_algebras() -> Vec<(String, AtomStructure)> {
    vec![
        ("mackenzie".to_string(), mackenzie()),
        ("cyclic3".to_string(), cyclic3()),
        ("Re(2)".to_string(), re(2)),
        (
            "lyndon4".to_string(),
            lyndon(4, GammaSet::projective_line()).unwrap().structure,
        ),
        (
            "lyndon5".to_string(),
            lyndon(5, GammaSet::projective_line()).unwrap().structure,
        ),
        ("Sb(1,2)".to_string(), sb(&[1, 2])),
    ]
}

/// All set partitions of `0..n`, as block labels per element.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            go(i + 1, n, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// Number of congruences of the algebra, by checking every partition of
/// the element set against every operation.
pub fn count_congruences(a: &Table) -> usize {
    let n = (a.full() + 1) as usize;
    set_partitions(n)
        .into_iter()
        .filter(|p| {
            let same = |x: u32, y: u32| p[x as usize] == p[y as usize];
            for x in 0..n as u32 {
                for y in 0..n as u32 {
                    if !same(x, y) {
                        continue;
                    }
                    if !same(a.converse(x), a.converse(y))
                        || !same(a.complement(x), a.complement(y))
                    {
                        return false;
                    }
                    for z in 0..n as u32 {
                        if !same(x | z, y | z)
                            || !same(a.compose(x, z), a.compose(y, z))
                            || !same(a.compose(z, x), a.compose(z, y))
                        {
                            return false;
                        }
                    }
                }
            }
            true
        })
        .count()
}
