//! Equations over the relation algebra signature: parsing, evaluation,
//! validity in finite algebras, generated subalgebras, and closure of
//! validity under subalgebras, quotients and squares.
//!
//! Concrete syntax, tightest first: postfix `~` (converse), prefix `-`
//! (complement), `;`, `.` (meet), `+`. Constants are `0`, `1` and `1'`.
//!
//! ```text
//! x;(y+z) = x;y + x;z
//! x . (y;z) = x . (y;(z . (y~;x)))
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteRelationAlgebra;
use crate::element::{Element, Mask};
use crate::error::{Error, Result};
use crate::ideal::{quotient, RelationalIdeal};
use crate::subalgebra::Subalgebra;

pub const MAX_DEPTH: usize = 32;
pub const DEFAULT_CAP: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Zero,
    One,
    Ident,
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Compl(Box<Term>),
    Comp(Box<Term>, Box<Term>),
    Conv(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero | Term::One | Term::Ident => 1,
            Term::Compl(t) | Term::Conv(t) => 1 + t.depth(),
            Term::Join(a, b) | Term::Meet(a, b) | Term::Comp(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero | Term::One | Term::Ident => {}
            Term::Compl(t) | Term::Conv(t) => t.vars(out),
            Term::Join(a, b) | Term::Meet(a, b) | Term::Comp(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    fn level(&self) -> u8 {
        match self {
            Term::Join(..) => 0,
            Term::Meet(..) => 1,
            Term::Comp(..) => 2,
            Term::Compl(_) => 3,
            Term::Conv(_) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Ident => write!(f, "1'"),
            Term::Join(a, b) => {
                a.write_at(f, 0)?;
                write!(f, " + ")?;
                b.write_at(f, 1)
            }
            Term::Meet(a, b) => {
                a.write_at(f, 1)?;
                write!(f, " . ")?;
                b.write_at(f, 2)
            }
            Term::Comp(a, b) => {
                a.write_at(f, 2)?;
                write!(f, ";")?;
                b.write_at(f, 3)
            }
            Term::Compl(t) => {
                write!(f, "-")?;
                t.write_at(f, 3)
            }
            Term::Conv(t) => {
                t.write_at(f, 4)?;
                write!(f, "~")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    /// Variables of both sides, sorted.
    pub vars: Vec<String>,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        let mut set = BTreeSet::new();
        lhs.vars(&mut set);
        rhs.vars(&mut set);
        Equation {
            lhs,
            rhs,
            vars: set.into_iter().collect(),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

impl std::str::FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_equation(s)
    }
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
    nesting: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn checked(&self, t: Term) -> Result<Term> {
        if t.depth() > MAX_DEPTH {
            return self.err(format!("term deeper than {MAX_DEPTH}"));
        }
        Ok(t)
    }

    fn binary(
        &mut self,
        op: u8,
        next: fn(&mut Self) -> Result<Term>,
        make: fn(Box<Term>, Box<Term>) -> Term,
    ) -> Result<Term> {
        let mut t = next(self)?;
        while self.eat(op) {
            let rhs = next(self)?;
            t = self.checked(make(Box::new(t), Box::new(rhs)))?;
        }
        Ok(t)
    }

    fn sum(&mut self) -> Result<Term> {
        self.binary(b'+', Self::meet, Term::Join)
    }

    fn meet(&mut self) -> Result<Term> {
        self.binary(b'.', Self::comp, Term::Meet)
    }

    fn comp(&mut self) -> Result<Term> {
        self.binary(b';', Self::unary, Term::Comp)
    }

    fn unary(&mut self) -> Result<Term> {
        if self.eat(b'-') {
            let t = self.unary()?;
            return self.checked(Term::Compl(Box::new(t)));
        }
        let mut t = self.primary()?;
        while self.eat(b'~') {
            t = self.checked(Term::Conv(Box::new(t)))?;
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek() {
            Some(b'(') => {
                self.nesting += 1;
                if self.nesting > MAX_DEPTH {
                    return self.err(format!("term deeper than {MAX_DEPTH}"));
                }
                self.pos += 1;
                let t = self.sum()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                self.nesting -= 1;
                Ok(t)
            }
            Some(b'0') => {
                self.pos += 1;
                Ok(Term::Zero)
            }
            Some(b'1') => {
                self.pos += 1;
                if self.src.get(self.pos) == Some(&b'\'') {
                    self.pos += 1;
                    Ok(Term::Ident)
                } else {
                    Ok(Term::One)
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Ok(Term::Var(name.to_string()))
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        nesting: 0,
    };
    let t = p.sum()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(t)
}

pub fn parse_equation(text: &str) -> Result<Equation> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        nesting: 0,
    };
    let lhs = p.sum()?;
    if !p.eat(b'=') {
        return p.err("expected `=`");
    }
    let rhs = p.sum()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(Equation::new(lhs, rhs))
}

/// Values of variables, all in one algebra.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment(pub BTreeMap<String, Element>);

impl Assignment {
    pub fn get(&self, name: &str) -> Option<Element> {
        self.0.get(name).copied()
    }

    pub fn render(&self, a: &FiniteRelationAlgebra) -> Vec<(String, String)> {
        self.0
            .iter()
            .map(|(k, v)| (k.clone(), a.structure().render_report(v.bits())))
            .collect()
    }
}

fn eval_mask(
    t: &Term,
    a: &FiniteRelationAlgebra,
    lookup: &dyn Fn(&str) -> Option<Mask>,
) -> Result<Mask> {
    Ok(match t {
        Term::Var(v) => lookup(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?,
        Term::Zero => 0,
        Term::One => a.full(),
        Term::Ident => a.identity_mask(),
        Term::Join(x, y) => eval_mask(x, a, lookup)? | eval_mask(y, a, lookup)?,
        Term::Meet(x, y) => eval_mask(x, a, lookup)? & eval_mask(y, a, lookup)?,
        Term::Compl(x) => a.complement_mask(eval_mask(x, a, lookup)?),
        Term::Comp(x, y) => a.compose_mask(eval_mask(x, a, lookup)?, eval_mask(y, a, lookup)?),
        Term::Conv(x) => a.converse_mask(eval_mask(x, a, lookup)?),
    })
}

pub fn eval(t: &Term, a: &FiniteRelationAlgebra, asg: &Assignment) -> Result<Element> {
    for e in asg.0.values() {
        a.check_owner(*e)?;
    }
    let lookup = |v: &str| asg.get(v).map(Element::bits);
    Ok(a.wrap(eval_mask(t, a, &lookup)?))
}

/// Variables are numbered by their position in `vars`.
#[derive(Debug, Clone)]
enum Compiled {
    Var(usize),
    Const(Mask),
    Join(Box<Compiled>, Box<Compiled>),
    Meet(Box<Compiled>, Box<Compiled>),
    Compl(Box<Compiled>),
    Comp(Box<Compiled>, Box<Compiled>),
    Conv(Box<Compiled>),
}

fn compile(t: &Term, a: &FiniteRelationAlgebra, vars: &[String]) -> Result<Compiled> {
    let b = |x: &Term| compile(x, a, vars).map(Box::new);
    Ok(match t {
        Term::Var(v) => Compiled::Var(
            vars.iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?,
        ),
        Term::Zero => Compiled::Const(0),
        Term::One => Compiled::Const(a.full()),
        Term::Ident => Compiled::Const(a.identity_mask()),
        Term::Join(x, y) => Compiled::Join(b(x)?, b(y)?),
        Term::Meet(x, y) => Compiled::Meet(b(x)?, b(y)?),
        Term::Compl(x) => Compiled::Compl(b(x)?),
        Term::Comp(x, y) => Compiled::Comp(b(x)?, b(y)?),
        Term::Conv(x) => Compiled::Conv(b(x)?),
    })
}

impl Compiled {
    fn run(&self, a: &FiniteRelationAlgebra, env: &[Mask]) -> Mask {
        match self {
            Compiled::Var(i) => env[*i],
            Compiled::Const(m) => *m,
            Compiled::Join(x, y) => x.run(a, env) | y.run(a, env),
            Compiled::Meet(x, y) => x.run(a, env) & y.run(a, env),
            Compiled::Compl(x) => a.complement_mask(x.run(a, env)),
            Compiled::Comp(x, y) => a.compose_mask(x.run(a, env), y.run(a, env)),
            Compiled::Conv(x) => a.converse_mask(x.run(a, env)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Counterexample(Assignment),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// `(2^atoms)^vars`, saturating.
pub fn assignment_count(a: &FiniteRelationAlgebra, vars: usize) -> u128 {
    let bits = a.atom_count() * vars;
    if bits >= 128 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

struct Checker<'a> {
    a: &'a FiniteRelationAlgebra,
    lhs: Compiled,
    rhs: Compiled,
    vars: Vec<String>,
}

impl<'a> Checker<'a> {
    fn new(eq: &Equation, a: &'a FiniteRelationAlgebra) -> Result<Self> {
        Ok(Checker {
            a,
            lhs: compile(&eq.lhs, a, &eq.vars)?,
            rhs: compile(&eq.rhs, a, &eq.vars)?,
            vars: eq.vars.clone(),
        })
    }

    fn fails(&self, env: &[Mask]) -> bool {
        self.lhs.run(self.a, env) != self.rhs.run(self.a, env)
    }

    /// Assignment number `k` in lexicographic order, last variable fastest.
    fn env_of(&self, k: u64) -> Vec<Mask> {
        let m = self.a.atom_count();
        let v = self.vars.len();
        (0..v)
            .map(|i| ((k >> (m * (v - 1 - i))) & ((1u64 << m) - 1)) as Mask)
            .collect()
    }

    fn assignment(&self, env: &[Mask]) -> Assignment {
        Assignment(
            self.vars
                .iter()
                .zip(env)
                .map(|(v, &x)| (v.clone(), self.a.wrap(x)))
                .collect(),
        )
    }
}

/// Checks every assignment; the counterexample returned is the first in
/// lexicographic order of the value tuple (variables sorted by name).
pub fn holds(eq: &Equation, a: &FiniteRelationAlgebra, cap: u128) -> Result<Verdict> {
    let required = assignment_count(a, eq.vars.len());
    if required > cap {
        return Err(Error::SearchSpaceTooLarge { required, cap });
    }
    let c = Checker::new(eq, a)?;
    let total = required as u64;
    let first = (0..total)
        .into_par_iter()
        .find_first(|&k| c.fails(&c.env_of(k)));
    Ok(match first {
        Some(k) => Verdict::Counterexample(c.assignment(&c.env_of(k))),
        None => Verdict::Valid,
    })
}

/// Checks `samples` seeded random assignments.
pub fn holds_sampled(
    eq: &Equation,
    a: &FiniteRelationAlgebra,
    samples: usize,
    seed: u64,
) -> Result<Verdict> {
    let c = Checker::new(eq, a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let env: Vec<Mask> = (0..eq.vars.len())
            .map(|_| rng.gen_range(0..=a.full()))
            .collect();
        if c.fails(&env) {
            return Ok(Verdict::Counterexample(c.assignment(&env)));
        }
    }
    Ok(Verdict::Valid)
}

/// Splits the blocks by `x`.
fn refine(blocks: &mut Vec<Mask>, x: Mask) -> bool {
    let mut changed = false;
    let mut out = Vec::with_capacity(blocks.len() + 1);
    for &b in blocks.iter() {
        let (inside, outside) = (b & x, b & !x);
        if inside != 0 && outside != 0 {
            changed = true;
            out.push(inside);
            out.push(outside);
        } else {
            out.push(b);
        }
    }
    *blocks = out;
    changed
}

/// The subalgebra generated by `generators` (and the constants).
pub fn sg(a: &FiniteRelationAlgebra, generators: &[Element]) -> Result<Subalgebra> {
    let mut masks = Vec::with_capacity(generators.len());
    for &g in generators {
        a.check_owner(g)?;
        masks.push(g.bits());
    }
    Ok(sg_masks(a, &masks))
}

pub(crate) fn sg_masks(a: &FiniteRelationAlgebra, generators: &[Mask]) -> Subalgebra {
    let mut blocks = vec![a.full()];
    refine(&mut blocks, a.identity_mask());
    for &g in generators {
        refine(&mut blocks, g);
    }
    loop {
        let mut changed = false;
        let snapshot = blocks.clone();
        for &x in &snapshot {
            changed |= refine(&mut blocks, a.converse_mask(x));
            for &y in &snapshot {
                changed |= refine(&mut blocks, a.compose_mask(x, y));
            }
        }
        if !changed {
            break;
        }
    }
    Subalgebra::from_blocks(a, &blocks).expect("refinement fixpoint is closed")
}

pub const MAX_ENUMERATION_ATOMS: usize = 6;

fn enumeration_limit(a: &FiniteRelationAlgebra) -> Result<()> {
    if a.atom_count() > MAX_ENUMERATION_ATOMS {
        return Err(Error::SizeLimit(format!(
            "enumeration needs at most {MAX_ENUMERATION_ATOMS} atoms, got {}",
            a.atom_count()
        )));
    }
    Ok(())
}

/// Every subalgebra, found by adding one element at a time to known
/// subalgebras and closing. Ordered by atom count, then blocks.
pub fn enumerate_subalgebras(a: &FiniteRelationAlgebra) -> Result<Vec<Subalgebra>> {
    enumeration_limit(a)?;
    let start = sg_masks(a, &[]);
    let mut seen: HashSet<Vec<Mask>> = HashSet::from([start.blocks().to_vec()]);
    let mut queue = VecDeque::from([start.clone()]);
    let mut out = vec![start];
    while let Some(s) = queue.pop_front() {
        for x in 0..=a.full() {
            if s.contains(x) {
                continue;
            }
            let mut gens = s.blocks().to_vec();
            gens.push(x);
            let t = sg_masks(a, &gens);
            if seen.insert(t.blocks().to_vec()) {
                queue.push_back(t.clone());
                out.push(t);
            }
        }
    }
    out.sort_by(|x, y| (x.atom_count(), x.blocks()).cmp(&(y.atom_count(), y.blocks())));
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct IdealQuotient {
    pub ideal: RelationalIdeal,
    /// `None` for the improper ideal, whose quotient is degenerate.
    pub quotient: Option<FiniteRelationAlgebra>,
}

/// One quotient per relational ideal `↓c` (`1;c;1 ≤ c`), by increasing `c`.
pub fn enumerate_ideal_quotients(a: &FiniteRelationAlgebra) -> Result<Vec<IdealQuotient>> {
    enumeration_limit(a)?;
    let mut out = Vec::new();
    for c in 0..=a.full() {
        if a.closure_mask(c) & !c != 0 {
            continue;
        }
        let ideal = RelationalIdeal::principal(a, a.wrap(c))?;
        let quotient = if ideal.is_proper(a) {
            Some(quotient(a, &ideal)?.algebra)
        } else {
            None
        };
        out.push(IdealQuotient { ideal, quotient });
    }
    Ok(out)
}

/// Ten laws used for closure checks; the last two are not valid in every
/// algebra.
pub const LAW_SUITE: [&str; 10] = [
    "x;(y+z) = x;y + x;z",
    "x.(y;z) = x.(y;(z.(y~;x)))",
    "(x;y);z = x;(y;z)",
    "(x;y)~ = y~;x~",
    "x~;-(x;y) + -y = -y",
    "(x+y)~ = x~ + y~",
    "x;1' = x",
    "(1;x;1)~ = 1;x;1",
    "x;y = y;x",
    "x;x = x",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BirkhoffOptions {
    pub cap: u128,
    /// Random assignments tried in `A×A` when exhaustive search exceeds `cap`.
    pub product_samples: usize,
    pub seed: u64,
}

impl Default for BirkhoffOptions {
    fn default() -> Self {
        BirkhoffOptions {
            cap: DEFAULT_CAP,
            product_samples: 20_000,
            seed: crate::axioms::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BirkhoffEntry {
    pub equation: String,
    pub valid_in_algebra: bool,
    /// The equation fails in the algebra itself, so there is nothing to check.
    pub skipped: bool,
    pub subalgebras_ok: bool,
    pub quotients_ok: bool,
    pub product_ok: bool,
    /// `exhaustive` or `sampled`.
    pub product_mode: String,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BirkhoffReport {
    pub subalgebras: usize,
    pub quotients: usize,
    pub product_atoms: usize,
    pub entries: Vec<BirkhoffEntry>,
    pub passed: bool,
}

/// For each equation valid in `A`, checks it in every subalgebra, every
/// proper ideal quotient, and `A×A`.
pub fn check_birkhoff_closure(
    eqs: &[Equation],
    a: &FiniteRelationAlgebra,
    opts: &BirkhoffOptions,
) -> Result<BirkhoffReport> {
    let subs: Vec<FiniteRelationAlgebra> = enumerate_subalgebras(a)?
        .iter()
        .map(|s| FiniteRelationAlgebra::unchecked(s.to_structure(a)))
        .collect();
    let quots: Vec<FiniteRelationAlgebra> = enumerate_ideal_quotients(a)?
        .into_iter()
        .filter_map(|q| q.quotient)
        .collect();
    let product = a.product(a)?;
    let mut entries = Vec::new();
    for eq in eqs {
        let valid = holds(eq, a, opts.cap)?.is_valid();
        let mut entry = BirkhoffEntry {
            equation: eq.to_string(),
            valid_in_algebra: valid,
            skipped: !valid,
            subalgebras_ok: true,
            quotients_ok: true,
            product_ok: true,
            product_mode: "exhaustive".into(),
            failure: None,
        };
        if valid {
            for (k, s) in subs.iter().enumerate() {
                if let Verdict::Counterexample(c) = holds(eq, s, opts.cap)? {
                    entry.subalgebras_ok = false;
                    entry.failure = Some(format!("subalgebra {k}: {:?}", c.render(s)));
                    break;
                }
            }
            for (k, q) in quots.iter().enumerate() {
                if let Verdict::Counterexample(c) = holds(eq, q, opts.cap)? {
                    entry.quotients_ok = false;
                    entry
                        .failure
                        .get_or_insert_with(|| format!("quotient {k}: {:?}", c.render(q)));
                    break;
                }
            }
            let verdict = if assignment_count(&product, eq.vars.len()) <= opts.cap {
                holds(eq, &product, opts.cap)?
            } else {
                entry.product_mode = "sampled".into();
                holds_sampled(eq, &product, opts.product_samples, opts.seed)?
            };
            if let Verdict::Counterexample(c) = verdict {
                entry.product_ok = false;
                entry
                    .failure
                    .get_or_insert_with(|| format!("A×A: {:?}", c.render(&product)));
            }
        }
        entries.push(entry);
    }
    let passed = entries
        .iter()
        .all(|e| e.subalgebras_ok && e.quotients_ok && e.product_ok);
    Ok(BirkhoffReport {
        subalgebras: subs.len(),
        quotients: quots.len(),
        product_atoms: product.atom_count(),
        entries,
        passed,
    })
}
