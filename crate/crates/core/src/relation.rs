//! Binary relations over small finite bases `0..n`, stored as row bit masks.

use std::fmt;

use crate::element::Atoms;
use crate::error::{Error, Result};

pub const MAX_BASE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConcreteRelation {
    n: usize,
    rows: Vec<u32>,
}

impl ConcreteRelation {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_BASE {
            return Err(Error::SizeLimit(format!(
                "base size {n} outside 1..={MAX_BASE}"
            )));
        }
        Ok(ConcreteRelation {
            n,
            rows: vec![0; n],
        })
    }

    pub fn full(n: usize) -> Result<Self> {
        let mut r = Self::empty(n)?;
        let row = (1u32 << n) - 1;
        r.rows.iter_mut().for_each(|x| *x = row);
        Ok(r)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut r = Self::empty(n)?;
        for i in 0..n {
            r.rows[i] = 1 << i;
        }
        Ok(r)
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut r = Self::empty(n)?;
        for (i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::SizeLimit(format!("pair ({i},{j}) outside base {n}")));
            }
            r.rows[i] |= 1 << j;
        }
        Ok(r)
    }

    /// `⋃ U×U` over consecutive blocks of the given sizes.
    pub fn from_classes(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::BadParameters("class sizes must be positive".into()));
        }
        let n = sizes.iter().sum();
        let mut r = Self::empty(n)?;
        let mut start = 0;
        for &k in sizes {
            let block = ((1u32 << k) - 1) << start;
            for i in start..start + k {
                r.rows[i] = block;
            }
            start += k;
        }
        Ok(r)
    }

    pub fn base_size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.rows[i] |= 1 << j;
    }

    pub fn row(&self, i: usize) -> u32 {
        self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| Atoms(r).map(move |j| (i, j)))
    }

    fn same_base(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::BaseMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// `R|S = {(x,z) : ∃y xRy ∧ ySz}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        let rows = self
            .rows
            .iter()
            .map(|&r| Atoms(r).fold(0, |acc, y| acc | other.rows[y]))
            .collect();
        Ok(ConcreteRelation { n: self.n, rows })
    }

    pub fn converse(&self) -> Self {
        let mut rows = vec![0; self.n];
        for (i, j) in self.pairs() {
            rows[j] |= 1 << i;
        }
        ConcreteRelation { n: self.n, rows }
    }

    fn zip(&self, other: &Self, f: impl Fn(u32, u32) -> u32) -> Result<Self> {
        self.same_base(other)?;
        Ok(ConcreteRelation {
            n: self.n,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.n == other.n && self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    /// `R = R|R⁻¹`, which holds exactly when `R` is symmetric, transitive and
    /// reflexive on its field.
    pub fn is_equivalence(&self) -> bool {
        self.compose(&self.converse())
            .map(|c| &c == self)
            .unwrap_or(false)
    }

    /// Equivalence classes of the field, ordered by least member.
    pub fn classes(&self) -> Result<Vec<Vec<usize>>> {
        if !self.is_equivalence() {
            return Err(Error::NotEquivalence);
        }
        let mut seen = 0u32;
        let mut out = Vec::new();
        for i in 0..self.n {
            if self.rows[i] & 1 << i != 0 && seen & 1 << i == 0 {
                seen |= self.rows[i];
                out.push(Atoms(self.rows[i]).collect());
            }
        }
        Ok(out)
    }

    /// Image of the relation under an injective map of base points into a
    /// base of size `n`.
    pub fn relabel(&self, map: &[usize], n: usize) -> Result<Self> {
        Self::from_pairs(n, self.pairs().map(|(i, j)| (map[i], map[j])))
    }

    /// Parses `n=<base>; pairs=(i,j)(k,l)...` or `classes=[2,3]`.
    pub fn parse_literal(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            pos: 0,
            msg: msg.to_string(),
        };
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("classes=") {
            return Self::from_classes(&parse_class_list(rest)?);
        }
        let (n_part, pairs_part) = text
            .split_once(';')
            .ok_or_else(|| bad("expected `n=<base>; pairs=...`"))?;
        let n: usize = n_part
            .trim()
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| bad("expected `n=<base>`"))?;
        let body = pairs_part
            .trim()
            .strip_prefix("pairs=")
            .ok_or_else(|| bad("expected `pairs=`"))?;
        let mut pairs = Vec::new();
        for chunk in body.split(')') {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                continue;
            }
            let inner = chunk
                .strip_prefix('(')
                .ok_or_else(|| bad("pairs must look like (i,j)"))?;
            let (i, j) = inner
                .split_once(',')
                .ok_or_else(|| bad("pairs must look like (i,j)"))?;
            let i = i.trim().parse().map_err(|_| bad("bad pair index"))?;
            let j = j.trim().parse().map_err(|_| bad("bad pair index"))?;
            pairs.push((i, j));
        }
        Self::from_pairs(n, pairs)
    }
}

/// Parses `[2,3]`, `2,3` or `2 3` into class sizes.
pub fn parse_class_list(text: &str) -> Result<Vec<usize>> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| Error::Parse {
                pos: 0,
                msg: format!("bad class size `{s}`"),
            })
        })
        .collect()
}

impl fmt::Display for ConcreteRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}; pairs=", self.n)?;
        for (i, j) in self.pairs() {
            write!(f, "({i},{j})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn swap_composed_with_itself_is_identity() {
        let swap = ConcreteRelation::from_pairs(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(
            swap.compose(&swap).unwrap(),
            ConcreteRelation::identity(2).unwrap()
        );
    }

    #[test]
    fn equivalence_examples() {
        assert!(ConcreteRelation::identity(3).unwrap().is_equivalence());
        assert!(!ConcreteRelation::from_pairs(2, [(0, 1)])
            .unwrap()
            .is_equivalence());
        assert!(ConcreteRelation::full(4).unwrap().is_equivalence());
        let e = ConcreteRelation::from_classes(&[2, 3]).unwrap();
        assert!(e.is_equivalence());
        assert_eq!(e.len(), 13);
        assert_eq!(e.classes().unwrap(), vec![vec![0, 1], vec![2, 3, 4]]);
        // reflexive only on its field
        let partial = ConcreteRelation::from_pairs(3, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert!(partial.is_equivalence());
        assert_eq!(partial.classes().unwrap(), vec![vec![0, 1]]);
    }

    #[test]
    fn base_mismatch_and_limits() {
        let a = ConcreteRelation::empty(2).unwrap();
        let b = ConcreteRelation::empty(3).unwrap();
        assert_eq!(a.compose(&b), Err(Error::BaseMismatch(2, 3)));
        assert!(ConcreteRelation::empty(17).is_err());
        assert!(ConcreteRelation::from_pairs(2, [(2, 0)]).is_err());
    }

    #[test]
    fn literal_round_trip() {
        let r = ConcreteRelation::parse_literal("n=3; pairs=(0,1)(2,2)").unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(ConcreteRelation::parse_literal(&r.to_string()).unwrap(), r);
        let e = ConcreteRelation::parse_literal("classes=[2,3]").unwrap();
        assert_eq!(e, ConcreteRelation::from_classes(&[2, 3]).unwrap());
        assert!(ConcreteRelation::parse_literal("n=3 pairs").is_err());
        assert_eq!(parse_class_list("2 2,3").unwrap(), vec![2, 2, 3]);
    }

    fn rel4() -> impl Strategy<Value = ConcreteRelation> {
        any::<u16>().prop_map(|bits| {
            ConcreteRelation::from_pairs(
                4,
                (0..16)
                    .filter(|k| bits >> k & 1 == 1)
                    .map(|k| (k / 4, k % 4)),
            )
            .unwrap()
        })
    }

    /// Brute-force composition straight from the definition.
    fn compose_by_definition(r: &ConcreteRelation, s: &ConcreteRelation) -> ConcreteRelation {
        let n = r.base_size();
        let mut out = ConcreteRelation::empty(n).unwrap();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if r.contains(x, y) && s.contains(y, z) {
                        out.insert(x, z);
                    }
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn composition_matches_definition(r in rel4(), s in rel4()) {
            prop_assert_eq!(r.compose(&s).unwrap(), compose_by_definition(&r, &s));
        }

        #[test]
        fn composition_distributes_over_union(r in rel4(), s in rel4(), t in rel4()) {
            let lhs = r.compose(&s.union(&t).unwrap()).unwrap();
            let rhs = r.compose(&s).unwrap().union(&r.compose(&t).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn identity_is_a_unit(r in rel4()) {
            let id = ConcreteRelation::identity(4).unwrap();
            prop_assert_eq!(id.compose(&r).unwrap(), r.clone());
            prop_assert_eq!(r.converse().converse(), r);
        }
    }
}
