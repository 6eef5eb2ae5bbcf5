use std::fmt;
use std::str::FromStr;

use crate::element::Mask;
use crate::error::{Error, Result};
use crate::structure::AtomStructure;

/// MacKenzie's four-atom algebra `1', a, a˘, b`, the smallest relation
/// algebra with no representation.
pub fn mackenzie() -> AtomStructure {
    const ALL: &[&str] = &["1'", "a", "a~", "b"];
    AtomStructure::from_named_table(
        ALL,
        &["1'"],
        &[("1'", "1'"), ("a", "a~"), ("a~", "a"), ("b", "b")],
        &[
            ("1'", "1'", &["1'"]),
            ("1'", "a", &["a"]),
            ("1'", "a~", &["a~"]),
            ("1'", "b", &["b"]),
            ("a", "1'", &["a"]),
            ("a~", "1'", &["a~"]),
            ("b", "1'", &["b"]),
            ("a", "a", &["a"]),
            ("a", "a~", ALL),
            ("a", "b", &["a", "b"]),
            ("a~", "a", ALL),
            ("a~", "a~", &["a~"]),
            ("a~", "b", &["a~", "b"]),
            ("b", "a", &["a", "b"]),
            ("b", "a~", &["a~", "b"]),
            ("b", "b", &["1'", "a", "a~"]),
        ],
    )
    .expect("static table is well formed")
}

/// A subset of `{1, 2, 3}` selecting which coincidence patterns among
/// diversity atoms are allowed in a composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GammaSet(u8);

impl GammaSet {
    pub fn new(members: &[u8]) -> Result<Self> {
        let mut bits = 0;
        for &k in members {
            if !(1..=3).contains(&k) {
                return Err(Error::BadParameters(format!(
                    "gamma member {k} not in {{1,2,3}}"
                )));
            }
            bits |= 1 << k;
        }
        Ok(GammaSet(bits))
    }

    /// `{1, 3}`: the projective-line pattern.
    pub fn projective_line() -> Self {
        GammaSet(0b1010)
    }

    pub fn contains(self, k: usize) -> bool {
        k <= 3 && self.0 >> k & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl FromStr for GammaSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        let members = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.parse::<u8>()
                    .map_err(|_| Error::BadParameters(format!("bad gamma member `{p}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        GammaSet::new(&members)
    }
}

impl fmt::Display for GammaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (1..=3)
            .filter(|&k| self.contains(k))
            .map(|k| k.to_string())
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone)]
pub struct Lyndon {
    pub structure: AtomStructure,
    /// Notes about the generated table, e.g. empty compositions that make
    /// the result non-integral. Validity is left to the axiom checker.
    pub warnings: Vec<String>,
}

/// The symmetric algebra with `n` diversity atoms `a1..an` and identity `1'`:
/// `a;a = 1' + Σ{c : |{a,c}| ∈ γ}` and, for `a ≠ b`,
/// `a;b = Σ{c : |{a,b,c}| ∈ γ}`, with `c` ranging over diversity atoms.
pub fn lyndon(n: usize, gamma: GammaSet) -> Result<Lyndon> {
    if !(2..=12).contains(&n) {
        return Err(Error::BadParameters(format!(
            "lyndon needs 2 <= n <= 12, got {n}"
        )));
    }
    let m = n + 1;
    let names: Vec<String> = std::iter::once("1'".to_string())
        .chain((1..=n).map(|i| format!("a{i}")))
        .collect();
    let mut comp = vec![vec![0 as Mask; m]; m];
    for x in 0..m {
        comp[0][x] = 1 << x;
        comp[x][0] = 1 << x;
    }
    for a in 1..m {
        for b in 1..m {
            let mut mask = if a == b { 1 } else { 0 };
            for c in 1..m {
                let distinct = [a, b, c]
                    .iter()
                    .enumerate()
                    .filter(|&(i, v)| ![a, b, c][..i].contains(v))
                    .count();
                if gamma.contains(distinct) {
                    mask |= 1 << c;
                }
            }
            comp[a][b] = mask;
        }
    }
    let mut warnings = Vec::new();
    if gamma.is_empty() {
        warnings.push("gamma is empty: every diversity product is 0".into());
    }
    for a in 1..m {
        for b in 1..m {
            if comp[a][b] == 0 {
                warnings.push(format!(
                    "{};{} = 0, so the algebra is not integral",
                    names[a], names[b]
                ));
            }
        }
    }
    let structure = AtomStructure::new(names, 1, (0..m).collect(), comp)?;
    Ok(Lyndon {
        structure,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteRelationAlgebra;

    #[test]
    fn mackenzie_table_entries() {
        let s = mackenzie();
        let m = |t: &str| s.parse_mask(t).unwrap();
        assert_eq!(s.comp(1, 2), 0b1111);
        assert_eq!(s.comp(3, 3), m("1'+a+a~"));
        assert_eq!(s.comp(1, 3), m("a+b"));
        assert_eq!(s.comp(2, 2), m("a~"));
        assert!(s.violation().is_none(), "{:?}", s.violation());
        let a = FiniteRelationAlgebra::new(s).unwrap();
        assert!(a.is_integral());
        assert!(a.is_simple());
        assert!(!a.is_symmetric());
        let x = a.parse_element("a+b").unwrap();
        assert_eq!(a.render(a.converse(x).unwrap()), "a~+b");
    }

    #[test]
    fn lyndon_three_projective_line() {
        let l = lyndon(3, GammaSet::projective_line()).unwrap();
        assert!(l.warnings.is_empty());
        let s = &l.structure;
        assert_eq!(s.comp(1, 1), s.parse_mask("1'+a1").unwrap());
        assert_eq!(s.comp(1, 2), s.parse_mask("a3").unwrap());
        // a1;(a1;a2) = a2 but (a1;a1);a2 = a2+a3: three diversity atoms are too few
        let v = s.violation().expect("not associative");
        assert_eq!(v.invariant, "associativity");
        for n in 4..=8 {
            let l = lyndon(n, GammaSet::projective_line()).unwrap();
            assert!(l.structure.violation().is_none(), "n = {n}");
        }
    }

    #[test]
    fn lyndon_two_is_flagged() {
        let l = lyndon(2, GammaSet::projective_line()).unwrap();
        assert_eq!(l.structure.comp(1, 2), 0);
        assert!(l.warnings.iter().any(|w| w.contains("not integral")));
        assert!(lyndon(1, GammaSet::projective_line()).is_err());
        assert!(lyndon(13, GammaSet::projective_line()).is_err());
    }

    #[test]
    fn gamma_parsing() {
        let g: GammaSet = "1,3".parse().unwrap();
        assert_eq!(g, GammaSet::projective_line());
        assert_eq!(g.to_string(), "{1,3}");
        assert!("{1,4}".parse::<GammaSet>().is_err());
        assert!("".parse::<GammaSet>().unwrap().is_empty());
    }
}
