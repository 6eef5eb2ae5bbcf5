//! Atom structures: the finite presentation of an atomic relation algebra.
//!
//! An atom structure lists the atoms, the converse permutation, the atoms
//! below the identity, and the composition of every ordered atom pair. Every
//! operation of the full complex algebra is recovered from this table by
//! distributing over joins, which is why the invariants below are stated and
//! checked only on atoms.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::element::{full_mask, is_subset, Atoms, Mask, MAX_ATOMS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomStructure {
    names: Vec<String>,
    identity: Mask,
    converse: Vec<usize>,
    /// Row-major `m * m` table of composition masks.
    comp: Vec<Mask>,
}

/// The first atom-level invariant that fails, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub witness: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} fails at {}", self.invariant, self.witness)
    }
}

pub fn is_valid_atom_name(name: &str) -> bool {
    let core = name.strip_suffix('~').unwrap_or(name);
    !core.is_empty()
        && core
            .chars()
            .all(|c| c.is_alphanumeric() || c == '\'' || c == '_')
}

impl AtomStructure {
    /// Builds a structure after checking names, index ranges and widths.
    /// The algebraic invariants are checked separately by [`Self::violation`].
    pub fn new(
        names: Vec<String>,
        identity: Mask,
        converse: Vec<usize>,
        comp: Vec<Vec<Mask>>,
    ) -> Result<Self> {
        let m = names.len();
        if m == 0 {
            return Err(Error::Malformed("no atoms".into()));
        }
        if m > MAX_ATOMS {
            return Err(Error::TooManyAtoms(m));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !is_valid_atom_name(n) {
                return Err(Error::Malformed(format!("invalid atom name `{n}`")));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::Malformed(format!("duplicate atom name `{n}`")));
            }
        }
        let full = full_mask(m);
        if identity == 0 {
            return Err(Error::Malformed(
                "identity must contain at least one atom".into(),
            ));
        }
        if !is_subset(identity, full) {
            return Err(Error::Malformed("identity mask wider than atom set".into()));
        }
        if converse.len() != m || converse.iter().any(|&c| c >= m) {
            return Err(Error::Malformed(
                "converse must map every atom to an atom".into(),
            ));
        }
        if comp.len() != m || comp.iter().any(|row| row.len() != m) {
            return Err(Error::Malformed(format!(
                "composition table must be {m}x{m}"
            )));
        }
        if comp.iter().flatten().any(|&e| !is_subset(e, full)) {
            return Err(Error::Malformed(
                "composition entry wider than atom set".into(),
            ));
        }
        Ok(AtomStructure {
            names,
            identity,
            converse,
            comp: comp.into_iter().flatten().collect(),
        })
    }

    pub fn atom_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, atom: usize) -> &str {
        &self.names[atom]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn identity(&self) -> Mask {
        self.identity
    }

    pub fn converse_of(&self, atom: usize) -> usize {
        self.converse[atom]
    }

    pub fn converse_table(&self) -> &[usize] {
        &self.converse
    }

    pub fn comp(&self, a: usize, b: usize) -> Mask {
        self.comp[a * self.names.len() + b]
    }

    pub(crate) fn comp_flat(&self) -> &[Mask] {
        &self.comp
    }

    /// Copy with one composition entry replaced; width is still enforced.
    pub fn with_entry(&self, a: usize, b: usize, value: Mask) -> Result<Self> {
        let m = self.atom_count();
        if a >= m || b >= m {
            return Err(Error::Malformed(format!("entry ({a},{b}) out of range")));
        }
        if !is_subset(value, full_mask(m)) {
            return Err(Error::Malformed(
                "composition entry wider than atom set".into(),
            ));
        }
        let mut s = self.clone();
        s.comp[a * m + b] = value;
        Ok(s)
    }

    pub fn render_mask(&self, mask: Mask) -> String {
        if mask == 0 {
            return "0".into();
        }
        Atoms(mask)
            .map(|i| self.names[i].as_str())
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Like [`Self::render_mask`] but the top element renders as `1`.
    pub fn render_report(&self, mask: Mask) -> String {
        if mask == full_mask(self.atom_count()) {
            "1".into()
        } else {
            self.render_mask(mask)
        }
    }

    /// Parses `0`, `1`, or a `+`-joined list of atom names.
    pub fn parse_mask(&self, text: &str) -> Result<Mask> {
        let text = text.trim();
        match text {
            "0" => return Ok(0),
            "1" if self.index_of("1").is_none() => return Ok(full_mask(self.atom_count())),
            _ => {}
        }
        let mut mask = 0;
        for part in text.split('+') {
            let part = part.trim();
            let i = self
                .index_of(part)
                .ok_or_else(|| Error::Malformed(format!("unknown atom `{part}`")))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    fn compose_masks(&self, x: Mask, y: Mask) -> Mask {
        let mut acc = 0;
        for a in Atoms(x) {
            for b in Atoms(y) {
                acc |= self.comp(a, b);
            }
        }
        acc
    }

    fn converse_mask(&self, x: Mask) -> Mask {
        Atoms(x).fold(0, |acc, a| acc | 1 << self.converse[a])
    }

    /// The first failing atom-level invariant, or `None` when the table
    /// presents a relation algebra.
    pub fn violation(&self) -> Option<Violation> {
        let m = self.atom_count();
        let n = |i: usize| self.names[i].as_str();
        for i in 0..m {
            if self.converse[self.converse[i]] != i {
                return Some(Violation {
                    invariant: "converse is an involution",
                    witness: format!("atom {}", n(i)),
                });
            }
        }
        for e in Atoms(self.identity) {
            if self.converse[e] != e {
                return Some(Violation {
                    invariant: "identity atoms are self-converse",
                    witness: format!("atom {}", n(e)),
                });
            }
        }
        for a in 0..m {
            let left = self.compose_masks(self.identity, 1 << a);
            let right = self.compose_masks(1 << a, self.identity);
            if left != 1 << a || right != 1 << a {
                return Some(Violation {
                    invariant: "identity is a two-sided unit",
                    witness: format!(
                        "atom {}: 1';{} = {}, {};1' = {}",
                        n(a),
                        n(a),
                        self.render_mask(left),
                        n(a),
                        self.render_mask(right)
                    ),
                });
            }
        }
        for a in 0..m {
            for b in 0..m {
                let ab = self.comp(a, b);
                let rev = self.comp(self.converse[b], self.converse[a]);
                if self.converse_mask(ab) != rev {
                    return Some(Violation {
                        invariant: "converse of composition",
                        witness: format!("atoms ({}, {})", n(a), n(b)),
                    });
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                let ab = self.comp(a, b);
                for c in 0..m {
                    let first = ab >> c & 1 == 1;
                    let second = self.comp(b, self.converse[c]) >> self.converse[a] & 1 == 1;
                    let third = self.comp(self.converse[a], c) >> b & 1 == 1;
                    if first != second || first != third {
                        return Some(Violation {
                            invariant: "cycle condition",
                            witness: format!("atoms ({}, {}, {})", n(a), n(b), n(c)),
                        });
                    }
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                let ab = self.comp(a, b);
                for c in 0..m {
                    let left = self.compose_masks(ab, 1 << c);
                    let right = self.compose_masks(1 << a, self.comp(b, c));
                    if left != right {
                        return Some(Violation {
                            invariant: "associativity",
                            witness: format!("atoms ({}, {}, {})", n(a), n(b), n(c)),
                        });
                    }
                }
            }
        }
        None
    }

    /// Builds a structure whose names are given and whose table is looked up by name.
    pub fn from_named_table(
        names: &[&str],
        identity: &[&str],
        converse: &[(&str, &str)],
        table: &[(&str, &str, &[&str])],
    ) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::Malformed(format!("unknown atom `{s}`")))
        };
        let m = names.len();
        let mut id = 0;
        for e in identity {
            id |= 1 << idx(e)?;
        }
        let mut conv = vec![usize::MAX; m];
        for (a, b) in converse {
            conv[idx(a)?] = idx(b)?;
        }
        let mut comp = vec![vec![0; m]; m];
        for (a, b, out) in table {
            let mut mask = 0;
            for o in out.iter() {
                mask |= 1 << idx(o)?;
            }
            comp[idx(a)?][idx(b)?] = mask;
        }
        AtomStructure::new(names, id, conv, comp)
    }
}
