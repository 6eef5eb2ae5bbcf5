//! The line-oriented `.ra` algebra format.
//!
//! ```text
//! # MacKenzie's algebra
//! atoms: 1' a a~ b
//! identity: 1'
//! converse: 1'=1' a=a~ a~=a b=b
//! 1';1' = 1'
//! a;a~ = 1'+a+a~+b
//! ...
//! ```
//!
//! All `m²` composition lines are required; `0` denotes the empty element.

use std::fmt::Write as _;

use crate::element::{Atoms, Mask};
use crate::error::{Error, Result};
use crate::structure::AtomStructure;

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

fn parse_sum(names: &[String], text: &str, line: usize) -> Result<Mask> {
    let text = text.trim();
    if text == "0" {
        return Ok(0);
    }
    let mut mask = 0;
    for part in text.split('+') {
        let part = part.trim();
        let i = names
            .iter()
            .position(|n| n == part)
            .ok_or_else(|| err(line, format!("unknown atom `{part}`")))?;
        mask |= 1 << i;
    }
    Ok(mask)
}

pub fn parse_ra(text: &str) -> Result<AtomStructure> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut header = |key: &str| -> Result<(usize, String)> {
        let (no, l) = lines
            .next()
            .ok_or_else(|| err(0, format!("missing `{key}:` line")))?;
        let rest = l
            .strip_prefix(key)
            .and_then(|r| r.trim_start().strip_prefix(':'))
            .ok_or_else(|| err(no, format!("expected `{key}:`")))?;
        Ok((no, rest.trim().to_string()))
    };

    let (_, atoms) = header("atoms")?;
    let names: Vec<String> = atoms.split_whitespace().map(String::from).collect();
    let m = names.len();
    if m == 0 {
        return Err(err(1, "no atoms declared"));
    }
    if m > crate::element::MAX_ATOMS {
        return Err(Error::TooManyAtoms(m));
    }
    let (id_line, identity) = header("identity")?;
    let identity = parse_sum(&names, &identity, id_line)?;
    let (conv_line, conv) = header("converse")?;
    let mut converse = vec![usize::MAX; m];
    for pair in conv.split_whitespace() {
        let (a, b) = pair
            .split_once('=')
            .ok_or_else(|| err(conv_line, format!("expected name=name, got `{pair}`")))?;
        let ia = names
            .iter()
            .position(|n| n == a)
            .ok_or_else(|| err(conv_line, format!("unknown atom `{a}`")))?;
        let ib = names
            .iter()
            .position(|n| n == b)
            .ok_or_else(|| err(conv_line, format!("unknown atom `{b}`")))?;
        if converse[ia] != usize::MAX {
            return Err(err(conv_line, format!("converse of `{a}` given twice")));
        }
        converse[ia] = ib;
    }
    if let Some(i) = converse.iter().position(|&c| c == usize::MAX) {
        return Err(err(
            conv_line,
            format!("converse of `{}` missing", names[i]),
        ));
    }

    let mut comp = vec![vec![None; m]; m];
    for (no, l) in lines.by_ref() {
        let (lhs, rhs) = l
            .split_once('=')
            .ok_or_else(|| err(no, "expected `a;b = ...`"))?;
        let (a, b) = lhs
            .split_once(';')
            .ok_or_else(|| err(no, "expected `a;b` on the left"))?;
        let ia = names
            .iter()
            .position(|n| n == a.trim())
            .ok_or_else(|| err(no, format!("unknown atom `{}`", a.trim())))?;
        let ib = names
            .iter()
            .position(|n| n == b.trim())
            .ok_or_else(|| err(no, format!("unknown atom `{}`", b.trim())))?;
        if comp[ia][ib].is_some() {
            return Err(err(
                no,
                format!("duplicate entry for {};{}", names[ia], names[ib]),
            ));
        }
        comp[ia][ib] = Some(parse_sum(&names, rhs, no)?);
    }
    let mut table = vec![vec![0; m]; m];
    for a in 0..m {
        for b in 0..m {
            table[a][b] = comp[a][b]
                .ok_or_else(|| err(0, format!("missing entry for {};{}", names[a], names[b])))?;
        }
    }
    AtomStructure::new(names, identity, converse, table)
}

pub fn write_ra(s: &AtomStructure) -> String {
    let m = s.atom_count();
    let mut out = String::new();
    let _ = writeln!(out, "atoms: {}", s.names().join(" "));
    let _ = writeln!(
        out,
        "identity: {}",
        Atoms(s.identity())
            .map(|i| s.name(i))
            .collect::<Vec<_>>()
            .join("+")
    );
    let conv: Vec<String> = (0..m)
        .map(|i| format!("{}={}", s.name(i), s.name(s.converse_of(i))))
        .collect();
    let _ = writeln!(out, "converse: {}", conv.join(" "));
    for a in 0..m {
        for b in 0..m {
            let _ = writeln!(
                out,
                "{};{} = {}",
                s.name(a),
                s.name(b),
                s.render_mask(s.comp(a, b))
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "\
# identity plus one symmetric diversity atom
atoms: 1' d
identity: 1'
converse: 1'=1' d=d
1';1' = 1'
1';d = d
d;1' = d
d;d = 1'   # two points
";

    #[test]
    fn parses_and_writes_back() {
        let s = parse_ra(TWO).unwrap();
        assert_eq!(s.atom_count(), 2);
        assert_eq!(s.comp(1, 1), 0b01);
        assert!(s.violation().is_none());
        assert_eq!(parse_ra(&write_ra(&s)).unwrap(), s);
    }

    #[test]
    fn zero_entries_and_errors() {
        let missing = TWO.replace("d;d = 1'   # two points\n", "");
        assert!(matches!(parse_ra(&missing), Err(Error::Format { .. })));
        let dup = format!("{TWO}d;d = 0\n");
        assert!(matches!(parse_ra(&dup), Err(Error::Format { .. })));
        let unknown = TWO.replace("d;d = 1'", "d;d = e");
        match parse_ra(&unknown) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 8),
            other => panic!("unexpected {other:?}"),
        }
        let zero = TWO.replace("d;d = 1'", "d;d = 0");
        assert_eq!(parse_ra(&zero).unwrap().comp(1, 1), 0);
        assert!(parse_ra("identity: 1'").is_err());
    }
}
