//! Fusing two diversity atoms of `E_{n+1}` and embedding the resulting proper
//! subalgebra into a larger `E_{k+1}`.
//!
//! In `E_{n+1}` with `n ≥ 5`, the join `a = a_i + a_j` of two diversity atoms
//! satisfies `a;a = 1` and `a;a_l = 0'·ā_l` for the other atoms `a_l`, so
//! `{1', a} ∪ {a_l}` are the atoms of a subalgebra. In `E_{k+1}` the join `b`
//! of the first `k − n + 2` diversity atoms behaves the same way, and the
//! remaining `n − 2` atoms `b_{k−n+3}..b_k` take the place of the `a_l`.
//! Any `b` built from at least two atoms already satisfies both identities;
//! it has to contain `k − n + 2` of them for the atom map to preserve `1`.

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteRelationAlgebra;
use crate::element::Mask;
use crate::error::{Error, Result};
use crate::structure::AtomStructure;
use crate::subalgebra::Subalgebra;

use super::named::{lyndon, GammaSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionReport {
    /// `b₁ + … + b_{k−n+1}`.
    pub short_b: String,
    pub short_b_squared_is_one: bool,
    /// `b;b_j = 0'·b̄_j` for every `j > k − n + 1`.
    pub short_b_products: bool,
    /// The join actually used as the image of the fused atom.
    pub image_b: String,
    pub image_b_squared_is_one: bool,
    pub image_b_products: bool,
    pub image_is_subalgebra: bool,
    pub preserves_operations: bool,
    pub injective: bool,
    pub atom_pairs_checked: usize,
    pub element_pairs_checked: u64,
    pub passed: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct FusedSubalgebra {
    /// The subalgebra of `E_{n+1}` as an algebra in its own right; the fused
    /// atom is named `a`.
    pub structure: AtomStructure,
    /// Each subalgebra atom as an element of `E_{n+1}`.
    pub source_blocks: Vec<Mask>,
    /// Each subalgebra atom's image in `E_{k+1}`.
    pub image_blocks: Vec<Mask>,
    pub report: FusionReport,
}

/// Fuses `a₁` and `a₂`.
pub fn fused_subalgebra(n: usize, k: usize) -> Result<FusedSubalgebra> {
    fused_subalgebra_pair(n, k, (1, 2))
}

/// Fuses diversity atoms `a_i` and `a_j` (1-based).
pub fn fused_subalgebra_pair(n: usize, k: usize, pair: (usize, usize)) -> Result<FusedSubalgebra> {
    if n < 5 || n >= k || k > 12 {
        return Err(Error::BadParameters(format!(
            "fusion needs 5 <= n < k <= 12, got n = {n}, k = {k}"
        )));
    }
    let (i, j) = pair;
    if i == j || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(Error::BadParameters(format!("bad atom pair ({i},{j})")));
    }
    let gamma = GammaSet::projective_line();
    let small = FiniteRelationAlgebra::new(lyndon(n, gamma)?.structure)?;
    let big = FiniteRelationAlgebra::new(lyndon(k, gamma)?.structure)?;

    let fused: Mask = 1 << i | 1 << j;
    let rest: Vec<usize> = (1..=n).filter(|&l| l != i && l != j).collect();
    let mut source_blocks = vec![1, fused];
    source_blocks.extend(rest.iter().map(|&l| 1 << l));
    let sub = Subalgebra::from_blocks(&small, &source_blocks)?;
    let mut names = vec!["1'".to_string(), "a".to_string()];
    names.extend(rest.iter().map(|&l| format!("a{l}")));
    // from_blocks orders blocks by least atom; keep ours in the stated order
    let order: Vec<usize> = source_blocks
        .iter()
        .map(|b| {
            sub.blocks()
                .iter()
                .position(|x| x == b)
                .expect("same blocks")
        })
        .collect();
    let ordered = sub.to_structure_named(&small, {
        let mut v = vec![String::new(); names.len()];
        for (pos, &o) in order.iter().enumerate() {
            v[o] = names[pos].clone();
        }
        v
    })?;
    let structure = reorder(&ordered, &order)?;

    let atoms_mask = |lo: usize, hi: usize| (lo..=hi).fold(0 as Mask, |acc, l| acc | 1 << l);
    let diversity = big.full() & !1;
    let short_b = atoms_mask(1, k - n + 1);
    let image_b = atoms_mask(1, k - n + 2);
    let identities = |b: Mask, from: usize| -> (bool, bool) {
        let square = big.compose_mask(b, b) == big.full();
        let products = (from..=k).all(|l| big.compose_mask(b, 1 << l) == diversity & !(1 << l));
        (square, products)
    };
    let (short_sq, short_prod) = identities(short_b, k - n + 2);
    let (image_sq, image_prod) = identities(image_b, k - n + 3);

    let mut image_blocks = vec![1, image_b];
    image_blocks.extend((k - n + 3..=k).map(|l| 1 << l));
    let image_is_subalgebra = Subalgebra::from_blocks(&big, &image_blocks).is_ok();

    let map =
        |sel: Mask| -> Mask { crate::element::Atoms(sel).fold(0, |acc, t| acc | image_blocks[t]) };
    let lift = |x: Mask| -> Mask {
        source_blocks
            .iter()
            .enumerate()
            .filter(|(_, &b)| b & x != 0)
            .fold(0, |acc, (t, _)| acc | 1 << t)
    };
    let mut failure = None;
    let mut preserves = map(lift(small.identity_mask())) == big.identity_mask();
    if !preserves {
        failure = Some("1' is not preserved".to_string());
    }
    let blocks = source_blocks.len();
    let mut atom_pairs = 0;
    for x in 0..blocks {
        if map(lift(small.converse_mask(source_blocks[x]))) != big.converse_mask(image_blocks[x]) {
            preserves = false;
            failure.get_or_insert_with(|| format!("converse of {}", structure.name(x)));
        }
        for y in 0..blocks {
            atom_pairs += 1;
            let lhs = map(lift(small.compose_mask(source_blocks[x], source_blocks[y])));
            let rhs = big.compose_mask(image_blocks[x], image_blocks[y]);
            if lhs != rhs {
                preserves = false;
                failure.get_or_insert_with(|| {
                    format!(
                        "{};{} is not preserved",
                        structure.name(x),
                        structure.name(y)
                    )
                });
            }
        }
    }
    let all: Mask = (1 << blocks) - 1;
    if map(all) != big.full() {
        preserves = false;
        failure.get_or_insert_with(|| "1 is not preserved".to_string());
    }
    // Element level, exhaustive while the subalgebra is small.
    let mut element_pairs = 0u64;
    if blocks <= 8 {
        'outer: for x in 0..=all {
            let (fx, sx) = (map(x), sub_elem(&source_blocks, x));
            if map(all & !x) != big.full() & !fx {
                preserves = false;
                failure.get_or_insert_with(|| "complement is not preserved".to_string());
                break;
            }
            for y in 0..=all {
                element_pairs += 1;
                let (fy, sy) = (map(y), sub_elem(&source_blocks, y));
                if map(lift(small.compose_mask(sx, sy))) != big.compose_mask(fx, fy)
                    || map(x | y) != fx | fy
                {
                    preserves = false;
                    failure
                        .get_or_insert_with(|| "an element product is not preserved".to_string());
                    break 'outer;
                }
            }
        }
    }
    let injective = image_blocks.iter().all(|&b| b != 0)
        && image_blocks
            .iter()
            .enumerate()
            .all(|(t, &b)| image_blocks[..t].iter().all(|&c| c & b == 0));
    let passed = short_sq
        && short_prod
        && image_sq
        && image_prod
        && image_is_subalgebra
        && preserves
        && injective;
    let render = |m: Mask| big.structure().render_mask(m);
    Ok(FusedSubalgebra {
        structure,
        report: FusionReport {
            short_b: render(short_b),
            short_b_squared_is_one: short_sq,
            short_b_products: short_prod,
            image_b: render(image_b),
            image_b_squared_is_one: image_sq,
            image_b_products: image_prod,
            image_is_subalgebra,
            preserves_operations: preserves,
            injective,
            atom_pairs_checked: atom_pairs,
            element_pairs_checked: element_pairs,
            passed,
            failure,
        },
        source_blocks,
        image_blocks,
    })
}

fn sub_elem(blocks: &[Mask], sel: Mask) -> Mask {
    crate::element::Atoms(sel).fold(0, |acc, t| acc | blocks[t])
}

/// Renumbers atoms so that new atom `t` is old atom `order[t]`.
fn reorder(s: &AtomStructure, order: &[usize]) -> Result<AtomStructure> {
    let m = order.len();
    let mut back = vec![0; m];
    for (t, &o) in order.iter().enumerate() {
        back[o] = t;
    }
    let remap = |mask: Mask| crate::element::Atoms(mask).fold(0, |acc, o| acc | 1 << back[o]);
    let names = order.iter().map(|&o| s.name(o).to_string()).collect();
    let converse = order.iter().map(|&o| back[s.converse_of(o)]).collect();
    let comp = order
        .iter()
        .map(|&x| order.iter().map(|&y| remap(s.comp(x, y))).collect())
        .collect();
    AtomStructure::new(names, remap(s.identity()), converse, comp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_into_eight() {
        let f = fused_subalgebra(5, 8).unwrap();
        let r = &f.report;
        assert!(r.passed, "{r:?}");
        assert!(r.short_b_squared_is_one && r.short_b_products);
        assert_eq!(r.short_b, "a1+a2+a3+a4");
        assert_eq!(r.image_b, "a1+a2+a3+a4+a5");
        assert_eq!(f.structure.names(), ["1'", "a", "a3", "a4", "a5"]);
        assert!(f.structure.violation().is_none());
        assert_eq!(r.element_pairs_checked, 32 * 32);
    }

    #[test]
    fn other_pairs_and_bad_parameters() {
        assert!(fused_subalgebra_pair(6, 9, (2, 5)).unwrap().report.passed);
        assert!(fused_subalgebra(5, 5).is_err());
        assert!(fused_subalgebra(4, 8).is_err());
        assert!(fused_subalgebra_pair(5, 8, (3, 3)).is_err());
    }
}
