//! The slope representation of `E_{q+2}` over the affine plane `GF(q)²`.
//!
//! Two distinct points are related by the atom of the slope of the line
//! through them. For `q ≥ 3` every line has at least three points, so two
//! points at slope `a` are joined through a third point on the same line and
//! `a ≤ a;a`; two points at different slopes `a ≠ b` span a parallelogram
//! whose other sides give every slope except `a` and `b`. For `q = 2` lines
//! have only two points and `a;a = 1'`.

use crate::error::{Error, Result};
use crate::search::RepresentationMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub const MAX: u64 = 13;

    pub fn new(q: u64) -> Result<Self> {
        if q < 2 || (2..q).any(|d| q.is_multiple_of(d)) {
            return Err(Error::NotPrime(q));
        }
        if q > Self::MAX {
            return Err(Error::BadParameters(format!(
                "q = {q} exceeds {}",
                Self::MAX
            )));
        }
        Ok(PrimeField { q })
    }

    pub fn order(self) -> u64 {
        self.q
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    /// Multiplicative inverse of a nonzero element, by Fermat.
    pub fn inv(self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.q), "zero has no inverse");
        let (mut base, mut exp, mut acc) = (a % self.q, self.q - 2, 1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

/// Labeling of `GF(q)² × GF(q)²` by the atoms of `lyndon(q+1, {1,3})`:
/// point `(x,y)` is base index `x*q + y`, atom `1'` labels the diagonal,
/// atom `a{s+1}` labels pairs on a line of slope `s ∈ GF(q)`, and atom
/// `a{q+1}` labels pairs on a vertical line.
pub fn slope_representation(field: PrimeField) -> Result<RepresentationMap> {
    let q = field.order();
    if q < 3 {
        return Err(Error::QTooSmall(q));
    }
    let qs = q as usize;
    RepresentationMap::from_fn(qs * qs, |i, j| {
        let (x1, y1) = ((i / qs) as u64, (i % qs) as u64);
        let (x2, y2) = ((j / qs) as u64, (j % qs) as u64);
        if i == j {
            0
        } else if x1 == x2 {
            qs + 1
        } else {
            let slope = field.mul(field.sub(y2, y1), field.inv(field.sub(x2, x1)));
            slope as usize + 1
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteRelationAlgebra;
    use crate::constructions::{lyndon, GammaSet};
    use crate::search::verify_representation;

    #[test]
    fn field_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert_eq!(PrimeField::new(1), Err(Error::NotPrime(1)));
        assert!(PrimeField::new(17).is_err());
    }

    #[test]
    fn slope_rep_small_fields() {
        for q in [3, 5, 7] {
            let f = PrimeField::new(q).unwrap();
            let rep = slope_representation(f).unwrap();
            let a = FiniteRelationAlgebra::new(
                lyndon(q as usize + 1, GammaSet::projective_line())
                    .unwrap()
                    .structure,
            )
            .unwrap();
            let r = verify_representation(&a, &rep);
            assert!(r.passed, "q = {q}: {:?}", r.failure);
        }
        let rep3 = slope_representation(PrimeField::new(3).unwrap()).unwrap();
        assert_eq!(rep3.pairs_of(1 << 1).len(), 18);
        assert_eq!(
            slope_representation(PrimeField::new(2).unwrap()),
            Err(Error::QTooSmall(2))
        );
    }
}
