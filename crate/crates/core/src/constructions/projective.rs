//! The Bruck–Ryser exclusion test for projective plane orders.
//!
//! If a projective plane of order `n` exists and `n ≡ 1, 2 (mod 4)`, then `n`
//! is a sum of two integer squares. The contrapositive certifies that no plane
//! exists for such orders; it says nothing about other orders (no plane of
//! order 10 exists, yet 10 = 1 + 9 passes the test).

pub fn is_sum_of_two_squares(n: u64) -> bool {
    let mut a = 0u64;
    while a * a <= n {
        let rest = n - a * a;
        let b = rest.isqrt();
        if b * b == rest {
            return true;
        }
        a += 1;
    }
    false
}

/// True when the criterion rules out a projective plane of this order.
pub fn bruck_ryser_excluded(order: u64) -> bool {
    matches!(order % 4, 1 | 2) && !is_sum_of_two_squares(order)
}

/// Indices `n ≤ limit` with `n ≥ 5` such that no projective plane of order
/// `n - 1` exists by the criterion; the Lyndon algebras with `n` diversity
/// atoms at these indices are not representable.
pub fn non_representable_indices(limit: u64) -> Vec<u64> {
    (5..=limit)
        .filter(|&n| bruck_ryser_excluded(n - 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_orders() {
        assert!(bruck_ryser_excluded(6));
        assert!(!bruck_ryser_excluded(4));
        assert!(!bruck_ryser_excluded(10));
        assert!(!bruck_ryser_excluded(2));
        assert!(is_sum_of_two_squares(0));
        assert!(is_sum_of_two_squares(25));
        assert!(!is_sum_of_two_squares(21));
    }
}
