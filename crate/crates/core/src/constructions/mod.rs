//! Generators for named algebras and the finite-geometry apparatus around them.

mod fusion;
mod named;
mod projective;
mod slope;

pub use fusion::{fused_subalgebra, fused_subalgebra_pair, FusedSubalgebra, FusionReport};
pub use named::{lyndon, mackenzie, GammaSet, Lyndon};
pub use projective::{bruck_ryser_excluded, is_sum_of_two_squares, non_representable_indices};
pub use slope::{slope_representation, PrimeField};
