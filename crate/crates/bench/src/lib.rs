//! Shared benchmark fixtures.

use freiman_core::{IntSet, PolySystem, Polynomial};
use num_bigint::BigInt;

/// `x₁ + x₂ − 2x₃`.
pub fn three_term_ap() -> PolySystem {
    PolySystem::linear(&[(&[1, 1, -2], 0)]).expect("valid system")
}

/// `x₁² + x₂² − x₃² − x₄²`.
pub fn sum_of_two_squares() -> PolySystem {
    PolySystem::single(Polynomial::diagonal(&[1, 1, -1, -1], 2).expect("valid polynomial"))
}

/// `{0, d, 2d, …}` with `card` elements.
pub fn progression(card: usize, step: i64) -> IntSet {
    IntSet::new((0..card as i64).map(|i| i * step)).expect("nonempty")
}

/// A Sidon-like spread set with the given number of elements scaled by `10^exp`.
pub fn spread(card: usize, exp: u32) -> IntSet {
    let scale = BigInt::from(10).pow(exp);
    IntSet::new((0..card as u64).map(|i| &scale * BigInt::from(i * i + 3 * i + 1))).expect("nonempty")
}
