use crate::dataio::{ColumnConstraint, Monotonicity};
use crate::scalar::Scalar;

/// Direction-penalized distance: coordinates that increase along `a → b`
/// cost `lambda` times their plain difference.
///
/// With `lambda = 1` this is the Euclidean distance.
pub fn weighted_distance<T: Scalar>(a: &[T], b: &[T], lambda: T) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let diff = x - y;
            let scaled = if diff < T::zero() { lambda * diff } else { diff };
            scaled * scaled
        })
        .sum::<T>()
        .sqrt()
}

/// Schema-aware variant of [`weighted_distance`].
///
/// `lambda` only applies to columns whose monotonicity disfavors the change:
/// decreases of non-decreasing columns, increases of non-increasing columns.
/// Any change of an immutable column makes the pair unconnectable (`+∞`).
pub fn monotonicity_distance<T: Scalar>(a: &[T], b: &[T], constraints: &[ColumnConstraint], lambda: T) -> T {
    let mut acc = T::zero();
    for ((&x, &y), c) in a.iter().zip(b).zip(constraints) {
        let change = y - x;
        if change == T::zero() {
            continue;
        }
        if !c.mutable {
            return T::infinity();
        }
        let penalized = match c.monotonicity {
            Monotonicity::Free => false,
            Monotonicity::NonDecreasing => change < T::zero(),
            Monotonicity::NonIncreasing => change > T::zero(),
        };
        let scaled = if penalized { lambda * change } else { change };
        acc = acc + scaled * scaled;
    }
    acc.sqrt()
}
