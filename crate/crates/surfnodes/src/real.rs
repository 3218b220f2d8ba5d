//! Scalar abstraction for the whole crate.
//!
//! Everything numeric is generic over [`Real`], a thin bundle of the
//! `num-traits` capabilities the algorithms need. Blanket-implemented for
//! `f32` and `f64`; concrete aliases for the common types live at the crate
//! root.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable throughout the crate.
///
/// The supertraits cover IEEE arithmetic (`Float`), conversion from literal
/// constants (`FromPrimitive`; `to_f64` comes with `Float`'s `NumCast`),
/// accumulation operators, and the marker bounds needed to store scalars
/// inside shared, Send + Sync geometry objects.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum<Self>
        + Debug
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics only if the target type cannot represent any `f64` (never the case
/// for `f32`/`f64`; overflow saturates to infinity via `as` semantics in
/// `num-traits`).
#[inline]
pub fn cast<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("f64 constant must convert to the scalar type")
}

/// Dot product of two equal-length slices.
#[inline]
pub fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = R::zero();
    for (x, y) in a.iter().zip(b) {
        acc += *x * *y;
    }
    acc
}

/// Squared Euclidean distance between two equal-length slices.
///
/// Every proximity decision in the crate goes through this single function:
/// the advancing-front acceptance test compares a candidate's distance to its
/// own parent (which equals the threshold *exactly*), so all participating
/// distances must be computed by the same expression to keep the comparison
/// exact in floating point.
#[inline]
pub fn dist_sq<R: Real>(a: &[R], b: &[R]) -> R {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = R::zero();
    for (x, y) in a.iter().zip(b) {
        let d = *x - *y;
        acc += d * d;
    }
    acc
}

/// Euclidean norm of a slice.
#[inline]
pub fn norm<R: Real>(v: &[R]) -> R {
    dot(v, v).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cast_round_trips_constants() {
        assert_eq!(cast::<f64>(1.5), 1.5);
        assert_eq!(cast::<f32>(1.5), 1.5f32);
    }

    #[test]
    fn dist_sq_matches_manual_expansion() {
        let a = [1.0f64, 2.0, 3.0];
        let b = [0.0f64, 0.0, 0.0];
        assert_eq!(dist_sq(&a, &b), 14.0);
        assert_eq!(norm(&b), 0.0);
    }

    #[test]
    fn dist_sq_is_symmetric_bitwise() {
        // (a-b)^2 == (b-a)^2 exactly in IEEE arithmetic; the acceptance test
        // in the generator relies on this symmetry.
        let a = [0.1f64, 0.7, -3.3];
        let b = [2.4f64, -0.2, 1.9];
        assert_eq!(dist_sq(&a, &b), dist_sq(&b, &a));
    }
}
