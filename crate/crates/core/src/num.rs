//! Scalar abstraction shared by every numeric module.
//!
//! All statistics are generic over [`Real`], which is implemented for `f32`
//! and `f64`. Sums over per-entity samples go through [`exact_sum`], whose
//! result is the correctly rounded value of the exact sum and therefore does
//! not depend on the order of the inputs.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this type.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 constant representable as Real")
    }

    /// Converts a count into this type.
    fn of_count(count: usize) -> Self {
        Self::from_usize(count).expect("count representable as Real")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real convertible to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + FromStr
        + Display
        + Debug
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Correctly rounded sum of `values` (Shewchuk's non-overlapping partials
/// with a half-even fix-up on the final rounding).
///
/// Falls back to naive accumulation when a non-finite value is encountered.
pub fn exact_sum<T, I>(values: I) -> T
where
    T: Real,
    I: IntoIterator<Item = T>,
{
    let mut partials: Vec<T> = Vec::with_capacity(8);
    let mut naive = T::zero();
    let mut finite = true;

    for value in values {
        naive = naive + value;
        if !value.is_finite() {
            finite = false;
        }
        if !finite {
            continue;
        }
        let mut x = value;
        let mut kept = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != T::zero() {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }

    if !finite {
        return naive;
    }

    let mut n = partials.len();
    if n == 0 {
        return T::zero();
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = T::zero();
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let y_rounded = hi - x;
        lo = y - y_rounded;
        if lo != T::zero() {
            break;
        }
    }
    if n > 0
        && ((lo < T::zero() && partials[n - 1] < T::zero())
            || (lo > T::zero() && partials[n - 1] > T::zero()))
    {
        let y = lo + lo;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sum_cancels_catastrophically_large_terms() {
        let values = [1e100, 1.0, -1e100, 1e-20];
        assert_eq!(exact_sum(values), 1.0 + 1e-20);
        assert_eq!(values.iter().sum::<f64>(), 1e-20);
    }

    #[test]
    fn exact_sum_matches_known_fsum_results() {
        assert_eq!(exact_sum([0.1f64; 10]), 1.0);
        assert_eq!(exact_sum([0.1f64, 0.2, 0.3]), 0.6);
        assert_eq!(exact_sum(Vec::<f64>::new()), 0.0);
        // half-even fix-up case
        assert_eq!(
            exact_sum([1.0f64, 2f64.powi(-53), 2f64.powi(-106)]),
            1.0000000000000002
        );
        assert_eq!(1.0f64 + 2f64.powi(-53) + 2f64.powi(-106), 1.0);
    }

    #[test]
    fn exact_sum_is_order_independent() {
        let a = [0.3f64, -1.7e-3, 12.5, 4.4e-9, -3.25, 0.1, 7.0e5, -7.0e5];
        let mut b = a;
        b.reverse();
        let mut c = a;
        c.swap(0, 5);
        c.swap(2, 7);
        let s = exact_sum(a);
        assert_eq!(s.to_bits(), exact_sum(b).to_bits());
        assert_eq!(s.to_bits(), exact_sum(c).to_bits());
    }

    #[test]
    fn exact_sum_works_for_f32() {
        let v = [1e8f32, 1.0, -1e8];
        assert_eq!(exact_sum(v), 1.0);
    }

    #[test]
    fn non_finite_falls_back() {
        assert!(exact_sum([1.0f64, f64::INFINITY]).is_infinite());
        assert!(exact_sum([1.0f64, f64::NAN]).is_nan());
    }
}
