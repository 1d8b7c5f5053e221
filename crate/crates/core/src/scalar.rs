//! Floating point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the geometry and solvers are written against: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; every `f64` is representable (possibly rounded) in `Self`.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("finite scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) type Vec3<T> = [T; 3];

#[inline]
pub(crate) fn sub<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn dot<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn cross<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn norm<T: Real>(a: &Vec3<T>) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn scale<T: Real>(a: &Vec3<T>, s: T) -> Vec3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// `x^e` for `x >= 0`, using `powi` and `sqrt` when `2e` is an integer.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Power<T> {
    Int(i32),
    Half(i32),
    General(T),
}

impl<T: Real> Power<T> {
    pub(crate) fn new(e: T) -> Self {
        let twice = e * T::of(2.0);
        if twice.round() == twice && twice.abs() < T::of(64.0) {
            let k = twice.to_i32().expect("small integer");
            if k % 2 == 0 {
                Power::Int(k / 2)
            } else {
                Power::Half((k - 1) / 2)
            }
        } else {
            Power::General(e)
        }
    }

    #[inline]
    pub(crate) fn of(self, x: T) -> T {
        match self {
            Power::Int(k) => x.powi(k),
            Power::Half(k) => x.powi(k) * x.sqrt(),
            Power::General(e) => x.powf(e),
        }
    }
}

/// Bisection for a root of a function that changes sign on `[lo, hi]`.
///
/// Runs until the bracket can no longer be halved in floating point, so the
/// result is accurate to the last ulp of the bracket.
pub(crate) fn bisect<T: Real, F: FnMut(T) -> T>(mut f: F, mut lo: T, mut hi: T) -> Option<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Some(lo);
    }
    if fhi == T::zero() {
        return Some(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return None;
    }
    for _ in 0..400 {
        let mid = lo + (hi - lo) / T::of(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Some(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(lo + (hi - lo) / T::of(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        let r32 = bisect(|x: f32| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r32 - 2f32.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn power_fast_paths_match_powf() {
        for e in [-0.5f64, 0.5, 1.0, 1.5, 2.0, 3.0, -1.0, 0.25, 4.5, 0.0] {
            let pw = Power::new(e);
            for x in [0.1f64, 0.7, 1.0, 2.5, 13.0] {
                let (a, b) = (pw.of(x), x.powf(e));
                assert!((a - b).abs() <= 1e-14 * b, "{e} {x}");
            }
        }
    }

    #[test]
    fn bisect_rejects_same_sign() {
        assert!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0).is_none());
    }
}
