//! Geodesic caps about the north pole of the unit model sphere `S^n`.

use crate::error::{Error, Result};
use crate::scalar::{bisect, Real};

fn check_dim(n: usize) -> Result<()> {
    if n == 1 || n == 2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("cap geometry implemented for n in {{1, 2}}, got {n}")))
    }
}

/// Total measure of the unit sphere `S^n`: `2 pi` for the circle, `4 pi` for `S^2`.
pub fn sphere_measure<T: Real>(n: usize) -> Result<T> {
    check_dim(n)?;
    Ok(if n == 1 { T::of(2.0) * T::PI() } else { T::of(4.0) * T::PI() })
}

/// Measure of the cap of colatitude `r`.
pub fn cap_volume<T: Real>(r: T, n: usize) -> Result<T> {
    check_dim(n)?;
    if !(r >= T::zero() && r <= T::PI()) {
        return Err(Error::OutOfRange { what: "colatitude", value: r.as_f64(), lo: 0.0, hi: std::f64::consts::PI });
    }
    Ok(cap_volume_unchecked(r, n))
}

#[inline]
pub(crate) fn cap_volume_unchecked<T: Real>(r: T, n: usize) -> T {
    if n == 1 {
        T::of(2.0) * r
    } else {
        T::of(2.0) * T::PI() * (T::one() - r.cos())
    }
}

/// Colatitude of the cap with measure `v`, by bisection on the increasing map `cap_volume`.
pub fn cap_radius<T: Real>(v: T, n: usize) -> Result<T> {
    let total = sphere_measure::<T>(n)?;
    if !(v >= T::zero() && v <= total) {
        return Err(Error::OutOfRange { what: "cap measure", value: v.as_f64(), lo: 0.0, hi: total.as_f64() });
    }
    if v == T::zero() {
        return Ok(T::zero());
    }
    if v == total {
        return Ok(T::PI());
    }
    bisect(|r| cap_volume_unchecked(r, n) - v, T::zero(), T::PI())
        .ok_or_else(|| Error::InvalidArgument("cap radius bracket".into()))
}

/// Boundary measure of the cap: circle length `2 pi sin r`, or two endpoints when `n = 1`.
pub fn cap_boundary<T: Real>(r: T, n: usize) -> Result<T> {
    check_dim(n)?;
    if !(r >= T::zero() && r <= T::PI()) {
        return Err(Error::OutOfRange { what: "colatitude", value: r.as_f64(), lo: 0.0, hi: std::f64::consts::PI });
    }
    Ok(if n == 1 { T::of(2.0) } else { T::of(2.0) * T::PI() * r.sin() })
}

/// Geodesic ball of the model sphere centred at the north pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapGeometry<T: Real> {
    pub n: usize,
    pub radius: T,
}

impl<T: Real> CapGeometry<T> {
    pub fn new(n: usize, radius: T) -> Result<Self> {
        cap_volume(radius, n)?;
        Ok(CapGeometry { n, radius })
    }

    /// Cap whose measure is `v`.
    pub fn with_volume(n: usize, v: T) -> Result<Self> {
        Ok(CapGeometry { n, radius: cap_radius(v, n)? })
    }

    pub fn volume(&self) -> T {
        cap_volume_unchecked(self.radius, self.n)
    }

    pub fn boundary(&self) -> T {
        cap_boundary(self.radius, self.n).expect("validated on construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hemisphere_and_full_sphere() {
        assert!((cap_volume(PI / 2.0, 2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((cap_volume(PI, 2).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!((cap_boundary(PI / 2.0, 2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!(cap_boundary(PI, 2).unwrap().abs() < 1e-14);
        assert_eq!(cap_boundary(0.5, 1).unwrap(), 2.0);
    }

    #[test]
    fn inverse_roundtrip() {
        for n in [1, 2] {
            for r in [0.3f64, 1.0, 2.5] {
                let v = cap_volume(r, n).unwrap();
                assert!((cap_radius(v, n).unwrap() - r).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn out_of_range() {
        assert!(cap_volume(-0.1, 2).is_err());
        assert!(cap_volume(4.0, 2).is_err());
        assert!(cap_radius(13.0, 2).is_err());
        assert!(cap_volume(1.0, 3).is_err());
        assert!(CapGeometry::new(2, 3.5).is_err());
    }

    #[test]
    fn boundary_is_derivative_of_volume() {
        let h = 1e-6;
        for n in [1, 2] {
            for r in [0.2f64, 1.0, 1.5, 2.9] {
                let d = (cap_volume(r + h, n).unwrap() - cap_volume(r - h, n).unwrap()) / (2.0 * h);
                assert!((d - cap_boundary(r, n).unwrap()).abs() < 1e-6);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn volume_strictly_increasing(a in 0.0..PI, b in 0.0..PI) {
            proptest::prop_assume!((a - b).abs() > 1e-9);
            for n in [1, 2] {
                let (va, vb) = (cap_volume(a, n).unwrap(), cap_volume(b, n).unwrap());
                proptest::prop_assert_eq!(a < b, va < vb);
            }
        }
    }
}
