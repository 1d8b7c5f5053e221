use crate::error::{Error, Result};
use crate::scalar::{Power, Real};

use super::{PExponent, ScalarField};

/// `sum_v m_v |u_v - c|^(p-2) (u_v - c)`, decreasing in `c`.
pub(crate) fn constraint_value<T: Real>(values: &[T], mass: &[T], c: T, p: T) -> T {
    let q = p - T::one();
    values
        .iter()
        .zip(mass)
        .map(|(&u, &m)| {
            let d = u - c;
            if d == T::zero() {
                T::zero()
            } else {
                m * d.abs().powf(q) * d.signum()
            }
        })
        .sum()
}

/// Shift `c` with `sum_v m_v |u_v - c|^(p-2) (u_v - c) = 0`.
///
/// Bisection on `[min u, max u]`; a Newton step is taken instead of the
/// midpoint whenever it lands strictly inside the current bracket.
pub(crate) fn constraint_shift<T: Real>(values: &[T], mass: &[T], p: T) -> Result<T> {
    let mut lo = values.iter().copied().fold(T::infinity(), T::min);
    let mut hi = values.iter().copied().fold(T::neg_infinity(), T::max);
    if !(lo < hi) {
        return Err(Error::Projection("field is constant".into()));
    }
    let q = p - T::one();
    let pw = Power::new(q - T::one());
    // returns the residual, its derivative and the residual's magnitude scale
    let eval = |c: T| -> (T, T, T) {
        let mut g = T::zero();
        let mut dg = T::zero();
        let mut scale = T::zero();
        for (&u, &m) in values.iter().zip(mass) {
            let d = u - c;
            if d != T::zero() {
                let a = m * pw.of(d.abs());
                g = g + a * d;
                dg = dg + a;
                scale = scale + a * d.abs();
            }
        }
        (g, q * dg, scale)
    };
    let (glo, _, _) = eval(lo);
    let (ghi, _, _) = eval(hi);
    if glo == T::zero() {
        return Ok(lo);
    }
    if ghi == T::zero() {
        return Ok(hi);
    }
    if !(glo > T::zero() && ghi < T::zero()) {
        return Err(Error::Projection("no sign change on [min, max]".into()));
    }
    // the previous iterate usually satisfies the constraint already
    let mut c = if lo < T::zero() && hi > T::zero() { T::zero() } else { lo + (hi - lo) / T::of(2.0) };
    for _ in 0..400 {
        let (g, dg, scale) = eval(c);
        if g.abs() <= T::epsilon() * scale {
            return Ok(c);
        }
        if g > T::zero() {
            lo = c;
        } else {
            hi = c;
        }
        let mid = lo + (hi - lo) / T::of(2.0);
        if mid <= lo || mid >= hi {
            return Ok(c);
        }
        let newton = c + g / dg;
        let next = if newton.is_finite() && newton > lo && newton < hi { newton } else { mid };
        if next == c {
            return Ok(c);
        }
        c = next;
    }
    Ok(c)
}

/// Projects onto `int |u|^(p-2) u = 0` by subtracting the unique constant that
/// makes the constraint vanish.
pub fn project_constraint<'m, T: Real>(field: &ScalarField<'m, T>, p: PExponent<T>) -> Result<ScalarField<'m, T>> {
    let c = constraint_shift(field.values(), field.mesh().vertex_measure(), p.get())?;
    Ok(field.map(|u| u - c))
}

/// `|int |u|^(p-2) u dH^n|` under lumped quadrature.
pub fn constraint_residual<T: Real>(field: &ScalarField<'_, T>, p: PExponent<T>) -> T {
    constraint_value(field.values(), field.mesh().vertex_measure(), T::zero(), p.get()).abs()
}
