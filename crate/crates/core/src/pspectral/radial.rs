use crate::error::{Error, Result};
use crate::scalar::Real;

use super::PExponent;

/// One-dimensional reductions of the first eigenvalue problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialProblem {
    /// Dirichlet problem on the closed hemisphere of the unit round sphere,
    /// reduced to the geodesic distance from the pole on `[0, pi/2]`.
    Hemisphere,
    /// Dirichlet problem on the unit interval `[0, 1]`.
    Interval,
}

/// `|s|^(1/(p-1)) sign(s)`, the inverse of `t -> |t|^(p-2) t`.
#[inline]
fn phi_inv<T: Real>(s: T, q: T) -> T {
    if s == T::zero() {
        T::zero()
    } else {
        s.abs().powf(q) * s.signum()
    }
}

#[inline]
fn phi<T: Real>(u: T, pm1: T) -> T {
    if u == T::zero() {
        T::zero()
    } else {
        u.abs().powf(pm1) * u.signum()
    }
}

struct Shooting<T> {
    pm1: T,
    q: T,
    n: usize,
    problem: RadialProblem,
    rtol: T,
    atol: T,
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 2_000_000;

impl<T: Real> Shooting<T> {
    fn weight(&self, r: T) -> T {
        match self.problem {
            RadialProblem::Interval => T::one(),
            RadialProblem::Hemisphere => r.sin().powi(self.n as i32 - 1),
        }
    }

    fn rhs(&self, r: T, y: [T; 2], lambda: T) -> [T; 2] {
        let w = self.weight(r);
        [phi_inv(y[1] / w, self.q), -lambda * w * phi(y[0], self.pm1)]
    }

    fn span(&self) -> (T, T) {
        match self.problem {
            RadialProblem::Interval => (T::zero(), T::one()),
            RadialProblem::Hemisphere => (T::of(1e-4), T::FRAC_PI_2()),
        }
    }

    fn start(&self, lambda: T) -> [T; 2] {
        match self.problem {
            RadialProblem::Interval => [T::zero(), T::one()],
            RadialProblem::Hemisphere => {
                // regular solution near the pole: u ~ 1 - (lambda r / n)^q r / (q + 1)
                let r0 = self.span().0;
                let nn = T::of_usize(self.n);
                let u = T::one() - (lambda / nn).powf(self.q) * r0.powf(self.q + T::one()) / (self.q + T::one());
                [u, -lambda * r0.powi(self.n as i32) / nn]
            }
        }
    }

    /// Integrates to the end of the span. Returns `true` when `u` reaches zero
    /// before the end, i.e. `lambda` lies above the first eigenvalue.
    fn overshoots(&self, lambda: T) -> Result<bool> {
        let (mut r, end) = self.span();
        let mut y = self.start(lambda);
        let mut h = (end - r) * T::of(1e-3);
        let hmin = (end - r) * T::of(1e-15);
        let mut steps = 0;
        while r < end {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::NonConvergence { iterations: steps, residual: (end - r).as_f64() });
            }
            if r + h > end {
                h = end - r;
            }
            let mut k = [[T::zero(); 2]; 7];
            k[0] = self.rhs(r, y, lambda);
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = T::of(A[s][j]);
                    ys[0] = ys[0] + h * a * kj[0];
                    ys[1] = ys[1] + h * a * kj[1];
                }
                k[s] = self.rhs(r + T::of(C[s]) * h, ys, lambda);
            }
            let mut y5 = y;
            let mut err = T::zero();
            for i in 0..2 {
                let mut d5 = T::zero();
                let mut d4 = T::zero();
                for s in 0..7 {
                    d5 = d5 + T::of(B5[s]) * k[s][i];
                    d4 = d4 + T::of(B4[s]) * k[s][i];
                }
                y5[i] = y[i] + h * d5;
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((h * (d5 - d4)).abs() / sc);
            }
            if err <= T::one() || h <= hmin {
                r = r + h;
                y = y5;
                if y[0] <= T::zero() {
                    return Ok(true);
                }
            }
            let fac = if err == T::zero() { T::of(5.0) } else { T::of(0.9) * err.powf(T::of(-0.2)) };
            h = h * fac.max(T::of(0.2)).min(T::of(5.0));
            h = h.max(hmin);
        }
        Ok(false)
    }
}

/// First eigenvalue of a one-dimensional reduction by shooting.
///
/// `n` is the dimension of the hemisphere (ignored for the interval). The
/// ODE is integrated with an adaptive Dormand-Prince scheme in the
/// variables `(u, w |u'|^(p-2) u')` and the eigenvalue is bracketed and
/// bisected to machine precision.
pub fn solve_radial_1d<T: Real>(p: PExponent<T>, n: usize, problem: RadialProblem) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let p = p.get();
    let pm1 = p - T::one();
    let tol = T::epsilon().sqrt() * T::of(1e-4);
    let s = Shooting {
        pm1,
        q: T::one() / pm1,
        n,
        problem,
        rtol: tol.max(T::epsilon() * T::of(100.0)),
        atol: tol.max(T::epsilon() * T::of(100.0)) * T::of(1e-2),
    };
    let mut lo = T::one();
    let mut hi = T::one();
    let floor = T::of(1e-6);
    let ceil = T::of(1e8);
    while s.overshoots(lo)? {
        lo = lo / T::of(2.0);
        if lo < floor {
            return Err(Error::BracketNotFound { lo: floor.as_f64(), hi: ceil.as_f64() });
        }
    }
    while !s.overshoots(hi)? {
        hi = hi * T::of(2.0);
        if hi > ceil {
            return Err(Error::BracketNotFound { lo: floor.as_f64(), hi: ceil.as_f64() });
        }
    }
    loop {
        let mid = lo + (hi - lo) / T::of(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if s.overshoots(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo + (hi - lo) / T::of(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Closed form for the unit interval from the first integral
    /// `(p-1)|u'|^p + lambda |u|^p = const`: `lambda = (p-1) (2 pi / (p sin(pi/p)))^p`.
    fn interval_exact(p: f64) -> f64 {
        (p - 1.0) * (2.0 * PI / (p * (PI / p).sin())).powf(p)
    }

    #[test]
    fn interval_matches_closed_form() {
        for p in [1.2, 1.5, 2.0, 3.0, 5.0, 8.0] {
            let l = solve_radial_1d(PExponent::new(p).unwrap(), 1, RadialProblem::Interval).unwrap();
            let e = interval_exact(p);
            assert!((l - e).abs() < 1e-8 * e, "p={p}: {l} vs {e}");
        }
    }

    #[test]
    fn linear_hemisphere_eigenvalue_is_dimension() {
        for n in 1..=4 {
            let l = solve_radial_1d(PExponent::new(2.0).unwrap(), n, RadialProblem::Hemisphere).unwrap();
            assert!((l - n as f64).abs() < 1e-7 * n as f64, "n={n}: {l}");
        }
    }

    #[test]
    fn one_dimensional_hemisphere_is_an_interval() {
        // the half circle of length pi with the pole in the middle
        for p in [1.5, 3.0] {
            let l = solve_radial_1d(PExponent::new(p).unwrap(), 1, RadialProblem::Hemisphere).unwrap();
            let e = interval_exact(p) / PI.powf(p);
            assert!((l - e).abs() < 1e-7 * e, "p={p}: {l} vs {e}");
        }
    }
}
