use crate::error::{Error, Result};
use crate::isoperim::superlevel_area;
use crate::manifold::{cap_boundary, cap_radius, cap_volume, sphere_measure};
use crate::pspectral::ScalarField;
use crate::scalar::Real;

use super::distribution::distribution;

/// Radial non-increasing function on the model sphere `S^n`, linear between knots.
#[derive(Debug, Clone)]
pub struct RadialProfile<T> {
    n: usize,
    knots: Vec<T>,
    values: Vec<T>,
    support: T,
}

// 5-point Gauss-Legendre on [-1, 1]
const GL_X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
const GL_W: [f64; 5] =
    [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
const MAX_PANEL: f64 = 0.05;

/// `int_a^b f(r) dr` by composite 5-point Gauss-Legendre with panels of at most `MAX_PANEL`.
fn gauss<T: Real, F: Fn(T) -> T>(a: T, b: T, f: F) -> T {
    if !(b > a) {
        return T::zero();
    }
    let panels = ((b - a) / T::of(MAX_PANEL)).ceil().to_usize().unwrap_or(1).max(1);
    let h = (b - a) / T::of_usize(panels);
    let mut s = T::zero();
    for k in 0..panels {
        let lo = a + h * T::of_usize(k);
        let mid = lo + h / T::of(2.0);
        for (x, w) in GL_X.iter().zip(GL_W) {
            s = s + T::of(w) * f(mid + h / T::of(2.0) * T::of(*x));
        }
    }
    s * h / T::of(2.0)
}

impl<T: Real> RadialProfile<T> {
    /// Builds a profile from knots sorted by increasing colatitude. `support`
    /// is the radius up to which the last value extends.
    pub fn new(n: usize, knots: Vec<T>, values: Vec<T>, support: T) -> Result<Self> {
        sphere_measure::<T>(n)?;
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::InvalidArgument("profile needs matching, nonempty knots and values".into()));
        }
        let ordered = knots.windows(2).all(|w| w[0] <= w[1]) && values.windows(2).all(|w| w[0] >= w[1]);
        let in_range = knots[0] >= T::zero() && support <= T::PI() && *knots.last().expect("nonempty") <= support;
        if !ordered || !in_range {
            return Err(Error::InvalidArgument("profile must be non-increasing on ordered knots in [0, pi]".into()));
        }
        Ok(RadialProfile { n, knots, values, support })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Radius of the symmetrized support region.
    pub fn support_radius(&self) -> T {
        self.support
    }

    pub fn max(&self) -> T {
        self.values[0]
    }

    pub fn min(&self) -> T {
        *self.values.last().expect("nonempty")
    }

    /// Profile value at colatitude `r`: linear between knots, constant beyond them.
    pub fn value(&self, r: T) -> T {
        let k = self.knots.partition_point(|&x| x <= r);
        if k == 0 {
            return self.values[0];
        }
        if k == self.knots.len() {
            return self.min();
        }
        let (r0, r1) = (self.knots[k - 1], self.knots[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        if r1 == r0 {
            return v1;
        }
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    }

    /// Magnitude of the slope of the linear piece starting at or containing `r`;
    /// zero outside the knots.
    pub fn slope_at(&self, r: T) -> T {
        let k = self.knots.partition_point(|&x| x <= r);
        if k == 0 || k == self.knots.len() {
            return T::zero();
        }
        let (r0, r1) = (self.knots[k - 1], self.knots[k]);
        if r1 > r0 {
            (self.values[k - 1] - self.values[k]) / (r1 - r0)
        } else {
            T::zero()
        }
    }

    /// `int_{B(support)} |u_*|^p` on the unit model sphere.
    pub fn lp_integral(&self, p: T) -> T {
        self.lp_integral_within(self.support, p)
    }

    /// `int_{B(radius)} |u_*|^p`, with `radius` clamped to the support.
    pub fn lp_integral_within(&self, radius: T, p: T) -> T {
        let n = self.n;
        let end = radius.min(self.support);
        let f = |r: T| self.value(r).abs().powf(p) * cap_boundary(r, n).unwrap_or(T::zero());
        let mut s = T::zero();
        let mut lo = T::zero();
        for &k in &self.knots {
            if k >= end {
                break;
            }
            s = s + gauss(lo, k, &f);
            lo = k;
        }
        s + gauss(lo, end, &f)
    }

    /// `int |grad u_*|^p` with the slope of each linear piece; flat pieces contribute nothing.
    pub fn energy(&self, p: T) -> T {
        self.energy_within(self.support, p)
    }

    /// `int_{B(radius)} |grad u_*|^p`.
    pub fn energy_within(&self, radius: T, p: T) -> T {
        let vol = |r: T| cap_volume(r, self.n).unwrap_or(T::zero());
        let mut s = T::zero();
        for k in 1..self.knots.len() {
            let r0 = self.knots[k - 1];
            let r1 = self.knots[k].min(radius);
            if r0 >= radius {
                break;
            }
            let dv = self.values[k - 1] - self.values[k];
            if r1 > r0 && dv > T::zero() {
                let slope = dv / (self.knots[k] - r0);
                s = s + slope.powf(p) * (vol(r1) - vol(r0));
            }
        }
        s
    }
}

pub(crate) fn radius_for<T: Real>(mu: T, beta: T, n: usize) -> Result<T> {
    let full = sphere_measure::<T>(n)?;
    let mut v = mu / beta;
    // the mesh's own beta reproduces the full sphere up to rounding
    if v > full && v <= full * (T::one() + T::of(1e-10)) {
        v = full;
    }
    cap_radius(v, n).map_err(|_| Error::InconsistentBeta(beta.as_f64()))
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if !(beta > T::zero() && beta.is_finite()) {
        return Err(Error::InvalidArgument("beta must be positive".into()));
    }
    if beta > T::one() {
        log::warn!("beta = {beta} exceeds 1; symmetrized sets may not fit in the model sphere");
    }
    Ok(())
}

/// Schwarz symmetrization: the radial non-increasing function on `S^n` whose
/// superlevel sets are caps of measure `H^n({u > t}) / beta`.
///
/// Knots sit at every distinct vertex value `t_i`, at the colatitude of the
/// cap of measure `mu_i / beta` from the lumped distribution.
pub fn symmetrize<T: Real>(field: &ScalarField<'_, T>, beta: T) -> Result<RadialProfile<T>> {
    check_beta(beta)?;
    let d = distribution(field);
    let n = d.dimension();
    let mut knots = Vec::with_capacity(d.len());
    let mut values = Vec::with_capacity(d.len());
    for (&t, &mu) in d.thresholds().iter().zip(d.measures()).rev() {
        knots.push(radius_for(mu, beta, n)?);
        values.push(t);
    }
    let support = radius_for(d.total(), beta, n)?;
    RadialProfile::new(n, knots, values, support)
}

/// Symmetrization sampled on `levels` equally spaced thresholds from the
/// field's minimum to its maximum, with superlevel measures taken exactly
/// from the vertex-linear interpolant.
pub fn symmetrize_levels<T: Real>(field: &ScalarField<'_, T>, beta: T, levels: usize) -> Result<RadialProfile<T>> {
    check_beta(beta)?;
    if levels < 2 {
        return Err(Error::InvalidArgument("at least two levels are needed".into()));
    }
    if field.is_constant() {
        return Err(Error::ConstantField);
    }
    let n = field.mesh().dimension();
    let (lo, hi) = (field.min(), field.max());
    let mut knots = Vec::with_capacity(levels);
    let mut values = Vec::with_capacity(levels);
    for k in (0..levels).rev() {
        let t = if k == levels - 1 { hi } else { lo + (hi - lo) * T::of_usize(k) / T::of_usize(levels - 1) };
        knots.push(radius_for(superlevel_area(field, t), beta, n)?);
        values.push(t);
    }
    let total = crate::manifold::total_measure(field.mesh());
    let support = radius_for(total, beta, n)?;
    // rounding in the cap inversion can reorder nearly equal radii
    for k in 1..knots.len() {
        knots[k] = knots[k].max(knots[k - 1]);
    }
    RadialProfile::new(n, knots, values, support)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{beta, build_icosphere};
    use std::f64::consts::PI;

    #[test]
    fn constant_field_symmetrizes_to_constant() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let f = ScalarField::constant(&m, 1.5).unwrap();
        let prof = symmetrize(&f, beta(&m).unwrap()).unwrap();
        assert!((prof.support_radius() - PI).abs() < 1e-12);
        for r in [0.0, 1.0, 3.0, PI] {
            assert_eq!(prof.value(r), 1.5);
        }
    }

    #[test]
    fn radial_field_is_reproduced() {
        // cos of the colatitude is already symmetric on the round sphere
        let m = build_icosphere::<f64>(5, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        let prof = symmetrize(&z, beta(&m).unwrap()).unwrap();
        let h = m.mean_edge_length();
        for r in [0.2, 0.7, 1.3, 2.0, 2.9] {
            // the knot at value cos(r) lies within an edge of r
            let v = prof.value(r);
            assert!((v.acos() - r).abs() < h, "r={r}: {}", v.acos());
        }
        assert_eq!(prof.max(), z.max());
        assert_eq!(prof.min(), z.min());
    }

    #[test]
    fn volume_matches_at_knots() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let f = ScalarField::from_fn(&m, |x| (2.0 * x[0] + x[1]).exp()).unwrap();
        let b = beta(&m).unwrap();
        let prof = symmetrize(&f, b).unwrap();
        let d = distribution(&f);
        for (k, (&mu, &t)) in d.measures().iter().rev().zip(d.thresholds().iter().rev()).enumerate() {
            assert_eq!(prof.values()[k], t);
            assert!((cap_volume(prof.knots()[k], 2).unwrap() * b - mu).abs() < 1e-10);
        }
    }

    #[test]
    fn inconsistent_beta_rejected() {
        let m = build_icosphere::<f64>(2, 1.0).unwrap();
        let f = ScalarField::coordinate(&m, 0).unwrap();
        assert!(matches!(symmetrize(&f, 0.5), Err(Error::InconsistentBeta(_))));
        assert!(symmetrize(&f, 0.0).is_err());
    }

    #[test]
    fn gauss_integrates_cap_boundary() {
        let v = gauss(0.0, PI, |r: f64| 2.0 * PI * r.sin());
        assert!((v - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn linear_profile_energy() {
        // u_* = pi - r on the whole sphere: |grad|^p = 1 everywhere
        let prof = RadialProfile::new(2, vec![0.0, PI], vec![PI, 0.0], PI).unwrap();
        assert!((prof.energy(3.0) - 4.0 * PI).abs() < 1e-12);
        assert!((prof.value(1.0) - (PI - 1.0)).abs() < 1e-15);
    }
}
