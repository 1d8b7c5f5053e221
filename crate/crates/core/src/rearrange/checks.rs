use crate::error::{Error, Result};
use crate::isoperim::level_boundary_measure;
use crate::pspectral::{p_energy, p_mass, PExponent, ScalarField};
use crate::scalar::{dot, Real};

use super::profile::{symmetrize_levels, RadialProfile};

/// Number of thresholds in the uniform grids used by the integral checks.
pub const CHECK_LEVELS: usize = 256;

/// Two evaluations of the same quantity and their relative gap `|lhs - rhs| / |lhs|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison<T> {
    pub lhs: T,
    pub rhs: T,
    pub gap: T,
}

impl<T: Real> Comparison<T> {
    fn new(lhs: T, rhs: T) -> Result<Self> {
        if lhs == T::zero() {
            return Err(Error::ZeroDenominator("comparison left side"));
        }
        Ok(Comparison { lhs, rhs, gap: (lhs - rhs).abs() / lhs.abs() })
    }
}

/// `int |u|^p` on the mesh (lumped) against `beta int |u_*|^p` on the model sphere.
pub fn lp_equimeasurability<T: Real>(
    field: &ScalarField<'_, T>,
    profile: &RadialProfile<T>,
    beta: T,
    p: PExponent<T>,
) -> Result<Comparison<T>> {
    let p = p.get();
    let lhs = p_mass(field.mesh(), field.values(), p, None);
    Comparison::new(lhs, beta * profile.lp_integral(p))
}

/// Energy comparison under symmetrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyaSzego<T> {
    /// `int |grad f|^p` on the mesh.
    pub lhs: T,
    /// `int |grad f_*|^p` on the model sphere.
    pub rhs: T,
    pub beta: T,
    /// `lhs - beta * rhs`; nonnegative when the inequality holds.
    pub margin: T,
}

impl<T: Real> PolyaSzego<T> {
    /// `beta * rhs / lhs`, at most one when the inequality holds.
    pub fn ratio(&self) -> T {
        self.beta * self.rhs / self.lhs
    }

    /// `margin >= -tol * lhs`.
    pub fn holds(&self, tol: T) -> bool {
        self.margin >= -tol * self.lhs
    }
}

/// Compares `int |grad f|^p` with `beta int |grad f_*|^p`.
///
/// The symmetrized profile is sampled on [`CHECK_LEVELS`] uniform thresholds
/// with superlevel measures of the interpolant, and is linear between them.
pub fn polya_szego_check<T: Real>(field: &ScalarField<'_, T>, beta: T, p: PExponent<T>) -> Result<PolyaSzego<T>> {
    let p = p.get();
    let profile = symmetrize_levels(field, beta, CHECK_LEVELS)?;
    let lhs = p_energy(field.mesh(), field.values(), p);
    if lhs == T::zero() {
        return Err(Error::ZeroDenominator("Polya-Szego left side"));
    }
    let rhs = profile.energy(p);
    Ok(PolyaSzego { lhs, rhs, beta, margin: lhs - beta * rhs })
}

/// Uniform grid of `levels` thresholds from `min` to `max`.
pub(crate) fn threshold_grid<T: Real>(lo: T, hi: T, levels: usize) -> Vec<T> {
    (0..levels)
        .map(|k| if k + 1 == levels { hi } else { lo + (hi - lo) * T::of_usize(k) / T::of_usize(levels - 1) })
        .collect()
}

/// `int |grad u|` against `int H^(n-1)({u = t}) dt`.
///
/// The right side is a trapezoid rule over [`CHECK_LEVELS`] uniform
/// thresholds; the two end thresholds are moved inward by `1e-9` of the range
/// so the one-sided limits of the level measure are used there.
pub fn coarea_check<T: Real>(field: &ScalarField<'_, T>) -> Result<Comparison<T>> {
    if field.is_constant() {
        return Err(Error::ConstantField);
    }
    let mesh = field.mesh();
    let lhs: T = (0..mesh.cell_count())
        .map(|c| {
            let g = mesh.cell_gradient(c, field.values());
            mesh.cell_measure()[c] * dot(&g, &g).sqrt()
        })
        .sum();
    let (lo, hi) = (field.min(), field.max());
    let nudge = (hi - lo) * T::of(1e-9);
    let grid = threshold_grid(lo, hi, CHECK_LEVELS);
    let mut lengths = Vec::with_capacity(grid.len());
    for (k, &t) in grid.iter().enumerate() {
        let t = if k == 0 {
            t + nudge
        } else if k + 1 == grid.len() {
            t - nudge
        } else {
            t
        };
        lengths.push(level_boundary_measure(field, t)?);
    }
    let h = (hi - lo) / T::of_usize(CHECK_LEVELS - 1);
    let rhs = lengths.windows(2).map(|w| (w[0] + w[1]) * h / T::of(2.0)).sum();
    Comparison::new(lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{beta, build_icosphere, Domain};
    use crate::rearrange::symmetrize;
    use std::f64::consts::PI;

    fn p(x: f64) -> PExponent<f64> {
        PExponent::new(x).unwrap()
    }

    #[test]
    fn constant_field_equimeasurable() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let b = beta(&m).unwrap();
        let f = ScalarField::constant(&m, 0.7).unwrap();
        let prof = symmetrize(&f, b).unwrap();
        for q in [1.5, 2.0, 3.0] {
            let c = lp_equimeasurability(&f, &prof, b, p(q)).unwrap();
            assert!(c.gap < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn positive_part_of_z() {
        let m = build_icosphere::<f64>(4, 1.0).unwrap();
        let b = beta(&m).unwrap();
        let f = ScalarField::coordinate(&m, 2).unwrap().positive_part();
        let prof = symmetrize(&f, b).unwrap();
        let c = lp_equimeasurability(&f, &prof, b, p(2.0)).unwrap();
        assert!(c.gap < 0.01, "{c:?}");
        // int_{z>0} z^2 dA = 2 pi / 3
        assert!((c.rhs / (2.0 * PI / 3.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn coarea_for_height() {
        let m = build_icosphere::<f64>(5, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        let c = coarea_check(&z).unwrap();
        assert!(c.gap < 0.01 && (c.lhs / (PI * PI) - 1.0).abs() < 0.01 && (c.rhs / (PI * PI) - 1.0).abs() < 0.01, "{c:?}");
    }

    #[test]
    fn coarea_rejects_constant() {
        let m = build_icosphere::<f64>(2, 1.0).unwrap();
        let f = ScalarField::constant(&m, 1.0).unwrap();
        assert!(matches!(coarea_check(&f), Err(Error::ConstantField)));
    }

    #[test]
    fn radial_cap_function_is_an_equality_case() {
        let m = build_icosphere::<f64>(5, 1.0).unwrap();
        let b = beta(&m).unwrap();
        // supported in the cap of colatitude 1.2, decreasing in colatitude, C^1
        let f = ScalarField::from_fn(&m, |x| (x[2] - 1.2f64.cos()).max(0.0).powi(2)).unwrap();
        for q in [1.5, 2.0, 3.0] {
            let ps = polya_szego_check(&f, b, p(q)).unwrap();
            assert!(ps.margin.abs() < 0.01 * ps.lhs, "p={q}: {ps:?}");
        }
    }

    #[test]
    fn non_radial_field_loses_energy() {
        let m = build_icosphere::<f64>(4, 1.0).unwrap();
        let d = Domain::upper_half(&m).unwrap();
        let f = ScalarField::from_fn(&m, |x| {
            let bump = (-((x[0] - 0.4).powi(2) + x[1].powi(2)) * 4.0).exp();
            x[2].max(0.0) * bump
        })
        .unwrap();
        assert!(d.boundary_vertices().iter().all(|&v| f.values()[v] == 0.0));
        let ps = polya_szego_check(&f, beta(&m).unwrap(), p(2.0)).unwrap();
        assert!(ps.margin > 0.0 && ps.ratio() < 0.99, "{ps:?}");
    }
}
