use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manifold::{beta, cap_boundary, cap_radius, diameter, total_measure, Mesh};
use crate::pspectral::ScalarField;
use crate::scalar::Real;

use super::area::superlevel_area;
use super::level::{check_level, level_boundary_measure};

/// One superlevel domain measured against its model cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GromovSample<T> {
    /// Index of the field in the battery.
    pub field: usize,
    pub threshold: T,
    /// `H^n({u > t})` of the interpolant.
    pub area: T,
    /// `H^(n-1)({u = t})`.
    pub boundary: T,
    /// `boundary / (beta * |boundary of the cap of measure area / beta|)`.
    pub ratio: T,
}

/// Measures `{u > t}` and compares its boundary with the cap of matching volume.
pub fn gromov_sample<T: Real>(field: &ScalarField<'_, T>, t: T, beta: T) -> Result<GromovSample<T>> {
    if !(beta > T::zero()) {
        return Err(Error::InvalidArgument("beta must be positive".into()));
    }
    check_level(field, t)?;
    let mesh = field.mesh();
    let area = superlevel_area(field, t);
    if !(area > T::zero() && area < total_measure(mesh)) {
        return Err(Error::DegenerateLevelSet(t.as_f64()));
    }
    let boundary = level_boundary_measure(field, t)?;
    let n = mesh.dimension();
    let r = cap_radius(area / beta, n).map_err(|_| Error::InconsistentBeta(beta.as_f64()))?;
    let model = beta * cap_boundary(r, n)?;
    if !(model > T::zero()) {
        return Err(Error::DegenerateLevelSet(t.as_f64()));
    }
    Ok(GromovSample { field: 0, threshold: t, area, boundary, ratio: boundary / model })
}

/// Ratio of the boundary measure of `{u > t}` to `beta` times the boundary of
/// the model cap of measure `H^n({u > t}) / beta`. Values at least one confirm
/// the isoperimetric comparison on that domain.
pub fn gromov_ratio<T: Real>(field: &ScalarField<'_, T>, t: T, beta: T) -> Result<T> {
    Ok(gromov_sample(field, t, beta)?.ratio)
}

/// Equal-width histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<T> {
    /// `counts.len() + 1` bin edges.
    pub edges: Vec<T>,
    pub counts: Vec<usize>,
}

impl<T: Real> Histogram<T> {
    pub fn new(values: &[T], bins: usize) -> Self {
        let bins = bins.max(1);
        let lo = values.iter().copied().fold(T::infinity(), T::min);
        let hi = values.iter().copied().fold(T::neg_infinity(), T::max);
        if values.is_empty() {
            return Histogram { edges: Vec::new(), counts: Vec::new() };
        }
        let width = (hi - lo) / T::of_usize(bins);
        let edges = (0..=bins).map(|k| if k == bins { hi } else { lo + width * T::of_usize(k) }).collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let k = if width > T::zero() { ((v - lo) / width).to_usize().unwrap_or(0).min(bins - 1) } else { 0 };
            counts[k] += 1;
        }
        Histogram { edges, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Gromov ratios over a battery of superlevel domains on one closed mesh.
#[derive(Debug, Clone)]
pub struct CrokeProfile<T> {
    pub diameter: T,
    pub beta: T,
    pub min_ratio: T,
    pub samples: Vec<GromovSample<T>>,
    pub histogram: Histogram<T>,
}

pub const HISTOGRAM_BINS: usize = 20;

/// Smallest Gromov ratio over `battery`, each field paired with its thresholds.
///
/// The minimum is an empirical lower estimate of the isoperimetric constant
/// of the mesh; it is reported together with the mesh diameter.
pub fn croke_profile<'m, T: Real>(
    mesh: &'m Mesh<T>,
    battery: &[(ScalarField<'m, T>, Vec<T>)],
) -> Result<CrokeProfile<T>> {
    let jobs: usize = battery.iter().map(|(_, ts)| ts.len()).sum();
    if jobs == 0 {
        return Err(Error::EmptyBattery);
    }
    if battery.iter().any(|(f, _)| !std::ptr::eq(f.mesh(), mesh)) {
        return Err(Error::InvalidArgument("battery field on a different mesh".into()));
    }
    let b = beta(mesh)?;
    let per_field: Vec<Result<Vec<GromovSample<T>>>> = battery
        .par_iter()
        .enumerate()
        .map(|(i, (f, ts))| {
            ts.iter()
                .map(|&t| gromov_sample(f, t, b).map(|s| GromovSample { field: i, ..s }))
                .collect()
        })
        .collect();
    let mut samples = Vec::with_capacity(jobs);
    for r in per_field {
        samples.extend(r?);
    }
    let ratios: Vec<T> = samples.iter().map(|s| s.ratio).collect();
    let min_ratio = ratios.iter().copied().fold(T::infinity(), T::min);
    Ok(CrokeProfile {
        diameter: diameter(mesh)?,
        beta: b,
        min_ratio,
        histogram: Histogram::new(&ratios, HISTOGRAM_BINS),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::build_icosphere;

    #[test]
    fn caps_on_round_sphere_are_extremal() {
        let m = build_icosphere::<f64>(5, 1.0).unwrap();
        let b = beta(&m).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        for t in [-0.8, -0.3, 0.0, 0.5, 0.9] {
            let r = gromov_ratio(&z, t, b).unwrap();
            assert!((r - 1.0).abs() < 0.01, "t={t}: {r}");
        }
    }

    #[test]
    fn degenerate_levels_rejected() {
        let m = build_icosphere::<f64>(2, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        assert!(gromov_ratio(&z, 1.0, 1.0).is_err());
        assert!(gromov_ratio(&z, 0.0, 0.0).is_err());
        // beta far too small: the cap would exceed the sphere
        assert!(matches!(gromov_ratio(&z, -0.5, 0.1), Err(Error::InconsistentBeta(_))));
    }

    #[test]
    fn histogram_counts_everything() {
        let v = [1.0, 1.2, 1.2, 3.0, 2.5, 1.0001];
        let h = Histogram::new(&v, 4);
        assert_eq!(h.total(), v.len());
        assert_eq!(h.edges.len(), 5);
        let flat = Histogram::new(&[2.0, 2.0], 3);
        assert_eq!(flat.total(), 2);
    }

    #[test]
    fn empty_battery_rejected() {
        let m = build_icosphere::<f64>(1, 1.0).unwrap();
        assert!(matches!(croke_profile(&m, &[]), Err(Error::EmptyBattery)));
    }
}
