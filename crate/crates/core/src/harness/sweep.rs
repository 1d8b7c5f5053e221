use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manifold::{beta, build_ellipsoid, diameter, Mesh};
use crate::pspectral::{closed_eigen, solve_radial_1d, PExponent, RadialProblem, SolverOptions};
use crate::scalar::Real;

/// Smallest sampled curvature accepted as `K >= 1`.
pub const MIN_CURVATURE: f64 = 0.99;

/// One eigenvalue comparison against the model sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord<T> {
    /// Ellipsoid aspect ratio, when the mesh comes from the family.
    pub aspect: Option<T>,
    pub p: T,
    pub level: Option<usize>,
    pub lambda_m: T,
    pub lambda_sn: T,
    /// `lambda_m / lambda_sn`.
    pub ratio: T,
    pub diameter: T,
    pub beta: T,
    pub min_curvature: T,
    /// Curvature is constant over the mesh, the equality case.
    pub round: bool,
    pub iterations: usize,
    pub converged: bool,
    pub residual: T,
    /// Reason the row could not be computed; numeric fields are NaN then.
    pub error: Option<String>,
}

impl<T: Real> SweepRecord<T> {
    fn failed(aspect: Option<T>, p: T, level: Option<usize>, e: &Error) -> Self {
        let nan = T::nan();
        SweepRecord {
            aspect,
            p,
            level,
            lambda_m: nan,
            lambda_sn: nan,
            ratio: nan,
            diameter: nan,
            beta: nan,
            min_curvature: nan,
            round: false,
            iterations: 0,
            converged: false,
            residual: nan,
            error: Some(e.to_string()),
        }
    }

    pub fn is_failed(&self) -> bool {
        self.error.is_some()
    }

    /// `ratio >= 1 - tol`.
    pub fn passes(&self, tol: T) -> bool {
        !self.is_failed() && self.ratio >= T::one() - tol
    }
}

/// Compares the first nonzero closed eigenvalue of a mesh with `K >= 1`
/// against the round sphere of the same dimension.
pub fn matei_check<T: Real>(mesh: &Mesh<T>, p: PExponent<T>, opts: &SolverOptions<T>) -> Result<SweepRecord<T>> {
    let curvature = mesh
        .curvature()
        .ok_or_else(|| Error::InvalidArgument("mesh carries no curvature samples".into()))?;
    let kmin = curvature.iter().copied().fold(T::infinity(), T::min);
    let kmax = curvature.iter().copied().fold(T::neg_infinity(), T::max);
    if kmin < T::of(MIN_CURVATURE) {
        return Err(Error::InvalidArgument(format!("sampled curvature {kmin} is below 1")));
    }
    let lambda_sn = solve_radial_1d(p, mesh.dimension(), RadialProblem::Hemisphere)?;
    let eig = closed_eigen(mesh, p, opts)?;
    Ok(SweepRecord {
        aspect: None,
        p: p.get(),
        level: None,
        lambda_m: eig.lambda,
        lambda_sn,
        ratio: eig.lambda / lambda_sn,
        diameter: diameter(mesh)?,
        beta: beta(mesh)?,
        min_curvature: kmin,
        round: kmax - kmin <= T::of(1e-9) * kmax,
        iterations: eig.iterations,
        converged: eig.converged,
        residual: eig.residual,
        error: None,
    })
}

/// Runs [`matei_check`] on the curvature-normalized ellipsoid of every aspect
/// for every `p`. Rows are computed in parallel and returned ordered by
/// aspect, then `p`; a failing row is recorded and the sweep continues.
pub fn pinching_sweep<T: Real>(
    aspects: &[T],
    ps: &[PExponent<T>],
    level: usize,
    opts: &SolverOptions<T>,
) -> Vec<SweepRecord<T>> {
    let meshes: Vec<Result<Mesh<T>>> = aspects.par_iter().map(|&a| build_ellipsoid(a, level, true)).collect();
    let jobs: Vec<(usize, PExponent<T>)> =
        (0..aspects.len()).flat_map(|i| ps.iter().map(move |&p| (i, p))).collect();
    let mut rows: Vec<SweepRecord<T>> = jobs
        .par_iter()
        .map(|&(i, p)| {
            let a = Some(aspects[i]);
            let row = meshes[i].as_ref().map_err(Clone::clone).and_then(|m| matei_check(m, p, opts));
            match row {
                Ok(r) => SweepRecord { aspect: a, level: Some(level), ..r },
                Err(e) => {
                    log::warn!("sweep row a={} p={} failed: {e}", aspects[i], p.get());
                    SweepRecord::failed(a, p.get(), Some(level), &e)
                }
            }
        })
        .collect();
    rows.sort_by(|x, y| {
        let key = |r: &SweepRecord<T>| (r.aspect.unwrap_or(T::zero()), r.p);
        key(x).partial_cmp(&key(y)).expect("finite sweep parameters")
    });
    rows
}

/// `(diameter, ratio)` of the successful rows at exponent `p`, by increasing diameter.
pub fn trend<T: Real>(rows: &[SweepRecord<T>], p: T) -> Vec<(T, T)> {
    let mut curve: Vec<(T, T)> =
        rows.iter().filter(|r| r.p == p && !r.is_failed()).map(|r| (r.diameter, r.ratio)).collect();
    curve.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    curve
}

/// Largest relative increase of the ratio between consecutive points of a
/// curve sorted by diameter; zero for a non-increasing curve.
pub fn trend_violation<T: Real>(curve: &[(T, T)]) -> T {
    curve
        .windows(2)
        .map(|w| ((w[1].1 - w[0].1) / w[0].1).max(T::zero()))
        .fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_circle, build_icosphere};

    fn p(x: f64) -> PExponent<f64> {
        PExponent::new(x).unwrap()
    }

    #[test]
    fn round_sphere_is_equality_case() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let r = matei_check(&m, p(2.0), &SolverOptions::default()).unwrap();
        assert!(r.round);
        assert!((r.ratio - 1.0).abs() < 0.03, "{}", r.ratio);
        assert!((r.lambda_sn - 2.0).abs() < 1e-8);
    }

    #[test]
    fn circle_ratio_is_one() {
        let m = build_circle::<f64>(256, 1.0).unwrap();
        let r = matei_check(&m, p(3.0), &SolverOptions::default()).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-3, "{}", r.ratio);
    }

    #[test]
    fn low_curvature_is_rejected() {
        let m = build_icosphere::<f64>(2, 1.5).unwrap();
        assert!(matei_check(&m, p(2.0), &SolverOptions::default()).is_err());
    }

    #[test]
    fn failed_rows_do_not_stop_the_sweep() {
        let rows = pinching_sweep(&[1.0, -3.0], &[p(2.0)], 2, &SolverOptions::default());
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().any(|r| r.is_failed()));
        assert!(rows.iter().any(|r| !r.is_failed()));
    }

    #[test]
    fn trend_violation_measures_increases() {
        let c = [(1.0f64, 1.3f64), (2.0, 1.2), (3.0, 1.212)];
        assert!((trend_violation(&c) - 0.01).abs() < 1e-12);
        assert_eq!(trend_violation(&c[..2]), 0.0);
    }
}
