use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::pspectral::ScalarField;
use crate::scalar::{norm, sub, Real, Vec3};

/// Piecewise-linear level set `{u = t}` of a vertex field.
#[derive(Debug, Clone)]
pub struct LevelSetCurve<T: Real> {
    pub threshold: T,
    /// Crossing points joined inside each cell. On curves every crossing is a
    /// degenerate segment `[x, x]`.
    pub segments: Vec<[Vec3<T>; 2]>,
    /// Total length (surfaces) or number of crossings (curves).
    pub measure: T,
}

impl<T: Real> LevelSetCurve<T> {
    /// Every segment endpoint is shared by exactly two segments.
    pub fn is_closed(&self) -> bool {
        let key = |x: &Vec3<T>| [x[0].as_f64().to_bits(), x[1].as_f64().to_bits(), x[2].as_f64().to_bits()];
        let mut count: HashMap<[u64; 3], usize> = HashMap::new();
        for s in &self.segments {
            *count.entry(key(&s[0])).or_default() += 1;
            *count.entry(key(&s[1])).or_default() += 1;
        }
        count.values().all(|&c| c == 2)
    }
}

/// Point where `u = t` on the edge `(a, b)`, interpolated from the lower index
/// so both cells sharing the edge produce bit-identical points.
fn crossing<T: Real>(x: &[Vec3<T>], u: &[T], a: usize, b: usize, t: T) -> Vec3<T> {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let s = (t - u[a]) / (u[b] - u[a]);
    let d = sub(&x[b], &x[a]);
    [x[a][0] + s * d[0], x[a][1] + s * d[1], x[a][2] + s * d[2]]
}

pub(crate) fn check_level<T: Real>(field: &ScalarField<'_, T>, t: T) -> Result<()> {
    let (lo, hi) = (field.min(), field.max());
    if !(t > lo && t < hi) {
        return Err(Error::LevelOutOfRange { t: t.as_f64(), min: lo.as_f64(), max: hi.as_f64() });
    }
    Ok(())
}

/// Level set `{u = t}` by linear interpolation along edges whose endpoints
/// lie on different sides of `{u > t}`.
pub fn level_set<T: Real>(field: &ScalarField<'_, T>, t: T) -> Result<LevelSetCurve<T>> {
    check_level(field, t)?;
    let mesh = field.mesh();
    let u = field.values();
    let x = mesh.vertices();
    let mut segments = Vec::new();
    let mut measure = T::zero();
    for cell in mesh.cells() {
        let mut pts: [Vec3<T>; 3] = [[T::zero(); 3]; 3];
        let mut k = 0;
        for i in 0..cell.len() {
            for j in i + 1..cell.len() {
                let (a, b) = (cell[i], cell[j]);
                if (u[a] > t) != (u[b] > t) {
                    pts[k] = crossing(x, u, a, b, t);
                    k += 1;
                }
            }
        }
        match (mesh.dimension(), k) {
            (1, 1) => {
                segments.push([pts[0], pts[0]]);
                measure = measure + T::one();
            }
            (2, 2) => {
                measure = measure + norm(&sub(&pts[1], &pts[0]));
                segments.push([pts[0], pts[1]]);
            }
            _ => {}
        }
    }
    Ok(LevelSetCurve { threshold: t, segments, measure })
}

/// `H^(n-1)` measure of `{u = t}`.
pub fn level_boundary_measure<T: Real>(field: &ScalarField<'_, T>, t: T) -> Result<T> {
    Ok(level_set(field, t)?.measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_circle, build_icosphere};
    use std::f64::consts::PI;

    #[test]
    fn equator_length() {
        let m = build_icosphere::<f64>(5, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        let c = level_set(&z, 0.0).unwrap();
        assert!((c.measure / (2.0 * PI) - 1.0).abs() < 0.01, "{}", c.measure);
        // inscribed 160-gon
        assert!((c.measure - 320.0 * (PI / 160.0).sin()).abs() < 1e-10);
    }

    #[test]
    fn latitude_circle_is_closed() {
        let m = build_icosphere::<f64>(4, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        let c = level_set(&z, 0.37).unwrap();
        assert!(c.is_closed());
        let exact = 2.0 * PI * (1.0 - 0.37f64 * 0.37).sqrt();
        assert!((c.measure / exact - 1.0).abs() < 0.01);
    }

    #[test]
    fn out_of_range_levels_rejected() {
        let m = build_icosphere::<f64>(2, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        assert!(level_set(&z, 1.0).is_err());
        assert!(level_set(&z, 1.5).is_err());
        assert!(level_set(&z, -1.0).is_err());
    }

    #[test]
    fn curve_level_set_counts_crossings() {
        let m = build_circle::<f64>(101, 1.0).unwrap();
        let y = ScalarField::coordinate(&m, 1).unwrap();
        assert_eq!(level_boundary_measure(&y, 0.3).unwrap(), 2.0);
    }

    #[test]
    fn interpolation_error_shrinks_with_level() {
        let err = |l: usize| {
            let m = build_icosphere::<f64>(l, 1.0).unwrap();
            let z = ScalarField::coordinate(&m, 2).unwrap();
            let t = 0.3;
            (level_boundary_measure(&z, t).unwrap() - 2.0 * PI * (1.0f64 - t * t).sqrt()).abs()
        };
        let (e4, e5, e6) = (err(4), err(5), err(6));
        assert!(e5 < 0.5 * e4 && e6 < 0.5 * e5, "{e4} {e5} {e6}");
    }
}
