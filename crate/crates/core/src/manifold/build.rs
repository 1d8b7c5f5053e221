//! Mesh families: subdivided icospheres, prolate ellipsoids of revolution,
//! polygonal circles and intervals.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::{norm, scale, Real, Vec3};

use super::Mesh;

/// Largest accepted subdivision level (level 8 already has 655 362 vertices).
pub const MAX_LEVEL: usize = 8;

/// Largest accepted ellipsoid aspect ratio.
pub const MAX_ASPECT: f64 = 2.0;

/// Unit-sphere vertex positions and triangles of a subdivided icosahedron.
///
/// The icosahedron has a vertex at each pole and two pentagonal rings at
/// `z = ±1/sqrt(5)`, so from level 1 on the equator `z = 0` is an edge loop.
/// The lower half is built as the exact point reflection of the upper half,
/// which subdivision and normalization preserve bit for bit.
fn icosahedron_subdivided<T: Real>(level: usize) -> (Vec<Vec3<T>>, Vec<usize>) {
    let h = T::one() / T::of(5.0).sqrt();
    let rho = T::of(2.0) * h;
    let mut verts: Vec<Vec3<T>> = Vec::with_capacity(12);
    verts.push([T::zero(), T::zero(), T::one()]);
    for k in 0..5 {
        let a = T::of(2.0) * T::PI() * T::of_usize(k) / T::of(5.0);
        verts.push([rho * a.cos(), rho * a.sin(), h]);
    }
    // lower ring L_k = -U_{k+3}, south pole = -north pole
    for k in 0..5 {
        let u = verts[1 + (k + 3) % 5];
        verts.push([-u[0], -u[1], -u[2]]);
    }
    verts.push([-T::zero(), -T::zero(), -T::one()]);

    let n = 0;
    let s = 11;
    let up = |k: usize| 1 + k % 5;
    let lo = |k: usize| 6 + k % 5;
    let mut tris = Vec::with_capacity(60);
    for k in 0..5 {
        tris.extend_from_slice(&[n, up(k), up(k + 1)]);
        tris.extend_from_slice(&[up(k), lo(k), up(k + 1)]);
        tris.extend_from_slice(&[up(k + 1), lo(k), lo(k + 1)]);
        tris.extend_from_slice(&[s, lo(k + 1), lo(k)]);
    }

    for _ in 0..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3<T>>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                let m = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
                let len = norm(&m);
                verts.push(scale(&m, T::one() / len));
                verts.len() - 1
            })
        };
        for t in tris.chunks(3) {
            let (a, b, c) = (t[0], t[1], t[2]);
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend_from_slice(&[a, ab, ca, b, bc, ab, c, ca, bc, ab, bc, ca]);
        }
        tris = next;
    }
    (verts, tris)
}

fn check_level(level: usize) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::OutOfRange {
            what: "subdivision level",
            value: level as f64,
            lo: 0.0,
            hi: MAX_LEVEL as f64,
        });
    }
    Ok(())
}

/// Subdivided icosahedron projected onto the sphere of the given radius.
pub fn build_icosphere<T: Real>(level: usize, radius: T) -> Result<Mesh<T>> {
    check_level(level)?;
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::InvalidArgument("icosphere radius must be positive".into()));
    }
    let (verts, tris) = icosahedron_subdivided::<T>(level);
    let verts = verts.iter().map(|x| scale(x, radius)).collect();
    let k = T::one() / (radius * radius);
    let n = (10 << (2 * level)) + 2;
    Ok(Mesh::new(2, verts, tris)?.with_curvature(vec![k; n]))
}

/// Gaussian curvature of the spheroid `(x^2 + y^2)/a^2 + z^2/c^2 = 1` at a point on it.
pub fn spheroid_curvature<T: Real>(equatorial: T, polar: T, x: &Vec3<T>) -> T {
    let a2 = equatorial * equatorial;
    let c2 = polar * polar;
    let s = (x[0] * x[0] + x[1] * x[1]) / (a2 * a2) + x[2] * x[2] / (c2 * c2);
    T::one() / (a2 * a2 * c2 * s * s)
}

/// Scale factor applied to the unit-equator spheroid of the given aspect.
///
/// With `normalize`, the factor makes the smallest curvature sampled at the
/// level-`level` vertices exactly 1; otherwise it is 1.
pub fn ellipsoid_scale<T: Real>(aspect: T, level: usize, normalize: bool) -> Result<T> {
    check_aspect(aspect)?;
    check_level(level)?;
    if !normalize {
        return Ok(T::one());
    }
    let (verts, _) = icosahedron_subdivided::<T>(level);
    let kmin = verts
        .iter()
        .map(|x| {
            let p = [x[0], x[1], aspect * x[2]];
            spheroid_curvature(T::one(), aspect, &p)
        })
        .fold(T::infinity(), T::min);
    Ok(kmin.sqrt())
}

fn check_aspect<T: Real>(aspect: T) -> Result<()> {
    if !(aspect >= T::one() && aspect <= T::of(MAX_ASPECT)) {
        return Err(Error::OutOfRange {
            what: "ellipsoid aspect",
            value: aspect.as_f64(),
            lo: 1.0,
            hi: MAX_ASPECT,
        });
    }
    Ok(())
}

/// Prolate spheroid `x^2 + y^2 + z^2/aspect^2 = scale^2` meshed from the icosphere.
///
/// The mesh carries the analytic Gaussian curvature at every vertex. With
/// `normalize` the scale is chosen so the sampled minimum curvature is 1.
pub fn build_ellipsoid<T: Real>(aspect: T, level: usize, normalize: bool) -> Result<Mesh<T>> {
    let s = ellipsoid_scale(aspect, level, normalize)?;
    let (verts, tris) = icosahedron_subdivided::<T>(level);
    let verts: Vec<Vec3<T>> = verts.iter().map(|x| [s * x[0], s * x[1], s * aspect * x[2]]).collect();
    let curvature = verts.iter().map(|x| spheroid_curvature(s, s * aspect, x)).collect();
    Ok(Mesh::new(2, verts, tris)?.with_curvature(curvature))
}

/// Regular polygon with `segments` edges inscribed in the circle of the given radius.
pub fn build_circle<T: Real>(segments: usize, radius: T) -> Result<Mesh<T>> {
    if segments < 3 {
        return Err(Error::InvalidArgument("a circle needs at least 3 segments".into()));
    }
    if !(radius > T::zero()) {
        return Err(Error::InvalidArgument("circle radius must be positive".into()));
    }
    let verts = (0..segments)
        .map(|k| {
            let a = T::of(2.0) * T::PI() * T::of_usize(k) / T::of_usize(segments);
            [radius * a.cos(), radius * a.sin(), T::zero()]
        })
        .collect();
    let cells = (0..segments).flat_map(|k| [k, (k + 1) % segments]).collect();
    let k = T::one() / radius;
    Ok(Mesh::new(1, verts, cells)?.with_curvature(vec![k; segments]))
}

/// Uniform partition of `[0, length]` along the x axis.
pub fn build_interval<T: Real>(segments: usize, length: T) -> Result<Mesh<T>> {
    if segments == 0 {
        return Err(Error::InvalidArgument("an interval needs at least one segment".into()));
    }
    if !(length > T::zero()) {
        return Err(Error::InvalidArgument("interval length must be positive".into()));
    }
    let verts = (0..=segments)
        .map(|k| [length * T::of_usize(k) / T::of_usize(segments), T::zero(), T::zero()])
        .collect();
    let cells = (0..segments).flat_map(|k| [k, k + 1]).collect();
    Mesh::new(1, verts, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn icosahedron_combinatorics() {
        let m = build_icosphere::<f64>(0, 1.0).unwrap();
        assert_eq!(m.vertex_count(), 12);
        assert_eq!(m.cell_count(), 20);
        assert_eq!(m.edges().len(), 30);
        assert!(m.is_closed());
        for l in 1..=3 {
            let m = build_icosphere::<f64>(l, 1.0).unwrap();
            assert_eq!(m.vertex_count(), 10 * 4usize.pow(l as u32) + 2);
            assert_eq!(m.cell_count(), 20 * 4usize.pow(l as u32));
        }
    }

    #[test]
    fn icosphere_vertices_on_sphere_and_equator_is_edge_loop() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        for x in m.vertices() {
            assert!((norm(x) - 1.0).abs() < 1e-14);
        }
        let equator: Vec<usize> =
            (0..m.vertex_count()).filter(|&v| m.vertex(v)[2] == 0.0).collect();
        assert_eq!(equator.len(), 40);
        for &v in &equator {
            let on = m.neighbors(v).iter().filter(|&&w| m.vertex(w)[2] == 0.0).count();
            assert_eq!(on, 2);
        }
    }

    #[test]
    fn icosphere_is_point_symmetric() {
        let m = build_icosphere::<f64>(2, 1.0).unwrap();
        // adding 0.0 maps -0.0 to +0.0
        let bits = |x: [f64; 3]| [(x[0] + 0.0).to_bits(), (x[1] + 0.0).to_bits(), (x[2] + 0.0).to_bits()];
        let mut pts: Vec<[u64; 3]> = m.vertices().iter().map(|&x| bits(x)).collect();
        pts.sort();
        for x in m.vertices() {
            let key = bits([-x[0], -x[1], -x[2]]);
            assert!(pts.binary_search(&key).is_ok(), "missing antipode of {x:?}");
        }
    }

    #[test]
    fn icosphere_area_converges_to_sphere() {
        let m = build_icosphere::<f64>(4, 1.0).unwrap();
        let area: f64 = m.cell_measure().iter().sum();
        assert!((area / (4.0 * PI) - 1.0).abs() < 0.01);
        let m2 = build_icosphere::<f64>(4, 2.0).unwrap();
        let area2: f64 = m2.cell_measure().iter().sum();
        assert_eq!(area2, 4.0 * area);
    }

    #[test]
    fn level_guard() {
        assert!(build_icosphere::<f64>(9, 1.0).is_err());
        assert!(build_icosphere::<f64>(1, 0.0).is_err());
    }

    /// Analytic curvature on the spheroid against a second-order
    /// surface-of-revolution formula for K = -z''(r) / (r (1 + z'^2)^2) z'.
    #[test]
    fn spheroid_curvature_matches_profile_formula() {
        let (a, c) = (0.8f64, 1.1f64);
        for &r in &[0.1, 0.4, 0.7] {
            let z = |r: f64| c * (1.0 - r * r / (a * a)).sqrt();
            let h = 1e-4;
            let d1 = (z(r + h) - z(r - h)) / (2.0 * h);
            let d2 = (z(r + h) - 2.0 * z(r) + z(r - h)) / (h * h);
            let k_profile = d1 * d2 / (r * (1.0 + d1 * d1).powi(2));
            let k = spheroid_curvature(a, c, &[r, 0.0, z(r)]);
            assert!((k - k_profile).abs() < 1e-5 * k, "{k} vs {k_profile}");
        }
    }

    #[test]
    fn ellipsoid_normalization() {
        let round = build_ellipsoid::<f64>(1.0, 4, true).unwrap();
        assert!((ellipsoid_scale::<f64>(1.0, 4, true).unwrap() - 1.0).abs() < 1e-14);
        let k = round.min_curvature().unwrap();
        assert!((k - 1.0).abs() < 1e-12);

        let e = build_ellipsoid::<f64>(1.2, 4, true).unwrap();
        let k = e.min_curvature().unwrap();
        assert!((0.99..=1.01).contains(&k));
        assert!(e.curvature().unwrap().iter().all(|&k| k >= 1.0 - 1e-12));

        let raw = build_ellipsoid::<f64>(1.2, 4, false).unwrap();
        assert!(raw.min_curvature().unwrap() < 1.0);

        assert!(build_ellipsoid::<f64>(2.5, 2, true).is_err());
        assert!(build_ellipsoid::<f64>(0.9, 2, true).is_err());
    }

    #[test]
    fn circle_and_interval() {
        let c = build_circle::<f64>(1000, 1.0).unwrap();
        let len: f64 = c.cell_measure().iter().sum();
        assert!((len - 2.0 * PI).abs() < 1e-4);
        assert!(c.is_closed());
        let i = build_interval::<f64>(100, 1.0).unwrap();
        let len: f64 = i.cell_measure().iter().sum();
        assert!((len - 1.0).abs() < 1e-14);
        assert!(!i.is_closed());
    }

    #[test]
    fn icosphere_in_single_precision() {
        let m = build_icosphere::<f32>(3, 1.0).unwrap();
        let area: f32 = m.cell_measure().iter().sum();
        assert!((area / (4.0 * std::f32::consts::PI) - 1.0).abs() < 0.02);
    }
}
