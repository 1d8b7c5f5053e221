//! Discrete manifolds: construction, measures, diameter and model-sphere caps.

mod build;
mod cap;
mod domain;
mod geodesic;
mod mesh;
mod off;

pub use build::{
    build_circle, build_ellipsoid, build_icosphere, build_interval, ellipsoid_scale, spheroid_curvature,
    MAX_ASPECT, MAX_LEVEL,
};
pub use cap::{cap_boundary, cap_radius, cap_volume, sphere_measure, CapGeometry};
pub use domain::Domain;
pub use geodesic::{diameter, diameter_with, DistanceGraph, GraphMetric, ALL_PAIRS_BUDGET};
pub use mesh::Mesh;
pub use off::{read_off, write_off};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Total `H^n` measure: the sum of cell measures.
pub fn total_measure<T: Real>(mesh: &Mesh<T>) -> T {
    mesh.cell_measure().iter().copied().sum()
}

/// Volume ratio `H^n(M) / H^n(S^n)` of a closed mesh.
pub fn beta<T: Real>(mesh: &Mesh<T>) -> Result<T> {
    if !mesh.is_closed() {
        return Err(Error::OpenMesh);
    }
    Ok(total_measure(mesh) / sphere_measure::<T>(mesh.dimension())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn beta_of_spheres() {
        let m = build_icosphere::<f64>(4, 1.0).unwrap();
        assert!((beta(&m).unwrap() - 1.0).abs() < 0.01);
        let h = build_icosphere::<f64>(4, 0.5).unwrap();
        assert!((beta(&h).unwrap() - 0.25).abs() < 0.0025);
        let c = build_circle::<f64>(1000, 1.0).unwrap();
        assert!((beta(&c).unwrap() - 1.0).abs() < 1e-4);
        assert_eq!(beta(&build_interval::<f64>(10, 1.0).unwrap()), Err(Error::OpenMesh));
    }

    #[test]
    fn normalized_ellipsoid_is_smaller_than_sphere() {
        let e = build_ellipsoid::<f64>(1.2, 4, true).unwrap();
        let b = beta(&e).unwrap();
        // prolate spheroid area 2 pi a^2 (1 + c/(a e) asin e), a = 1/1.2, c = 1
        let (a, c) = (1.0 / 1.2, 1.0f64);
        let ecc = (1.0 - a * a / (c * c)).sqrt();
        let exact = 2.0 * PI * a * a * (1.0 + c / (a * ecc) * ecc.asin()) / (4.0 * PI);
        assert!(b < 1.0);
        assert!((b - exact).abs() < 0.01 * exact);
    }

    #[test]
    fn total_measure_additive_and_scaling() {
        let m = build_icosphere::<f64>(2, 1.0).unwrap();
        let total = total_measure(&m);
        let (lo, hi): (Vec<usize>, Vec<usize>) = (0..m.cell_count()).partition(|&c| c % 3 == 0);
        let s = |ix: &[usize]| ix.iter().map(|&c| m.cell_measure()[c]).sum::<f64>();
        assert!((s(&lo) + s(&hi) - total).abs() < 1e-12 * total);
        let c = 1.7;
        let scaled = m.scaled(c).unwrap();
        assert!((beta(&scaled).unwrap() - c * c * beta(&m).unwrap()).abs() < 1e-12);
    }
}
