use crate::pspectral::ScalarField;
use crate::scalar::Real;

/// Distribution function `t -> H^n({u > t})` of a vertex field under lumped measure.
#[derive(Debug, Clone)]
pub struct DistributionProfile<T> {
    dimension: usize,
    thresholds: Vec<T>,
    measures: Vec<T>,
    total: T,
}

impl<T: Real> DistributionProfile<T> {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Distinct field values, strictly increasing.
    pub fn thresholds(&self) -> &[T] {
        &self.thresholds
    }

    /// `mu_i = H^n({u > t_i})`, strictly decreasing, last entry zero.
    pub fn measures(&self) -> &[T] {
        &self.measures
    }

    /// Measure of the whole mesh, the value of `mu` below the minimum.
    pub fn total(&self) -> T {
        self.total
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// `H^n({u > t})`; right-continuous.
    pub fn measure_at(&self, t: T) -> T {
        // first threshold strictly above t
        let k = self.thresholds.partition_point(|&x| x <= t);
        if k == 0 {
            self.total
        } else {
            self.measures[k - 1]
        }
    }

    /// `H^n({u >= t})`, the left limit of [`measure_at`](Self::measure_at).
    pub fn measure_left(&self, t: T) -> T {
        let k = self.thresholds.partition_point(|&x| x < t);
        if k == 0 {
            self.total
        } else {
            self.measures[k - 1]
        }
    }
}

/// Exact distribution of the lumped vertex measure.
///
/// Vertices are sorted by value (descending, ties by vertex index) and their
/// measures accumulated; vertices with equal values form a single level.
pub fn distribution<T: Real>(field: &ScalarField<'_, T>) -> DistributionProfile<T> {
    let u = field.values();
    let m = field.mesh().vertex_measure();
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| u[b].partial_cmp(&u[a]).expect("finite values").then(a.cmp(&b)));
    let mut thresholds = Vec::new();
    let mut measures = Vec::new();
    let mut acc = T::zero();
    let mut k = 0;
    while k < order.len() {
        let t = u[order[k]];
        thresholds.push(t);
        measures.push(acc);
        while k < order.len() && u[order[k]] == t {
            acc = acc + m[order[k]];
            k += 1;
        }
    }
    thresholds.reverse();
    measures.reverse();
    let out = DistributionProfile { dimension: field.mesh().dimension(), thresholds, measures, total: acc };
    debug_assert!(out.measures.windows(2).all(|w| w[0] >= w[1]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_icosphere, total_measure};
    use std::f64::consts::PI;

    #[test]
    fn constant_field_has_one_level() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let f = ScalarField::constant(&m, 2.0).unwrap();
        let d = distribution(&f);
        assert_eq!(d.thresholds(), &[2.0]);
        assert_eq!(d.measures(), &[0.0]);
        assert!((d.measure_at(1.9) - total_measure(&m)).abs() < 1e-12);
        assert_eq!(d.measure_at(2.0), 0.0);
    }

    #[test]
    fn monotone_and_complete() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let f = ScalarField::from_fn(&m, |x| (3.0 * x[0]).sin() + x[2] * x[1]).unwrap();
        let d = distribution(&f);
        assert!(d.thresholds().windows(2).all(|w| w[0] < w[1]));
        assert!(d.measures().windows(2).all(|w| w[0] > w[1]));
        assert_eq!(*d.measures().last().unwrap(), 0.0);
        assert!((d.total() - total_measure(&m)).abs() < 1e-12);
        // one level per distinct value
        let mut vals = f.values().to_vec();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup();
        assert_eq!(vals.len(), d.len());
    }

    #[test]
    fn hemisphere_measure_brackets_half_sphere() {
        // the equator vertices carry their lumped mass on the jump at t = 0
        let m = build_icosphere::<f64>(5, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        let d = distribution(&z);
        let (right, left) = (d.measure_at(0.0), d.measure_left(0.0));
        assert!(right < 2.0 * PI && left > 2.0 * PI);
        let mid = 0.5 * (right + left);
        assert!((mid / (2.0 * PI) - 1.0).abs() < 0.01);
        assert!((right + left - total_measure(&m)).abs() < 1e-12);
    }

    #[test]
    fn positive_part_support() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap().positive_part();
        let d = distribution(&z);
        let support: f64 = (0..m.vertex_count())
            .filter(|&v| z.values()[v] > 0.0)
            .map(|v| m.vertex_measure()[v])
            .sum();
        assert!((d.measure_at(0.0) - support).abs() < 1e-12);
    }
}
