use crate::scalar::Real;

use super::ScalarField;

/// Connected components of `{u > 0}` and `{u < 0}` in the vertex graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodalDomains {
    pub count: usize,
    /// Component label per vertex; `None` where `u = 0`.
    pub labels: Vec<Option<usize>>,
}

pub fn nodal_domains<T: Real>(field: &ScalarField<'_, T>) -> NodalDomains {
    let mesh = field.mesh();
    let u = field.values();
    let sign = |v: usize| -> i8 {
        if u[v] > T::zero() {
            1
        } else if u[v] < T::zero() {
            -1
        } else {
            0
        }
    };
    let mut labels = vec![None; u.len()];
    let mut count = 0;
    for v in 0..u.len() {
        let s = sign(v);
        if s == 0 || labels[v].is_some() {
            continue;
        }
        let comp = mesh.component_of(v, |w| sign(w) == s);
        for (w, &inside) in comp.iter().enumerate() {
            if inside {
                labels[w] = Some(count);
            }
        }
        count += 1;
    }
    NodalDomains { count, labels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::build_icosphere;

    #[test]
    fn coordinate_splits_sphere() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        let nd = nodal_domains(&z);
        assert_eq!(nd.count, 2);
        assert!(nd.labels.iter().enumerate().all(|(v, l)| l.is_none() == (m.vertex(v)[2] == 0.0)));
    }

    #[test]
    fn positive_constant_is_one_domain() {
        let m = build_icosphere::<f64>(2, 1.0).unwrap();
        let f = ScalarField::constant(&m, 0.3).unwrap();
        assert_eq!(nodal_domains(&f).count, 1);
    }

    #[test]
    fn second_harmonic_has_three_bands() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let f = ScalarField::from_fn(&m, |x| 3.0 * x[2] * x[2] - 1.0).unwrap();
        assert_eq!(nodal_domains(&f).count, 3);
    }
}
