use crate::manifold::Mesh;
use crate::pspectral::ScalarField;
use crate::scalar::Real;

/// Fraction of a simplex on which the linear interpolant of `vals` exceeds `t`.
pub(crate) fn cell_fraction<T: Real>(vals: &[T], t: T) -> T {
    match vals.len() {
        2 => {
            let (a, b) = if vals[0] <= vals[1] { (vals[0], vals[1]) } else { (vals[1], vals[0]) };
            if t < a {
                T::one()
            } else if t >= b {
                T::zero()
            } else {
                (b - t) / (b - a)
            }
        }
        _ => {
            let mut v = [vals[0], vals[1], vals[2]];
            v.sort_by(|x, y| x.partial_cmp(y).expect("finite values"));
            let [a, b, c] = v;
            if t < a {
                T::one()
            } else if t >= c {
                T::zero()
            } else if t < b {
                T::one() - (t - a) * (t - a) / ((b - a) * (c - a))
            } else {
                (c - t) * (c - t) / ((c - a) * (c - b))
            }
        }
    }
}

fn cell_values<T: Real>(mesh: &Mesh<T>, u: &[T], c: usize, buf: &mut [T; 3]) -> usize {
    let cell = mesh.cell(c);
    for (k, &v) in cell.iter().enumerate() {
        buf[k] = u[v];
    }
    cell.len()
}

/// Exact `H^n` measure of `{u > t}` for the vertex-linear interpolant.
pub fn superlevel_area<T: Real>(field: &ScalarField<'_, T>, t: T) -> T {
    let mesh = field.mesh();
    let u = field.values();
    let mut buf = [T::zero(); 3];
    (0..mesh.cell_count())
        .map(|c| {
            let k = cell_values(mesh, u, c, &mut buf);
            mesh.cell_measure()[c] * cell_fraction(&buf[..k], t)
        })
        .sum()
}

/// `(H^n({u > t}), int_{u > t} |grad u|^p)` for every threshold, both exact
/// for the vertex-linear interpolant.
pub fn superlevel_integrals<T: Real>(field: &ScalarField<'_, T>, thresholds: &[T], p: T) -> Vec<(T, T)> {
    let mesh = field.mesh();
    let u = field.values();
    let mut out = vec![(T::zero(), T::zero()); thresholds.len()];
    let mut buf = [T::zero(); 3];
    for c in 0..mesh.cell_count() {
        let k = cell_values(mesh, u, c, &mut buf);
        let g = mesh.cell_gradient(c, u);
        let gp = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt().powf(p);
        let area = mesh.cell_measure()[c];
        for (o, &t) in out.iter_mut().zip(thresholds) {
            let f = area * cell_fraction(&buf[..k], t);
            o.0 = o.0 + f;
            o.1 = o.1 + f * gp;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_icosphere, total_measure};
    use std::f64::consts::PI;

    #[test]
    fn triangle_fraction_is_continuous_and_monotone() {
        let v = [0.2, -1.0, 0.7];
        let mut last = 1.0;
        for k in 0..=400 {
            let t = -1.2 + 2.1 * k as f64 / 400.0;
            let f = cell_fraction(&v, t);
            assert!(f <= last + 1e-15 && (0.0..=1.0).contains(&f));
            assert!(last - f < 0.05);
            last = f;
        }
        // at the middle value the split is linear along the long edge
        let f = cell_fraction(&[0.0f64, 1.0, 2.0], 1.0);
        assert!((f - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fraction_matches_sampling() {
        // Monte Carlo-free check: dense barycentric grid
        let v = [0.3, -0.4, 1.1];
        let t = 0.05;
        let n = 600;
        let (mut inside, mut total) = (0usize, 0usize);
        for i in 0..n {
            for j in 0..n - i {
                let (a, b) = ((i as f64 + 1.0 / 3.0) / n as f64, (j as f64 + 1.0 / 3.0) / n as f64);
                let c = 1.0 - a - b;
                if c <= 0.0 {
                    continue;
                }
                total += 1;
                if a * v[0] + b * v[1] + c * v[2] > t {
                    inside += 1;
                }
            }
        }
        let sampled = inside as f64 / total as f64;
        assert!((cell_fraction(&v, t) - sampled).abs() < 5e-3);
    }

    #[test]
    fn hemisphere_area() {
        let m = build_icosphere::<f64>(5, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        let a = superlevel_area(&z, 0.0);
        assert!((a / (2.0 * PI) - 1.0).abs() < 0.01);
        assert!((2.0 * a - total_measure(&m)).abs() < 1e-10);
    }

    #[test]
    fn cap_area_and_energy() {
        let m = build_icosphere::<f64>(5, 1.0).unwrap();
        let z = ScalarField::coordinate(&m, 2).unwrap();
        let t = 0.5;
        let r = superlevel_integrals(&z, &[t], 2.0);
        let (a, e) = r[0];
        assert!((a / (PI) - 1.0).abs() < 0.01);
        // |grad z|^2 = 1 - z^2, integrated over z > 1/2: 2 pi (t - t^3/3) from 1/2 to 1
        let exact = 2.0 * PI * ((1.0 - 1.0 / 3.0) - (0.5 - 0.125 / 3.0));
        assert!((e / exact - 1.0).abs() < 0.01, "{e} {exact}");
    }
}
