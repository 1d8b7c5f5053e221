//! Seeded batteries of test fields: random smooth fields, cap-supported bump
//! fields and superlevel thresholds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::manifold::Mesh;
use crate::pspectral::ScalarField;
use crate::scalar::{Real, Vec3};

/// Exponents `(a, b, c)` of the monomials `x^a y^b z^c` of degree 1 to 3.
fn monomials() -> Vec<[i32; 3]> {
    let mut out = Vec::new();
    for d in 1..=3 {
        for a in (0..=d).rev() {
            for b in (0..=d - a).rev() {
                out.push([a, b, d - a - b]);
            }
        }
    }
    out
}

/// Largest coordinate magnitude, used to bring fields to unit scale.
fn extent<T: Real>(mesh: &Mesh<T>) -> T {
    mesh.vertices()
        .iter()
        .flat_map(|x| x.iter().map(|c| c.abs()))
        .fold(T::zero(), T::max)
}

/// Random polynomial of degree at most 3 in the (rescaled) ambient
/// coordinates, coefficients damped by degree.
fn polynomial(rng: &mut ChaCha8Rng) -> Vec<(f64, [i32; 3])> {
    monomials()
        .into_iter()
        .map(|e| {
            let d = (e[0] + e[1] + e[2]) as f64;
            (rng.gen_range(-1.0..1.0) / d, e)
        })
        .collect()
}

fn eval_poly<T: Real>(poly: &[(f64, [i32; 3])], x: &Vec3<T>, s: T) -> T {
    poly.iter()
        .map(|&(c, e)| T::of(c) * (x[0] / s).powi(e[0]) * (x[1] / s).powi(e[1]) * (x[2] / s).powi(e[2]))
        .sum()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random signed smooth fields: low-degree polynomials in the coordinates.
pub fn smooth_fields<T: Real>(mesh: &Mesh<T>, count: usize, seed: u64) -> Result<Vec<ScalarField<'_, T>>> {
    let mut rng = rng_for(seed, 1);
    let s = extent(mesh);
    (0..count)
        .map(|_| {
            let poly = polynomial(&mut rng);
            ScalarField::from_fn(mesh, |x| eval_poly(&poly, x, s))
        })
        .collect()
}

/// Random positive smooth fields `exp(q)` with `q` a random low-degree polynomial.
pub fn positive_smooth_fields<T: Real>(mesh: &Mesh<T>, count: usize, seed: u64) -> Result<Vec<ScalarField<'_, T>>> {
    let mut rng = rng_for(seed, 2);
    let s = extent(mesh);
    (0..count)
        .map(|_| {
            let poly = polynomial(&mut rng);
            ScalarField::from_fn(mesh, |x| eval_poly(&poly, x, s).exp())
        })
        .collect()
}

/// Linear functions `x . d` for random unit directions `d`; on the round
/// sphere their superlevel sets are exactly the geodesic caps.
pub fn linear_fields<T: Real>(mesh: &Mesh<T>, count: usize, seed: u64) -> Result<Vec<ScalarField<'_, T>>> {
    let mut rng = rng_for(seed, 3);
    (0..count)
        .map(|_| {
            let d = random_direction(&mut rng);
            ScalarField::from_fn(mesh, |x| T::of(d[0]) * x[0] + T::of(d[1]) * x[1] + T::of(d[2]) * x[2])
        })
        .collect()
}

fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Nonnegative fields vanishing outside the cap `{z > z0}`:
/// `(z - z0)^+` times a sum of one to three Gaussian bumps centred at random
/// vertices inside the cap.
pub fn cap_bump_fields<T: Real>(mesh: &Mesh<T>, z0: T, count: usize, seed: u64) -> Result<Vec<ScalarField<'_, T>>> {
    let inside: Vec<usize> = (0..mesh.vertex_count()).filter(|&v| mesh.vertex(v)[2] > z0).collect();
    if inside.is_empty() {
        return Err(Error::InvalidArgument("cap contains no vertices".into()));
    }
    let mut rng = rng_for(seed, 4);
    let s = extent(mesh);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let bumps: Vec<(Vec3<T>, T, T)> = (0..k)
                .map(|_| {
                    let c = *mesh.vertex(inside[rng.gen_range(0..inside.len())]);
                    let w = T::of(rng.gen_range(0.25..0.8)) * s;
                    let a = T::of(rng.gen_range(0.5..1.5));
                    (c, w, a)
                })
                .collect();
            ScalarField::from_fn(mesh, |x| {
                let h = x[2] - z0;
                if h <= T::zero() {
                    return T::zero();
                }
                let b: T = bumps
                    .iter()
                    .map(|(c, w, a)| {
                        let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2);
                        *a * (-d2 / (*w * *w)).exp()
                    })
                    .sum();
                h * b
            })
        })
        .collect()
}

/// Thresholds whose lumped superlevel measure fraction is drawn uniformly
/// from `[lo, hi]`, strictly between the field's extreme values.
pub fn superlevel_thresholds<T: Real>(
    field: &ScalarField<'_, T>,
    count: usize,
    lo: f64,
    hi: f64,
    seed: u64,
) -> Vec<T> {
    let mesh = field.mesh();
    let u = field.values();
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| u[b].partial_cmp(&u[a]).expect("finite").then(a.cmp(&b)));
    let total: T = mesh.vertex_measure().iter().copied().sum();
    let mut cum = Vec::with_capacity(order.len());
    let mut acc = T::zero();
    for &v in &order {
        acc = acc + mesh.vertex_measure()[v];
        cum.push(acc / total);
    }
    let mut rng = rng_for(seed, 5);
    let (min, max) = (field.min(), field.max());
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let f = T::of(rng.gen_range(lo..=hi));
        let k = cum.partition_point(|&c| c < f).min(order.len() - 1);
        // midway between neighbouring vertex values, so no vertex sits on the level
        let t = if k + 1 < order.len() { (u[order[k]] + u[order[k + 1]]) / T::of(2.0) } else { u[order[k]] };
        if t > min && t < max {
            out.push(t);
        } else if min == max {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isoperim::superlevel_area;
    use crate::manifold::{build_ellipsoid, build_icosphere, total_measure};

    #[test]
    fn monomial_count() {
        assert_eq!(monomials().len(), 3 + 6 + 10);
    }

    #[test]
    fn batteries_are_reproducible() {
        let m = build_icosphere::<f64>(2, 1.0).unwrap();
        let a = smooth_fields(&m, 3, 9).unwrap();
        let b = smooth_fields(&m, 3, 9).unwrap();
        let c = smooth_fields(&m, 3, 10).unwrap();
        assert_eq!(a[2].values(), b[2].values());
        assert_ne!(a[2].values(), c[2].values());
    }

    #[test]
    fn positive_fields_are_positive() {
        let m = build_ellipsoid::<f64>(1.2, 2, true).unwrap();
        for f in positive_smooth_fields(&m, 5, 1).unwrap() {
            assert!(f.min() > 0.0);
        }
    }

    #[test]
    fn cap_bumps_vanish_outside_cap() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        for f in cap_bump_fields(&m, 0.2, 10, 4).unwrap() {
            for (v, x) in m.vertices().iter().enumerate() {
                let u = f.values()[v];
                assert!(u >= 0.0);
                if x[2] <= 0.2 {
                    assert_eq!(u, 0.0);
                }
            }
            assert!(f.max() > 0.0);
        }
    }

    #[test]
    fn thresholds_hit_requested_fractions() {
        let m = build_icosphere::<f64>(4, 1.0).unwrap();
        let total = total_measure(&m);
        let f = &smooth_fields(&m, 1, 3).unwrap()[0];
        for t in superlevel_thresholds(f, 20, 0.1, 0.9, 8) {
            let frac = superlevel_area(f, t) / total;
            assert!((0.08..=0.92).contains(&frac), "{frac}");
        }
    }
}
