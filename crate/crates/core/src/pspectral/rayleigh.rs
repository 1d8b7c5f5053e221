use crate::error::{Error, Result};
use crate::manifold::{Domain, Mesh};
use crate::scalar::{dot, Real};

use super::{PExponent, ScalarField};

/// Where a Rayleigh quotient is evaluated: a whole mesh, or a Dirichlet domain.
#[derive(Debug, Clone, Copy)]
pub enum Region<'a, 'm, T: Real> {
    Mesh(&'m Mesh<T>),
    Domain(&'a Domain<'m, T>),
}

impl<'a, 'm, T: Real> Region<'a, 'm, T> {
    pub fn mesh(&self) -> &'m Mesh<T> {
        match self {
            Region::Mesh(m) => m,
            Region::Domain(d) => d.mesh(),
        }
    }

    pub(crate) fn active(&self) -> Option<&[bool]> {
        match self {
            Region::Mesh(_) => None,
            Region::Domain(d) => Some(d.interior_mask()),
        }
    }
}

impl<'a, 'm, T: Real> From<&'a Domain<'m, T>> for Region<'a, 'm, T> {
    fn from(d: &'a Domain<'m, T>) -> Self {
        Region::Domain(d)
    }
}

/// `|g|^p` with the `sqrt(|g|^2 + eps^2)` regularization.
#[inline]
pub(crate) fn reg_pow<T: Real>(g2: T, eps: T, p: T) -> T {
    let s = g2 + eps * eps;
    if s == T::zero() {
        T::zero()
    } else {
        s.powf(p / T::of(2.0))
    }
}

/// `sum_c |c| |grad u|^p` over all cells, with `values` already zero outside the region.
pub fn p_energy<T: Real>(mesh: &Mesh<T>, values: &[T], p: T) -> T {
    (0..mesh.cell_count())
        .map(|c| {
            let g = mesh.cell_gradient(c, values);
            mesh.cell_measure()[c] * reg_pow(dot(&g, &g), T::zero(), p)
        })
        .sum()
}

/// Lumped `sum_v m_v |u_v|^p`, optionally restricted to active vertices.
pub fn p_mass<T: Real>(mesh: &Mesh<T>, values: &[T], p: T, active: Option<&[bool]>) -> T {
    values
        .iter()
        .zip(mesh.vertex_measure())
        .enumerate()
        .filter(|(v, _)| active.map_or(true, |a| a[*v]))
        .map(|(_, (&u, &m))| m * u.abs().powf(p))
        .sum()
}

/// Discrete Rayleigh quotient `int |grad u|^p / int |u|^p`.
///
/// Gradients are cellwise constant gradients of the vertex-linear
/// interpolant and the mass uses lumped vertex measures. On a domain the
/// field is taken to vanish outside the interior.
pub fn rayleigh_quotient<T: Real>(field: &ScalarField<'_, T>, region: Region<'_, '_, T>, p: PExponent<T>) -> Result<T> {
    let mesh = region.mesh();
    if !std::ptr::eq(mesh, field.mesh()) {
        return Err(Error::InvalidArgument("field and region live on different meshes".into()));
    }
    let p = p.get();
    let mut values = field.values().to_vec();
    if let Some(active) = region.active() {
        for (u, &a) in values.iter_mut().zip(active) {
            if !a {
                *u = T::zero();
            }
        }
    }
    let mass = p_mass(mesh, &values, p, region.active());
    if !(mass > T::zero()) {
        return Err(Error::ZeroDenominator("Rayleigh quotient"));
    }
    Ok(p_energy(mesh, &values, p) / mass)
}
