use crate::error::{Error, Result};
use crate::manifold::Mesh;
use crate::scalar::{Real, Vec3};

/// Supported range of the p-Laplacian exponent.
pub const P_MIN: f64 = 1.1;
pub const P_MAX: f64 = 10.0;

/// Exponent `p` of the p-Laplacian, restricted to `[1.1, 10]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PExponent<T: Real>(T);

impl<T: Real> PExponent<T> {
    pub fn new(p: T) -> Result<Self> {
        if !(p >= T::of(P_MIN) && p <= T::of(P_MAX)) {
            return Err(Error::OutOfRange { what: "p", value: p.as_f64(), lo: P_MIN, hi: P_MAX });
        }
        Ok(PExponent(p))
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

/// One real value per mesh vertex.
#[derive(Debug, Clone)]
pub struct ScalarField<'m, T: Real> {
    mesh: &'m Mesh<T>,
    values: Vec<T>,
}

impl<'m, T: Real> ScalarField<'m, T> {
    pub fn new(mesh: &'m Mesh<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values for {} vertices",
                values.len(),
                mesh.vertex_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("field values must be finite".into()));
        }
        Ok(ScalarField { mesh, values })
    }

    pub fn from_fn<F: FnMut(&Vec3<T>) -> T>(mesh: &'m Mesh<T>, f: F) -> Result<Self> {
        Self::new(mesh, mesh.vertices().iter().map(f).collect())
    }

    pub fn constant(mesh: &'m Mesh<T>, c: T) -> Result<Self> {
        Self::new(mesh, vec![c; mesh.vertex_count()])
    }

    /// Ambient coordinate `axis` (0 = x, 1 = y, 2 = z) as a field.
    pub fn coordinate(mesh: &'m Mesh<T>, axis: usize) -> Result<Self> {
        if axis > 2 {
            return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
        }
        Self::from_fn(mesh, |x| x[axis])
    }

    pub fn mesh(&self) -> &'m Mesh<T> {
        self.mesh
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn map<F: FnMut(T) -> T>(&self, f: F) -> Self {
        ScalarField { mesh: self.mesh, values: self.values.iter().copied().map(f).collect() }
    }

    pub fn scaled(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn positive_part(&self) -> Self {
        self.map(|v| v.max(T::zero()))
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn is_constant(&self) -> bool {
        self.max() == self.min()
    }

    /// Lumped `(sum m_v |u_v|^p)^(1/p)`.
    pub fn lp_norm(&self, p: T) -> T {
        let s: T = self
            .values
            .iter()
            .zip(self.mesh.vertex_measure())
            .map(|(&u, &m)| m * u.abs().powf(p))
            .sum();
        s.powf(T::one() / p)
    }
}
