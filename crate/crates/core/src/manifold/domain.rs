use crate::error::{Error, Result};
use crate::scalar::{Real, Vec3};

use super::Mesh;

/// Vertex subset of a mesh on which Dirichlet fields may be nonzero.
///
/// Fields on a domain vanish on every vertex outside `interior`. The boundary
/// trace is made of the non-interior vertices of cells touching the interior,
/// together with the edges of those cells joining two such vertices.
#[derive(Debug, Clone)]
pub struct Domain<'m, T: Real> {
    mesh: &'m Mesh<T>,
    interior: Vec<bool>,
    boundary_vertices: Vec<usize>,
    boundary_measure: T,
}

impl<'m, T: Real> Domain<'m, T> {
    pub fn from_mask(mesh: &'m Mesh<T>, interior: Vec<bool>) -> Result<Self> {
        if interior.len() != mesh.vertex_count() {
            return Err(Error::InvalidArgument("interior mask length differs from vertex count".into()));
        }
        let Some(start) = interior.iter().position(|&b| b) else {
            return Err(Error::InvalidArgument("domain interior is empty".into()));
        };
        let reach = mesh.component_of(start, |v| interior[v]);
        if reach.iter().zip(&interior).any(|(&r, &i)| i && !r) {
            return Err(Error::InvalidArgument("domain interior is not connected".into()));
        }

        let mut is_boundary = vec![false; mesh.vertex_count()];
        let mut measure = T::zero();
        for cell in mesh.cells() {
            if cell.iter().any(|&v| interior[v]) {
                for &v in cell.iter().filter(|&&v| !interior[v]) {
                    is_boundary[v] = true;
                }
            }
        }
        if mesh.dimension() == 2 {
            for e in mesh.edges() {
                if !is_boundary[e[0]] || !is_boundary[e[1]] {
                    continue;
                }
                let touches = mesh
                    .neighbors(e[0])
                    .iter()
                    .any(|&w| interior[w] && mesh.neighbors(e[1]).binary_search(&w).is_ok());
                if touches {
                    measure = measure + mesh.edge_length(e[0], e[1]);
                }
            }
        }
        let boundary_vertices: Vec<usize> = (0..mesh.vertex_count()).filter(|&v| is_boundary[v]).collect();
        if mesh.dimension() == 1 {
            measure = T::of_usize(boundary_vertices.len());
        }
        Ok(Domain { mesh, interior, boundary_vertices, boundary_measure: measure })
    }

    /// Vertices whose position satisfies `inside`.
    pub fn from_predicate<F: Fn(&Vec3<T>) -> bool>(mesh: &'m Mesh<T>, inside: F) -> Result<Self> {
        let mask = mesh.vertices().iter().map(inside).collect();
        Self::from_mask(mesh, mask)
    }

    /// Every vertex not on the boundary of an open mesh; the whole mesh if closed.
    pub fn interior_of(mesh: &'m Mesh<T>) -> Result<Self> {
        let mask = (0..mesh.vertex_count()).map(|v| !mesh.is_boundary_vertex(v)).collect();
        Self::from_mask(mesh, mask)
    }

    /// Upper half `z > 0` of a mesh symmetric about the equatorial plane.
    pub fn upper_half(mesh: &'m Mesh<T>) -> Result<Self> {
        Self::from_predicate(mesh, |x| x[2] > T::zero())
    }

    pub fn mesh(&self) -> &'m Mesh<T> {
        self.mesh
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.interior.len()).filter(|&v| self.interior[v])
    }

    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    /// Length of the boundary polyline (`n = 2`) or number of boundary points (`n = 1`).
    pub fn boundary_measure(&self) -> T {
        self.boundary_measure
    }

    pub fn has_boundary(&self) -> bool {
        !self.boundary_vertices.is_empty()
    }

    /// Cells on which a domain field can be nonzero.
    pub fn support_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.mesh.cell_count()).filter(|&c| self.mesh.cell(c).iter().any(|&v| self.interior[v]))
    }

    /// Lumped measure of the interior vertices.
    pub fn interior_measure(&self) -> T {
        self.interior_vertices().map(|v| self.mesh.vertex_measure()[v]).sum()
    }
}
