use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::scalar::{cross, dot, norm, scale, sub, Real, Vec3};

/// Discrete closed surface, closed curve or interval with lumped vertex measures.
///
/// Cells are triangles (`dimension == 2`) or segments (`dimension == 1`), stored
/// flat with stride `dimension + 1`. Each cell also stores the gradients of its
/// vertex hat functions, so the gradient of a vertex-linear field on that cell
/// is `sum_k u[cell[k]] * grad[k]`.
#[derive(Debug, Clone)]
pub struct Mesh<T: Real> {
    dimension: usize,
    vertices: Vec<Vec3<T>>,
    cells: Vec<usize>,
    cell_measure: Vec<T>,
    vertex_measure: Vec<T>,
    basis_grad: Vec<Vec3<T>>,
    ring_offsets: Vec<usize>,
    ring: Vec<usize>,
    edges: Vec<[usize; 2]>,
    on_boundary: Vec<bool>,
    closed: bool,
    curvature: Option<Vec<T>>,
}

impl<T: Real> Mesh<T> {
    /// Builds a mesh from vertex positions and flat cell indices.
    ///
    /// Fails on out-of-range indices, degenerate cells and disconnected input.
    pub fn new(dimension: usize, vertices: Vec<Vec3<T>>, cells: Vec<usize>) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidArgument(format!(
                "mesh dimension must be 1 or 2, got {dimension}"
            )));
        }
        let stride = dimension + 1;
        if cells.is_empty() || cells.len() % stride != 0 {
            return Err(Error::MalformedMesh(format!(
                "cell index list of length {} is not a positive multiple of {stride}",
                cells.len()
            )));
        }
        let nv = vertices.len();
        if let Some(&bad) = cells.iter().find(|&&i| i >= nv) {
            return Err(Error::MalformedMesh(format!(
                "cell references vertex {bad} but only {nv} vertices exist"
            )));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::MalformedMesh("non-finite vertex coordinate".into()));
        }

        let nc = cells.len() / stride;
        let mut cell_measure = Vec::with_capacity(nc);
        let mut basis_grad = Vec::with_capacity(cells.len());
        for c in 0..nc {
            let idx = &cells[c * stride..(c + 1) * stride];
            let (measure, grads) = cell_geometry(&vertices, idx);
            if !(measure > T::zero()) {
                return Err(Error::MalformedMesh(format!("cell {c} has non-positive measure")));
            }
            cell_measure.push(measure);
            basis_grad.extend_from_slice(&grads[..stride]);
        }

        let mut vertex_measure = vec![T::zero(); nv];
        let share = T::one() / T::of_usize(stride);
        for c in 0..nc {
            for &v in &cells[c * stride..(c + 1) * stride] {
                vertex_measure[v] = vertex_measure[v] + cell_measure[c] * share;
            }
        }

        // Edge incidence: triangles contribute three edges, segments one.
        let mut edge_cells: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        for c in 0..nc {
            let idx = &cells[c * stride..(c + 1) * stride];
            for a in 0..stride {
                for b in (a + 1)..stride {
                    let key = [idx[a].min(idx[b]), idx[a].max(idx[b])];
                    if key[0] == key[1] {
                        return Err(Error::MalformedMesh(format!("cell {c} repeats a vertex")));
                    }
                    let count = edge_cells.entry(key).or_insert_with(|| {
                        edges.push(key);
                        0
                    });
                    *count += 1;
                }
            }
        }
        edges.sort_unstable();

        let mut vertex_cells = vec![0usize; nv];
        for &v in &cells {
            vertex_cells[v] += 1;
        }
        if let Some(v) = vertex_cells.iter().position(|&k| k == 0) {
            return Err(Error::MalformedMesh(format!("vertex {v} belongs to no cell")));
        }

        let mut on_boundary = vec![false; nv];
        let closed = match dimension {
            2 => {
                let mut closed = true;
                for (e, &count) in &edge_cells {
                    if count == 1 {
                        on_boundary[e[0]] = true;
                        on_boundary[e[1]] = true;
                        closed = false;
                    } else if count > 2 {
                        return Err(Error::MalformedMesh(format!(
                            "edge {:?} is shared by {count} triangles",
                            e
                        )));
                    }
                }
                closed
            }
            _ => {
                let mut closed = true;
                for v in 0..nv {
                    match vertex_cells[v] {
                        1 => {
                            on_boundary[v] = true;
                            closed = false;
                        }
                        2 => {}
                        k => {
                            return Err(Error::MalformedMesh(format!(
                                "vertex {v} is shared by {k} segments"
                            )))
                        }
                    }
                }
                closed
            }
        };

        let mut degree = vec![0usize; nv];
        for e in &edges {
            degree[e[0]] += 1;
            degree[e[1]] += 1;
        }
        let mut ring_offsets = Vec::with_capacity(nv + 1);
        ring_offsets.push(0);
        for d in &degree {
            ring_offsets.push(ring_offsets.last().unwrap() + d);
        }
        let mut fill = ring_offsets.clone();
        let mut ring = vec![0usize; ring_offsets[nv]];
        for e in &edges {
            ring[fill[e[0]]] = e[1];
            fill[e[0]] += 1;
            ring[fill[e[1]]] = e[0];
            fill[e[1]] += 1;
        }
        for v in 0..nv {
            ring[ring_offsets[v]..ring_offsets[v + 1]].sort_unstable();
        }

        let mesh = Mesh {
            dimension,
            vertices,
            cells,
            cell_measure,
            vertex_measure,
            basis_grad,
            ring_offsets,
            ring,
            edges,
            on_boundary,
            closed,
            curvature: None,
        };
        if !mesh.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(mesh)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cell_measure.len()
    }

    pub fn vertices(&self) -> &[Vec3<T>] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vec3<T> {
        &self.vertices[v]
    }

    /// Vertex indices of cell `c`.
    pub fn cell(&self, c: usize) -> &[usize] {
        let s = self.dimension + 1;
        &self.cells[c * s..(c + 1) * s]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.cells.chunks(self.dimension + 1)
    }

    /// Hat-function gradients of cell `c`, aligned with [`Mesh::cell`].
    pub fn cell_gradients(&self, c: usize) -> &[Vec3<T>] {
        let s = self.dimension + 1;
        &self.basis_grad[c * s..(c + 1) * s]
    }

    pub fn cell_measure(&self) -> &[T] {
        &self.cell_measure
    }

    pub fn vertex_measure(&self) -> &[T] {
        &self.vertex_measure
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.ring[self.ring_offsets[v]..self.ring_offsets[v + 1]]
    }

    /// Unique undirected edges `[i, j]` with `i < j`, sorted.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Whether `v` lies on the boundary of an open mesh.
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    /// Analytic Gaussian curvature sampled at the vertices, for families that know it.
    pub fn curvature(&self) -> Option<&[T]> {
        self.curvature.as_deref()
    }

    pub fn min_curvature(&self) -> Option<T> {
        self.curvature
            .as_ref()
            .map(|k| k.iter().fold(T::infinity(), |m, &x| m.min(x)))
    }

    pub(crate) fn with_curvature(mut self, curvature: Vec<T>) -> Self {
        debug_assert_eq!(curvature.len(), self.vertices.len());
        self.curvature = Some(curvature);
        self
    }

    /// Gradient of the vertex-linear interpolant of `values` on cell `c`.
    #[inline]
    pub fn cell_gradient(&self, c: usize, values: &[T]) -> Vec3<T> {
        let s = self.dimension + 1;
        let mut g = [T::zero(); 3];
        for k in 0..s {
            let gk = &self.basis_grad[c * s + k];
            let u = values[self.cells[c * s + k]];
            g[0] = g[0] + u * gk[0];
            g[1] = g[1] + u * gk[1];
            g[2] = g[2] + u * gk[2];
        }
        g
    }

    pub fn edge_length(&self, a: usize, b: usize) -> T {
        norm(&sub(&self.vertices[a], &self.vertices[b]))
    }

    pub fn mean_edge_length(&self) -> T {
        let total: T = self.edges.iter().map(|e| self.edge_length(e[0], e[1])).sum();
        total / T::of_usize(self.edges.len())
    }

    /// Copy with every vertex position multiplied by `c`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        if !(c > T::zero()) {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        let vertices = self.vertices.iter().map(|x| scale(x, c)).collect();
        let mut out = Mesh::new(self.dimension, vertices, self.cells.clone())?;
        out.curvature = self
            .curvature
            .as_ref()
            .map(|k| k.iter().map(|&x| x / (c * c)).collect());
        Ok(out)
    }

    fn is_connected(&self) -> bool {
        self.component_of(0, |_| true).iter().filter(|&&b| b).count() == self.vertex_count()
    }

    /// Vertices reachable from `start` through vertices accepted by `keep`.
    pub(crate) fn component_of<F: Fn(usize) -> bool>(&self, start: usize, keep: F) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        if !keep(start) {
            return seen;
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if !seen[w] && keep(w) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }
}

fn cell_geometry<T: Real>(vertices: &[Vec3<T>], idx: &[usize]) -> (T, [Vec3<T>; 3]) {
    let zero = [T::zero(); 3];
    if idx.len() == 2 {
        let e = sub(&vertices[idx[1]], &vertices[idx[0]]);
        let len2 = dot(&e, &e);
        let g = scale(&e, T::one() / len2);
        return (len2.sqrt(), [scale(&g, -T::one()), g, zero]);
    }
    let x = [vertices[idx[0]], vertices[idx[1]], vertices[idx[2]]];
    let n = cross(&sub(&x[1], &x[0]), &sub(&x[2], &x[0]));
    let n2 = dot(&n, &n);
    let area = n2.sqrt() / T::of(2.0);
    let mut grads = [zero; 3];
    for (i, g) in grads.iter_mut().enumerate() {
        let e = sub(&x[(i + 2) % 3], &x[(i + 1) % 3]);
        *g = scale(&cross(&n, &e), T::one() / n2);
    }
    (area, grads)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> Mesh<f64> {
        let v = vec![
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ];
        Mesh::new(2, v, vec![0, 1, 2, 0, 3, 1, 0, 2, 3, 1, 3, 2]).unwrap()
    }

    #[test]
    fn tetrahedron_is_closed_with_consistent_measures() {
        let m = tetra();
        assert!(m.is_closed());
        assert_eq!(m.edges().len(), 6);
        let cells: f64 = m.cell_measure().iter().sum();
        let verts: f64 = m.vertex_measure().iter().sum();
        assert!((cells - verts).abs() < 1e-12 * cells);
        // regular tetrahedron with edge 2*sqrt(2)
        assert!((cells - 4.0 * 3f64.sqrt() / 4.0 * 8.0).abs() < 1e-12);
    }

    #[test]
    fn hat_gradients_reproduce_linear_fields() {
        let m = tetra();
        let f: Vec<f64> = m.vertices().iter().map(|x| 2.0 * x[0] - x[2]).collect();
        for c in 0..m.cell_count() {
            let g = m.cell_gradient(c, &f);
            // tangential part of (2, 0, -1) reproduces differences along edges
            let idx = m.cell(c);
            for a in 0..3 {
                for b in 0..3 {
                    let d = sub(m.vertex(idx[b]), m.vertex(idx[a]));
                    assert!((dot(&g, &d) - (f[idx[b]] - f[idx[a]])).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_indices_and_disconnected_input() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
        assert!(matches!(Mesh::new(1, v.clone(), vec![0, 2]), Err(Error::MalformedMesh(_))));
        let v4 = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [5.0, 0.0, 0.0], [6.0, 0.0, 0.0]];
        assert_eq!(Mesh::new(1, v4, vec![0, 1, 2, 3]).unwrap_err(), Error::Disconnected);
        assert!(Mesh::new(1, v, vec![0, 0]).is_err());
    }

    #[test]
    fn open_polyline_marks_endpoints() {
        let v = (0..4).map(|i| [i as f64, 0.0, 0.0]).collect();
        let m = Mesh::new(1, v, vec![0, 1, 1, 2, 2, 3]).unwrap();
        assert!(!m.is_closed());
        assert!(m.is_boundary_vertex(0) && m.is_boundary_vertex(3));
        assert!(!m.is_boundary_vertex(1));
        assert_eq!(m.vertex_measure(), &[0.5, 1.0, 1.0, 0.5]);
    }
}
