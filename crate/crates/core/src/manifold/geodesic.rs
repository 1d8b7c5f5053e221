//! Graph-geodesic distances and the mesh diameter.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::Result;
use crate::scalar::Real;

use super::Mesh;

/// Which vertex pairs are joined in the distance graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMetric {
    /// Mesh edges only.
    Edges,
    /// Straight chords to every vertex within `k` edge hops.
    Rings(usize),
}

impl GraphMetric {
    /// Default for a mesh: mesh edges on curves, 3-ring chords on surfaces.
    pub fn for_mesh<T: Real>(mesh: &Mesh<T>) -> Self {
        if mesh.dimension() == 1 {
            GraphMetric::Edges
        } else {
            GraphMetric::Rings(3)
        }
    }
}

/// Meshes up to this many vertices get exact all-pairs eccentricities.
pub const ALL_PAIRS_BUDGET: usize = 2500;
const LANDMARKS: usize = 32;

#[derive(PartialEq)]
struct Item<T>(T, usize);

impl<T: PartialOrd> Eq for Item<T> {}

impl<T: PartialOrd> Ord for Item<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then(other.1.cmp(&self.1))
    }
}

impl<T: PartialOrd> PartialOrd for Item<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Weighted adjacency in CSR form.
pub struct DistanceGraph<T> {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<T>,
}

impl<T: Real> DistanceGraph<T> {
    pub fn new(mesh: &Mesh<T>, metric: GraphMetric) -> Self {
        let nv = mesh.vertex_count();
        let depth = match metric {
            GraphMetric::Edges => 1,
            GraphMetric::Rings(k) => k.max(1),
        };
        let mut offsets = Vec::with_capacity(nv + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        let mut mark = vec![usize::MAX; nv];
        let mut frontier = Vec::new();
        let mut next = Vec::new();
        for v in 0..nv {
            mark[v] = v;
            frontier.clear();
            frontier.push(v);
            let mut found = Vec::new();
            for _ in 0..depth {
                next.clear();
                for &a in &frontier {
                    for &b in mesh.neighbors(a) {
                        if mark[b] != v {
                            mark[b] = v;
                            next.push(b);
                            found.push(b);
                        }
                    }
                }
                std::mem::swap(&mut frontier, &mut next);
            }
            found.sort_unstable();
            for w in found {
                targets.push(w);
                weights.push(mesh.edge_length(v, w));
            }
            offsets.push(targets.len());
        }
        DistanceGraph { offsets, targets, weights }
    }

    /// Single-source shortest path lengths (Dijkstra).
    pub fn distances_from(&self, source: usize) -> Vec<T> {
        let n = self.offsets.len() - 1;
        let mut dist = vec![T::infinity(); n];
        let mut heap = BinaryHeap::new();
        dist[source] = T::zero();
        heap.push(Item(T::zero(), source));
        while let Some(Item(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for k in self.offsets[v]..self.offsets[v + 1] {
                let w = self.targets[k];
                let nd = d + self.weights[k];
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Item(nd, w));
                }
            }
        }
        dist
    }
}

fn eccentricity<T: Real>(dist: &[T]) -> T {
    dist.iter().fold(T::zero(), |m, &d| m.max(d))
}

/// Largest graph-geodesic distance between two vertices.
///
/// Exact over all pairs below [`ALL_PAIRS_BUDGET`] vertices; above it, the
/// maximum eccentricity over farthest-point landmarks. Graph distances are
/// upper bounds of the polyhedral geodesic distance.
pub fn diameter<T: Real>(mesh: &Mesh<T>) -> Result<T> {
    diameter_with(mesh, GraphMetric::for_mesh(mesh))
}

pub fn diameter_with<T: Real>(mesh: &Mesh<T>, metric: GraphMetric) -> Result<T> {
    let graph = DistanceGraph::new(mesh, metric);
    let nv = mesh.vertex_count();
    if nv <= ALL_PAIRS_BUDGET {
        let d = (0..nv)
            .into_par_iter()
            .map(|s| eccentricity(&graph.distances_from(s)))
            .reduce(T::zero, T::max);
        return Ok(d);
    }
    let mut nearest = vec![T::infinity(); nv];
    let mut best = T::zero();
    let mut source = 0;
    for _ in 0..LANDMARKS {
        let dist = graph.distances_from(source);
        best = best.max(eccentricity(&dist));
        for (n, d) in nearest.iter_mut().zip(&dist) {
            *n = n.min(*d);
        }
        source = (0..nv)
            .max_by(|&a, &b| nearest[a].partial_cmp(&nearest[b]).unwrap_or(Ordering::Equal))
            .unwrap_or(0);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{build_circle, build_icosphere};
    use std::f64::consts::PI;

    #[test]
    fn circle_diameter_is_half_perimeter() {
        let m = build_circle::<f64>(200, 1.0).unwrap();
        let d = diameter(&m).unwrap();
        let perim: f64 = m.cell_measure().iter().sum();
        assert!((d - perim / 2.0).abs() < 1e-12);
    }

    #[test]
    fn diameter_scales_exactly() {
        let m = build_icosphere::<f64>(2, 1.0).unwrap();
        let m2 = m.scaled(2.0).unwrap();
        assert_eq!(diameter(&m2).unwrap(), 2.0 * diameter(&m).unwrap());
    }

    #[test]
    fn ring_chords_reduce_edge_graph_bias() {
        let m = build_icosphere::<f64>(3, 1.0).unwrap();
        let edges = diameter_with(&m, GraphMetric::Edges).unwrap();
        let rings = diameter_with(&m, GraphMetric::Rings(3)).unwrap();
        assert!(rings <= edges);
        assert!(rings >= PI * 0.98);
    }
}
