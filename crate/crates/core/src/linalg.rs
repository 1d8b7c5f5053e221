//! Sparse symmetric assembly on vertex subsets and an envelope (skyline)
//! Cholesky factorization under reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::manifold::Mesh;
use crate::scalar::{dot, Real};

/// Dense renumbering of the active vertices of a mesh.
#[derive(Debug, Clone)]
pub struct LocalIndex {
    to_local: Vec<usize>,
    to_global: Vec<usize>,
}

impl LocalIndex {
    pub fn new(active: &[bool]) -> Self {
        let mut to_local = vec![usize::MAX; active.len()];
        let mut to_global = Vec::new();
        for (v, &a) in active.iter().enumerate() {
            if a {
                to_local[v] = to_global.len();
                to_global.push(v);
            }
        }
        LocalIndex { to_local, to_global }
    }

    pub fn len(&self) -> usize {
        self.to_global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_global.is_empty()
    }

    #[inline]
    pub fn local(&self, v: usize) -> Option<usize> {
        let l = self.to_local[v];
        (l != usize::MAX).then_some(l)
    }

    #[inline]
    pub fn global(&self, l: usize) -> usize {
        self.to_global[l]
    }

    pub fn gather<T: Copy>(&self, full: &[T]) -> Vec<T> {
        self.to_global.iter().map(|&v| full[v]).collect()
    }

    pub fn scatter<T: Copy>(&self, local: &[T], full: &mut [T]) {
        for (l, &v) in self.to_global.iter().enumerate() {
            full[v] = local[l];
        }
    }
}

/// Symmetric matrix in CSR form (both triangles stored), rows sorted.
#[derive(Debug, Clone)]
pub struct SparseSym<T> {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> SparseSym<T> {
    /// Stiffness matrix `sum_c w_c |c| grad(phi_a) . grad(phi_b)` restricted to active vertices.
    pub fn stiffness(mesh: &Mesh<T>, index: &LocalIndex, cell_weight: Option<&[T]>) -> Self {
        let n = index.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        offsets.push(0);
        for l in 0..n {
            let v = index.global(l);
            let mut row: Vec<usize> = mesh.neighbors(v).iter().filter_map(|&w| index.local(w)).collect();
            row.push(l);
            row.sort_unstable();
            cols.extend(row);
            offsets.push(cols.len());
        }
        let mut m = SparseSym { offsets, cols, vals: Vec::new() };
        m.vals = vec![T::zero(); m.cols.len()];
        for c in 0..mesh.cell_count() {
            let w = cell_weight.map_or(T::one(), |w| w[c]) * mesh.cell_measure()[c];
            if w == T::zero() {
                continue;
            }
            let cell = mesh.cell(c);
            let grads = mesh.cell_gradients(c);
            for a in 0..cell.len() {
                let Some(la) = index.local(cell[a]) else { continue };
                for b in 0..cell.len() {
                    let Some(lb) = index.local(cell[b]) else { continue };
                    let k = m.position(la, lb);
                    m.vals[k] = m.vals[k] + w * dot(&grads[a], &grads[b]);
                }
            }
        }
        m
    }

    fn position(&self, row: usize, col: usize) -> usize {
        let r = &self.cols[self.offsets[row]..self.offsets[row + 1]];
        self.offsets[row] + r.binary_search(&col).expect("entry in pattern")
    }

    pub fn dim(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn add_diagonal(&mut self, diag: &[T]) {
        for (l, &d) in diag.iter().enumerate() {
            let k = self.position(l, l);
            self.vals[k] = self.vals[k] + d;
        }
    }

    pub fn mul(&self, x: &[T]) -> Vec<T> {
        (0..self.dim())
            .map(|r| {
                (self.offsets[r]..self.offsets[r + 1])
                    .map(|k| self.vals[k] * x[self.cols[k]])
                    .fold(T::zero(), |a, b| a + b)
            })
            .collect()
    }

    fn row(&self, r: usize) -> (&[usize], &[T]) {
        let span = self.offsets[r]..self.offsets[r + 1];
        (&self.cols[span.clone()], &self.vals[span])
    }
}

/// Reverse Cuthill-McKee permutation: `perm[new] = old`.
pub fn reverse_cuthill_mckee<T: Real>(a: &SparseSym<T>) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|r| a.row(r).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_levels = |start: usize| -> (usize, usize) {
        // (farthest vertex of minimum degree in last level, eccentricity)
        let mut dist = vec![usize::MAX; n];
        let mut q = VecDeque::from([start]);
        dist[start] = 0;
        let mut last = start;
        while let Some(v) = q.pop_front() {
            last = v;
            for &w in a.row(v).0 {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        let ecc = dist[last];
        let far = (0..n)
            .filter(|&v| dist[v] == ecc)
            .min_by_key(|&v| (degree[v], v))
            .unwrap_or(last);
        (far, ecc)
    };

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // pseudo-peripheral start
        let mut start = seed;
        let (mut far, mut ecc) = bfs_levels(start);
        for _ in 0..4 {
            let (f2, e2) = bfs_levels(far);
            if e2 <= ecc {
                break;
            }
            start = far;
            far = f2;
            ecc = e2;
        }
        let mut q = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = q.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = a.row(v).0.iter().copied().filter(|&w| !visited[w]).collect();
            nb.sort_unstable_by_key(|&w| (degree[w], w));
            for w in nb {
                visited[w] = true;
                q.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope Cholesky factor `P A P^T = L L^T`.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky<T> {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> EnvelopeCholesky<T> {
    pub fn factor(a: &SparseSym<T>) -> Result<Self> {
        let n = a.dim();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in perm.iter().enumerate() {
            for &c in a.row(old).0 {
                first[new] = first[new].min(inv[c]);
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut vals = vec![T::zero(); start[n]];
        for (new, &old) in perm.iter().enumerate() {
            let (cols, v) = a.row(old);
            for (&c, &x) in cols.iter().zip(v) {
                let j = inv[c];
                if j <= new {
                    vals[start[new] + j - first[new]] = x;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let (before, rest) = vals.split_at_mut(start[i]);
            let row_i = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let row_j = &before[start[j]..start[j] + (j - fj + 1)];
                let mut s = row_i[j - fi];
                for k in lo..j {
                    s = s - row_i[k - fi] * row_j[k - fj];
                }
                row_i[j - fi] = s / row_j[j - fj];
            }
            let mut d = row_i[i - fi];
            for k in fi..i {
                d = d - row_i[k - fi] * row_i[k - fi];
            }
            if !(d > T::zero()) {
                return Err(Error::NotPositiveDefinite(i));
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(EnvelopeCholesky { perm, first, start, vals })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.vals.len()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut y: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i + 1]];
            let mut s = y[i];
            for k in fi..i {
                s = s - row[k - fi] * y[k];
            }
            y[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i + 1]];
            let xi = y[i] / row[i - fi];
            y[i] = xi;
            for k in fi..i {
                y[k] = y[k] - row[k - fi] * xi;
            }
        }
        let mut x = vec![T::zero(); n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
