//! Max-norm (Chebyshev) neighbor queries over an embedded point set.
//!
//! A kd-tree handles large sets; below [`BRUTE_FORCE_THRESHOLD`] points a
//! linear scan is faster and doubles as the correctness oracle in tests.

use crate::embedding::EmbeddedPointSet;

/// Below this point count a linear scan replaces the kd-tree.
pub const BRUTE_FORCE_THRESHOLD: usize = 2048;

const LEAF_SIZE: usize = 16;

pub fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    let mut d = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        d = d.max((x - y).abs());
    }
    d
}

#[derive(Debug)]
struct KdNode {
    start: u32,
    end: u32,
    split_dim: u32,
    split_val: f64,
    /// Child node indices; `u32::MAX` marks a leaf.
    left: u32,
    right: u32,
}

#[derive(Debug)]
enum IndexKind {
    Brute,
    Kd { order: Vec<u32>, nodes: Vec<KdNode> },
}

/// Immutable spatial index; queries are read-only and thread-safe.
#[derive(Debug)]
pub struct MaxNormIndex {
    data: Vec<f64>,
    dim: usize,
    count: usize,
    kind: IndexKind,
}

impl MaxNormIndex {
    /// Build with automatic brute-force fallback for small sets.
    pub fn build(points: &EmbeddedPointSet) -> Self {
        if points.len() < BRUTE_FORCE_THRESHOLD {
            Self::build_brute(points)
        } else {
            Self::build_kd(points)
        }
    }

    pub fn build_brute(points: &EmbeddedPointSet) -> Self {
        Self {
            data: points.as_flat().to_vec(),
            dim: points.dim(),
            count: points.len(),
            kind: IndexKind::Brute,
        }
    }

    pub fn build_kd(points: &EmbeddedPointSet) -> Self {
        let dim = points.dim();
        let count = points.len();
        let data = points.as_flat().to_vec();
        let mut order: Vec<u32> = (0..count as u32).collect();
        let mut nodes = Vec::with_capacity(2 * count / LEAF_SIZE + 1);
        build_node(&data, dim, &mut order, 0, count, &mut nodes);
        Self {
            data,
            dim,
            count,
            kind: IndexKind::Kd { order, nodes },
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Ascending distances from point `i` to its `k` nearest neighbors,
    /// excluding `i` itself.
    pub fn knn_distances(&self, i: usize, k: usize) -> Vec<f64> {
        let k = k.min(self.count.saturating_sub(1));
        if k == 0 {
            return Vec::new();
        }
        let q = self.point(i);
        match &self.kind {
            IndexKind::Brute => {
                let mut dists: Vec<f64> = (0..self.count)
                    .filter(|&j| j != i)
                    .map(|j| chebyshev(q, self.point(j)))
                    .collect();
                dists.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).unwrap());
                let mut best = dists[..k].to_vec();
                best.sort_by(|a, b| a.partial_cmp(b).unwrap());
                best
            }
            IndexKind::Kd { order, nodes } => {
                let mut best = BoundedBest::new(k);
                knn_recurse(self, order, nodes, 0, q, i, &mut best);
                best.into_sorted()
            }
        }
    }

    /// Number of points strictly within `radius` of point `i` (self
    /// excluded).
    pub fn count_within(&self, i: usize, radius: f64) -> usize {
        let q = self.point(i);
        match &self.kind {
            IndexKind::Brute => (0..self.count)
                .filter(|&j| j != i && chebyshev(q, self.point(j)) < radius)
                .count(),
            IndexKind::Kd { order, nodes } => {
                let mut count = 0usize;
                count_recurse(self, order, nodes, 0, q, i, radius, &mut count);
                count
            }
        }
    }

    /// Sorted distances of all points strictly within `radius` of point
    /// `i` (self excluded); lets callers count for several radii at once.
    pub fn distances_within(&self, i: usize, radius: f64) -> Vec<f64> {
        let q = self.point(i);
        let mut out = Vec::new();
        match &self.kind {
            IndexKind::Brute => {
                for j in 0..self.count {
                    if j != i {
                        let d = chebyshev(q, self.point(j));
                        if d < radius {
                            out.push(d);
                        }
                    }
                }
            }
            IndexKind::Kd { order, nodes } => {
                collect_recurse(self, order, nodes, 0, q, i, radius, &mut out);
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

/// Fixed-capacity container of the k smallest distances seen so far.
struct BoundedBest {
    k: usize,
    dists: Vec<f64>,
}

impl BoundedBest {
    fn new(k: usize) -> Self {
        Self {
            k,
            dists: Vec::with_capacity(k + 1),
        }
    }

    fn worst(&self) -> f64 {
        if self.dists.len() < self.k {
            f64::INFINITY
        } else {
            *self.dists.last().unwrap()
        }
    }

    fn push(&mut self, d: f64) {
        if d >= self.worst() {
            return;
        }
        let pos = self.dists.partition_point(|&x| x <= d);
        self.dists.insert(pos, d);
        self.dists.truncate(self.k);
    }

    fn into_sorted(self) -> Vec<f64> {
        self.dists
    }
}

fn build_node(
    data: &[f64],
    dim: usize,
    order: &mut [u32],
    start: usize,
    end: usize,
    nodes: &mut Vec<KdNode>,
) -> u32 {
    let id = nodes.len() as u32;
    nodes.push(KdNode {
        start: start as u32,
        end: end as u32,
        split_dim: 0,
        split_val: 0.0,
        left: u32::MAX,
        right: u32::MAX,
    });
    if end - start <= LEAF_SIZE {
        return id;
    }
    // Split along the coordinate with the widest spread.
    let mut split_dim = 0usize;
    let mut best_spread = -1.0f64;
    for d in 0..dim {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &p in &order[start..end] {
            let v = data[p as usize * dim + d];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo > best_spread {
            best_spread = hi - lo;
            split_dim = d;
        }
    }
    if best_spread <= 0.0 {
        // All points coincide; keep as a (large) leaf.
        return id;
    }
    let mid = (start + end) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        let va = data[a as usize * dim + split_dim];
        let vb = data[b as usize * dim + split_dim];
        va.partial_cmp(&vb).unwrap()
    });
    let split_val = data[order[mid] as usize * dim + split_dim];
    let left = build_node(data, dim, order, start, mid, nodes);
    let right = build_node(data, dim, order, mid, end, nodes);
    let node = &mut nodes[id as usize];
    node.split_dim = split_dim as u32;
    node.split_val = split_val;
    node.left = left;
    node.right = right;
    id
}

fn knn_recurse(
    index: &MaxNormIndex,
    order: &[u32],
    nodes: &[KdNode],
    node_id: u32,
    q: &[f64],
    exclude: usize,
    best: &mut BoundedBest,
) {
    let node = &nodes[node_id as usize];
    if node.left == u32::MAX {
        for &p in &order[node.start as usize..node.end as usize] {
            let j = p as usize;
            if j != exclude {
                best.push(chebyshev(q, index.point(j)));
            }
        }
        return;
    }
    let diff = q[node.split_dim as usize] - node.split_val;
    let (near, far) = if diff < 0.0 {
        (node.left, node.right)
    } else {
        (node.right, node.left)
    };
    knn_recurse(index, order, nodes, near, q, exclude, best);
    if diff.abs() < best.worst() {
        knn_recurse(index, order, nodes, far, q, exclude, best);
    }
}

#[allow(clippy::too_many_arguments)]
fn count_recurse(
    index: &MaxNormIndex,
    order: &[u32],
    nodes: &[KdNode],
    node_id: u32,
    q: &[f64],
    exclude: usize,
    radius: f64,
    count: &mut usize,
) {
    let node = &nodes[node_id as usize];
    if node.left == u32::MAX {
        for &p in &order[node.start as usize..node.end as usize] {
            let j = p as usize;
            if j != exclude && chebyshev(q, index.point(j)) < radius {
                *count += 1;
            }
        }
        return;
    }
    let diff = q[node.split_dim as usize] - node.split_val;
    let (near, far) = if diff < 0.0 {
        (node.left, node.right)
    } else {
        (node.right, node.left)
    };
    count_recurse(index, order, nodes, near, q, exclude, radius, count);
    if diff.abs() < radius {
        count_recurse(index, order, nodes, far, q, exclude, radius, count);
    }
}

#[allow(clippy::too_many_arguments)]
fn collect_recurse(
    index: &MaxNormIndex,
    order: &[u32],
    nodes: &[KdNode],
    node_id: u32,
    q: &[f64],
    exclude: usize,
    radius: f64,
    out: &mut Vec<f64>,
) {
    let node = &nodes[node_id as usize];
    if node.left == u32::MAX {
        for &p in &order[node.start as usize..node.end as usize] {
            let j = p as usize;
            if j != exclude {
                let d = chebyshev(q, index.point(j));
                if d < radius {
                    out.push(d);
                }
            }
        }
        return;
    }
    let diff = q[node.split_dim as usize] - node.split_val;
    let (near, far) = if diff < 0.0 {
        (node.left, node.right)
    } else {
        (node.right, node.left)
    };
    collect_recurse(index, order, nodes, near, q, exclude, radius, out);
    if diff.abs() < radius {
        collect_recurse(index, order, nodes, far, q, exclude, radius, out);
    }
}
