//! Exact k-d tree over `D`-dimensional points with bucketed leaves.

use nalgebra::Vector3;

pub const DEFAULT_BUCKET_SIZE: usize = 16;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Immutable k-d tree. Queries return indices into the slice it was built from.
#[derive(Debug, Clone)]
pub struct KdTree<const D: usize> {
    points: Vec<[f64; D]>,
    /// Permutation of point indices; leaves own contiguous ranges of it.
    order: Vec<usize>,
    nodes: Vec<Node>,
    bucket_size: usize,
}

pub type KdTree3 = KdTree<3>;
pub type KdTree2 = KdTree<2>;

#[inline]
fn dist2<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    let mut s = 0.0;
    for k in 0..D {
        let d = a[k] - b[k];
        s += d * d;
    }
    s
}

/// `(squared distance, index)` ordering used for deterministic tie breaks.
#[inline]
fn better(d: f64, i: usize, best_d: f64, best_i: usize) -> bool {
    d < best_d || (d == best_d && i < best_i)
}

impl<const D: usize> KdTree<D> {
    pub fn new(points: Vec<[f64; D]>) -> Self {
        Self::with_bucket_size(points, DEFAULT_BUCKET_SIZE)
    }

    pub fn with_bucket_size(points: Vec<[f64; D]>, bucket_size: usize) -> Self {
        let bucket_size = bucket_size.max(1);
        let mut tree = Self {
            order: (0..points.len()).collect(),
            points,
            nodes: Vec::new(),
            bucket_size,
        };
        if !tree.points.is_empty() {
            tree.build(0, tree.points.len());
        }
        tree
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= self.bucket_size {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        // Split on the axis with the widest spread.
        let mut axis = 0;
        let mut widest = f64::NEG_INFINITY;
        for k in 0..D {
            let (lo, hi) = self.order[start..end].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let v = self.points[i][k];
                (lo.min(v), hi.max(v))
            });
            if hi - lo > widest {
                widest = hi - lo;
                axis = k;
            }
        }
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a][axis].total_cmp(&points[b][axis])
        });
        let value = self.points[self.order[mid]][axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right };
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, index: usize) -> &[f64; D] {
        &self.points[index]
    }

    /// Exact nearest neighbour: `(index, distance)`. `None` for an empty tree.
    pub fn nearest(&self, query: &[f64; D]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, usize::MAX);
        self.nearest_rec(0, query, &mut best);
        Some((best.1, best.0.sqrt()))
    }

    fn nearest_rec(&self, node: usize, q: &[f64; D], best: &mut (f64, usize)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let d = dist2(&self.points[i], q);
                    if better(d, i, best.0, best.1) {
                        *best = (d, i);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.nearest_rec(near, q, best);
                if diff * diff <= best.0 {
                    self.nearest_rec(far, q, best);
                }
            }
        }
    }

    /// The `k` nearest neighbours sorted by increasing distance.
    pub fn knn(&self, query: &[f64; D], k: usize) -> Vec<(usize, f64)> {
        if k == 0 || self.points.is_empty() {
            return Vec::new();
        }
        let mut heap: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        self.knn_rec(0, query, k, &mut heap);
        heap.into_iter().map(|(d, i)| (i, d.sqrt())).collect()
    }

    fn knn_rec(&self, node: usize, q: &[f64; D], k: usize, found: &mut Vec<(f64, usize)>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let d = dist2(&self.points[i], q);
                    if found.len() < k || better(d, i, found[k - 1].0, found[k - 1].1) {
                        let pos = found.partition_point(|&(bd, bi)| better(bd, bi, d, i));
                        found.insert(pos, (d, i));
                        found.truncate(k);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.knn_rec(near, q, k, found);
                if found.len() < k || diff * diff <= found[k - 1].0 {
                    self.knn_rec(far, q, k, found);
                }
            }
        }
    }
}

impl KdTree<3> {
    pub fn from_vectors(points: &[Vector3<f64>]) -> Self {
        Self::new(points.iter().map(|p| [p.x, p.y, p.z]).collect())
    }

    pub fn nearest_vec(&self, query: &Vector3<f64>) -> Option<(usize, f64)> {
        self.nearest(&[query.x, query.y, query.z])
    }
}

/// `nearestNeighbor` as a free function.
pub fn nearest_neighbor(tree: &KdTree3, query: &Vector3<f64>) -> Option<(usize, f64)> {
    tree.nearest_vec(query)
}
