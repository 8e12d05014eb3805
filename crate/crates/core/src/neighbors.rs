//! Exact k-nearest-neighbor search.
//!
//! Two backends produce bit-identical results: a brute-force scan (the
//! reference) and a kd-tree (faster for low ambient dimension).  Both use
//! the same Euclidean distance routine and the same total order on
//! candidates — ascending distance with ascending row index breaking ties —
//! so a result never depends on which backend computed it.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use rayon::prelude::*;
use std::collections::BinaryHeap;

/// Euclidean distance between two points.  Every distance in the crate goes
/// through this one function, so equal point pairs always give equal bits.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        acc += d * d;
    }
    acc.sqrt()
}

/// Neighbors of one anchor row, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    /// Row index the query was issued for.
    pub anchor: usize,
    /// Neighbor row indices, ascending by (distance, index).
    pub indices: Vec<usize>,
    /// Distances matching `indices`.
    pub distances: Vec<f64>,
}

impl NeighborList {
    /// True when some neighbor coincides with the anchor (distance zero),
    /// which makes likelihood-style dimension estimates undefined there.
    pub fn has_zero_distance(&self) -> bool {
        self.distances.first().is_some_and(|&d| d == 0.0)
    }
}

/// Neighbor lists for a set of anchors at a common `k`.
#[derive(Debug, Clone)]
pub struct NeighborTable {
    pub k: usize,
    pub lists: Vec<NeighborList>,
}

/// Search backend selection.  Both are exact; see the module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchBackend {
    #[default]
    BruteForce,
    KdTree,
}

fn check_query(z: &Matrix, anchor: usize, k: usize) -> Result<()> {
    if anchor >= z.rows() {
        return Err(Error::InvalidArgument(format!(
            "anchor {anchor} out of range for {} rows",
            z.rows()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if k > z.rows() - 1 {
        return Err(Error::KTooLarge(format!(
            "k={k} but only {} other points exist",
            z.rows() - 1
        )));
    }
    Ok(())
}

/// The k nearest neighbors of one row, excluding the row itself.
pub fn knn_query(z: &Matrix, anchor: usize, k: usize) -> Result<NeighborList> {
    check_query(z, anchor, k)?;
    Ok(brute_query(z, anchor, k))
}

fn brute_query(z: &Matrix, anchor: usize, k: usize) -> NeighborList {
    let q = z.row(anchor);
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(z.rows() - 1);
    for j in 0..z.rows() {
        if j != anchor {
            cand.push((euclidean(q, z.row(j)), j));
        }
    }
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, cmp);
        cand.truncate(k);
    }
    cand.sort_by(cmp);
    NeighborList {
        anchor,
        indices: cand.iter().map(|c| c.1).collect(),
        distances: cand.iter().map(|c| c.0).collect(),
    }
}

/// Neighbor lists for the given anchors (all rows when `None`).
pub fn knn_all(z: &Matrix, anchors: Option<&[usize]>, k: usize) -> Result<NeighborTable> {
    knn_all_with(z, anchors, k, SearchBackend::BruteForce)
}

pub fn knn_all_with(
    z: &Matrix,
    anchors: Option<&[usize]>,
    k: usize,
    backend: SearchBackend,
) -> Result<NeighborTable> {
    let all: Vec<usize>;
    let anchors = match anchors {
        Some(a) => a,
        None => {
            all = (0..z.rows()).collect();
            &all
        }
    };
    for &a in anchors {
        check_query(z, a, k)?;
    }
    let lists = match backend {
        SearchBackend::BruteForce => anchors
            .par_iter()
            .map(|&a| brute_query(z, a, k))
            .collect::<Vec<_>>(),
        SearchBackend::KdTree => {
            let tree = KdTree::build(z);
            anchors
                .par_iter()
                .map(|&a| tree.query_row(a, k))
                .collect::<Vec<_>>()
        }
    };
    Ok(NeighborTable { k, lists })
}

/// The anchor row followed by its `m` nearest neighbors, as a new matrix.
/// Row 0 is the anchor; rows 1..=m are neighbors in ascending order.
pub fn neighborhood_extract(z: &Matrix, anchor: usize, m: usize) -> Result<Matrix> {
    let list = knn_query(z, anchor, m)?;
    let mut rows = Vec::with_capacity(m + 1);
    rows.push(anchor);
    rows.extend_from_slice(&list.indices);
    Ok(z.select_rows(&rows))
}

// ---------------------------------------------------------------------------
// kd-tree backend
// ---------------------------------------------------------------------------

/// Pruning slack: a subtree is skipped only when its axis gap exceeds the
/// current worst distance by more than this relative margin.  Computed
/// distances carry a few ulps of rounding; the margin keeps borderline
/// points (common in tie-heavy grid data) from being pruned by one backend
/// and kept by the other.
const PRUNE_SLACK: f64 = 1e-12;

const LEAF_SIZE: usize = 16;

enum Node {
    Leaf {
        points: Vec<usize>,
    },
    Split {
        dim: usize,
        value: f64,
        point: usize,
        left: Box<Node>,
        right: Box<Node>,
    },
}

/// Exact kd-tree over the rows of a matrix.
pub struct KdTree<'a> {
    data: &'a Matrix,
    root: Node,
}

impl<'a> KdTree<'a> {
    pub fn build(data: &'a Matrix) -> KdTree<'a> {
        let mut idx: Vec<usize> = (0..data.rows()).collect();
        let root = build_node(data, &mut idx, 0);
        KdTree { data, root }
    }

    /// Neighbors of an existing row; identical to the brute-force result.
    pub fn query_row(&self, anchor: usize, k: usize) -> NeighborList {
        let q = self.data.row(anchor);
        let mut heap: BinaryHeap<HeapItem> = BinaryHeap::with_capacity(k + 1);
        search(&self.root, self.data, q, Some(anchor), k, &mut heap);
        let mut items: Vec<HeapItem> = heap.into_vec();
        items.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.index.cmp(&b.index)));
        NeighborList {
            anchor,
            indices: items.iter().map(|i| i.index).collect(),
            distances: items.iter().map(|i| i.dist).collect(),
        }
    }

    /// Neighbors of an arbitrary point (no row is excluded).
    pub fn query_point(&self, point: &[f64], k: usize) -> Result<NeighborList> {
        if point.len() != self.data.cols() {
            return Err(Error::DimensionMismatch(format!(
                "query point has {} coordinates, data has {}",
                point.len(),
                self.data.cols()
            )));
        }
        if k == 0 || k > self.data.rows() {
            return Err(Error::KTooLarge(format!(
                "k={k} outside 1..={}",
                self.data.rows()
            )));
        }
        let mut heap: BinaryHeap<HeapItem> = BinaryHeap::with_capacity(k + 1);
        search(&self.root, self.data, point, None, k, &mut heap);
        let mut items: Vec<HeapItem> = heap.into_vec();
        items.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.index.cmp(&b.index)));
        Ok(NeighborList {
            anchor: usize::MAX,
            indices: items.iter().map(|i| i.index).collect(),
            distances: items.iter().map(|i| i.dist).collect(),
        })
    }
}

/// Max-heap item ordered by (distance, index); the heap root is the current
/// worst candidate under the same total order the brute-force scan uses.
struct HeapItem {
    dist: f64,
    index: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.dist.to_bits() == other.dist.to_bits() && self.index == other.index
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.index.cmp(&other.index))
    }
}

fn build_node(data: &Matrix, idx: &mut [usize], depth: usize) -> Node {
    if idx.len() <= LEAF_SIZE {
        return Node::Leaf { points: idx.to_vec() };
    }
    let dim = depth % data.cols();
    let mid = idx.len() / 2;
    idx.select_nth_unstable_by(mid, |&a, &b| {
        data.get(a, dim)
            .total_cmp(&data.get(b, dim))
            .then(a.cmp(&b))
    });
    let point = idx[mid];
    let value = data.get(point, dim);
    let (lo, rest) = idx.split_at_mut(mid);
    let hi = &mut rest[1..];
    Node::Split {
        dim,
        value,
        point,
        left: Box::new(build_node(data, lo, depth + 1)),
        right: Box::new(build_node(data, hi, depth + 1)),
    }
}

fn offer(
    data: &Matrix,
    q: &[f64],
    exclude: Option<usize>,
    j: usize,
    k: usize,
    heap: &mut BinaryHeap<HeapItem>,
) {
    if exclude == Some(j) {
        return;
    }
    let dist = euclidean(q, data.row(j));
    if heap.len() < k {
        heap.push(HeapItem { dist, index: j });
    } else {
        let worst = heap.peek().expect("heap nonempty");
        if dist.total_cmp(&worst.dist).then(j.cmp(&worst.index)).is_lt() {
            heap.pop();
            heap.push(HeapItem { dist, index: j });
        }
    }
}

fn search(
    node: &Node,
    data: &Matrix,
    q: &[f64],
    exclude: Option<usize>,
    k: usize,
    heap: &mut BinaryHeap<HeapItem>,
) {
    match node {
        Node::Leaf { points } => {
            for &j in points {
                offer(data, q, exclude, j, k, heap);
            }
        }
        Node::Split { dim, value, point, left, right } => {
            offer(data, q, exclude, *point, k, heap);
            let gap = q[*dim] - value;
            let (near, far) = if gap <= 0.0 { (left, right) } else { (right, left) };
            search(near, data, q, exclude, k, heap);
            let must_visit_far = match heap.peek() {
                Some(worst) if heap.len() == k => {
                    gap.abs() * (1.0 - PRUNE_SLACK) <= worst.dist
                }
                _ => true,
            };
            if must_visit_far {
                search(far, data, q, exclude, k, heap);
            }
        }
    }
}
