//! Exact cosine nearest-neighbor search.
//!
//! Rows are stored unit-normalized, so `|u - v|^2 = 2 - 2 cos(u, v)` and a
//! Euclidean ball tree answers cosine queries exactly. Small row sets are
//! scanned directly. Results are ordered by descending similarity with ties
//! going to the lower row index, identically for both paths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Pruning slack on similarity bounds. Much larger than the rounding error of
/// the bound, so no candidate that could enter the result is ever skipped.
const PRUNE_SLACK: f64 = 1e-9;

/// Default multiply-add budget per query below which a scan beats the tree.
pub const DEFAULT_BRUTE_THRESHOLD: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Scan when `rows * dim` is below the threshold, otherwise use a tree.
    Auto { brute_threshold: usize },
    BruteForce,
    Tree,
}

impl Default for SearchMode {
    fn default() -> Self {
        SearchMode::Auto {
            brute_threshold: DEFAULT_BRUTE_THRESHOLD,
        }
    }
}

impl SearchMode {
    fn wants_tree(self, rows: usize, dim: usize) -> bool {
        match self {
            SearchMode::Auto { brute_threshold } => rows.saturating_mul(dim) >= brute_threshold,
            SearchMode::BruteForce => false,
            SearchMode::Tree => rows > 0,
        }
    }
}

/// One search result: a training row and its cosine similarity to the query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborHit {
    pub index: usize,
    pub similarity: f64,
}

impl Eq for NeighborHit {}

// Greater means worse: lower similarity, then higher index.
impl Ord for NeighborHit {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .similarity
            .total_cmp(&self.similarity)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for NeighborHit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Bounded best-k collector.
#[derive(Debug)]
pub(crate) struct TopK {
    k: usize,
    heap: BinaryHeap<NeighborHit>,
}

impl TopK {
    pub(crate) fn new(k: usize) -> Self {
        Self {
            k,
            heap: BinaryHeap::with_capacity(k + 1),
        }
    }

    fn offer(&mut self, hit: NeighborHit) {
        if self.heap.len() < self.k {
            self.heap.push(hit);
        } else if let Some(worst) = self.heap.peek() {
            if hit < *worst {
                self.heap.pop();
                self.heap.push(hit);
            }
        }
    }

    /// Lowest similarity still able to enter, or `None` while not full.
    fn floor(&self) -> Option<f64> {
        if self.heap.len() < self.k {
            None
        } else {
            self.heap.peek().map(|h| h.similarity)
        }
    }

    pub(crate) fn into_sorted(self) -> Vec<NeighborHit> {
        self.heap.into_sorted_vec()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Scales `x` to unit Euclidean norm.
pub fn unit_normalize(x: &[f64]) -> Result<Vec<f64>> {
    let norm = dot(x, x).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(x.iter().map(|v| v / norm).collect())
}

/// Row-major storage of unit vectors.
#[derive(Debug, Clone)]
pub struct UnitStore {
    dim: usize,
    data: Vec<f64>,
}

impl UnitStore {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            data: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Normalizes and appends `x`, returning its row index.
    pub fn push(&mut self, x: &[f64]) -> Result<usize> {
        if x.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let unit = unit_normalize(x)?;
        self.data.extend_from_slice(&unit);
        Ok(self.len() - 1)
    }

    fn similarity(&self, query: &[f64], i: usize) -> f64 {
        dot(query, self.row(i))
    }
}

#[derive(Debug, Clone)]
struct Node {
    center: Vec<f64>,
    radius: f64,
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

/// Ball tree over a subset of store rows.
#[derive(Debug, Clone)]
struct BallTree {
    ids: Vec<usize>,
    nodes: Vec<Node>,
}

const LEAF_SIZE: usize = 24;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl BallTree {
    fn build(store: &UnitStore, ids: &[usize]) -> Self {
        let mut tree = BallTree {
            ids: ids.to_vec(),
            nodes: Vec::new(),
        };
        if !ids.is_empty() {
            tree.build_node(store, 0, ids.len());
        }
        tree
    }

    fn build_node(&mut self, store: &UnitStore, start: usize, end: usize) -> usize {
        let dim = store.dim();
        let n = (end - start) as f64;
        let mut center = vec![0.0; dim];
        for &i in &self.ids[start..end] {
            for (c, v) in center.iter_mut().zip(store.row(i)) {
                *c += v;
            }
        }
        center.iter_mut().for_each(|c| *c /= n);
        let radius = self.ids[start..end]
            .iter()
            .map(|&i| sq_dist(&center, store.row(i)))
            .fold(0.0, f64::max)
            .sqrt();
        let id = self.nodes.len();
        self.nodes.push(Node {
            center,
            radius,
            start,
            end,
            children: None,
        });
        if end - start <= LEAF_SIZE || radius == 0.0 {
            return id;
        }

        // split along the axis joining two far-apart points, at the median
        let center = &self.nodes[id].center;
        let slice = &self.ids[start..end];
        let far = |from: &[f64]| {
            *slice
                .iter()
                .max_by(|&&a, &&b| {
                    sq_dist(from, store.row(a))
                        .total_cmp(&sq_dist(from, store.row(b)))
                        .then(b.cmp(&a))
                })
                .expect("non-empty node")
        };
        let p1 = far(center);
        let p2 = far(store.row(p1));
        let axis: Vec<f64> = store
            .row(p1)
            .iter()
            .zip(store.row(p2))
            .map(|(a, b)| a - b)
            .collect();
        let mid = (end - start) / 2;
        self.ids[start..end].select_nth_unstable_by(mid, |&a, &b| {
            dot(&axis, store.row(a))
                .total_cmp(&dot(&axis, store.row(b)))
                .then(a.cmp(&b))
        });
        let left = self.build_node(store, start, start + mid);
        let right = self.build_node(store, start + mid, end);
        self.nodes[id].children = Some((left, right));
        id
    }

    fn upper_bound(&self, node: &Node, query: &[f64]) -> f64 {
        let gap = (sq_dist(query, &node.center).sqrt() - node.radius).max(0.0);
        1.0 - 0.5 * gap * gap
    }

    fn search(&self, store: &UnitStore, query: &[f64], top: &mut TopK) {
        if !self.nodes.is_empty() {
            let bound = self.upper_bound(&self.nodes[0], query);
            self.visit(store, 0, bound, query, top);
        }
    }

    fn visit(&self, store: &UnitStore, id: usize, bound: f64, query: &[f64], top: &mut TopK) {
        if let Some(floor) = top.floor() {
            if bound < floor - PRUNE_SLACK {
                return;
            }
        }
        let node = &self.nodes[id];
        match node.children {
            None => {
                for &i in &self.ids[node.start..node.end] {
                    top.offer(NeighborHit {
                        index: i,
                        similarity: store.similarity(query, i),
                    });
                }
            }
            Some((l, r)) => {
                let bl = self.upper_bound(&self.nodes[l], query);
                let br = self.upper_bound(&self.nodes[r], query);
                if bl >= br {
                    self.visit(store, l, bl, query, top);
                    self.visit(store, r, br, query, top);
                } else {
                    self.visit(store, r, br, query, top);
                    self.visit(store, l, bl, query, top);
                }
            }
        }
    }
}

/// Searchable subset of store rows: an indexed part (scanned or tree-backed)
/// plus a buffer of rows inserted since the last rebuild.
#[derive(Debug, Clone)]
pub struct NeighborSearch {
    mode: SearchMode,
    indexed: Vec<usize>,
    tree: Option<BallTree>,
    pending: Vec<usize>,
}

impl NeighborSearch {
    pub fn build(store: &UnitStore, ids: Vec<usize>, mode: SearchMode) -> Self {
        let tree = mode
            .wants_tree(ids.len(), store.dim())
            .then(|| BallTree::build(store, &ids));
        Self {
            mode,
            indexed: ids,
            tree,
            pending: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.indexed.len() + self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn uses_tree(&self) -> bool {
        self.tree.is_some()
    }

    /// Adds a row; rebuilds once pending rows exceed 10% of the indexed size.
    pub fn insert(&mut self, store: &UnitStore, id: usize) {
        self.pending.push(id);
        if self.pending.len() * 10 > self.indexed.len() {
            self.indexed.append(&mut self.pending);
            self.tree = self
                .mode
                .wants_tree(self.indexed.len(), store.dim())
                .then(|| BallTree::build(store, &self.indexed));
        }
    }

    /// The `k` most similar rows to the unit query, best first.
    pub fn top_k(&self, store: &UnitStore, unit_query: &[f64], k: usize) -> Vec<NeighborHit> {
        let mut top = TopK::new(k);
        match &self.tree {
            Some(tree) => tree.search(store, unit_query, &mut top),
            None => scan(store, &self.indexed, unit_query, &mut top),
        }
        scan(store, &self.pending, unit_query, &mut top);
        top.into_sorted()
    }

    pub fn nearest(&self, store: &UnitStore, unit_query: &[f64]) -> Option<NeighborHit> {
        self.top_k(store, unit_query, 1).into_iter().next()
    }
}

fn scan(store: &UnitStore, ids: &[usize], query: &[f64], top: &mut TopK) {
    for &i in ids {
        top.offer(NeighborHit {
            index: i,
            similarity: store.similarity(query, i),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_store(rows: usize, dim: usize, seed: u64) -> UnitStore {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = UnitStore::new(dim);
        for _ in 0..rows {
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            store.push(&x).unwrap();
        }
        store
    }

    fn exhaustive(store: &UnitStore, ids: &[usize], q: &[f64], k: usize) -> Vec<NeighborHit> {
        let mut all: Vec<NeighborHit> = ids
            .iter()
            .map(|&i| NeighborHit {
                index: i,
                similarity: dot(q, store.row(i)),
            })
            .collect();
        all.sort_by(|a, b| {
            b.similarity
                .partial_cmp(&a.similarity)
                .unwrap()
                .then(a.index.cmp(&b.index))
        });
        all.truncate(k);
        all
    }

    #[test]
    fn tree_matches_scan() {
        for seed in 0..20 {
            let store = random_store(400, 8, seed);
            let ids: Vec<usize> = (0..store.len()).collect();
            let search = NeighborSearch::build(&store, ids.clone(), SearchMode::Tree);
            assert!(search.uses_tree());
            let queries = random_store(20, 8, seed + 1000);
            for qi in 0..queries.len() {
                let q = queries.row(qi);
                for k in [1, 3, 17, 400] {
                    assert_eq!(search.top_k(&store, q, k), exhaustive(&store, &ids, q, k));
                }
            }
        }
    }

    #[test]
    fn duplicate_rows_tie_to_lowest_index() {
        let mut store = UnitStore::new(3);
        for _ in 0..60 {
            store.push(&[1.0, 2.0, 3.0]).unwrap();
        }
        let search = NeighborSearch::build(&store, (0..60).collect(), SearchMode::Tree);
        let hits = search.top_k(&store, store.row(5), 3);
        assert_eq!(hits.iter().map(|h| h.index).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn auto_mode_threshold() {
        let store = random_store(100, 10, 1);
        let small = NeighborSearch::build(&store, (0..100).collect(), SearchMode::default());
        assert!(!small.uses_tree());
        let tight = SearchMode::Auto { brute_threshold: 1000 };
        assert!(NeighborSearch::build(&store, (0..100).collect(), tight).uses_tree());
    }

    #[test]
    fn inserts_are_visible_and_trigger_rebuild() {
        let store = random_store(300, 6, 4);
        let mut search = NeighborSearch::build(&store, (0..200).collect(), SearchMode::Tree);
        for i in 200..300 {
            search.insert(&store, i);
            let q = store.row(i);
            let hit = search.nearest(&store, q).unwrap();
            assert_eq!(hit.index, i);
        }
        assert_eq!(search.len(), 300);
        let ids: Vec<usize> = (0..300).collect();
        let q = random_store(1, 6, 99);
        assert_eq!(search.top_k(&store, q.row(0), 10), exhaustive(&store, &ids, q.row(0), 10));
    }

    #[test]
    fn rejects_zero_and_mismatched_rows() {
        let mut store = UnitStore::new(2);
        assert!(matches!(store.push(&[0.0, 0.0]), Err(Error::ZeroVector)));
        assert!(matches!(store.push(&[1.0]), Err(Error::LengthMismatch { .. })));
    }
}
