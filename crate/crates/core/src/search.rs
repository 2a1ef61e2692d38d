//! Binary-heap Dijkstra over a [`DiscreteSpace`] with deterministic
//! tie-breaking: equal keys pop in increasing vertex id, and a label is only
//! replaced by a strictly smaller one.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::space::{DiscreteSpace, Edge};
use crate::VertexId;

pub(crate) const NO_PRED: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    key: f64,
    vertex: VertexId,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (key, vertex)
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which edge weight a search runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    Euclid,
    Qh,
}

impl Weight {
    pub(crate) fn of(self, e: &Edge) -> f64 {
        match self {
            Weight::Euclid => e.len,
            Weight::Qh => e.qh,
        }
    }
}

/// Shortest-path tree rooted at `source`.
#[derive(Clone, Debug)]
pub(crate) struct Tree {
    pub source: VertexId,
    pub dist: Vec<f64>,
    pub pred: Vec<usize>,
}

impl Tree {
    pub fn reached(&self, v: VertexId) -> bool {
        self.dist[v].is_finite()
    }

    /// Vertex sequence `source -> ... -> v`, or `None` if unreached.
    pub fn path_to(&self, v: VertexId) -> Option<Vec<VertexId>> {
        if !self.reached(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while cur != self.source {
            cur = self.pred[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Vertex sequence `v -> ... -> source` (the tree path read backwards).
    pub fn path_from(&self, v: VertexId) -> Option<Vec<VertexId>> {
        self.path_to(v).map(|mut p| {
            p.reverse();
            p
        })
    }
}

/// Runs Dijkstra from `source`. The search stops once every vertex of
/// `targets` is settled (all vertices when `targets` is empty). An edge
/// `u -> v` is relaxed only if `admit(v, new_dist)` holds.
pub(crate) fn dijkstra<F>(
    space: &DiscreteSpace,
    source: VertexId,
    targets: &[VertexId],
    weight: Weight,
    mut admit: F,
) -> Tree
where
    F: FnMut(VertexId, f64) -> bool,
{
    let n = space.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PRED; n];
    let mut settled = vec![false; n];
    let mut remaining = targets.iter().filter(|&&t| t < n).count();
    let mut is_target = vec![false; if targets.is_empty() { 0 } else { n }];
    for &t in targets {
        if t < n {
            is_target[t] = true;
        }
    }

    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry { key: 0.0, vertex: source });

    while let Some(Entry { key, vertex: u }) = heap.pop() {
        if settled[u] || key > dist[u] {
            continue;
        }
        settled[u] = true;
        if !is_target.is_empty() && is_target[u] {
            is_target[u] = false;
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
        for e in space.neighbors(u) {
            if settled[e.to] {
                continue;
            }
            let nd = key + weight.of(e);
            if nd < dist[e.to] && admit(e.to, nd) {
                dist[e.to] = nd;
                pred[e.to] = u;
                heap.push(Entry { key: nd, vertex: e.to });
            }
        }
    }

    Tree { source, dist, pred }
}
