//! Discretized spaces: uniform 8-connected grids clipped to a planar domain,
//! and abstract boundary-marked weighted graphs.
//!
//! Every edge carries its Euclidean length and its quasihyperbolic length
//! `∫ |dz| / d(z)`, evaluated by the trapezoid rule. A planar edge longer than
//! half the smaller endpoint distance is split into `⌈2ℓ / min d⌉` pieces
//! whose interior nodes get their own boundary distance.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::report::{constants, ConditionId, ConditionReport, MarginTracker, NodeRef, Witness};
use crate::search::{dijkstra, Weight};
use crate::VertexId;

/// Vertex label of an abstract graph: an integer or a string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeId {
    Num(u64),
    Name(String),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Num(n) => write!(f, "{n}"),
            NodeId::Name(s) => f.write_str(s),
        }
    }
}

impl From<u64> for NodeId {
    fn from(n: u64) -> Self {
        NodeId::Num(n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphVertex {
    pub id: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Point>,
}

/// Abstract noncomplete space: a weighted graph whose `boundary` vertices
/// stand in for `∂D`. The space itself is the set of remaining vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSpace {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<(NodeId, NodeId, f64)>,
    pub boundary: Vec<NodeId>,
}

impl GraphSpace {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// One directed half of an undirected edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub to: VertexId,
    pub len: f64,
    pub qh: f64,
}

#[derive(Clone, Debug)]
pub enum Backend {
    /// Planar vertices over a domain; `h` is the lattice spacing the space was built with.
    Grid { domain: Domain, h: f64 },
    /// Abstract graph; `metric` is the row-major all-pairs path metric of the full graph
    /// restricted to the space's vertices.
    Graph { metric: Vec<f64>, labels: Vec<NodeId> },
}

/// Immutable discretization of a noncomplete metric space.
#[derive(Clone, Debug)]
pub struct DiscreteSpace {
    backend: Backend,
    positions: Vec<Option<Point>>,
    dist: Vec<f64>,
    offsets: Vec<usize>,
    edges: Vec<Edge>,
}

impl DiscreteSpace {
    /// Assembles a space from raw parts. Each undirected edge is listed once as
    /// `(u, v, len, qh)`; both directions get identical weights.
    pub(crate) fn assemble(
        backend: Backend,
        positions: Vec<Option<Point>>,
        dist: Vec<f64>,
        undirected: Vec<(VertexId, VertexId, f64, f64)>,
    ) -> Self {
        let n = dist.len();
        let mut adj: Vec<Vec<Edge>> = vec![Vec::new(); n];
        for (u, v, len, qh) in undirected {
            adj[u].push(Edge { to: v, len, qh });
            adj[v].push(Edge { to: u, len, qh });
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut edges = Vec::new();
        offsets.push(0);
        for mut list in adj {
            list.sort_by(|a, b| a.to.cmp(&b.to).then(a.len.total_cmp(&b.len)));
            edges.extend(list);
            offsets.push(edges.len());
        }
        DiscreteSpace { backend, positions, dist, offsets, edges }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn domain(&self) -> Option<&Domain> {
        match &self.backend {
            Backend::Grid { domain, .. } => Some(domain),
            Backend::Graph { .. } => None,
        }
    }

    /// Lattice spacing for grid spaces; the longest edge for graphs.
    pub fn spacing(&self) -> f64 {
        match &self.backend {
            Backend::Grid { h, .. } => *h,
            Backend::Graph { .. } => self.edges.iter().map(|e| e.len).fold(0.0, f64::max),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.dist.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn position(&self, v: VertexId) -> Option<Point> {
        self.positions.get(v).copied().flatten()
    }

    pub fn positions(&self) -> &[Option<Point>] {
        &self.positions
    }

    /// `d(v)`, the distance from `v` to the boundary.
    pub fn boundary_distance(&self, v: VertexId) -> f64 {
        self.dist[v]
    }

    pub fn boundary_distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn neighbors(&self, v: VertexId) -> &[Edge] {
        &self.edges[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Lightest edge `u -> v` under the given weight.
    pub(crate) fn edge(&self, u: VertexId, v: VertexId, weight: Weight) -> Option<&Edge> {
        self.neighbors(u)
            .iter()
            .filter(|e| e.to == v)
            .min_by(|a, b| weight.of(a).total_cmp(&weight.of(b)))
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Distance `|u - v|` in the ambient metric: Euclidean for planar spaces,
    /// the graph path metric for abstract graphs.
    pub fn metric(&self, u: VertexId, v: VertexId) -> f64 {
        match &self.backend {
            Backend::Graph { metric, .. } => metric[u * self.vertex_count() + v],
            Backend::Grid { .. } => match (self.position(u), self.position(v)) {
                (Some(p), Some(q)) => p.dist(q),
                _ => f64::NAN,
            },
        }
    }

    /// Diameter of the underlying space: the domain's for planar backends,
    /// the largest pairwise metric value for graphs.
    pub fn diameter(&self) -> f64 {
        match &self.backend {
            Backend::Grid { domain, .. } => domain.diameter(),
            Backend::Graph { metric, .. } => metric.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Graph vertex carrying the given label.
    pub fn vertex_by_label(&self, id: &NodeId) -> Option<VertexId> {
        match &self.backend {
            Backend::Graph { labels, .. } => labels.iter().position(|l| l == id),
            Backend::Grid { .. } => None,
        }
    }

    pub fn label(&self, v: VertexId) -> Option<&NodeId> {
        match &self.backend {
            Backend::Graph { labels, .. } => labels.get(v),
            Backend::Grid { .. } => None,
        }
    }

    /// Vertex closest to `p` (smallest id on ties).
    pub fn nearest_vertex(&self, p: Point) -> Option<VertexId> {
        let mut best: Option<(f64, VertexId)> = None;
        for (v, q) in self.positions.iter().enumerate() {
            if let Some(q) = q {
                let d = q.dist(p);
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, v));
                }
            }
        }
        best.map(|(_, v)| v)
    }

    pub fn node_ref(&self, v: VertexId) -> NodeRef {
        NodeRef { vertex: Some(v), pos: self.position(v) }
    }

    /// True when every vertex is reachable from vertex 0.
    pub fn is_connected(&self) -> bool {
        if self.vertex_count() == 0 {
            return false;
        }
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for e in self.neighbors(u) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    count += 1;
                    stack.push(e.to);
                }
            }
        }
        count == self.vertex_count()
    }

    /// Deterministic stratified sample of at most `n` vertices with `d(v) >= min_dist`:
    /// the pool is ordered by `(d, id)` and picked at evenly spaced ranks, so both the
    /// vertex closest to the boundary and the deepest vertex are always included.
    /// Returned in increasing id order.
    pub fn stratified_samples(&self, n: usize, min_dist: f64) -> Vec<VertexId> {
        let mut pool: Vec<VertexId> =
            (0..self.vertex_count()).filter(|&v| self.dist[v] >= min_dist).collect();
        if pool.len() > n && n > 0 {
            pool.sort_by(|&a, &b| self.dist[a].total_cmp(&self.dist[b]).then(a.cmp(&b)));
            let picked: BTreeSet<VertexId> = if n == 1 {
                std::iter::once(pool[pool.len() - 1]).collect()
            } else {
                (0..n)
                    .map(|k| pool[((k * (pool.len() - 1)) as f64 / (n - 1) as f64).round() as usize])
                    .collect()
            };
            pool = picked.into_iter().collect();
        } else if n == 0 {
            pool.clear();
        }
        pool
    }
}

/// Quasihyperbolic length of the planar segment `[p, q]` given its endpoint
/// distances, with the subdivision rule described in the module docs.
pub(crate) fn segment_qh(domain: Option<&Domain>, p: Point, q: Point, dp: f64, dq: f64) -> f64 {
    let len = p.dist(q);
    if len == 0.0 {
        return 0.0;
    }
    let dmin = dp.min(dq);
    // the slack keeps the piece count stable under rounding, e.g. after a similarity
    let pieces = (2.0 * len / dmin - 1e-9).ceil();
    match domain {
        Some(domain) if pieces > 1.0 => {
            let n = pieces.min(1e6) as usize;
            let step = len / n as f64;
            let mut sum = 0.5 * (1.0 / dp + 1.0 / dq);
            for k in 1..n {
                let z = p.lerp(q, k as f64 / n as f64);
                sum += 1.0 / domain.distance_to_boundary(z);
            }
            sum * step
        }
        _ => len * (1.0 / dp + 1.0 / dq) / 2.0,
    }
}

const NEIGHBOR_OFFSETS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (-1, 1)];

/// Axis-aligned grid `{(i h, j h)}` clipped to the interior of `domain`, with
/// 8-connected edges that lie entirely inside the domain.
pub fn build_grid_space(domain: &Domain, h: f64) -> Result<DiscreteSpace> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
    }
    let (lo, hi) = domain.bbox();
    let (i0, i1) = ((lo.x / h).ceil() as i64, (hi.x / h).floor() as i64);
    let (j0, j1) = ((lo.y / h).ceil() as i64, (hi.y / h).floor() as i64);
    if i1 < i0 || j1 < j0 {
        return Err(Error::Resolution(format!("spacing {h} leaves no lattice point in the bounding box")));
    }
    let width = (i1 - i0 + 1) as usize;
    let height = (j1 - j0 + 1) as usize;
    if width.saturating_mul(height) > 50_000_000 {
        return Err(Error::Resolution(format!("spacing {h} gives too many lattice points")));
    }

    let mut index = vec![usize::MAX; width * height];
    let mut positions = Vec::new();
    let mut dist = Vec::new();
    let mut lattice = Vec::new();
    for j in j0..=j1 {
        for i in i0..=i1 {
            let p = Point::new(i as f64 * h, j as f64 * h);
            if domain.contains(p) {
                let d = domain.distance_to_boundary(p);
                if d > 0.0 {
                    index[(j - j0) as usize * width + (i - i0) as usize] = positions.len();
                    positions.push(Some(p));
                    dist.push(d);
                    lattice.push((i, j));
                }
            }
        }
    }
    if positions.is_empty() {
        return Err(Error::Resolution(format!("no grid vertex of spacing {h} lies inside the domain")));
    }

    let lookup = |i: i64, j: i64| -> Option<usize> {
        if i < i0 || i > i1 || j < j0 || j > j1 {
            return None;
        }
        let v = index[(j - j0) as usize * width + (i - i0) as usize];
        (v != usize::MAX).then_some(v)
    };

    let mut undirected = Vec::new();
    for (u, &(i, j)) in lattice.iter().enumerate() {
        let pu = positions[u].unwrap();
        for (di, dj) in NEIGHBOR_OFFSETS {
            let Some(v) = lookup(i + di, j + dj) else { continue };
            let pv = positions[v].unwrap();
            let len = pu.dist(pv);
            // a segment shorter than d(u) stays inside the ball B(u, d(u))
            let inside = len < dist[u] || len < dist[v] || domain.segment_inside(pu, pv);
            if inside {
                let (a, b) = if u < v { (u, v) } else { (v, u) };
                let (pa, pb) = (positions[a].unwrap(), positions[b].unwrap());
                let qh = segment_qh(Some(domain), pa, pb, dist[a], dist[b]);
                undirected.push((a, b, len, qh));
            }
        }
    }

    Ok(DiscreteSpace::assemble(
        Backend::Grid { domain: domain.clone(), h },
        positions,
        dist,
        undirected,
    ))
}

/// Builds the discrete space of an abstract graph: the non-boundary vertices,
/// edges among them, and `d(v)` = path distance to the nearest boundary vertex
/// in the full graph.
pub fn graph_space(graph: &GraphSpace) -> Result<DiscreteSpace> {
    let mut id_of: HashMap<&NodeId, usize> = HashMap::new();
    for (k, v) in graph.vertices.iter().enumerate() {
        if id_of.insert(&v.id, k).is_some() {
            return Err(Error::InvalidGraph(format!("duplicate vertex id {}", v.id)));
        }
    }
    let n_all = graph.vertices.len();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_all];
    let mut raw_edges = Vec::new();
    for (u, v, len) in &graph.edges {
        let (Some(&a), Some(&b)) = (id_of.get(u), id_of.get(v)) else {
            return Err(Error::InvalidGraph(format!("edge ({u}, {v}) references an unknown vertex")));
        };
        if !(*len > 0.0 && len.is_finite()) {
            return Err(Error::InvalidGraph(format!("edge ({u}, {v}) has non-positive length {len}")));
        }
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop at {u}")));
        }
        adj[a].push((b, *len));
        adj[b].push((a, *len));
        raw_edges.push((a, b, *len));
    }
    let mut is_boundary = vec![false; n_all];
    for b in &graph.boundary {
        let Some(&k) = id_of.get(b) else {
            return Err(Error::InvalidGraph(format!("boundary vertex {b} does not exist")));
        };
        is_boundary[k] = true;
    }
    if !is_boundary.iter().any(|&b| b) {
        return Err(Error::InvalidGraph("boundary must be nonempty".into()));
    }

    let interior: Vec<usize> = (0..n_all).filter(|&k| !is_boundary[k]).collect();
    if interior.is_empty() {
        return Err(Error::InvalidGraph("every vertex is a boundary vertex".into()));
    }
    let mut local = vec![usize::MAX; n_all];
    for (i, &k) in interior.iter().enumerate() {
        local[k] = i;
    }

    let full_dist = |sources: &[usize]| -> Vec<f64> { plain_dijkstra(&adj, sources) };
    let boundary_sources: Vec<usize> = (0..n_all).filter(|&k| is_boundary[k]).collect();
    let to_boundary = full_dist(&boundary_sources);

    let m = interior.len();
    let mut dist = Vec::with_capacity(m);
    for &k in &interior {
        let d = to_boundary[k];
        if !d.is_finite() {
            return Err(Error::InvalidGraph(format!(
                "vertex {} cannot reach the boundary",
                graph.vertices[k].id
            )));
        }
        dist.push(d);
    }
    let mut metric = vec![0.0; m * m];
    for (i, &k) in interior.iter().enumerate() {
        let row = full_dist(&[k]);
        for (j, &l) in interior.iter().enumerate() {
            metric[i * m + j] = row[l];
        }
    }
    // symmetrize exactly
    for i in 0..m {
        for j in i + 1..m {
            let v = metric[i * m + j].min(metric[j * m + i]);
            metric[i * m + j] = v;
            metric[j * m + i] = v;
        }
    }

    let undirected: Vec<_> = raw_edges
        .into_iter()
        .filter(|&(a, b, _)| !is_boundary[a] && !is_boundary[b])
        .map(|(a, b, len)| {
            let (u, v) = (local[a], local[b]);
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            (u, v, len, len * (1.0 / dist[u] + 1.0 / dist[v]) / 2.0)
        })
        .collect();

    let positions = interior.iter().map(|&k| graph.vertices[k].pos).collect();
    let labels = interior.iter().map(|&k| graph.vertices[k].id.clone()).collect();
    let space = DiscreteSpace::assemble(Backend::Graph { metric, labels }, positions, dist, undirected);
    if !space.is_connected() {
        return Err(Error::InvalidGraph("the non-boundary vertices are not connected".into()));
    }
    Ok(space)
}

fn plain_dijkstra(adj: &[Vec<(usize, f64)>], sources: &[usize]) -> Vec<f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    #[derive(PartialEq)]
    struct Key(f64);
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Key {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&o.0)
        }
    }
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Reverse((Key(0.0), s)));
    }
    while let Some(Reverse((Key(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            if d + w < dist[v] {
                dist[v] = d + w;
                heap.push(Reverse((Key(d + w), v)));
            }
        }
    }
    dist
}

/// Probes local `(λ, c)`-quasiconvexity: for `samples` seeded random centers
/// `x` and up to four random pairs `u, v` in `B(x, λ d(x))`, compares the
/// shortest Euclidean path length with `c |u - v|`. The report's margin is
/// `c - max ratio`; centers whose ball holds fewer than two vertices are skipped.
pub fn local_quasiconvexity_probe(
    space: &DiscreteSpace,
    lambda: f64,
    c: f64,
    samples: usize,
    seed: u64,
) -> Result<ConditionReport> {
    if !(lambda > 0.0 && lambda <= 0.5) {
        return Err(Error::InvalidArgument(format!("lambda must lie in (0, 1/2], got {lambda}")));
    }
    if c < 1.0 {
        return Err(Error::InvalidArgument(format!("c must be at least 1, got {c}")));
    }
    const PAIRS_PER_CENTER: usize = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.vertex_count();
    let mut tracker = MarginTracker::new();
    let mut max_ratio = 0.0f64;
    let mut probed = 0usize;
    for _ in 0..samples {
        let x = rng.gen_range(0..n);
        let radius = lambda * space.boundary_distance(x);
        let ball: Vec<VertexId> = (0..n).filter(|&v| space.metric(x, v) < radius).collect();
        if ball.len() < 2 {
            continue;
        }
        for _ in 0..PAIRS_PER_CENTER {
            let pair: Vec<&VertexId> = ball.choose_multiple(&mut rng, 2).collect();
            let (u, v) = (*pair[0], *pair[1]);
            let tree = dijkstra(space, u, &[v], Weight::Euclid, |_, _| true);
            let ratio = tree.dist[v] / space.metric(u, v);
            probed += 1;
            max_ratio = max_ratio.max(ratio);
            tracker.observe(
                c - ratio,
                Witness { curve: None, basepoint: space.node_ref(u), point: space.node_ref(v) },
            );
        }
    }
    Ok(tracker.finish(
        ConditionId::LocalQuasiconvexity,
        constants([
            ("lambda", lambda),
            ("c", c),
            ("max_ratio", max_ratio),
            ("pairs", probed as f64),
        ]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Disk, PolygonalDomain};

    fn square() -> Domain {
        PolygonalDomain::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into()
    }

    #[test]
    fn square_quarter_grid_has_inner_lattice() {
        let s = build_grid_space(&square(), 0.25).unwrap();
        assert_eq!(s.vertex_count(), 9);
        // 3x3 lattice, 8-connected: 12 axis edges + 8 diagonals
        assert_eq!(s.edge_count(), 20);
    }

    #[test]
    fn disk_half_grid() {
        let disk = Domain::Disk(Disk::unit());
        let s = build_grid_space(&disk, 0.5).unwrap();
        let expected = (-2..=2)
            .flat_map(|i| (-2..=2).map(move |j| Point::new(i as f64 * 0.5, j as f64 * 0.5)))
            .filter(|p| p.norm() < 1.0)
            .count();
        assert_eq!(s.vertex_count(), expected);
        let max_d = s.boundary_distances().iter().copied().fold(0.0, f64::max);
        assert_eq!(max_d, 1.0);
        let origin = s.nearest_vertex(Point::ORIGIN).unwrap();
        assert_eq!(s.position(origin), Some(Point::ORIGIN));
    }

    #[test]
    fn qh_weights_follow_trapezoid_rule() {
        let s = build_grid_space(&Domain::Disk(Disk::unit()), 0.05).unwrap();
        let mut checked = 0;
        for u in 0..s.vertex_count() {
            for e in s.neighbors(u) {
                let (du, dv) = (s.boundary_distance(u), s.boundary_distance(e.to));
                if e.len <= du.min(dv) / 2.0 {
                    let t = e.len * (1.0 / du + 1.0 / dv) / 2.0;
                    assert!((e.qh - t).abs() <= 1e-15 * t);
                    checked += 1;
                } else {
                    // 1-Lipschitz d stays below max(du, dv) + len / 2 along the edge
                    assert!(e.qh >= e.len / (du.max(dv) + e.len / 2.0) * (1.0 - 1e-12));
                }
                assert!((du - dv).abs() <= e.len + 1e-12);
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn empty_discretization_is_a_resolution_error() {
        let tiny: Domain = PolygonalDomain::rectangle(0.1, 0.1, 0.2, 0.2).unwrap().into();
        assert!(matches!(build_grid_space(&tiny, 0.5), Err(Error::Resolution(_))));
        assert!(build_grid_space(&tiny, 0.0).is_err());
    }

    #[test]
    fn stratified_samples_cover_extremes() {
        let s = build_grid_space(&square(), 0.05).unwrap();
        let picks = s.stratified_samples(10, 0.0);
        assert_eq!(picks.len(), 10);
        let dmin = s.boundary_distances().iter().copied().fold(f64::INFINITY, f64::min);
        assert!(picks.iter().any(|&v| s.boundary_distance(v) == dmin));
        assert!(picks.iter().any(|&v| s.boundary_distance(v) == 0.5));
        assert_eq!(s.stratified_samples(10, 0.0), picks);
        assert_eq!(s.stratified_samples(1000, 0.0).len(), s.vertex_count());
    }

    #[test]
    fn graph_backend_distances() {
        let g: GraphSpace = serde_json::from_str(
            r#"{"vertices":[{"id":0},{"id":1},{"id":2,"pos":[1,1]},{"id":"b"}],
                "edges":[[0,1,1.0],[1,2,2.0],[2,"b",0.5],[0,"b",3.0]],
                "boundary":["b"]}"#,
        )
        .unwrap();
        let s = graph_space(&g).unwrap();
        assert_eq!(s.vertex_count(), 3);
        assert_eq!(s.boundary_distances(), &[3.0, 2.5, 0.5]);
        assert_eq!(s.metric(0, 2), 3.0);
        assert_eq!(s.position(2), Some(Point::new(1.0, 1.0)));
        assert_eq!(s.vertex_by_label(&NodeId::Num(2)), Some(2));
    }

    #[test]
    fn graph_validation() {
        let bad = |text: &str| graph_space(&serde_json::from_str(text).unwrap()).is_err();
        assert!(bad(r#"{"vertices":[{"id":0},{"id":1}],"edges":[[0,1,1.0]],"boundary":[]}"#));
        assert!(bad(r#"{"vertices":[{"id":0},{"id":1}],"edges":[[0,1,0.0]],"boundary":[1]}"#));
        assert!(bad(r#"{"vertices":[{"id":0},{"id":1},{"id":2}],"edges":[[0,2,1.0],[1,2,1.0]],"boundary":[2]}"#));
        assert!(bad(r#"{"vertices":[{"id":0},{"id":1}],"edges":[[0,7,1.0]],"boundary":[1]}"#));
    }

    #[test]
    fn probe_passes_on_convex_square() {
        let s = build_grid_space(&square(), 0.05).unwrap();
        let r = local_quasiconvexity_probe(&s, 0.5, 1.1, 40, 42).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.constant("max_ratio").unwrap() <= 1.0 + 0.09);
        assert!(local_quasiconvexity_probe(&s, 0.7, 1.1, 1, 42).is_err());
    }
}
