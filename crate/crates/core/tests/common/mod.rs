//! Independent brute-force oracles. They use only the public graph view of a
//! space (`neighbors`, `boundary_distance`) and share no search code with the
//! library.

#![allow(dead_code)]

use std::collections::VecDeque;

use johnspace::{DiscreteSpace, VertexId};

/// Every simple path from `x` to `y` in the space's edge graph.
pub fn simple_paths(space: &DiscreteSpace, x: VertexId, y: VertexId) -> Vec<Vec<VertexId>> {
    fn dfs(space: &DiscreteSpace, y: VertexId, path: &mut Vec<VertexId>, seen: &mut [bool], out: &mut Vec<Vec<VertexId>>) {
        let u = *path.last().unwrap();
        if u == y {
            out.push(path.clone());
            return;
        }
        for e in space.neighbors(u) {
            if !seen[e.to] {
                seen[e.to] = true;
                path.push(e.to);
                dfs(space, y, path, seen, out);
                path.pop();
                seen[e.to] = false;
            }
        }
    }
    let mut seen = vec![false; space.vertex_count()];
    seen[x] = true;
    let mut out = Vec::new();
    dfs(space, y, &mut vec![x], &mut seen, &mut out);
    out
}

fn edge(space: &DiscreteSpace, u: VertexId, v: VertexId) -> (f64, f64) {
    // parallel edges: the lightest of each weight, matching the space's adjacency
    let mut len = f64::INFINITY;
    let mut qh = f64::INFINITY;
    for e in space.neighbors(u).iter().filter(|e| e.to == v) {
        len = len.min(e.len);
        qh = qh.min(e.qh);
    }
    (len, qh)
}

pub fn path_qh(space: &DiscreteSpace, p: &[VertexId]) -> f64 {
    p.windows(2).map(|w| edge(space, w[0], w[1]).1).sum()
}

/// `max_i ℓ(p[..=i]) / d(p_i)`.
pub fn path_carrot(space: &DiscreteSpace, p: &[VertexId]) -> f64 {
    let mut l = 0.0;
    let mut worst = 0.0f64;
    for w in p.windows(2) {
        l += edge(space, w[0], w[1]).0;
        worst = worst.max(l / space.boundary_distance(w[1]));
    }
    worst
}

/// `min` over simple paths of the quasihyperbolic length.
pub fn brute_qh_distance(space: &DiscreteSpace, x: VertexId, y: VertexId) -> f64 {
    simple_paths(space, x, y).iter().map(|p| path_qh(space, p)).fold(f64::INFINITY, f64::min)
}

/// `min` over simple paths of the carrot constant.
pub fn brute_carrot(space: &DiscreteSpace, x: VertexId, x0: VertexId) -> f64 {
    simple_paths(space, x, x0).iter().map(|p| path_carrot(space, p)).fold(f64::INFINITY, f64::min)
}

/// Optimal carrot constant from `x` to `x0` by label correcting over
/// `(length, worst ratio)` Pareto labels. Exact because both criteria are
/// monotone along extensions and cycles are dominated.
pub fn pareto_carrot(space: &DiscreteSpace, x: VertexId, x0: VertexId) -> f64 {
    if x == x0 {
        return 0.0;
    }
    let n = space.vertex_count();
    let mut labels: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
    labels[x].push((0.0, 0.0));
    let mut queue = VecDeque::from([(x, 0.0, 0.0)]);
    let mut best = f64::INFINITY;
    while let Some((u, l, r)) = queue.pop_front() {
        if !labels[u].contains(&(l, r)) || r >= best {
            continue;
        }
        for e in space.neighbors(u) {
            let nl = l + e.len;
            let nr = r.max(nl / space.boundary_distance(e.to));
            if nr >= best {
                continue;
            }
            if e.to == x0 {
                best = nr;
                continue;
            }
            let set = &mut labels[e.to];
            if set.iter().any(|&(a, b)| a <= nl && b <= nr) {
                continue;
            }
            set.retain(|&(a, b)| !(nl <= a && nr <= b));
            set.push((nl, nr));
            queue.push_back((e.to, nl, nr));
        }
    }
    best
}

/// Vertex of largest `d` (smallest id on ties).
pub fn deepest_vertex(space: &DiscreteSpace) -> VertexId {
    let d = space.boundary_distances();
    (0..d.len()).fold(0, |b, v| if d[v] > d[b] { v } else { b })
}
