//! Reference domains and graphs shared by tests, examples and the CLI.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{regular_ring, Disk, Domain, PolygonalDomain};
use crate::geom::Point;
use crate::space::{GraphSpace, GraphVertex, NodeId};

/// A named domain with its John center.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub domain: Domain,
    pub center: Point,
}

fn poly(outer: &[(f64, f64)]) -> Domain {
    let ring = outer.iter().map(|&(x, y)| Point::new(x, y)).collect();
    PolygonalDomain::new(ring, Vec::new()).expect("fixture polygon is valid").into()
}

pub fn unit_disk() -> Domain {
    Domain::Disk(Disk::unit())
}

/// The unit disk as a regular `n`-gon.
pub fn unit_disk_polygon(n: usize) -> Domain {
    PolygonalDomain::new(regular_ring(Point::ORIGIN, 1.0, n), Vec::new())
        .expect("regular polygon is valid")
        .into()
}

pub fn unit_square() -> Domain {
    poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
}

/// `[0,2]^2` minus `[1,2]^2`.
pub fn l_shape() -> Domain {
    poly(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)])
}

/// `[0,2] x [0,1]` with a slit of width 0.02 hanging from the top edge at
/// `x = 1` down to `y = 0.3`.
pub fn slit_rectangle() -> Domain {
    poly(&[
        (0.0, 0.0),
        (2.0, 0.0),
        (2.0, 1.0),
        (1.01, 1.0),
        (1.01, 0.3),
        (0.99, 0.3),
        (0.99, 1.0),
        (0.0, 1.0),
    ])
}

/// Rooms `[0,1]^2` and `[1.5,2.5] x [0,1]` joined by a corridor of width `w`
/// centered at `y = 0.5`.
pub fn rooms_and_corridor(w: f64) -> Domain {
    let (lo, hi) = (0.5 - w / 2.0, 0.5 + w / 2.0);
    poly(&[
        (0.0, 0.0),
        (1.0, 0.0),
        (1.0, lo),
        (1.5, lo),
        (1.5, 0.0),
        (2.5, 0.0),
        (2.5, 1.0),
        (1.5, 1.0),
        (1.5, hi),
        (1.0, hi),
        (1.0, 1.0),
        (0.0, 1.0),
    ])
}

/// Disk, square, L-shape and slit rectangle with their centers.
pub fn standard_fixtures() -> Vec<Fixture> {
    vec![
        Fixture { name: "disk", domain: unit_disk(), center: Point::ORIGIN },
        Fixture { name: "square", domain: unit_square(), center: Point::new(0.5, 0.5) },
        Fixture { name: "l_shape", domain: l_shape(), center: Point::new(0.5, 0.5) },
        Fixture { name: "slit", domain: slit_rectangle(), center: Point::new(0.5, 0.5) },
    ]
}

fn vertex(id: u64) -> GraphVertex {
    GraphVertex { id: NodeId::Num(id), pos: None }
}

/// Path `b0 - 1 - 2 - 3 - b4` with a chord, for doc examples and tests.
pub fn small_graph() -> GraphSpace {
    let e = |u: u64, v: u64, w: f64| (NodeId::Num(u), NodeId::Num(v), w);
    GraphSpace {
        vertices: (0..5).map(vertex).collect(),
        edges: vec![e(0, 1, 1.0), e(1, 2, 1.0), e(2, 3, 1.0), e(3, 4, 1.0), e(1, 3, 2.5)],
        boundary: vec![NodeId::Num(0), NodeId::Num(4)],
    }
}

/// Random graph with `n` vertices (`n >= 3`), between one and three of them
/// boundary vertices, a connected interior, and edge lengths in `[0.5, 2]`.
pub fn random_graph(n: usize, seed: u64) -> GraphSpace {
    assert!(n >= 3, "need at least three vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_boundary = rng.gen_range(1..=3.min(n - 2));
    let n_inner = n - n_boundary;
    let len = |rng: &mut ChaCha8Rng| (rng.gen_range(0.5..2.0f64) * 64.0).round() / 64.0;
    let mut edges: Vec<(u64, u64, f64)> = Vec::new();
    let mut order: Vec<u64> = (0..n_inner as u64).collect();
    order.shuffle(&mut rng);
    for k in 1..n_inner {
        let parent = order[rng.gen_range(0..k)];
        let l = len(&mut rng);
        edges.push((parent, order[k], l));
    }
    for b in n_inner..n {
        let to = rng.gen_range(0..n_inner) as u64;
        let l = len(&mut rng);
        edges.push((b as u64, to, l));
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n) as u64, rng.gen_range(0..n) as u64);
        let exists = edges.iter().any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u));
        if u != v && !exists {
            let l = len(&mut rng);
            edges.push((u, v, l));
        }
    }
    GraphSpace {
        vertices: (0..n as u64).map(vertex).collect(),
        edges: edges.into_iter().map(|(u, v, w)| (NodeId::Num(u), NodeId::Num(v), w)).collect(),
        boundary: (n_inner..n).map(|b| NodeId::Num(b as u64)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::graph_space;

    #[test]
    fn fixtures_contain_centers() {
        for f in standard_fixtures() {
            assert!(f.domain.contains(f.center), "{}", f.name);
        }
        assert!(!slit_rectangle().contains(Point::new(1.0, 0.5)));
        assert!(slit_rectangle().contains(Point::new(1.0, 0.2)));
        assert!(rooms_and_corridor(0.1).contains(Point::new(1.25, 0.5)));
        assert!(!rooms_and_corridor(0.1).contains(Point::new(1.25, 0.6)));
    }

    #[test]
    fn random_graphs_are_valid() {
        for seed in 0..50 {
            let g = random_graph(3 + (seed as usize % 10), seed);
            let s = graph_space(&g).unwrap();
            assert!(s.is_connected());
            assert!(g.vertices.len() <= 12);
        }
    }
}
