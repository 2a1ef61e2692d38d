//! Curve lengths, quasihyperbolic lengths and distances, geodesics, and the
//! Gehring–Palka lower bounds
//!
//! ```text
//! k(x, y)  >= log(1 + |x - y| / min{d(x), d(y)})
//! ℓ_k(γ)   >= log(1 + ℓ(γ)   / min{d(x), d(y)})
//! ```

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::search::{dijkstra, Weight};
use crate::space::{segment_qh, DiscreteSpace};
use crate::VertexId;

/// Discretization tolerance `ε = C h / d_min` with `C = 3`.
pub fn epsilon(h: f64, d_min: f64) -> f64 {
    3.0 * h / d_min
}

/// An ordered polygonal curve with cached prefix lengths.
///
/// Curves either follow edges of a [`DiscreteSpace`] (`vertices` is set) or
/// are free polylines in a [`Domain`] (only `points` is set). Positions are
/// present whenever the underlying vertices are embedded.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurve {
    vertices: Option<Vec<VertexId>>,
    points: Option<Vec<Point>>,
    dist: Vec<f64>,
    prefix_len: Vec<f64>,
    prefix_qh: Vec<f64>,
}

impl PolyCurve {
    /// Curve along a vertex path of `space`; consecutive vertices must be adjacent.
    pub fn from_path(space: &DiscreteSpace, path: Vec<VertexId>) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::MalformedCurve("empty vertex path".into()));
        }
        for &v in &path {
            space.check_vertex(v)?;
        }
        let mut prefix_len = Vec::with_capacity(path.len());
        let mut prefix_qh = Vec::with_capacity(path.len());
        prefix_len.push(0.0);
        prefix_qh.push(0.0);
        for w in path.windows(2) {
            let len = space.edge(w[0], w[1], Weight::Euclid);
            let qh = space.edge(w[0], w[1], Weight::Qh);
            let (Some(len), Some(qh)) = (len, qh) else {
                return Err(Error::MalformedCurve(format!("vertices {} and {} are not adjacent", w[0], w[1])));
            };
            prefix_len.push(prefix_len.last().unwrap() + len.len);
            prefix_qh.push(prefix_qh.last().unwrap() + qh.qh);
        }
        let points: Option<Vec<Point>> = path.iter().map(|&v| space.position(v)).collect();
        let dist = path.iter().map(|&v| space.boundary_distance(v)).collect();
        Ok(PolyCurve { vertices: Some(path), points, dist, prefix_len, prefix_qh })
    }

    /// Free polyline in `domain`. Points on the boundary are accepted (their
    /// quasihyperbolic prefix is infinite); points outside are rejected, as are
    /// segments leaving the closure of the domain.
    pub fn from_points(domain: &Domain, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::MalformedCurve("empty point list".into()));
        }
        let mut dist = Vec::with_capacity(points.len());
        for &p in &points {
            let d = domain.distance_to_boundary(p);
            if !domain.contains(p) && d > crate::domain::BOUNDARY_TOLERANCE {
                return Err(Error::OutsideDomain(p));
            }
            dist.push(if domain.contains(p) { d } else { 0.0 });
        }
        let mut prefix_len = vec![0.0];
        let mut prefix_qh = vec![0.0];
        for i in 1..points.len() {
            let (p, q) = (points[i - 1], points[i]);
            if dist[i - 1] > 0.0 && dist[i] > 0.0 && !domain.segment_inside(p, q) {
                return Err(Error::MalformedCurve(format!("segment {} leaves the domain", i - 1)));
            }
            let qh = if dist[i - 1] > 0.0 && dist[i] > 0.0 {
                segment_qh(Some(domain), p, q, dist[i - 1], dist[i])
            } else if p == q {
                0.0
            } else {
                f64::INFINITY
            };
            prefix_len.push(prefix_len[i - 1] + p.dist(q));
            prefix_qh.push(prefix_qh[i - 1] + qh);
        }
        Ok(PolyCurve { vertices: None, points: Some(points), dist, prefix_len, prefix_qh })
    }

    /// Straight segment from `a` to `b` sampled at `pieces + 1` equally spaced points.
    pub fn segment(domain: &Domain, a: Point, b: Point, pieces: usize) -> Result<Self> {
        let n = pieces.max(1);
        let pts = (0..=n).map(|k| a.lerp(b, k as f64 / n as f64)).collect();
        Self::from_points(domain, pts)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn vertices(&self) -> Option<&[VertexId]> {
        self.vertices.as_deref()
    }

    pub fn vertex(&self, i: usize) -> Option<VertexId> {
        self.vertices.as_ref().map(|v| v[i])
    }

    pub fn points(&self) -> Option<&[Point]> {
        self.points.as_deref()
    }

    pub fn point(&self, i: usize) -> Option<Point> {
        self.points.as_ref().map(|p| p[i])
    }

    /// `d` at each curve node.
    pub fn dist(&self) -> &[f64] {
        &self.dist
    }

    pub fn prefix_len(&self) -> &[f64] {
        &self.prefix_len
    }

    pub fn prefix_qh(&self) -> &[f64] {
        &self.prefix_qh
    }

    pub fn length(&self) -> f64 {
        *self.prefix_len.last().unwrap()
    }

    pub fn qh_len(&self) -> f64 {
        *self.prefix_qh.last().unwrap()
    }

    pub fn first_vertex(&self) -> Option<VertexId> {
        self.vertex(0)
    }

    pub fn last_vertex(&self) -> Option<VertexId> {
        self.vertex(self.len() - 1)
    }

    pub fn node_ref(&self, i: usize) -> crate::report::NodeRef {
        crate::report::NodeRef { vertex: self.vertex(i), pos: self.point(i) }
    }

    /// The prefix ending at node `end` (inclusive).
    pub fn truncated(&self, end: usize) -> PolyCurve {
        let k = end + 1;
        PolyCurve {
            vertices: self.vertices.as_ref().map(|v| v[..k].to_vec()),
            points: self.points.as_ref().map(|p| p[..k].to_vec()),
            dist: self.dist[..k].to_vec(),
            prefix_len: self.prefix_len[..k].to_vec(),
            prefix_qh: self.prefix_qh[..k].to_vec(),
        }
    }

    /// The same curve traversed backwards. Prefixes become `total - suffix`,
    /// so the total lengths are bit-identical in both directions.
    pub fn reversed(&self) -> PolyCurve {
        let rev = |v: &[f64]| -> Vec<f64> {
            let total = *v.last().unwrap();
            v.iter().rev().map(|x| total - x).collect()
        };
        PolyCurve {
            vertices: self.vertices.as_ref().map(|v| v.iter().rev().copied().collect()),
            points: self.points.as_ref().map(|p| p.iter().rev().copied().collect()),
            dist: self.dist.iter().rev().copied().collect(),
            prefix_len: rev(&self.prefix_len),
            prefix_qh: rev(&self.prefix_qh),
        }
    }

    /// Appends `tail`, which must start where `self` ends.
    pub fn concat(&self, tail: &PolyCurve) -> Result<PolyCurve> {
        let joins = match (self.last_vertex(), tail.first_vertex()) {
            (Some(a), Some(b)) => a == b,
            _ => self.point(self.len() - 1) == tail.point(0),
        };
        if !joins {
            return Err(Error::MalformedCurve("concatenated curves do not share an endpoint".into()));
        }
        let (l0, q0) = (self.length(), self.qh_len());
        Ok(PolyCurve {
            vertices: join(&self.vertices, &tail.vertices),
            points: join(&self.points, &tail.points),
            dist: self.dist.iter().chain(&tail.dist[1..]).copied().collect(),
            prefix_len: self.prefix_len.iter().copied().chain(tail.prefix_len[1..].iter().map(|x| l0 + x)).collect(),
            prefix_qh: self.prefix_qh.iter().copied().chain(tail.prefix_qh[1..].iter().map(|x| q0 + x)).collect(),
        })
    }

    /// Distance between nodes `i` and `j` in the ambient metric.
    pub fn node_distance(&self, space: Option<&DiscreteSpace>, i: usize, j: usize) -> f64 {
        match (&self.points, space, &self.vertices) {
            (_, Some(s), Some(v)) if matches!(s.backend(), crate::space::Backend::Graph { .. }) => {
                s.metric(v[i], v[j])
            }
            (Some(p), _, _) => p[i].dist(p[j]),
            (None, Some(s), Some(v)) => s.metric(v[i], v[j]),
            _ => f64::NAN,
        }
    }

    /// `diam(α[x, z_i])` for every prefix.
    pub fn prefix_diameters(&self, space: Option<&DiscreteSpace>) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n);
        let mut best = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                best = best.max(self.node_distance(space, i, j));
            }
            out.push(best);
        }
        out
    }

    /// `min d` over each prefix, the vertex approximation of `dist(α[x, z_i], ∂D)`.
    pub fn prefix_min_dist(&self) -> Vec<f64> {
        let mut m = f64::INFINITY;
        self.dist
            .iter()
            .map(|&d| {
                m = m.min(d);
                m
            })
            .collect()
    }
}

fn join<T: Copy>(a: &Option<Vec<T>>, b: &Option<Vec<T>>) -> Option<Vec<T>> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.iter().chain(&b[1..]).copied().collect()),
        _ => None,
    }
}

/// A shortest path together with the value it attains.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicResult {
    pub curve: PolyCurve,
    pub value: f64,
}

/// `ℓ(γ)`, the Euclidean length.
pub fn curve_length(curve: &PolyCurve) -> f64 {
    curve.length()
}

/// `ℓ_k(γ) = ∫ |dz| / d(z)`. Fails if the curve touches the boundary.
pub fn qh_length(curve: &PolyCurve) -> Result<f64> {
    if let Some(index) = curve.dist().iter().position(|&d| !(d > 0.0)) {
        return Err(Error::DegenerateCurve { index, dist: curve.dist()[index] });
    }
    let v = curve.qh_len();
    if !v.is_finite() {
        return Err(Error::DegenerateCurve { index: curve.len() - 1, dist: 0.0 });
    }
    Ok(v)
}

fn geodesic(space: &DiscreteSpace, x: VertexId, y: VertexId, weight: Weight) -> Result<GeodesicResult> {
    space.check_vertex(x)?;
    space.check_vertex(y)?;
    // search from the smaller id so both argument orders share one computation
    let (s, t) = if x <= y { (x, y) } else { (y, x) };
    let tree = dijkstra(space, s, &[t], weight, |_, _| true);
    let path = tree.path_to(t).ok_or(Error::Unreachable { from: x, to: y })?;
    let mut curve = PolyCurve::from_path(space, path)?;
    if x > y {
        curve = curve.reversed();
    }
    let value = match weight {
        Weight::Euclid => curve.length(),
        Weight::Qh => curve.qh_len(),
    };
    Ok(GeodesicResult { curve, value })
}

/// Quasihyperbolic distance `k(x, y)` on the space and a minimizing path.
pub fn qh_distance(space: &DiscreteSpace, x: VertexId, y: VertexId) -> Result<GeodesicResult> {
    geodesic(space, x, y, Weight::Qh)
}

/// Shortest path under Euclidean edge lengths.
pub fn euclid_geodesic(space: &DiscreteSpace, x: VertexId, y: VertexId) -> Result<GeodesicResult> {
    geodesic(space, x, y, Weight::Euclid)
}

/// Quasihyperbolic distances from `source` to every vertex.
pub fn qh_distances_from(space: &DiscreteSpace, source: VertexId) -> Result<Vec<f64>> {
    space.check_vertex(source)?;
    Ok(dijkstra(space, source, &[], Weight::Qh, |_, _| true).dist)
}

/// `k_val - log(1 + |x - y| / min{d(x), d(y)})`.
pub fn check_gp_point_bound(space: &DiscreteSpace, x: VertexId, y: VertexId, k_val: f64) -> f64 {
    gp_point_margin(space.metric(x, y), space.boundary_distance(x), space.boundary_distance(y), k_val)
}

pub(crate) fn gp_point_margin(distance: f64, dx: f64, dy: f64, k_val: f64) -> f64 {
    k_val - (distance / dx.min(dy)).ln_1p()
}

/// `ℓ_k(γ) - log(1 + ℓ(γ) / min{d(x), d(y)})` for the endpoints `x, y` of `γ`.
pub fn check_gp_length_bound(curve: &PolyCurve) -> f64 {
    let d = curve.dist();
    let dmin = d[0].min(d[d.len() - 1]);
    curve.qh_len() - (curve.length() / dmin).ln_1p()
}

/// Bracket `lower <= diam_k(γ) <= upper`. The upper side is `ℓ_k(γ)`; the lower
/// side is the largest pairwise `k` among at most `max_probes` evenly spaced
/// nodes (always including both endpoints). For curves without vertices, or
/// without a space, the Gehring–Palka bound stands in for `k`.
pub fn qh_diameter_of_curve(
    space: Option<&DiscreteSpace>,
    curve: &PolyCurve,
    max_probes: usize,
) -> Result<(f64, f64)> {
    let upper = curve.qh_len();
    let probes = probe_indices(curve.len(), max_probes.max(2));
    let mut lower = 0.0f64;
    match (space, curve.vertices()) {
        (Some(space), Some(vs)) => {
            let targets: Vec<VertexId> = probes.iter().map(|&i| vs[i]).collect();
            for (a, &i) in probes.iter().enumerate() {
                let tree = dijkstra(space, vs[i], &targets[a + 1..], Weight::Qh, |_, _| true);
                for &t in &targets[a + 1..] {
                    lower = lower.max(tree.dist[t]);
                }
            }
        }
        _ => {
            for (a, &i) in probes.iter().enumerate() {
                for &j in &probes[a + 1..] {
                    let bound = gp_point_margin(curve.node_distance(space, i, j), curve.dist()[i], curve.dist()[j], 0.0);
                    lower = lower.max(-bound);
                }
            }
        }
    }
    Ok((lower.min(upper), upper))
}

/// At most `k` evenly spaced indices of `0..n`, always containing `0` and `n - 1`.
pub(crate) fn probe_indices(n: usize, k: usize) -> Vec<usize> {
    if n <= k {
        return (0..n).collect();
    }
    let mut out: Vec<usize> = (0..k).map(|i| (i * (n - 1) + (k - 1) / 2) / (k - 1)).collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Disk, PolygonalDomain};
    use crate::space::build_grid_space;

    fn disk() -> Domain {
        Domain::Disk(Disk::unit())
    }

    fn big_square() -> Domain {
        PolygonalDomain::rectangle(-10.0, -10.0, 10.0, 10.0).unwrap().into()
    }

    #[test]
    fn lengths_of_simple_curves() {
        let d = big_square();
        let single = PolyCurve::from_points(&d, vec![Point::new(1.0, 1.0)]).unwrap();
        assert_eq!(curve_length(&single), 0.0);
        assert_eq!(qh_length(&single).unwrap(), 0.0);
        let straight = PolyCurve::from_points(&d, vec![Point::ORIGIN, Point::new(3.0, 4.0)]).unwrap();
        assert_eq!(curve_length(&straight), 5.0);
        let l = PolyCurve::from_points(&d, vec![Point::ORIGIN, Point::new(1.0, 0.0), Point::new(1.0, 1.0)]).unwrap();
        assert_eq!(curve_length(&l), 2.0);
    }

    #[test]
    fn radial_qh_lengths_in_analytic_disk() {
        let c = PolyCurve::segment(&disk(), Point::new(0.9, 0.0), Point::ORIGIN, 10_000).unwrap();
        assert!((qh_length(&c).unwrap() - 10f64.ln()).abs() < 1e-6);
        let c = PolyCurve::segment(&disk(), Point::new(0.5, 0.0), Point::ORIGIN, 10_000).unwrap();
        assert!((qh_length(&c).unwrap() - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn boundary_touching_curve_is_degenerate() {
        let c = PolyCurve::from_points(&disk(), vec![Point::ORIGIN, Point::new(1.0, 0.0)]).unwrap();
        assert!(matches!(qh_length(&c), Err(Error::DegenerateCurve { .. })));
        assert!(PolyCurve::from_points(&disk(), vec![Point::new(2.0, 0.0)]).is_err());
    }

    #[test]
    fn gp_equality_on_radial_segment() {
        let c = PolyCurve::segment(&disk(), Point::new(0.9, 0.0), Point::ORIGIN, 10_000).unwrap();
        assert!(check_gp_length_bound(&c).abs() < 1e-6);
        let single = PolyCurve::from_points(&disk(), vec![Point::ORIGIN]).unwrap();
        assert_eq!(check_gp_length_bound(&single), 0.0);
        // point bound equality: k(0, 0.6) = log(1/0.4)
        let m = gp_point_margin(0.6, 1.0, 0.4, (1.0f64 / 0.4).ln());
        assert!(m.abs() < 1e-15);
    }

    #[test]
    fn identity_distance_is_zero() {
        let s = build_grid_space(&disk(), 0.1).unwrap();
        let o = s.nearest_vertex(Point::ORIGIN).unwrap();
        let g = qh_distance(&s, o, o).unwrap();
        assert_eq!(g.value, 0.0);
        assert_eq!(g.curve.len(), 1);
        assert_eq!(euclid_geodesic(&s, o, o).unwrap().value, 0.0);
        assert_eq!(check_gp_point_bound(&s, o, o, 0.0), 0.0);
    }

    #[test]
    fn disk_grid_distance_near_analytic_value() {
        let s = build_grid_space(&disk(), 0.02).unwrap();
        let o = s.nearest_vertex(Point::ORIGIN).unwrap();
        let y = s.nearest_vertex(Point::new(0.6, 0.0)).unwrap();
        let g = qh_distance(&s, o, y).unwrap();
        let exact = (1.0f64 / 0.4).ln();
        assert!((g.value - exact).abs() / exact < 0.03, "{} vs {exact}", g.value);
        assert_eq!(g.value, g.curve.qh_len());
        let back = qh_distance(&s, y, o).unwrap();
        assert_eq!(back.value, g.value);
        assert_eq!(back.curve.first_vertex(), Some(y));
    }

    #[test]
    fn diameter_bracket_cases() {
        let single = PolyCurve::from_points(&disk(), vec![Point::ORIGIN]).unwrap();
        assert_eq!(qh_diameter_of_curve(None, &single, 8).unwrap(), (0.0, 0.0));
        let radial = PolyCurve::segment(&disk(), Point::new(0.9, 0.0), Point::ORIGIN, 10_000).unwrap();
        let (lo, hi) = qh_diameter_of_curve(None, &radial, 8).unwrap();
        assert!((lo - 10f64.ln()).abs() < 1e-6 && (hi - 10f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn zigzag_has_strict_bracket() {
        let sq: Domain = PolygonalDomain::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into();
        let s = build_grid_space(&sq, 0.1).unwrap();
        let v = |x: f64, y: f64| s.nearest_vertex(Point::new(x, y)).unwrap();
        // up and down between rows 0.2 and 0.8 while drifting right
        let mut path = Vec::new();
        for (k, x) in [0.2, 0.3, 0.4, 0.5].into_iter().enumerate() {
            let (from, to) = if k % 2 == 0 { (2, 8) } else { (8, 2) };
            let steps: Vec<i32> = if from < to { (from..=to).collect() } else { (to..=from).rev().collect() };
            for j in steps {
                let id = v(x, j as f64 / 10.0);
                if path.last() != Some(&id) {
                    path.push(id);
                }
            }
        }
        let curve = PolyCurve::from_path(&s, path).unwrap();
        let (lo, hi) = qh_diameter_of_curve(Some(&s), &curve, 8).unwrap();
        assert!(lo < hi, "{lo} {hi}");
        assert!(lo > 0.0);
    }

    #[test]
    fn reversal_and_concat() {
        let s = build_grid_space(&disk(), 0.1).unwrap();
        let a = s.nearest_vertex(Point::new(0.5, 0.0)).unwrap();
        let b = s.nearest_vertex(Point::new(0.0, 0.5)).unwrap();
        let o = s.nearest_vertex(Point::ORIGIN).unwrap();
        let g1 = qh_distance(&s, a, o).unwrap().curve;
        let g2 = qh_distance(&s, o, b).unwrap().curve;
        let cat = g1.concat(&g2).unwrap();
        assert_eq!(cat.len(), g1.len() + g2.len() - 1);
        assert!((cat.qh_len() - g1.qh_len() - g2.qh_len()).abs() < 1e-12);
        let r = cat.reversed();
        assert_eq!(r.prefix_len()[0], 0.0);
        assert_eq!(r.length(), cat.length());
        assert!(g2.concat(&g1).is_err());
    }

    #[test]
    fn probes_include_endpoints() {
        assert_eq!(probe_indices(3, 8), vec![0, 1, 2]);
        let p = probe_indices(100, 5);
        assert_eq!(p.len(), 5);
        assert_eq!((p[0], p[4]), (0, 99));
    }
}
