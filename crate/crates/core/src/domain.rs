//! Planar noncomplete metric spaces: polygonal domains with holes and an
//! analytic disk. Both provide containment, the boundary distance field
//! `d(z)` and the Euclidean diameter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, segments_intersect, signed_area, Point};

/// Points closer than this to a boundary segment count as boundary points.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// A bounded polygonal domain: the interior of `outer` minus the closed holes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolygonalDomain {
    outer: Vec<Point>,
    holes: Vec<Vec<Point>>,
}

impl PolygonalDomain {
    /// Validates and builds a domain. A repeated closing vertex is dropped.
    pub fn new(outer: Vec<Point>, holes: Vec<Vec<Point>>) -> Result<Self> {
        let outer = normalize_ring(outer, "outer")?;
        let holes = holes
            .into_iter()
            .enumerate()
            .map(|(i, h)| normalize_ring(h, &format!("hole {i}")))
            .collect::<Result<Vec<_>>>()?;

        check_simple(&outer, "outer")?;
        for (i, hole) in holes.iter().enumerate() {
            check_simple(hole, &format!("hole {i}"))?;
            for p in hole {
                if !ring_contains(&outer, *p) {
                    return Err(Error::InvalidDomain(format!("hole {i} is not inside the outer ring")));
                }
            }
            if rings_cross(hole, &outer) {
                return Err(Error::InvalidDomain(format!("hole {i} touches the outer ring")));
            }
            for (j, other) in holes.iter().enumerate().take(i) {
                if rings_cross(hole, other)
                    || ring_contains(other, hole[0])
                    || ring_contains(hole, other[0])
                {
                    return Err(Error::InvalidDomain(format!("holes {j} and {i} overlap")));
                }
            }
        }
        Ok(PolygonalDomain { outer, holes })
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(
            vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ],
            vec![],
        )
    }

    /// Regular `n`-gon inscribed in the circle of the given center and radius,
    /// with a vertex on the positive x-axis.
    pub fn regular_polygon(center: Point, radius: f64, n: usize) -> Result<Self> {
        Self::new(regular_ring(center, radius, n), vec![])
    }

    pub fn outer(&self) -> &[Point] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<Point>] {
        &self.holes
    }

    fn rings(&self) -> impl Iterator<Item = &[Point]> {
        std::iter::once(self.outer.as_slice()).chain(self.holes.iter().map(Vec::as_slice))
    }

    fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.rings()
            .flat_map(|r| (0..r.len()).map(move |i| (r[i], r[(i + 1) % r.len()])))
    }

    /// Distance to the nearest boundary segment, whether or not `p` is inside.
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Even-odd containment; points within [`BOUNDARY_TOLERANCE`] of the
    /// boundary are excluded.
    pub fn contains(&self, p: Point) -> bool {
        let inside = self.rings().filter(|r| ring_contains(r, p)).count() % 2 == 1;
        inside && self.distance_to_boundary(p) > BOUNDARY_TOLERANCE
    }

    /// Max pairwise distance over the outer vertices (holes lie inside the hull).
    pub fn diameter(&self) -> f64 {
        crate::geom::point_set_diameter(&self.outer)
    }

    fn segment_inside(&self, a: Point, b: Point) -> bool {
        if !self.contains(a) || !self.contains(b) {
            return false;
        }
        !self.segments().any(|(p, q)| segments_intersect(a, b, p, q))
    }
}

/// Analytic disk with the exact distance field `d(z) = r - |z - c|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidDomain(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Disk { center, radius })
    }

    pub fn unit() -> Self {
        Disk { center: Point::ORIGIN, radius: 1.0 }
    }
}

/// A planar domain backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Polygon(PolygonalDomain),
    Disk(Disk),
}

impl From<PolygonalDomain> for Domain {
    fn from(p: PolygonalDomain) -> Self {
        Domain::Polygon(p)
    }
}

impl From<Disk> for Domain {
    fn from(d: Disk) -> Self {
        Domain::Disk(d)
    }
}

impl Domain {
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Domain::Polygon(poly) => poly.contains(p),
            Domain::Disk(d) => p.dist(d.center) < d.radius - BOUNDARY_TOLERANCE,
        }
    }

    /// `d(p) = dist(p, ∂D)` for a point of the domain.
    pub fn boundary_distance(&self, p: Point) -> Result<f64> {
        if !p.is_finite() || !self.contains(p) {
            return Err(Error::OutsideDomain(p));
        }
        Ok(self.distance_to_boundary(p))
    }

    /// Distance to the boundary without the containment check.
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        match self {
            Domain::Polygon(poly) => poly.distance_to_boundary(p),
            Domain::Disk(d) => (d.radius - p.dist(d.center)).abs(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Polygon(poly) => poly.diameter(),
            Domain::Disk(d) => 2.0 * d.radius,
        }
    }

    /// True when the closed segment `[a, b]` lies in the domain.
    pub fn segment_inside(&self, a: Point, b: Point) -> bool {
        match self {
            // convex
            Domain::Disk(_) => self.contains(a) && self.contains(b),
            Domain::Polygon(poly) => poly.segment_inside(a, b),
        }
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bbox(&self) -> (Point, Point) {
        match self {
            Domain::Disk(d) => (
                Point::new(d.center.x - d.radius, d.center.y - d.radius),
                Point::new(d.center.x + d.radius, d.center.y + d.radius),
            ),
            Domain::Polygon(poly) => {
                let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for p in &poly.outer {
                    lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
                    hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
                }
                (lo, hi)
            }
        }
    }

    /// Boundary rings for drawing; the disk is drawn as a 256-gon.
    pub fn outline(&self) -> Vec<Vec<Point>> {
        match self {
            Domain::Disk(d) => vec![regular_ring(d.center, d.radius, 256)],
            Domain::Polygon(poly) => poly.rings().map(<[Point]>::to_vec).collect(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: DomainJson = serde_json::from_str(s)?;
        raw.try_into()
    }

    pub fn to_json(&self) -> DomainJson {
        match self {
            Domain::Polygon(p) => DomainJson::Polygon { outer: p.outer.clone(), holes: p.holes.clone() },
            Domain::Disk(d) => DomainJson::Disk { disk: *d },
        }
    }
}

/// On-disk form of a [`Domain`]:
/// `{"outer": [[x,y],...], "holes": [[[x,y],...],...]}` or
/// `{"disk": {"center": [x,y], "radius": r}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainJson {
    Polygon {
        outer: Vec<Point>,
        #[serde(default)]
        holes: Vec<Vec<Point>>,
    },
    Disk {
        disk: Disk,
    },
}

impl TryFrom<DomainJson> for Domain {
    type Error = Error;
    fn try_from(raw: DomainJson) -> Result<Self> {
        match raw {
            DomainJson::Polygon { outer, holes } => Ok(PolygonalDomain::new(outer, holes)?.into()),
            DomainJson::Disk { disk } => Ok(Disk::new(disk.center, disk.radius)?.into()),
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        DomainJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn regular_ring(center: Point, radius: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            Point::new(center.x + radius * t.cos(), center.y + radius * t.sin())
        })
        .collect()
}

fn normalize_ring(mut ring: Vec<Point>, name: &str) -> Result<Vec<Point>> {
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    if ring.len() < 3 {
        return Err(Error::InvalidDomain(format!("{name} ring needs at least 3 vertices")));
    }
    if ring.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidDomain(format!("{name} ring has a non-finite coordinate")));
    }
    if signed_area(&ring).abs() <= f64::EPSILON {
        return Err(Error::InvalidDomain(format!("{name} ring has zero area")));
    }
    Ok(ring)
}

fn check_simple(ring: &[Point], name: &str) -> Result<()> {
    let n = ring.len();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if a == b {
            return Err(Error::InvalidDomain(format!("{name} ring repeats vertex {i}")));
        }
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            if adjacent {
                // adjacent edges may only share their common vertex
                let shared = if j == i + 1 { b } else { a };
                let (other_a, other_b) = if j == i + 1 { (a, d) } else { (b, c) };
                if point_segment_distance(other_a, c, d) == 0.0 && other_a != shared
                    || point_segment_distance(other_b, a, b) == 0.0 && other_b != shared
                {
                    return Err(Error::InvalidDomain(format!("{name} ring folds back at vertex {j}")));
                }
            } else if segments_intersect(a, b, c, d) {
                return Err(Error::InvalidDomain(format!("{name} ring self-intersects (edges {i}, {j})")));
            }
        }
    }
    Ok(())
}

fn rings_cross(a: &[Point], b: &[Point]) -> bool {
    (0..a.len()).any(|i| {
        let (p, q) = (a[i], a[(i + 1) % a.len()]);
        (0..b.len()).any(|j| segments_intersect(p, q, b[j], b[(j + 1) % b.len()]))
    })
}

/// Ray-casting parity test against one ring.
fn ring_contains(ring: &[Point], p: Point) -> bool {
    let mut inside = false;
    let n = ring.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn unit_square() -> Domain {
        PolygonalDomain::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into()
    }

    #[test]
    fn containment_examples() {
        let disk: Domain = PolygonalDomain::regular_polygon(Point::ORIGIN, 1.0, 64).unwrap().into();
        assert!(disk.contains(p(0.0, 0.0)));
        assert!(!disk.contains(p(2.0, 0.0)));

        let holed: Domain = PolygonalDomain::new(
            vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)],
            vec![vec![p(0.4, 0.4), p(0.6, 0.4), p(0.6, 0.6), p(0.4, 0.6)]],
        )
        .unwrap()
        .into();
        assert!(!holed.contains(p(0.5, 0.5)));
        assert!(holed.contains(p(0.2, 0.5)));
        // on the boundary
        assert!(!holed.contains(p(0.4, 0.5)));
        assert!(!unit_square().contains(p(0.0, 0.5)));
    }

    #[test]
    fn boundary_distance_examples() {
        let sq = unit_square();
        assert_eq!(sq.boundary_distance(p(0.5, 0.5)).unwrap(), 0.5);
        assert_eq!(sq.boundary_distance(p(0.1, 0.3)).unwrap(), 0.1);
        assert_eq!(Domain::Disk(Disk::unit()).boundary_distance(Point::ORIGIN).unwrap(), 1.0);
        let fine: Domain = PolygonalDomain::regular_polygon(Point::ORIGIN, 1.0, 256).unwrap().into();
        let d0 = fine.boundary_distance(Point::ORIGIN).unwrap();
        assert!((d0 - 1.0).abs() < 1e-4, "{d0}");
        assert!(matches!(sq.boundary_distance(p(2.0, 0.5)), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn diameter_examples() {
        assert!((unit_square().diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Domain::Disk(Disk::unit()).diameter(), 2.0);
        let disk: Domain = PolygonalDomain::regular_polygon(Point::ORIGIN, 1.0, 256).unwrap().into();
        assert!((disk.diameter() - 2.0).abs() < 1e-12);
        let rect: Domain = PolygonalDomain::rectangle(0.0, 0.0, 3.0, 1.0).unwrap().into();
        assert!((rect.diameter() - 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_rings() {
        let bowtie = vec![p(0., 0.), p(1., 1.), p(1., 0.), p(0., 1.)];
        assert!(PolygonalDomain::new(bowtie, vec![]).is_err());
        let outer = vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        let outside_hole = vec![p(2., 2.), p(3., 2.), p(3., 3.)];
        assert!(PolygonalDomain::new(outer.clone(), vec![outside_hole]).is_err());
        let h1 = vec![p(0.2, 0.2), p(0.6, 0.2), p(0.6, 0.6), p(0.2, 0.6)];
        let h2 = vec![p(0.5, 0.5), p(0.8, 0.5), p(0.8, 0.8), p(0.5, 0.8)];
        assert!(PolygonalDomain::new(outer.clone(), vec![h1, h2]).is_err());
        assert!(PolygonalDomain::new(vec![p(0., 0.), p(1., 0.)], vec![]).is_err());
        assert!(Disk::new(Point::ORIGIN, -1.0).is_err());
    }

    #[test]
    fn segment_inside_respects_notches() {
        // U-shape: the segment across the notch leaves the domain
        let u: Domain = PolygonalDomain::new(
            vec![p(0., 0.), p(3., 0.), p(3., 2.), p(2., 2.), p(2., 1.), p(1., 1.), p(1., 2.), p(0., 2.)],
            vec![],
        )
        .unwrap()
        .into();
        assert!(u.segment_inside(p(0.5, 0.5), p(2.5, 0.5)));
        assert!(!u.segment_inside(p(0.5, 1.5), p(2.5, 1.5)));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"outer": [[0,0],[1,0],[1,1],[0,1]], "holes": [[[0.4,0.4],[0.6,0.4],[0.6,0.6],[0.4,0.6]]]}"#;
        let d = Domain::from_json(text).unwrap();
        let back: Domain = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(d, back);
        let disk = Domain::from_json(r#"{"disk": {"center": [0,0], "radius": 2}}"#).unwrap();
        assert_eq!(disk.diameter(), 4.0);
        assert!(Domain::from_json(r#"{"outer": [[0,0],[1,1]]}"#).is_err());
    }
}
