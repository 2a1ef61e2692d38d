//! Carrot arcs and checkers for the five equivalent conditions:
//!
//! 1. length `a`-John with center `x0`;
//! 2. `diam D <= b d(x0)` and `ℓ_k(α[x1, y]) <= b1 |log d(y)/d(x1)| + b2`;
//! 3. `ℓ_k(α[x1, y]) <= b` up to the first doubling point (or `x0`);
//! 4. `ℓ(β) <= a |x1 - x0|` with `β` an `a`-carrot arc;
//! 5. diameter `a`-carrot plus the `φ`-natural condition.
//!
//! Every checker adds the caller's tolerance `eps` to its margins, so a report
//! passes exactly when every inequality holds up to `eps`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qhmetric::{euclid_geodesic, gp_point_margin, probe_indices, PolyCurve};
use crate::report::{constants, ConditionId, ConditionReport, MarginTracker, Witness};
use crate::search::{dijkstra, Weight};
use crate::space::DiscreteSpace;
use crate::VertexId;

/// Multiplicative tolerance of the carrot-constant bisection.
pub const BISECTION_TOLERANCE: f64 = 1e-3;

/// `min_z (a d(z) - ℓ(α[x, z]))` and the node where it is attained.
pub fn carrot_margin_at(curve: &PolyCurve, a: f64) -> (f64, usize) {
    curve
        .dist()
        .iter()
        .zip(curve.prefix_len())
        .map(|(d, l)| a * d - l)
        .enumerate()
        .fold((f64::INFINITY, 0), |best, (i, m)| if m < best.0 { (m, i) } else { best })
}

/// Nonnegative exactly when `curve` is an `a`-carrot arc (checked at its nodes).
pub fn carrot_margin(curve: &PolyCurve, a: f64) -> f64 {
    carrot_margin_at(curve, a).0
}

/// `max_z ℓ(α[x, z]) / d(z)`: the least `a` for which the curve is `a`-carrot.
pub fn min_carrot_constant_for_curve(curve: &PolyCurve) -> f64 {
    argmax_ratio(curve.prefix_len(), curve.dist()).0
}

/// `max_z diam(α[x, z]) / d(z)`: the least diameter-carrot constant.
pub fn min_diameter_carrot_constant(curve: &PolyCurve, space: Option<&DiscreteSpace>) -> f64 {
    argmax_ratio(&curve.prefix_diameters(space), curve.dist()).0
}

fn argmax_ratio(num: &[f64], den: &[f64]) -> (f64, usize) {
    num.iter()
        .zip(den)
        .map(|(n, d)| n / d)
        .enumerate()
        .fold((0.0, 0), |best, (i, r)| if r > best.0 { (r, i) } else { best })
}

/// Upper end of the bisection range, `2 diam(D) max_v 1/d(v)`.
pub fn default_a_max(space: &DiscreteSpace) -> f64 {
    let dmin = space.boundary_distances().iter().copied().fold(f64::INFINITY, f64::min);
    2.0 * space.diameter() / dmin
}

/// Shortest Euclidean path from `x` to `x0` among paths that are `a`-carrot:
/// an edge `u -> v` is relaxed only if `ℓ(u) + |uv| <= a d(v)`.
pub fn carrot_feasible_path(space: &DiscreteSpace, x: VertexId, x0: VertexId, a: f64) -> Option<PolyCurve> {
    let tree = dijkstra(space, x, &[x0], Weight::Euclid, |v, nd| nd <= a * space.boundary_distance(v));
    tree.path_to(x0).map(|p| PolyCurve::from_path(space, p).expect("tree paths follow edges"))
}

/// Outcome of [`best_carrot_arc`].
#[derive(Clone, Debug, PartialEq)]
pub enum CarrotArc {
    /// `curve` is an `a`-carrot arc with `a` within [`BISECTION_TOLERANCE`] of optimal.
    Found { curve: PolyCurve, a: f64 },
    /// No `a`-carrot arc exists for `a <= a_max`. `shortest` is the Euclidean
    /// geodesic and `a_shortest` its carrot constant.
    NotJohn { a_max: f64, shortest: PolyCurve, a_shortest: f64 },
}

impl CarrotArc {
    pub fn constant(&self) -> f64 {
        match self {
            CarrotArc::Found { a, .. } => *a,
            CarrotArc::NotJohn { a_shortest, .. } => *a_shortest,
        }
    }

    pub fn curve(&self) -> &PolyCurve {
        match self {
            CarrotArc::Found { curve, .. } => curve,
            CarrotArc::NotJohn { shortest, .. } => shortest,
        }
    }
}

/// Searches the carrot arc from `x` to `x0` with the smallest constant.
///
/// The optimum lies between `ℓ_min(x, x0) / d(x0)` (every path pays at least
/// the geodesic length at its endpoint) and the carrot constant of the
/// Euclidean geodesic itself. Geometric bisection over that range runs
/// [`carrot_feasible_path`]; the returned `a` is the exact constant of the
/// returned curve, at most `(1 + 1e-3)` times the optimum.
pub fn best_carrot_arc(space: &DiscreteSpace, x: VertexId, x0: VertexId, a_max: Option<f64>) -> Result<CarrotArc> {
    let a_max = a_max.unwrap_or_else(|| default_a_max(space));
    let sp = euclid_geodesic(space, x, x0)?;
    if x == x0 {
        return Ok(CarrotArc::Found { curve: sp.curve, a: 0.0 });
    }
    let a_sp = min_carrot_constant_for_curve(&sp.curve);
    let mut lo = sp.value / space.boundary_distance(x0);
    let not_john = |shortest: PolyCurve| CarrotArc::NotJohn { a_max, shortest, a_shortest: a_sp };
    if lo > a_max {
        return Ok(not_john(sp.curve));
    }

    let (mut hi, mut best) = if a_sp <= a_max {
        (a_sp, sp.curve.clone())
    } else {
        match carrot_feasible_path(space, x, x0, a_max) {
            Some(c) => (min_carrot_constant_for_curve(&c), c),
            None => return Ok(not_john(sp.curve)),
        }
    };

    if let Some(c) = carrot_feasible_path(space, x, x0, lo) {
        let a = min_carrot_constant_for_curve(&c);
        if a <= hi {
            return Ok(CarrotArc::Found { curve: c, a });
        }
    }
    while hi > lo * (1.0 + BISECTION_TOLERANCE) {
        let mid = (lo * hi).sqrt();
        match carrot_feasible_path(space, x, x0, mid) {
            Some(c) => {
                let a = min_carrot_constant_for_curve(&c);
                if a < hi {
                    hi = a;
                    best = c;
                } else {
                    hi = mid.min(hi);
                }
            }
            None => lo = mid,
        }
    }
    let a = min_carrot_constant_for_curve(&best);
    Ok(CarrotArc::Found { curve: best, a })
}

/// Carrot arcs of a sample family toward a common center.
#[derive(Clone, Debug, PartialEq)]
pub struct JohnProfile {
    pub center: VertexId,
    pub basepoints: Vec<VertexId>,
    /// `a(x)` per basepoint; for not-John basepoints, the constant of the geodesic.
    pub constants: Vec<f64>,
    pub feasible: Vec<bool>,
    /// One curve per basepoint: the best carrot arc, or the geodesic witness.
    pub curves: Vec<PolyCurve>,
    /// `max a(x)` over feasible basepoints.
    pub a: f64,
}

impl JohnProfile {
    pub fn all_feasible(&self) -> bool {
        self.feasible.iter().all(|&f| f)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct C1Options {
    /// Upper end of the bisection; defaults to [`default_a_max`].
    pub a_max: Option<f64>,
    /// Test against this constant instead of the measured maximum.
    pub target: Option<f64>,
}

/// Condition 1: runs [`best_carrot_arc`] for every sample. The margin per
/// sample is `a - a(x)`, with `a` the target or the measured maximum.
pub fn check_condition1(
    space: &DiscreteSpace,
    x0: VertexId,
    samples: &[VertexId],
    opts: C1Options,
) -> Result<(ConditionReport, JohnProfile)> {
    space.check_vertex(x0)?;
    let arcs: Vec<CarrotArc> = samples
        .par_iter()
        .map(|&x| best_carrot_arc(space, x, x0, opts.a_max))
        .collect::<Result<_>>()?;

    let feasible: Vec<bool> = arcs.iter().map(|c| matches!(c, CarrotArc::Found { .. })).collect();
    let consts: Vec<f64> = arcs.iter().map(CarrotArc::constant).collect();
    let measured = consts
        .iter()
        .zip(&feasible)
        .filter(|(_, &f)| f)
        .map(|(a, _)| *a)
        .fold(0.0, f64::max);
    let a_max = opts.a_max.unwrap_or_else(|| default_a_max(space));
    let a = opts.target.unwrap_or(measured);

    let mut tracker = MarginTracker::new();
    for (i, arc) in arcs.iter().enumerate() {
        let curve = arc.curve();
        let (_, at) = argmax_ratio(curve.prefix_len(), curve.dist());
        let margin = match arc {
            CarrotArc::Found { a: ax, .. } => a - ax,
            CarrotArc::NotJohn { .. } => a_max.min(a) - consts[i],
        };
        tracker.observe(
            margin,
            Witness { curve: Some(i), basepoint: curve.node_ref(0), point: curve.node_ref(at) },
        );
    }
    let report = tracker.finish(
        ConditionId::C1,
        constants([("a", a), ("a_measured", measured), ("samples", samples.len() as f64)]),
    );
    let profile = JohnProfile {
        center: x0,
        basepoints: samples.to_vec(),
        constants: consts,
        feasible,
        curves: arcs.into_iter().map(|c| match c {
            CarrotArc::Found { curve, .. } => curve,
            CarrotArc::NotJohn { shortest, .. } => shortest,
        }).collect(),
        a: measured,
    };
    Ok((report, profile))
}

/// Condition 2 with constants `(b, b1, b2)`.
pub fn check_condition2(
    space: &DiscreteSpace,
    x0: VertexId,
    curves: &[PolyCurve],
    b: f64,
    b1: f64,
    b2: f64,
    eps: f64,
) -> ConditionReport {
    let mut tracker = MarginTracker::new();
    let diam = space.diameter();
    tracker.observe(
        b * space.boundary_distance(x0) + eps - diam,
        Witness { curve: None, basepoint: space.node_ref(x0), point: space.node_ref(x0) },
    );
    let per_curve: Vec<MarginTracker> = curves
        .par_iter()
        .enumerate()
        .map(|(ci, curve)| {
            let mut t = MarginTracker::new();
            let d1 = curve.dist()[0];
            for (i, (&d, &q)) in curve.dist().iter().zip(curve.prefix_qh()).enumerate() {
                let rhs = b1 * (d / d1).ln().abs() + b2;
                t.observe(
                    rhs + eps - q,
                    Witness { curve: Some(ci), basepoint: curve.node_ref(0), point: curve.node_ref(i) },
                );
            }
            t
        })
        .collect();
    for t in per_curve {
        tracker.merge(t);
    }
    tracker.finish(ConditionId::C2, constants([("b", b), ("b1", b1), ("b2", b2), ("diam", diam), ("eps", eps)]))
}

/// Stopping node of condition 3 for a curve from `x1` to a center with
/// `d(x0) = d0`: the last node if `d(x1) >= d0 / 2`, otherwise the first node
/// with `d >= 2 d(x1)`.
pub fn cond3_stop_index(curve: &PolyCurve, d0: f64) -> Option<usize> {
    let d1 = curve.dist()[0];
    if d1 >= d0 / 2.0 {
        Some(curve.len() - 1)
    } else {
        curve.dist().iter().position(|&d| d >= 2.0 * d1)
    }
}

fn check_ends_at(curve: &PolyCurve, x0: VertexId, index: usize) -> Result<()> {
    match curve.last_vertex() {
        Some(v) if v != x0 => Err(Error::MalformedCurve(format!("curve {index} ends at {v}, not at the center {x0}"))),
        _ => Ok(()),
    }
}

/// Condition 3 with constant `b`.
pub fn check_condition3(
    space: &DiscreteSpace,
    x0: VertexId,
    curves: &[PolyCurve],
    b: f64,
    eps: f64,
) -> Result<ConditionReport> {
    let d0 = space.boundary_distance(x0);
    let mut tracker = MarginTracker::new();
    for (ci, curve) in curves.iter().enumerate() {
        check_ends_at(curve, x0, ci)?;
        let y = cond3_stop_index(curve, d0).ok_or_else(|| {
            Error::MalformedCurve(format!("curve {ci} never reaches twice its starting distance"))
        })?;
        // the crossing edge's earlier node is the recorded witness
        let witness_at = if y + 1 == curve.len() && curve.dist()[0] >= d0 / 2.0 { y } else { y.saturating_sub(1) };
        tracker.observe(
            b + eps - curve.prefix_qh()[y],
            Witness { curve: Some(ci), basepoint: curve.node_ref(0), point: curve.node_ref(witness_at) },
        );
    }
    Ok(tracker.finish(ConditionId::C3, constants([("b", b), ("eps", eps)])))
}

/// Condition 4 with constant `a`: `ℓ(β) <= a |x1 - x0|` and `β` is `a`-carrot.
pub fn check_condition4(
    space: &DiscreteSpace,
    x0: VertexId,
    curves: &[PolyCurve],
    a: f64,
    eps: f64,
) -> ConditionReport {
    let _ = x0;
    let mut tracker = MarginTracker::new();
    for (ci, curve) in curves.iter().enumerate() {
        let last = curve.len() - 1;
        let chord = curve.node_distance(Some(space), 0, last);
        tracker.observe(
            a * chord + eps - curve.length(),
            Witness { curve: Some(ci), basepoint: curve.node_ref(0), point: curve.node_ref(last) },
        );
        let (m, at) = carrot_margin_at(curve, a);
        tracker.observe(
            m + eps,
            Witness { curve: Some(ci), basepoint: curve.node_ref(0), point: curve.node_ref(at) },
        );
    }
    tracker.finish(ConditionId::C4, constants([("a", a), ("eps", eps)]))
}

/// Which side of the `diam_k` bracket the natural condition is tested with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DiamKBracket {
    /// Largest sampled pairwise `k` (the lower side of the bracket).
    #[default]
    Lower,
    /// `ℓ_k` of the prefix, the conservative side.
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NaturalOptions {
    pub max_probes: usize,
    pub bracket: DiamKBracket,
}

impl Default for NaturalOptions {
    fn default() -> Self {
        NaturalOptions { max_probes: 4, bracket: DiamKBracket::Lower }
    }
}

/// Per-prefix value of the chosen `diam_k` bracket side.
pub fn prefix_qh_diameters(space: &DiscreteSpace, curve: &PolyCurve, opts: NaturalOptions) -> Vec<f64> {
    if opts.bracket == DiamKBracket::Upper {
        return curve.prefix_qh().to_vec();
    }
    let n = curve.len();
    let mut contrib = vec![0.0f64; n];
    match curve.vertices() {
        Some(vs) => {
            let tree = dijkstra(space, vs[0], vs, Weight::Qh, |_, _| true);
            for (i, &v) in vs.iter().enumerate() {
                contrib[i] = tree.dist[v];
            }
            let probes = probe_indices(n, opts.max_probes.max(2));
            for (a, &pi) in probes.iter().enumerate().skip(1) {
                let later: Vec<VertexId> = probes[a + 1..].iter().map(|&j| vs[j]).collect();
                if later.is_empty() {
                    continue;
                }
                let t = dijkstra(space, vs[pi], &later, Weight::Qh, |_, _| true);
                for &pj in &probes[a + 1..] {
                    contrib[pj] = contrib[pj].max(t.dist[vs[pj]]);
                }
            }
        }
        None => {
            for (i, c) in contrib.iter_mut().enumerate() {
                let r = curve.node_distance(Some(space), 0, i);
                *c = -gp_point_margin(r, curve.dist()[0], curve.dist()[i], 0.0);
            }
        }
    }
    let mut m = 0.0f64;
    contrib
        .into_iter()
        .map(|c| {
            m = m.max(c);
            m
        })
        .collect()
}

/// Condition 5: `diam(α[x, z]) <= a d(z)` and
/// `diam_k(α[x, y]) <= φ(diam(α[x, y]) / dist(α[x, y], ∂D))` along every curve.
pub fn check_condition5(
    space: &DiscreteSpace,
    x0: VertexId,
    curves: &[PolyCurve],
    a: f64,
    phi: &(dyn Fn(f64) -> f64 + Sync),
    eps: f64,
    opts: NaturalOptions,
) -> ConditionReport {
    let _ = x0;
    let per_curve: Vec<MarginTracker> = curves
        .par_iter()
        .enumerate()
        .map(|(ci, curve)| {
            let mut t = MarginTracker::new();
            let diams = curve.prefix_diameters(Some(space));
            let mins = curve.prefix_min_dist();
            let qdiams = prefix_qh_diameters(space, curve, opts);
            for i in 0..curve.len() {
                let w = Witness { curve: Some(ci), basepoint: curve.node_ref(0), point: curve.node_ref(i) };
                t.observe(a * curve.dist()[i] + eps - diams[i], w);
                t.observe(phi(diams[i] / mins[i]) + eps - qdiams[i], w);
            }
            t
        })
        .collect();
    let mut tracker = MarginTracker::new();
    for t in per_curve {
        tracker.merge(t);
    }
    let bracket = match opts.bracket {
        DiamKBracket::Lower => 0.0,
        DiamKBracket::Upper => 1.0,
    };
    tracker.finish(
        ConditionId::C5,
        constants([("a", a), ("phi(0)", phi(0.0)), ("eps", eps), ("upper_bracket", bracket)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Disk, Domain, PolygonalDomain};
    use crate::geom::Point;
    use crate::space::build_grid_space;

    fn radial() -> PolyCurve {
        PolyCurve::segment(&Domain::Disk(Disk::unit()), Point::new(0.9, 0.0), Point::ORIGIN, 900).unwrap()
    }

    #[test]
    fn radial_carrot_margins() {
        let c = radial();
        assert!((carrot_margin(&c, 1.0) - 0.1).abs() < 1e-12);
        assert!(carrot_margin(&c, 0.9).abs() < 1e-12);
        assert!((min_carrot_constant_for_curve(&c) - 0.9).abs() < 1e-12);
        let single = PolyCurve::from_points(&Domain::Disk(Disk::unit()), vec![Point::ORIGIN]).unwrap();
        assert_eq!(min_carrot_constant_for_curve(&single), 0.0);
    }

    #[test]
    fn margin_monotone_in_a() {
        let c = radial();
        let mut prev = f64::INFINITY;
        for k in (1..=20).rev() {
            let m = carrot_margin(&c, k as f64 * 0.1);
            assert!(m <= prev);
            prev = m;
        }
    }

    #[test]
    fn square_diagonal_constant() {
        let sq: Domain = PolygonalDomain::rectangle(0.0, 0.0, 1.0, 1.0).unwrap().into();
        let s = build_grid_space(&sq, 0.01).unwrap();
        let x = s.nearest_vertex(Point::new(0.01, 0.01)).unwrap();
        let o = s.nearest_vertex(Point::new(0.5, 0.5)).unwrap();
        let path: Vec<_> = (1..=50).map(|k| s.nearest_vertex(Point::new(k as f64 * 0.01, k as f64 * 0.01)).unwrap()).collect();
        let c = PolyCurve::from_path(&s, path).unwrap();
        assert_eq!(c.first_vertex(), Some(x));
        assert_eq!(c.last_vertex(), Some(o));
        // ratio √2 (t - 0.01) / t peaks at the center: √2 · 0.98
        let a = min_carrot_constant_for_curve(&c);
        assert!((a - 2f64.sqrt() * 0.98).abs() < 1e-12, "{a}");
    }

    #[test]
    fn disk_carrot_search_is_near_one() {
        let s = build_grid_space(&Domain::Disk(Disk::unit()), 0.05).unwrap();
        let o = s.nearest_vertex(Point::ORIGIN).unwrap();
        for x in s.stratified_samples(30, 0.0) {
            let arc = best_carrot_arc(&s, x, o, None).unwrap();
            let CarrotArc::Found { curve, a } = arc else { panic!("disk is John") };
            assert!(a <= 1.0 + 0.09, "a = {a}");
            assert!(carrot_margin(&curve, a) >= -1e-12);
            assert_eq!(curve.last_vertex(), Some(o));
        }
        let same = best_carrot_arc(&s, o, o, None).unwrap();
        assert_eq!(same.constant(), 0.0);
    }

    #[test]
    fn tiny_a_max_gives_not_john() {
        let s = build_grid_space(&Domain::Disk(Disk::unit()), 0.1).unwrap();
        let o = s.nearest_vertex(Point::ORIGIN).unwrap();
        let x = s.nearest_vertex(Point::new(0.9, 0.0)).unwrap();
        let arc = best_carrot_arc(&s, x, o, Some(0.5)).unwrap();
        assert!(matches!(arc, CarrotArc::NotJohn { .. }));
        let (r, prof) = check_condition1(&s, o, &[x], C1Options { a_max: Some(0.5), target: None }).unwrap();
        assert!(!r.pass);
        assert!(!prof.all_feasible());
        assert_eq!(r.witness.unwrap().basepoint.vertex, Some(x));
    }

    #[test]
    fn condition_checks_on_radial_curve() {
        let c = radial();
        let s = build_grid_space(&Domain::Disk(Disk::unit()), 0.5).unwrap();
        let o = s.nearest_vertex(Point::ORIGIN).unwrap();
        let curves = vec![c.clone()];
        let r2 = check_condition2(&s, o, &curves, 3.0, 1.0, 3.0 + 2f64.ln(), 0.0);
        assert!(r2.pass, "{r2:?}");
        // stopping point d = 0.2 at (0.8, 0): ℓ_k = log 2
        let y = cond3_stop_index(&c, 1.0).unwrap();
        assert!((c.prefix_qh()[y] - 2f64.ln()).abs() < 1e-5);
        assert!((c.point(y).unwrap().x - 0.8).abs() < 1e-9);
        assert!(check_condition3(&s, o, &curves, 0.694, 0.0).unwrap().pass);
        assert!(!check_condition3(&s, o, &curves, 0.69, 0.0).unwrap().pass);
        let near = PolyCurve::segment(&Domain::Disk(Disk::unit()), Point::new(0.3, 0.0), Point::ORIGIN, 300).unwrap();
        let y = cond3_stop_index(&near, 1.0).unwrap();
        assert_eq!(y, near.len() - 1);
        assert!((near.prefix_qh()[y] - (1.0f64 / 0.7).ln()).abs() < 1e-6);
        assert!(check_condition4(&s, o, &curves, 1.0, 1e-12).pass);
        let phi = |t: f64| (1.0 + t).ln() + 3.0 + 2f64.ln();
        assert!(check_condition5(&s, o, &curves, 0.9, &phi, 1e-9, NaturalOptions::default()).pass);
    }

    #[test]
    fn wasteful_curve_fails_condition4() {
        let sq: Domain = PolygonalDomain::rectangle(-1.0, -1.0, 1.0, 1.0).unwrap().into();
        // spiral-ish detour around the center before arriving
        let pts = vec![
            Point::new(0.5, 0.0),
            Point::new(0.5, 0.5),
            Point::new(-0.5, 0.5),
            Point::new(-0.5, -0.5),
            Point::new(0.25, -0.5),
            Point::new(0.25, 0.0),
            Point::ORIGIN,
        ];
        let c = PolyCurve::from_points(&sq, pts).unwrap();
        let s = build_grid_space(&sq, 0.5).unwrap();
        let o = s.nearest_vertex(Point::ORIGIN).unwrap();
        let r = check_condition4(&s, o, &[c], 1.0, 0.0);
        assert!(!r.pass);
        assert!(r.worst_margin < 0.0);
        assert!(r.witness.is_some());
    }
}
