//! Closed-form quasisymmetric maps, empirical distortion functions, and the
//! transfer of the John property to image domains.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{derive_c3_from_c5, derive_phi_from_c1, log_case_constant};
use crate::domain::{regular_ring, Disk, Domain, PolygonalDomain};
use crate::error::{Error, Result};
use crate::geom::{point_set_diameter, Point};
use crate::john::{check_condition1, C1Options, JohnProfile};
use crate::qhmetric::PolyCurve;
use crate::report::{constants, ConditionId, ConditionReport, MarginTracker, NodeRef, Witness};
use crate::search::{dijkstra, Weight};
use crate::space::{segment_qh, Backend, DiscreteSpace};
use crate::VertexId;

/// A monotone control function such as `η` or `η'`.
pub type Control = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn control(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Control {
    Arc::new(f)
}

fn zero() -> f64 {
    0.0
}

/// Gallery of explicit maps of the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuasiMap {
    Identity,
    /// `p -> scale R(rotation) p + translation`, rotation in radians.
    Similarity {
        scale: f64,
        #[serde(default = "zero")]
        rotation: f64,
        #[serde(default)]
        translation: Point,
    },
    /// `p -> M p` with `M` given row by row.
    Linear { matrix: [[f64; 2]; 2] },
    /// `p -> center + (p - center) |p - center|^(alpha - 1)`.
    RadialPower {
        alpha: f64,
        #[serde(default)]
        center: Point,
    },
}

impl QuasiMap {
    pub fn from_json(s: &str) -> Result<Self> {
        let m: QuasiMap = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            QuasiMap::Identity => true,
            QuasiMap::Similarity { scale, rotation, translation } => {
                *scale > 0.0 && scale.is_finite() && rotation.is_finite() && translation.is_finite()
            }
            QuasiMap::Linear { matrix } => {
                let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
                matrix.iter().flatten().all(|v| v.is_finite()) && det != 0.0 && det.is_finite()
            }
            QuasiMap::RadialPower { alpha, center } => *alpha > 0.0 && alpha.is_finite() && center.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidMap(format!("{self:?}")))
        }
    }

    pub fn is_affine(&self) -> bool {
        !matches!(self, QuasiMap::RadialPower { alpha, .. } if *alpha != 1.0)
    }

    /// `f(p)`. The radial power with `alpha < 1` is singular at its center.
    pub fn apply(&self, p: Point) -> Result<Point> {
        if let QuasiMap::RadialPower { alpha, center } = self {
            if *alpha < 1.0 && p == *center {
                return Err(Error::SingularPoint(p));
            }
        }
        Ok(self.apply_extended(p))
    }

    /// `f(p)` with the continuous extension `f(center) = center` of the radial power.
    pub fn apply_extended(&self, p: Point) -> Point {
        match self {
            QuasiMap::Identity => p,
            QuasiMap::Similarity { scale, rotation, translation } => {
                let (s, c) = rotation.sin_cos();
                Point::new(c * p.x - s * p.y, s * p.x + c * p.y) * *scale + *translation
            }
            QuasiMap::Linear { matrix: m } => {
                Point::new(m[0][0] * p.x + m[0][1] * p.y, m[1][0] * p.x + m[1][1] * p.y)
            }
            QuasiMap::RadialPower { alpha, center } => {
                let v = p - *center;
                let r = v.norm();
                if r == 0.0 {
                    *center
                } else {
                    *center + v * r.powf(alpha - 1.0)
                }
            }
        }
    }

    pub fn inverse(&self) -> QuasiMap {
        match self {
            QuasiMap::Identity => QuasiMap::Identity,
            QuasiMap::Similarity { scale, rotation, translation } => {
                let (s, c) = (-rotation).sin_cos();
                let t = Point::new(c * translation.x - s * translation.y, s * translation.x + c * translation.y);
                QuasiMap::Similarity { scale: 1.0 / scale, rotation: -rotation, translation: t * (-1.0 / scale) }
            }
            QuasiMap::Linear { matrix: m } => {
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                QuasiMap::Linear {
                    matrix: [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]],
                }
            }
            QuasiMap::RadialPower { alpha, center } => QuasiMap::RadialPower { alpha: 1.0 / alpha, center: *center },
        }
    }

    /// `f(D)`. Disks stay analytic under similarities and centered radial powers;
    /// otherwise the image of the (densified) boundary polygon is returned.
    pub fn image_domain(&self, domain: &Domain) -> Result<Domain> {
        self.validate()?;
        if let Domain::Disk(disk) = domain {
            match self {
                QuasiMap::Identity => return Ok(domain.clone()),
                QuasiMap::Similarity { scale, .. } => {
                    return Ok(Disk::new(self.apply_extended(disk.center), disk.radius * scale)?.into())
                }
                QuasiMap::RadialPower { alpha, center } if *center == disk.center => {
                    return Ok(Disk::new(disk.center, disk.radius.powf(*alpha))?.into())
                }
                _ => {}
            }
        }
        // the disk outline is already dense; polygon edges are bent by non-affine maps
        let pieces = if self.is_affine() || matches!(domain, Domain::Disk(_)) { 1 } else { 32 };
        let ring = |r: &[Point]| -> Vec<Point> {
            let mut out = Vec::with_capacity(r.len() * pieces);
            for (i, &p) in r.iter().enumerate() {
                let q = r[(i + 1) % r.len()];
                for k in 0..pieces {
                    out.push(self.apply_extended(p.lerp(q, k as f64 / pieces as f64)));
                }
            }
            out
        };
        let outline = match domain {
            // fine enough that grid vertices of the disk map inside within the snap tolerance
            Domain::Disk(d) => vec![regular_ring(d.center, d.radius, 4096)],
            Domain::Polygon(_) => domain.outline(),
        };
        let outer = ring(&outline[0]);
        let holes = outline[1..].iter().map(|h| ring(h)).collect();
        Ok(PolygonalDomain::new(outer, holes)?.into())
    }
}

/// Relative tolerance for snapping image vertices that land just outside the image domain.
pub const SNAP_TOLERANCE: f64 = 1e-6;

/// Image of a grid space under `map`: vertex ids and adjacency are kept,
/// positions are mapped, and `d` and all edge weights are recomputed in
/// `image_domain`. With `snap`, vertices within [`SNAP_TOLERANCE`] (relative to
/// the image diameter) outside the image domain keep their distance to its
/// boundary; otherwise they are an error.
pub fn push_space(map: &QuasiMap, space: &DiscreteSpace, image_domain: &Domain, snap: bool) -> Result<DiscreteSpace> {
    map.validate()?;
    let Backend::Grid { h, .. } = space.backend() else {
        return Err(Error::InvalidArgument("only embedded grid spaces can be pushed forward".into()));
    };
    let tol = SNAP_TOLERANCE * image_domain.diameter();
    let mut positions = Vec::with_capacity(space.vertex_count());
    let mut dist = Vec::with_capacity(space.vertex_count());
    for v in 0..space.vertex_count() {
        let p = map.apply_extended(space.position(v).expect("grid vertices are embedded"));
        let d = image_domain.distance_to_boundary(p);
        if !image_domain.contains(p) && !(snap && d <= tol && d > 0.0) {
            return Err(Error::OutsideDomain(p));
        }
        positions.push(Some(p));
        dist.push(d);
    }
    let mut undirected = Vec::with_capacity(space.edge_count());
    let (mut src_max, mut img_max) = (0.0f64, 0.0f64);
    for u in 0..space.vertex_count() {
        for e in space.neighbors(u) {
            if e.to <= u {
                continue;
            }
            let (pa, pb) = (positions[u].unwrap(), positions[e.to].unwrap());
            let len = pa.dist(pb);
            src_max = src_max.max(e.len);
            img_max = img_max.max(len);
            undirected.push((u, e.to, len, segment_qh(Some(image_domain), pa, pb, dist[u], dist[e.to])));
        }
    }
    let h_img = if src_max > 0.0 { h * (img_max / src_max) } else { *h };
    Ok(DiscreteSpace::assemble(
        Backend::Grid { domain: image_domain.clone(), h: h_img },
        positions,
        dist,
        undirected,
    ))
}

/// A sampled triple `(x, a, b)` with `t = |x - a| / |x - b|` and
/// `ratio = |f(x) - f(a)| / |f(x) - f(b)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub x: Point,
    pub a: Point,
    pub b: Point,
    pub t: f64,
    pub ratio: f64,
}

impl Triple {
    fn eval(map: &QuasiMap, x: Point, a: Point, b: Point) -> Option<Triple> {
        let t = x.dist(a) / x.dist(b);
        let (fx, fa, fb) = (map.apply_extended(x), map.apply_extended(a), map.apply_extended(b));
        let ratio = fx.dist(fa) / fx.dist(fb);
        (t.is_finite() && ratio.is_finite() && t > 0.0).then_some(Triple { x, a, b, t, ratio })
    }
}

/// Empirical distortion function of a map on a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaEstimate {
    pub t_grid: Vec<f64>,
    /// `sup ratio` over triples with `t_triple <= t_k`; nondecreasing by construction.
    pub eta_hat: Vec<f64>,
    /// `eta_hat` made strictly increasing, the basis of [`EtaEstimate::control`].
    pub envelope: Vec<f64>,
    /// Triple attaining `eta_hat[k]`, if any triple fell at or below `t_k`.
    pub witnesses: Vec<Option<Triple>>,
    pub samples: usize,
    pub warnings: Vec<String>,
}

/// Factor applied to sampled suprema before they are used in bounds.
pub const ETA_INFLATION: f64 = 1.1;

/// Directions drawn per endpoint around each targeted center; all pairs are evaluated.
const ANCHOR_DIRECTIONS: usize = 8;

/// Relative tolerance when assigning a triple's `t` to a grid bin.
const BIN_TOLERANCE: f64 = 1e-12;

/// 101 log-spaced points from `1e-2` to `1e2` (contains `1`).
pub fn default_t_grid() -> Vec<f64> {
    (0..=100).map(|k| 10f64.powf(-2.0 + k as f64 * 0.04)).collect()
}

impl EtaEstimate {
    /// `ETA_INFLATION` times the envelope, log-log interpolated between grid
    /// points and extended by the end segments' power laws.
    pub fn control(&self) -> Control {
        let lt: Vec<f64> = self.t_grid.iter().map(|t| t.ln()).collect();
        let le: Vec<f64> = self.envelope.iter().map(|e| (e * ETA_INFLATION).ln()).collect();
        control(move |t| interp_loglog(&lt, &le, t))
    }
}

fn interp_loglog(lt: &[f64], le: &[f64], t: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let n = lt.len();
    if n == 1 {
        return le[0].exp() * t / lt[0].exp();
    }
    let x = t.ln();
    let k = match lt.partition_point(|&v| v <= x) {
        0 => 0,
        i if i >= n => n - 2,
        i => i - 1,
    };
    // power-law end extrapolation uses at least slope 1e-6 so the control stays increasing
    let slope = ((le[k + 1] - le[k]) / (lt[k + 1] - lt[k])).max(1e-6);
    (le[k] + slope * (x - lt[k])).exp()
}

fn sample_point(domain: &Domain, rng: &mut ChaCha8Rng) -> Point {
    let (lo, hi) = domain.bbox();
    loop {
        let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if domain.contains(p) {
            return p;
        }
    }
}

fn unit(rng: &mut ChaCha8Rng) -> Point {
    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Point::new(th.cos(), th.sin())
}

/// Samples triples in `domain` and records the suprema of the distortion ratio.
///
/// Half the budget picks centers `x` and radii placing triples at exactly
/// `t = t_k` inside `B(x, d(x))`, each evaluated over all pairs of
/// `ANCHOR_DIRECTIONS` directions for `a` and for `b`; the rest are uniform
/// triples, each also evaluated with `a` and `b` swapped.
pub fn estimate_eta(
    map: &QuasiMap,
    domain: &Domain,
    n_triples: usize,
    seed: u64,
    t_grid: Option<Vec<f64>>,
) -> Result<EtaEstimate> {
    map.validate()?;
    if n_triples < 1000 {
        return Err(Error::InvalidArgument(format!("at least 1000 triples are needed, got {n_triples}")));
    }
    let t_grid = t_grid.unwrap_or_else(default_t_grid);
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[0] < w[1])) || !(t_grid[0] > 0.0) {
        return Err(Error::InvalidArgument("t grid must be positive and strictly increasing".into()));
    }
    let kn = t_grid.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw: Vec<Option<Triple>> = vec![None; kn];
    let mut samples = 0usize;
    let record = |tr: Triple, raw: &mut Vec<Option<Triple>>| {
        let k = t_grid.partition_point(|&g| g * (1.0 + BIN_TOLERANCE) < tr.t);
        if k < kn && raw[k].map_or(true, |w| tr.ratio > w.ratio) {
            raw[k] = Some(tr);
        }
    };

    let targeted = n_triples / 2;
    for i in 0..targeted {
        let t = t_grid[i % kn];
        let x = sample_point(domain, &mut rng);
        let r = domain.distance_to_boundary(x) * 0.999;
        let s: f64 = rng.gen_range(0.0..1.0f64).max(1e-9) * r.min(r / t);
        let dirs: Vec<Point> = (0..2 * ANCHOR_DIRECTIONS).map(|_| unit(&mut rng)).collect();
        let (da, db) = dirs.split_at(ANCHOR_DIRECTIONS);
        for &u in da {
            for &v in db {
                samples += 1;
                if let Some(tr) = Triple::eval(map, x, x + u * (t * s), x + v * s) {
                    record(tr, &mut raw);
                }
            }
        }
    }
    for _ in targeted..n_triples {
        let (x, a, b) = (sample_point(domain, &mut rng), sample_point(domain, &mut rng), sample_point(domain, &mut rng));
        for (p, q) in [(a, b), (b, a)] {
            samples += 1;
            if let Some(tr) = Triple::eval(map, x, p, q) {
                record(tr, &mut raw);
            }
        }
    }

    let mut warnings = Vec::new();
    let mut eta_hat = Vec::with_capacity(kn);
    let mut witnesses = Vec::with_capacity(kn);
    let mut best: Option<Triple> = None;
    for r in raw {
        if let Some(tr) = r {
            if best.map_or(true, |b| tr.ratio > b.ratio) {
                best = Some(tr);
            }
        }
        eta_hat.push(best.map_or(0.0, |b| b.ratio));
        witnesses.push(best);
    }
    let envelope = strictify(&t_grid, &eta_hat, &mut warnings);
    Ok(EtaEstimate { t_grid, eta_hat, envelope, witnesses, samples, warnings })
}

fn strictify(t: &[f64], eta: &[f64], warnings: &mut Vec<String>) -> Vec<f64> {
    let mut env = eta.to_vec();
    if let Some(first) = env.iter().position(|&e| e > 0.0) {
        if first > 0 {
            warnings.push(format!("{first} empty bins below t = {}; extrapolated linearly", t[first]));
            for k in 0..first {
                env[k] = env[first] * t[k] / t[first];
            }
        }
    } else {
        warnings.push("no triple fell on the t grid; envelope set to the identity".into());
        return t.to_vec();
    }
    const DELTA: f64 = 1e-9;
    let mut flat = 0;
    for k in 1..env.len() {
        if env[k] <= env[k - 1] {
            env[k] = env[k - 1] + DELTA * t[k];
            flat += 1;
        }
    }
    if flat > 0 {
        warnings.push(format!("envelope flat on {flat} bins; regularized by {DELTA} t"));
    }
    env
}

/// Inverse of an increasing control by bisection in log space.
pub fn invert_control(eta: &Control, s: f64) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    while eta(hi) < s && hi < 1e300 {
        hi *= 2.0;
    }
    while eta(lo) > s && lo > 1e-300 {
        lo *= 0.5;
    }
    // geometric means taken factorwise: lo * hi underflows near the bracket limits
    for _ in 0..200 {
        let mid = lo.sqrt() * hi.sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if eta(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.sqrt() * hi.sqrt()
}

/// `η'(t) = 1 / η⁻¹(1/t)`, the control function of the inverse map.
pub fn eta_inverse_control(eta: Control) -> Control {
    control(move |t| if t > 0.0 { 1.0 / invert_control(&eta, 1.0 / t) } else { 0.0 })
}

fn image_curve(map: &QuasiMap, curve: &PolyCurve, image: &Domain) -> Result<(Vec<Point>, Vec<f64>)> {
    let pts = curve
        .points()
        .ok_or_else(|| Error::InvalidArgument("curve has no planar positions".into()))?;
    let img: Vec<Point> = pts.iter().map(|&p| map.apply_extended(p)).collect();
    let d = img.iter().map(|&p| image.distance_to_boundary(p)).collect();
    Ok((img, d))
}

/// Image curves are diameter `2η(a)`-carrot when the source curves are
/// diameter `a`-carrot. Margin per node: `2η(a) d'(z') + eps - diam(α'[x', z'])`.
pub fn check_diameter_carrot_image(
    curves: &[PolyCurve],
    map: &QuasiMap,
    image: &Domain,
    a: f64,
    eta: &Control,
    eps: f64,
) -> Result<ConditionReport> {
    let a_img = 2.0 * eta(a);
    let mut tracker = MarginTracker::new();
    for (ci, curve) in curves.iter().enumerate() {
        let (img, d) = image_curve(map, curve, image)?;
        let mut diam = 0.0f64;
        for i in 0..img.len() {
            for j in 0..i {
                diam = diam.max(img[i].dist(img[j]));
            }
            tracker.observe(
                a_img * d[i] + eps - diam,
                Witness { curve: Some(ci), basepoint: curve.node_ref(0), point: curve.node_ref(i) },
            );
        }
    }
    Ok(tracker.finish(ConditionId::Transfer, constants([("a", a), ("a_image", a_img), ("eps", eps)])))
}

/// `diam(A)/dist(A, ∂D) <= 6η'(diam(A')/dist(A', ∂D'))` for each curve `A`.
pub fn check_relative_distance_claim(
    curves: &[PolyCurve],
    map: &QuasiMap,
    image: &Domain,
    eta_prime: &Control,
    eps: f64,
) -> Result<ConditionReport> {
    let mut tracker = MarginTracker::new();
    for (ci, curve) in curves.iter().enumerate() {
        let (img, d_img) = image_curve(map, curve, image)?;
        let src = curve.points().expect("checked by image_curve");
        let (argmin, dmin) = curve
            .dist()
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, &d)| if d < b.1 { (i, d) } else { b });
        let lhs = point_set_diameter(src) / dmin;
        let arg = point_set_diameter(&img) / d_img.iter().copied().fold(f64::INFINITY, f64::min);
        tracker.observe(
            6.0 * eta_prime(arg) + eps - lhs,
            Witness { curve: Some(ci), basepoint: curve.node_ref(0), point: curve.node_ref(argmin) },
        );
    }
    Ok(tracker.finish(ConditionId::Transfer, constants([("eps", eps)])))
}

/// `(c1, c2, t0, M)`: `t0` solves `2η(e^{t0} - 1) = λ/(2c)`, pairs with
/// `k <= t0` have `k' <= M = λ/(2 - λ)`, and chaining `⌈2k/t0⌉` such steps
/// along a near-geodesic gives `c1 = 2M/t0`, `c2 = M`.
pub fn coarse_qh_constants(eta: &Control, lambda: f64, c: f64) -> (f64, f64, f64, f64) {
    let t0 = solve_t0(eta, lambda, c);
    let m = lambda / (2.0 - lambda);
    (2.0 * m / t0, m, t0, m)
}

pub fn solve_t0(eta: &Control, lambda: f64, c: f64) -> f64 {
    invert_control(eta, lambda / (4.0 * c)).ln_1p()
}

/// Deterministic vertex pairs: `n / 20` sources with 20 partners each, half
/// uniform and half drawn from a ball `B(u, d(u)/4)` so small `k` is covered.
pub fn sample_pairs(space: &DiscreteSpace, n: usize, seed: u64) -> Vec<(VertexId, VertexId)> {
    const PER_SOURCE: usize = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = space.vertex_count();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u = rng.gen_range(0..nv);
        for j in 0..PER_SOURCE.min(n - out.len()) {
            let v = match (j % 2, space.position(u)) {
                (1, Some(p)) => {
                    let r = space.boundary_distance(u) * 0.25 * rng.gen_range(0.0..1.0f64);
                    space.nearest_vertex(p + unit(&mut rng) * r).unwrap_or(u)
                }
                _ => rng.gen_range(0..nv),
            };
            out.push((u, v));
        }
    }
    out
}

/// Coarse quasihyperbolic distortion `k'(u', v') <= c1 k(u, v) + c2`, plus
/// `k' <= M` for pairs with `k <= t0`. `image` must share vertex ids with
/// `source` (as produced by [`push_space`]). Reports the fitted
/// `c2_fit = max(k' - c1 k)` and `c1_fit = max((k' - c2)/k)` alongside.
pub fn check_coarse_qh_claim(
    pairs: &[(VertexId, VertexId)],
    source: &DiscreteSpace,
    image: &DiscreteSpace,
    consts: (f64, f64, f64, f64),
    eps: f64,
) -> Result<ConditionReport> {
    let (c1, c2, t0, m) = consts;
    if source.vertex_count() != image.vertex_count() {
        return Err(Error::InvalidArgument("image space does not share the source vertices".into()));
    }
    for &(u, v) in pairs {
        source.check_vertex(u)?;
        source.check_vertex(v)?;
    }
    let mut groups: Vec<(VertexId, Vec<VertexId>)> = Vec::new();
    for &(u, v) in pairs {
        match groups.last_mut() {
            Some((g, vs)) if *g == u => vs.push(v),
            _ => groups.push((u, vec![v])),
        }
    }
    let values: Vec<Vec<(VertexId, VertexId, f64, f64)>> = groups
        .par_iter()
        .map(|(u, vs)| {
            let tk = dijkstra(source, *u, vs, Weight::Qh, |_, _| true);
            let ti = dijkstra(image, *u, vs, Weight::Qh, |_, _| true);
            vs.iter().map(|&v| (*u, v, tk.dist[v], ti.dist[v])).collect()
        })
        .collect();

    let mut tracker = MarginTracker::new();
    let (mut c1_fit, mut c2_fit, mut small) = (0.0f64, f64::NEG_INFINITY, 0usize);
    for (u, v, k, kp) in values.into_iter().flatten() {
        let w = Witness { curve: None, basepoint: source.node_ref(u), point: source.node_ref(v) };
        tracker.observe(c1 * k + c2 + eps - kp, w);
        if k <= t0 {
            small += 1;
            tracker.observe(m + eps - kp, w);
        }
        c2_fit = c2_fit.max(kp - c1 * k);
        if k > 0.0 {
            c1_fit = c1_fit.max((kp - c2) / k);
        }
    }
    Ok(tracker.finish(
        ConditionId::Transfer,
        constants([
            ("c1", c1),
            ("c2", c2),
            ("t0", t0),
            ("small_scale_bound", m),
            ("small_pairs", small as f64),
            ("c1_fit", c1_fit),
            ("c2_fit", c2_fit.max(0.0)),
            ("eps", eps),
        ]),
    ))
}

/// Inputs of [`theorem2_transfer`] beyond the spaces.
#[derive(Clone)]
pub struct TransferParams {
    pub lambda: f64,
    pub c: f64,
    pub eta: Control,
    /// Source carrot constant.
    pub a: f64,
}

/// Outcome of [`theorem2_transfer`].
#[derive(Clone, Debug)]
pub struct Transfer {
    pub report: ConditionReport,
    pub image_profile: JohnProfile,
    pub image_report: ConditionReport,
    pub a_image: f64,
    /// `ln` of the assembled bound on the image carrot constant.
    pub log_bound: f64,
}

/// Measures the image carrot constant on `image` (center `x0`, same ids as
/// `source`) and compares it with the bound assembled from the source
/// constant: diameter-carrot constant `2η(a)`, natural function
/// `φ'(t) = c1 φ(6η'(t)) + c2`, condition-3 constant `2φ'(2a'(1+a'))`, and the
/// largest case constant. The comparison is made between logarithms.
pub fn theorem2_transfer(
    image: &DiscreteSpace,
    x0: VertexId,
    samples: &[VertexId],
    p: &TransferParams,
) -> Result<Transfer> {
    let (image_report, image_profile) = check_condition1(image, x0, samples, C1Options::default())?;
    let a_image = image_profile.a;
    let a_diam = 2.0 * (p.eta)(p.a);
    let phi = derive_phi_from_c1(p.a.max(1.0))?;
    let eta_prime = eta_inverse_control(p.eta.clone());
    let (c1, c2, t0, _) = coarse_qh_constants(&p.eta, p.lambda, p.c);
    let phi_prime = |t: f64| c1 * phi.eval(6.0 * eta_prime(t)) + c2;
    let b = derive_c3_from_c5(a_diam.max(1.0), phi_prime);
    let log_bound = log_case_constant(p.lambda, p.c, b);

    let mut tracker = MarginTracker::new();
    let witness = image_report.witness.unwrap_or(Witness {
        curve: None,
        basepoint: image.node_ref(x0),
        point: NodeRef::default(),
    });
    let margin = if image_profile.all_feasible() { log_bound - a_image.max(f64::MIN_POSITIVE).ln() } else { f64::MIN };
    tracker.observe(margin, witness);
    let report = tracker.finish(
        ConditionId::Transfer,
        constants([
            ("a", p.a),
            ("a_image", a_image),
            ("a_diam", a_diam),
            ("c1", c1),
            ("c2", c2),
            ("t0", t0),
            ("b_image", b),
            ("log_bound", log_bound),
        ]),
    );
    Ok(Transfer { report, image_profile, image_report, a_image, log_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::build_grid_space;

    fn sim(scale: f64) -> QuasiMap {
        QuasiMap::Similarity { scale, rotation: 0.3, translation: Point::new(1.0, -2.0) }
    }

    #[test]
    fn apply_examples() {
        let s = QuasiMap::Similarity { scale: 2.0, rotation: 0.0, translation: Point::ORIGIN };
        assert_eq!(s.apply(Point::new(1.0, 1.0)).unwrap(), Point::new(2.0, 2.0));
        let l = QuasiMap::Linear { matrix: [[2.0, 0.0], [0.0, 1.0]] };
        assert_eq!(l.apply(Point::new(1.0, 1.0)).unwrap(), Point::new(2.0, 1.0));
        let r = QuasiMap::RadialPower { alpha: 0.5, center: Point::ORIGIN };
        let q = r.apply(Point::new(0.25, 0.0)).unwrap();
        assert!((q.x - 0.5).abs() < 1e-15 && q.y == 0.0);
        assert!(matches!(r.apply(Point::ORIGIN), Err(Error::SingularPoint(_))));
        assert_eq!(r.apply_extended(Point::ORIGIN), Point::ORIGIN);
    }

    #[test]
    fn inverses_round_trip() {
        let p = Point::new(0.3, -0.7);
        for m in [
            sim(2.5),
            QuasiMap::Linear { matrix: [[2.0, 1.0], [0.5, 1.5]] },
            QuasiMap::RadialPower { alpha: 0.5, center: Point::new(0.1, 0.1) },
        ] {
            let back = m.inverse().apply_extended(m.apply_extended(p));
            assert!(back.dist(p) < 1e-12, "{m:?}");
        }
    }

    #[test]
    fn validation_and_json() {
        assert!(QuasiMap::from_json(r#"{"kind":"radial_power","alpha":0.5,"center":[0,0]}"#).is_ok());
        assert!(QuasiMap::from_json(r#"{"kind":"radial_power","alpha":0.0,"center":[0,0]}"#).is_err());
        assert!(QuasiMap::from_json(r#"{"kind":"linear","matrix":[[1,2],[2,4]]}"#).is_err());
        assert!(QuasiMap::from_json(r#"{"kind":"similarity","scale":-1}"#).is_err());
        assert_eq!(QuasiMap::from_json(r#"{"kind":"identity"}"#).unwrap(), QuasiMap::Identity);
        let s = serde_json::to_string(&sim(3.0)).unwrap();
        assert_eq!(QuasiMap::from_json(&s).unwrap(), sim(3.0));
    }

    #[test]
    fn radial_power_image_of_disk() {
        let disk = Domain::Disk(Disk::unit());
        let m = QuasiMap::RadialPower { alpha: 0.5, center: Point::ORIGIN };
        assert_eq!(m.image_domain(&disk).unwrap(), disk);
        let s = build_grid_space(&disk, 0.1).unwrap();
        let img = push_space(&m, &s, &disk, false).unwrap();
        for v in 0..s.vertex_count() {
            let r = s.position(v).unwrap().norm();
            assert!((img.boundary_distance(v) - (1.0 - r.sqrt())).abs() < 1e-12);
        }
    }

    #[test]
    fn push_identity_and_similarity() {
        let disk = Domain::Disk(Disk::unit());
        let s = build_grid_space(&disk, 0.1).unwrap();
        let id = push_space(&QuasiMap::Identity, &s, &disk, false).unwrap();
        for u in 0..s.vertex_count() {
            assert_eq!(s.neighbors(u), id.neighbors(u));
        }
        let m = sim(3.0);
        let img_dom = m.image_domain(&disk).unwrap();
        let img = push_space(&m, &s, &img_dom, false).unwrap();
        for u in 0..s.vertex_count() {
            for (e, f) in s.neighbors(u).iter().zip(img.neighbors(u)) {
                assert_eq!(e.to, f.to);
                assert!((f.len - 3.0 * e.len).abs() < 1e-12);
                assert!((f.qh - e.qh).abs() < 1e-9 * e.qh);
            }
        }
        assert!((img.spacing() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn similarity_eta_is_identity() {
        let disk = Domain::Disk(Disk::unit());
        let e = estimate_eta(&sim(2.0), &disk, 2000, 7, None).unwrap();
        for (t, v) in e.t_grid.iter().zip(&e.eta_hat) {
            assert!((v - t).abs() <= 1e-9 * t.max(1.0), "t = {t}, eta = {v}");
        }
        for w in e.witnesses.iter().flatten() {
            let again = Triple::eval(&sim(2.0), w.x, w.a, w.b).unwrap();
            assert_eq!(again.ratio, w.ratio);
        }
    }

    #[test]
    fn linear_eta_bounded_by_condition_number() {
        let disk = Domain::Disk(Disk::unit());
        let m = QuasiMap::Linear { matrix: [[2.0, 0.0], [0.0, 1.0]] };
        let e = estimate_eta(&m, &disk, 4000, 3, None).unwrap();
        for (t, v) in e.t_grid.iter().zip(&e.eta_hat) {
            assert!(*v <= 2.0 * t * (1.0 + 1e-9));
        }
        let k1 = e.t_grid.iter().position(|&t| (t - 1.0).abs() < 1e-9).unwrap();
        assert!(e.eta_hat[k1] > 1.8);
        assert!(e.envelope.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn inverse_control_algebra() {
        let ident = eta_inverse_control(control(|t| t));
        let double = eta_inverse_control(control(|t| 2.0 * t));
        let square = eta_inverse_control(control(|t| t * t));
        for t in [0.01, 0.5, 1.0, 3.0, 100.0] {
            assert!((ident(t) - t).abs() < 1e-9);
            assert!((double(t) - 2.0 * t).abs() < 1e-9);
            assert!((square(t) - t.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn t0_for_identity() {
        let (c1, c2, t0, m) = coarse_qh_constants(&control(|t| t), 0.5, 1.0);
        assert!((t0 - (9.0f64 / 8.0).ln()).abs() < 1e-12);
        assert!((m - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c2, m);
        assert!((c1 - 2.0 * m / t0).abs() < 1e-12);
    }

    #[test]
    fn interpolated_control_hits_grid() {
        let est = EtaEstimate {
            t_grid: vec![0.5, 1.0, 2.0],
            eta_hat: vec![0.5, 1.0, 4.0],
            envelope: vec![0.5, 1.0, 4.0],
            witnesses: vec![None; 3],
            samples: 0,
            warnings: vec![],
        };
        let c = est.control();
        assert!((c(1.0) - 1.1).abs() < 1e-12);
        assert!((c(4.0) - 1.1 * 16.0).abs() < 1e-9);
        assert!((c(0.25) - 1.1 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn inversion_stays_finite_for_nearly_flat_controls() {
        // a control this flat pushes the bracket to its lower limit
        let eta = control(|t| 0.02 * t.powf(1e-6));
        let x = invert_control(&eta, 0.01);
        assert!(x > 0.0 && x.is_finite());
        assert!(eta_inverse_control(eta)(100.0).is_finite());
    }
}
