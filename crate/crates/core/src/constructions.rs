//! Constant derivations between the conditions and the curve constructions
//! turning condition-3 curves into quasiconvex carrot arcs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::john::{cond3_stop_index, min_carrot_constant_for_curve};
use crate::qhmetric::{euclid_geodesic, PolyCurve};
use crate::search::{dijkstra, Tree, Weight};
use crate::space::DiscreteSpace;
use crate::VertexId;

/// `(b, b1, b2) = (3a, a, (3 + log 2a) a)`.
pub fn derive_c2_from_c1(a: f64) -> Result<(f64, f64, f64)> {
    if !(a >= 1.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("carrot constant must be a finite real >= 1, got {a}")));
    }
    Ok((3.0 * a, a, (3.0 + (2.0 * a).ln()) * a))
}

/// `max(b1 log 2b + b2, b1 log 2 + b2)`.
pub fn derive_c3_from_c2(b: f64, b1: f64, b2: f64) -> f64 {
    (b1 * (2.0 * b).ln() + b2).max(b1 * 2f64.ln() + b2)
}

/// `φ(t) = b1 log(1 + t) + b2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phi {
    pub b1: f64,
    pub b2: f64,
}

impl Phi {
    pub fn eval(&self, t: f64) -> f64 {
        self.b1 * t.ln_1p() + self.b2
    }
}

pub fn derive_phi_from_c1(a: f64) -> Result<Phi> {
    let (_, b1, b2) = derive_c2_from_c1(a)?;
    Ok(Phi { b1, b2 })
}

/// `2 φ(2a(1 + a))`; the factor 2 accounts for replacing the curve by a
/// near-geodesic one.
pub fn derive_c3_from_c5(a: f64, phi: impl Fn(f64) -> f64) -> f64 {
    2.0 * phi(2.0 * a * (1.0 + a))
}

/// Largest of the three case constants:
/// `max(λ/(1-λ), e^{2b}, c e^b/λ, 4e^{2b}, (4c/λ) e^{2b})`.
pub fn case_constant(lambda: f64, c: f64, b: f64) -> f64 {
    log_case_constant(lambda, c, b).exp()
}

/// Natural logarithm of [`case_constant`], finite even when the constant overflows.
pub fn log_case_constant(lambda: f64, c: f64, b: f64) -> f64 {
    [
        (lambda / (1.0 - lambda)).ln(),
        2.0 * b,
        (c / lambda).ln() + b,
        4f64.ln() + 2.0 * b,
        (4.0 * c / lambda).ln() + 2.0 * b,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max)
}

/// A named constant and the implication that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub value: f64,
    pub source: String,
}

/// The constants of all five conditions derived from a measured carrot constant.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstantLedger {
    pub entries: BTreeMap<String, LedgerEntry>,
}

impl ConstantLedger {
    pub fn insert(&mut self, name: &str, value: f64, source: &str) {
        self.entries.insert(name.to_string(), LedgerEntry { value, source: source.to_string() });
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.get(name).map(|e| e.value)
    }

    /// Constants for conditions 2, 3 and 5 from condition 1 at `a`, and the
    /// case constant of condition 4 from condition 3 at the derived `b'`.
    pub fn from_carrot_constant(a: f64, lambda: f64, c: f64) -> Result<Self> {
        let mut l = ConstantLedger::default();
        let (b, b1, b2) = derive_c2_from_c1(a)?;
        let b3 = derive_c3_from_c2(b, b1, b2);
        let phi = Phi { b1, b2 };
        l.insert("a", a, "1");
        l.insert("lambda", lambda, "hypothesis");
        l.insert("c", c, "hypothesis");
        l.insert("b", b, "1=>2");
        l.insert("b1", b1, "1=>2");
        l.insert("b2", b2, "1=>2");
        l.insert("b3", b3, "2=>3");
        l.insert("phi_b1", phi.b1, "1=>5");
        l.insert("phi_b2", phi.b2, "1=>5");
        l.insert("b3_from_5", derive_c3_from_c5(a, |t| phi.eval(t)), "5=>3");
        l.insert("log_a4", log_case_constant(lambda, c, b3), "3=>4");
        Ok(l)
    }
}

/// Smallest index whose `d` reaches `target`, if any.
pub fn first_point_with_distance(curve: &PolyCurve, target: f64) -> Option<usize> {
    curve.dist().iter().position(|&d| d >= target)
}

/// Supplies curves satisfying condition 3: from `x` to the center, with
/// bounded quasihyperbolic length up to the stopping point.
pub trait Cond3Oracle {
    fn center(&self) -> VertexId;
    fn curve(&self, space: &DiscreteSpace, x: VertexId) -> Result<PolyCurve>;
}

/// Quasihyperbolic geodesics toward the center, read off one shortest-path tree.
#[derive(Clone, Debug)]
pub struct QhGeodesicOracle {
    center: VertexId,
    tree: Tree,
}

impl QhGeodesicOracle {
    pub fn new(space: &DiscreteSpace, center: VertexId) -> Result<Self> {
        space.check_vertex(center)?;
        let tree = dijkstra(space, center, &[], Weight::Qh, |_, _| true);
        Ok(QhGeodesicOracle { center, tree })
    }

    /// `max ℓ_k(α[x, y])` over every reachable vertex `x`, with `y` the
    /// condition-3 stopping point of its geodesic.
    pub fn empirical_b(&self, space: &DiscreteSpace) -> Result<f64> {
        let d0 = space.boundary_distance(self.center);
        let mut b = 0.0f64;
        for x in 0..space.vertex_count() {
            if !self.tree.reached(x) {
                continue;
            }
            let curve = self.curve(space, x)?;
            if let Some(y) = cond3_stop_index(&curve, d0) {
                b = b.max(curve.prefix_qh()[y]);
            }
        }
        Ok(b)
    }
}

impl Cond3Oracle for QhGeodesicOracle {
    fn center(&self) -> VertexId {
        self.center
    }

    fn curve(&self, space: &DiscreteSpace, x: VertexId) -> Result<PolyCurve> {
        let path = self.tree.path_from(x).ok_or(Error::Unreachable { from: x, to: self.center })?;
        PolyCurve::from_path(space, path)
    }
}

/// Which of the three cases a pair `(x1, x0)` falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// `|x1 - x0| <= (λ/c) d(x0)`.
    A,
    /// Far from the center, `d(x1) >= d(x0)/2`.
    B,
    /// Far from the center, `d(x1) < d(x0)/2`: the doubling chain.
    C,
}

pub fn route_case(space: &DiscreteSpace, x1: VertexId, x0: VertexId, lambda: f64, c: f64) -> Case {
    let d0 = space.boundary_distance(x0);
    if x1 == x0 || space.metric(x1, x0) <= lambda / c * d0 {
        Case::A
    } else if space.boundary_distance(x1) >= d0 / 2.0 {
        Case::B
    } else {
        Case::C
    }
}

/// Local quasiconvexity data and the condition-3 constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseParams {
    pub lambda: f64,
    pub c: f64,
    pub b: f64,
    /// Additive slack applied to every asserted bound.
    pub eps: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub from: VertexId,
    pub to: VertexId,
    pub qh_len: f64,
}

/// A constructed quasiconvex carrot arc with its stage decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Construction {
    pub case: Case,
    pub curve: PolyCurve,
    pub stages: Vec<Stage>,
}

fn bound(what: &str, lhs: f64, rhs: f64) -> Result<()> {
    if lhs <= rhs {
        Ok(())
    } else {
        Err(Error::BoundViolated { what: what.to_string(), lhs, rhs })
    }
}

fn stage_of(curve: &PolyCurve) -> Vec<Stage> {
    if curve.len() < 2 {
        return Vec::new();
    }
    vec![Stage {
        from: curve.first_vertex().expect("vertex curve"),
        to: curve.last_vertex().expect("vertex curve"),
        qh_len: curve.qh_len(),
    }]
}

fn check_oracle_curve(curve: &PolyCurve, x: VertexId, x0: VertexId) -> Result<()> {
    if curve.first_vertex() != Some(x) || curve.last_vertex() != Some(x0) {
        return Err(Error::MalformedCurve(format!("oracle curve for {x} does not join it to the center {x0}")));
    }
    Ok(())
}

/// Case A: the Euclidean shortest path is `c`-quasiconvex and
/// `λ/(1-λ)`-carrot.
pub fn construct_case_a(space: &DiscreteSpace, x1: VertexId, x0: VertexId, p: &CaseParams) -> Result<Construction> {
    if route_case(space, x1, x0, p.lambda, p.c) != Case::A {
        return Err(Error::CaseRouting(format!("vertex {x1} is outside the case A ball")));
    }
    let curve = euclid_geodesic(space, x1, x0)?.curve;
    bound("case A length", curve.length(), p.c * space.metric(x1, x0) + p.eps)?;
    bound("case A carrot constant", min_carrot_constant_for_curve(&curve), p.lambda / (1.0 - p.lambda) + p.eps)?;
    let stages = stage_of(&curve);
    Ok(Construction { case: Case::A, curve, stages })
}

/// Case B: the oracle curve itself is `e^{2b}`-carrot and
/// `(c e^b/λ)`-quasiconvex.
pub fn construct_case_b(
    space: &DiscreteSpace,
    x1: VertexId,
    oracle: &dyn Cond3Oracle,
    p: &CaseParams,
) -> Result<Construction> {
    let x0 = oracle.center();
    if route_case(space, x1, x0, p.lambda, p.c) != Case::B {
        return Err(Error::CaseRouting(format!("vertex {x1} does not satisfy the case B hypotheses")));
    }
    let curve = oracle.curve(space, x1)?;
    check_oracle_curve(&curve, x1, x0)?;
    if curve.qh_len() > p.b + p.eps {
        return Err(Error::OracleContract { from: x1, qh_len: curve.qh_len(), b: p.b });
    }
    let eb = p.b.exp();
    bound("case B carrot constant", min_carrot_constant_for_curve(&curve), eb * eb + p.eps)?;
    bound("case B length", curve.length(), p.c * eb / p.lambda * space.metric(x1, x0) + p.eps)?;
    let stages = stage_of(&curve);
    Ok(Construction { case: Case::B, curve, stages })
}

/// Most stages a chain from `d1` up to `d0` may take: `⌈log2(d0/d1)⌉ + 1`.
pub fn max_chain_stages(d1: f64, d0: f64) -> usize {
    (d0 / d1).log2().ceil().max(0.0) as usize + 1
}

/// Case C: follow oracle curves, cutting each at the first point where the
/// distance to the boundary doubles, until `d(x_i) >= d(x0)/2`.
///
/// Asserts `ℓ(β_i) <= 2e^b d(x_i)` per stage, `ℓ(β[x1, x]) <= 4e^{2b} d(x)`
/// along the result and `ℓ(β) <= (4c/λ) e^{2b} |x1 - x0|`, each with slack
/// `eps` times the stage count.
pub fn chain_construction(
    space: &DiscreteSpace,
    x1: VertexId,
    oracle: &dyn Cond3Oracle,
    p: &CaseParams,
) -> Result<Construction> {
    let x0 = oracle.center();
    if route_case(space, x1, x0, p.lambda, p.c) != Case::C {
        return Err(Error::CaseRouting(format!("vertex {x1} does not satisfy the case C hypotheses")));
    }
    let d0 = space.boundary_distance(x0);
    let limit = max_chain_stages(space.boundary_distance(x1), d0);
    let eb = p.b.exp();

    let mut stages = Vec::new();
    let mut pieces: Vec<PolyCurve> = Vec::new();
    let mut xi = x1;
    loop {
        if stages.len() >= limit {
            return Err(Error::Construction(format!(
                "chain from {x1} exceeds {limit} stages without reaching half the center distance"
            )));
        }
        let di = space.boundary_distance(xi);
        let alpha = oracle.curve(space, xi)?;
        check_oracle_curve(&alpha, xi, x0)?;
        let last = di >= d0 / 2.0;
        let end = if last {
            alpha.len() - 1
        } else {
            first_point_with_distance(&alpha, 2.0 * di)
                .ok_or_else(|| Error::Construction(format!("oracle curve from {xi} never doubles its distance")))?
        };
        let beta = alpha.truncated(end);
        if beta.qh_len() > p.b + p.eps {
            return Err(Error::OracleContract { from: xi, qh_len: beta.qh_len(), b: p.b });
        }
        bound("chain stage length", beta.length(), 2.0 * eb * di + p.eps)?;
        let to = beta.last_vertex().expect("vertex curve");
        stages.push(Stage { from: xi, to, qh_len: beta.qh_len() });
        pieces.push(beta);
        if last {
            break;
        }
        xi = to;
    }

    let mut curve = pieces[0].clone();
    for piece in &pieces[1..] {
        curve = curve.concat(piece)?;
    }
    let slack = p.eps * stages.len() as f64;
    let a = 4.0 * eb * eb;
    for (&l, &d) in curve.prefix_len().iter().zip(curve.dist()) {
        bound("chain carrot bound", l, a * d + slack)?;
    }
    bound("chain length bound", curve.length(), 4.0 * p.c / p.lambda * eb * eb * space.metric(x1, x0) + slack)?;
    Ok(Construction { case: Case::C, curve, stages })
}

/// Routes `(x1, x0)` to its case and runs the matching construction.
pub fn construct(space: &DiscreteSpace, x1: VertexId, oracle: &dyn Cond3Oracle, p: &CaseParams) -> Result<Construction> {
    match route_case(space, x1, oracle.center(), p.lambda, p.c) {
        Case::A => construct_case_a(space, x1, oracle.center(), p),
        Case::B => construct_case_b(space, x1, oracle, p),
        Case::C => chain_construction(space, x1, oracle, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Disk, Domain};
    use crate::geom::Point;
    use crate::space::build_grid_space;

    #[test]
    fn c2_constants() {
        let (b, b1, b2) = derive_c2_from_c1(1.0).unwrap();
        assert_eq!((b, b1), (3.0, 1.0));
        assert!((b2 - 3.6931).abs() < 1e-4);
        let (b, b1, b2) = derive_c2_from_c1(2.0).unwrap();
        assert_eq!((b, b1), (6.0, 2.0));
        assert!((b2 - 8.7726).abs() < 1e-4);
        assert!(derive_c2_from_c1(0.5).is_err());
        assert!(derive_c2_from_c1(f64::NAN).is_err());
    }

    #[test]
    fn c3_and_phi_constants() {
        let (b, b1, b2) = derive_c2_from_c1(1.0).unwrap();
        assert!((derive_c3_from_c2(b, b1, b2) - 5.4849).abs() < 1e-4);
        assert_eq!(derive_c3_from_c2(3.0, 0.0, 2.5), 2.5);
        let phi = derive_phi_from_c1(1.0).unwrap();
        assert!((phi.eval(0.0) - 3.6931).abs() < 1e-4);
        assert!((phi.eval(9.0) - 5.9957).abs() < 1e-4);
        assert!((phi.eval(std::f64::consts::E - 1.0) - (phi.b1 + phi.b2)).abs() < 1e-12);
        assert!((derive_c3_from_c5(1.0, |t| phi.eval(t)) - 10.605).abs() < 1e-3);
        assert_eq!(derive_c3_from_c5(1.0, |_| 1.5), 3.0);
    }

    #[test]
    fn case_constant_matches_log_form() {
        let v = case_constant(0.5, 1.1, 1.0);
        let direct = [1.0, 1f64.exp().powi(2), 1.1 * 1f64.exp() / 0.5, 4.0 * 1f64.exp().powi(2), 8.8 * 1f64.exp().powi(2)]
            .into_iter()
            .fold(0.0, f64::max);
        assert!((v - direct).abs() < 1e-9 * direct);
        assert!(log_case_constant(0.5, 1.1, 1e4).is_finite());
    }

    #[test]
    fn first_point() {
        let c = PolyCurve::segment(&Domain::Disk(Disk::unit()), Point::new(0.9, 0.0), Point::ORIGIN, 90).unwrap();
        let i = first_point_with_distance(&c, 0.2 - 1e-12).unwrap();
        assert!((c.point(i).unwrap().x - 0.8).abs() < 1e-9);
        assert_eq!(first_point_with_distance(&c, 0.05), Some(0));
        assert_eq!(first_point_with_distance(&c, 1.5), None);
    }

    #[test]
    fn disk_routing_and_cases() {
        let s = build_grid_space(&Domain::Disk(Disk::unit()), 0.05).unwrap();
        let o = s.nearest_vertex(Point::ORIGIN).unwrap();
        let oracle = QhGeodesicOracle::new(&s, o).unwrap();
        let b = oracle.empirical_b(&s).unwrap();
        let p = CaseParams { lambda: 0.5, c: 1.1, b, eps: 1e-9 };

        let near = s.nearest_vertex(Point::new(0.2, 0.0)).unwrap();
        assert_eq!(route_case(&s, near, o, 0.5, 1.1), Case::A);
        let a = construct_case_a(&s, near, o, &p).unwrap();
        assert!(min_carrot_constant_for_curve(&a.curve) <= 1.0);
        assert!(construct_case_b(&s, near, &oracle, &p).is_err());

        let mid = s.nearest_vertex(Point::new(0.0, 0.5)).unwrap();
        assert_eq!(route_case(&s, mid, o, 0.5, 1.1), Case::B);
        assert_eq!(construct(&s, mid, &oracle, &p).unwrap().case, Case::B);

        let far = s.nearest_vertex(Point::new(0.9, 0.0)).unwrap();
        assert_eq!(route_case(&s, far, o, 0.5, 1.1), Case::C);
        let ch = chain_construction(&s, far, &oracle, &p).unwrap();
        assert_eq!(ch.curve.first_vertex(), Some(far));
        assert_eq!(ch.curve.last_vertex(), Some(o));
        assert!(ch.stages.len() <= max_chain_stages(s.boundary_distance(far), 1.0));
        assert!(ch.stages.len() >= 2);
        for w in ch.stages.windows(2) {
            assert_eq!(w[0].to, w[1].from);
            assert!(s.boundary_distance(w[1].from) >= 2.0 * s.boundary_distance(w[0].from));
        }
        let same = construct(&s, o, &oracle, &p).unwrap();
        assert_eq!(same.curve.len(), 1);
        assert!(same.stages.is_empty());
    }

    #[test]
    fn oracle_contract_enforced() {
        let s = build_grid_space(&Domain::Disk(Disk::unit()), 0.1).unwrap();
        let o = s.nearest_vertex(Point::ORIGIN).unwrap();
        let oracle = QhGeodesicOracle::new(&s, o).unwrap();
        let far = s.nearest_vertex(Point::new(0.9, 0.0)).unwrap();
        let p = CaseParams { lambda: 0.5, c: 1.1, b: 0.01, eps: 0.0 };
        assert!(matches!(chain_construction(&s, far, &oracle, &p), Err(Error::OracleContract { .. })));
    }

    #[test]
    fn ledger_values() {
        let l = ConstantLedger::from_carrot_constant(1.0, 0.5, 1.0).unwrap();
        assert_eq!(l.get("b"), Some(3.0));
        assert!((l.get("b3").unwrap() - 5.4849).abs() < 1e-4);
        assert_eq!(l.entries["b3"].source, "2=>3");
    }
}
