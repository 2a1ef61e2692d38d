//! Deterministic SVG figures: domain outline in black, curves in blue, stage
//! points in green, witnesses in red, on a fixed 1000 x 1000 canvas.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::geom::Point;
use crate::report::{ConditionReport, Witness};

pub const CANVAS: f64 = 1000.0;
const PADDING: f64 = 0.05;

/// Everything drawn in one figure.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Figure {
    pub outline: Vec<Vec<Point>>,
    #[serde(default)]
    pub curves: Vec<Vec<Point>>,
    #[serde(default)]
    pub stage_points: Vec<Point>,
    #[serde(default)]
    pub witnesses: Vec<Point>,
}

impl Figure {
    pub fn new(domain: &Domain) -> Self {
        Figure { outline: domain.outline(), ..Default::default() }
    }

    /// Adds the witness point of every failed report that carries a position.
    pub fn add_failed_witnesses(&mut self, reports: &[ConditionReport]) {
        for r in reports {
            self.add_witness_if_failed(r.pass, r.witness);
        }
    }

    /// Marks the witness point (or its basepoint) of a failed verdict.
    pub fn add_witness_if_failed(&mut self, pass: bool, witness: Option<Witness>) {
        if let Some(p) = witness.filter(|_| !pass).and_then(|w| w.point.pos.or(w.basepoint.pos)) {
            self.witnesses.push(p);
        }
    }
}

struct View {
    lo: Point,
    scale: f64,
    offset: Point,
}

impl View {
    fn fit(outline: &[Vec<Point>]) -> View {
        let pts = outline.iter().flatten();
        let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return View { lo: Point::ORIGIN, scale: 1.0, offset: Point::ORIGIN };
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let scale = CANVAS * (1.0 - 2.0 * PADDING) / span;
        // center the drawing
        let offset = Point::new(
            (CANVAS - (hi.x - lo.x) * scale) / 2.0,
            (CANVAS - (hi.y - lo.y) * scale) / 2.0,
        );
        View { lo, scale, offset }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        let x = self.offset.x + (p.x - self.lo.x) * self.scale;
        let y = CANVAS - (self.offset.y + (p.y - self.lo.y) * self.scale);
        (x, y)
    }
}

fn coords(view: &View, pts: &[Point]) -> String {
    let mut s = String::new();
    for (i, &p) in pts.iter().enumerate() {
        let (x, y) = view.map(p);
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{x:.3},{y:.3}").unwrap();
    }
    s
}

/// SVG 1.1 document for `fig`. Output depends only on `fig`.
pub fn render_svg(fig: &Figure) -> String {
    let view = View::fit(&fig.outline);
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    )
    .unwrap();
    writeln!(s, r#"<rect width="{c}" height="{c}" fill="white"/>"#, c = CANVAS).unwrap();
    for ring in &fig.outline {
        let mut d = String::new();
        for (i, &p) in ring.iter().enumerate() {
            let (x, y) = view.map(p);
            write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" }).unwrap();
        }
        d.push('Z');
        writeln!(s, r#"<path d="{d}" fill="none" stroke="black" stroke-width="2"/>"#).unwrap();
    }
    for c in fig.curves.iter().filter(|c| !c.is_empty()) {
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="blue" stroke-width="1"/>"#,
            coords(&view, c)
        )
        .unwrap();
    }
    for &p in &fig.stage_points {
        let (x, y) = view.map(p);
        writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="green"/>"#).unwrap();
    }
    for &p in &fig.witnesses {
        let (x, y) = view.map(p);
        writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="7" fill="red"/>"#).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Disk;

    #[test]
    fn disk_outline_only() {
        let svg = render_svg(&Figure::new(&Domain::Disk(Disk::unit())));
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("Z\""));
        assert!(!svg.contains("<polyline"));
        assert!(!svg.contains("red"));
    }

    #[test]
    fn markers_and_curves() {
        let mut f = Figure::new(&Domain::Disk(Disk::unit()));
        f.curves.push(vec![Point::new(0.9, 0.0), Point::ORIGIN]);
        f.witnesses.push(Point::new(0.5, 0.0));
        let svg = render_svg(&f);
        assert_eq!(svg.matches("fill=\"red\"").count(), 1);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg, render_svg(&f));
    }

    #[test]
    fn y_axis_points_up() {
        let view = View::fit(&[vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)]]);
        let (_, y_low) = view.map(Point::new(0.0, 0.0));
        let (_, y_high) = view.map(Point::new(0.0, 1.0));
        assert!(y_high < y_low);
        assert_eq!(view.map(Point::new(0.0, 0.0)), (50.0, 950.0));
    }
}
