//! SVG 1.1 output. Exact coordinates are rounded to 1e-9 here and nowhere
//! else.

use std::fmt::Write as _;

use misdop::geom::{format_decimal, Point};

pub struct Svg {
    body: String,
    lo: Option<(f64, f64)>,
    hi: Option<(f64, f64)>,
}

fn num(v: &misdop::geom::Rational) -> String {
    format_decimal(v, 9)
}

fn coords(pts: &[Point]) -> String {
    pts.iter().map(|p| format!("{},{}", num(&p.x), num(&p.y))).collect::<Vec<_>>().join(" ")
}

impl Svg {
    pub fn new() -> Self {
        Svg { body: String::new(), lo: None, hi: None }
    }

    fn grow(&mut self, pts: &[Point]) {
        for p in pts {
            let (x, y) = p.to_f64();
            let lo = self.lo.get_or_insert((x, y));
            *lo = (lo.0.min(x), lo.1.min(y));
            let hi = self.hi.get_or_insert((x, y));
            *hi = (hi.0.max(x), hi.1.max(y));
        }
    }

    pub fn open(&mut self, class: &str) {
        let _ = writeln!(self.body, "<g class=\"{class}\">");
    }

    pub fn close(&mut self) {
        self.body.push_str("</g>\n");
    }

    pub fn polygon(&mut self, class: &str, pts: &[Point], fill: &str, stroke: &str) {
        self.grow(pts);
        let _ = writeln!(
            self.body,
            "<polygon class=\"{class}\" points=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\"/>",
            coords(pts)
        );
    }

    pub fn polyline(&mut self, class: &str, pts: &[Point], stroke: &str) {
        self.grow(pts);
        let _ = writeln!(
            self.body,
            "<polyline class=\"{class}\" points=\"{}\" fill=\"none\" stroke=\"{stroke}\"/>",
            coords(pts)
        );
    }

    pub fn line(&mut self, class: &str, a: &Point, b: &Point, stroke: &str, arrow: bool) {
        self.grow(&[a.clone(), b.clone()]);
        let marker = if arrow { " marker-end=\"url(#arrow)\"" } else { "" };
        let _ = writeln!(
            self.body,
            "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\"{marker}/>",
            num(&a.x),
            num(&a.y),
            num(&b.x),
            num(&b.y)
        );
    }

    pub fn finish(self) -> String {
        let (lo, hi) = (self.lo.unwrap_or((0.0, 0.0)), self.hi.unwrap_or((1.0, 1.0)));
        let pad = 0.02 * (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
        let (x, y) = (lo.0 - pad, -(hi.1 + pad));
        let (w, h) = (hi.0 - lo.0 + 2.0 * pad, hi.1 - lo.1 + 2.0 * pad);
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{x:.9} {y:.9} {w:.9} {h:.9}\" width=\"800\" height=\"{:.0}\">",
            800.0 * h / w
        );
        out.push_str(
            "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M 0 0 L 10 5 L 0 10 z\"/></marker></defs>\n",
        );
        out.push_str("<style type=\"text/css\">polygon, polyline, line { stroke-width: 1; vector-effect: non-scaling-stroke }</style>\n");
        // y grows upwards in the instance.
        out.push_str("<g transform=\"scale(1,-1)\">\n");
        out.push_str(&self.body);
        out.push_str("</g>\n</svg>\n");
        out
    }
}
