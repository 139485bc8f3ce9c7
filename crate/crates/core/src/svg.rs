//! Static SVG pictures of a lifted loop product in the upper half-plane.

use std::fmt::Write;

use crate::error::Result;
use crate::goldman::{LiftArc, LiftPath};
use crate::group::Word;
use crate::hypgeom::{Geodesic, HPoint};
use crate::surface::SurfaceRep;

pub const WIDTH: f64 = 1000.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 40.0;
const ARC_SAMPLES: usize = 48;

/// Affine map from the visible window of H to canvas pixels.
struct View {
    x0: f64,
    scale: f64,
    left: f64,
    base: f64,
}

impl View {
    fn fit(points: &[HPoint]) -> View {
        let xmin = points.iter().map(HPoint::x).fold(f64::INFINITY, f64::min);
        let xmax = points.iter().map(HPoint::x).fold(f64::NEG_INFINITY, f64::max);
        let ymax = points.iter().map(HPoint::y).fold(0.0, f64::max);
        let span = (xmax - xmin).max(ymax).max(1e-9);
        let (xmin, xmax) = (xmin - 0.1 * span, xmax + 0.1 * span);
        let ymax = 1.1 * ymax.max(1e-9);
        let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
        let scale = (w / (xmax - xmin)).min(h / ymax);
        let left = MARGIN + 0.5 * (w - scale * (xmax - xmin));
        View { x0: xmin, scale, left, base: HEIGHT - MARGIN }
    }

    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x0) * self.scale
    }

    fn py(&self, y: f64) -> f64 {
        self.base - y * self.scale
    }

    fn point(&self, p: HPoint) -> (f64, f64) {
        (self.px(p.x()), self.py(p.y()))
    }
}

fn geodesic_element(out: &mut String, v: &View, g: &Geodesic, class: &str) {
    match (g.from.is_infinite(), g.to.is_infinite()) {
        (true, _) | (_, true) => {
            let x = if g.from.is_infinite() { g.to.value() } else { g.from.value() };
            let _ = writeln!(
                out,
                r#"<line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="0.000"/>"#,
                v.px(x),
                v.base,
                v.px(x)
            );
        }
        _ => {
            let (u, w) = (g.from.value().min(g.to.value()), g.from.value().max(g.to.value()));
            let r = 0.5 * (w - u) * v.scale;
            let _ = writeln!(
                out,
                r#"<path class="{class}" d="M {:.3} {:.3} A {r:.3} {r:.3} 0 0 1 {:.3} {:.3}"/>"#,
                v.px(u),
                v.base,
                v.px(w),
                v.base
            );
        }
    }
}

fn arc_element(out: &mut String, v: &View, arc: &LiftArc) -> Result<()> {
    let t0 = arc.carrier.param_of(arc.start)?;
    let mut pts = String::new();
    for k in 0..=ARC_SAMPLES {
        let p = arc.carrier.point_at_param(t0 + arc.length * k as f64 / ARC_SAMPLES as f64)?;
        let (x, y) = v.point(p);
        if k > 0 {
            pts.push(' ');
        }
        let _ = write!(pts, "{x:.3},{y:.3}");
    }
    let class = if arc.index.rem_euclid(2) == 0 { "arc-x" } else { "arc-y" };
    let _ = writeln!(out, r#"<polyline class="{class}" data-index="{}" points="{pts}"/>"#, arc.index);
    Ok(())
}

/// The axis of `x`, the conjugate axes carrying the arcs, the lifted path,
/// the term axis, and a marker at every arc midpoint, drawn in the lift's
/// normalized coordinates (term axis vertical through 0).
pub fn render_lift(rep: &SurfaceRep, x: &Word, path: &LiftPath) -> Result<String> {
    let arcs = &path.arcs;
    let mut anchors: Vec<HPoint> = vec![path.crossing];
    for a in arcs {
        anchors.push(a.start);
        anchors.push(a.end);
    }
    let v = View::fit(&anchors);
    let term_axis = LiftPath::term_axis();
    let axis_x = path.frame.inverse().apply_geodesic(&rep.geodesic_rep(x)?);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    out.push_str(
        "<style>\n\
         path, line, polyline { fill: none; stroke-width: 1.5; }\n\
         .axis-x { stroke: #1f4e99; }\n\
         .carrier { stroke: #9aa5b1; stroke-width: 0.8; }\n\
         .term { stroke: #b03a2e; stroke-dasharray: 6 4; }\n\
         .arc-x { stroke: #1f4e99; stroke-width: 3; }\n\
         .arc-y { stroke: #1e8449; stroke-width: 3; }\n\
         .boundary { stroke: #000000; }\n\
         .mid { fill: #b03a2e; }\n\
         .crossing { fill: #000000; }\n\
         </style>\n",
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<line class="boundary" x1="0.000" y1="{:.3}" x2="{WIDTH:.3}" y2="{:.3}"/>"#,
        v.base,
        v.base
    );
    for a in arcs {
        geodesic_element(&mut out, &v, &a.carrier, "carrier");
    }
    geodesic_element(&mut out, &v, &axis_x, "axis-x");
    geodesic_element(&mut out, &v, &term_axis, "term");
    for a in arcs.iter() {
        arc_element(&mut out, &v, a)?;
    }
    for a in arcs {
        let (mx, my) = v.point(a.midpoint);
        let _ = writeln!(out, r#"<circle class="mid" cx="{mx:.3}" cy="{my:.3}" r="4"/>"#);
    }
    let (cx, cy) = v.point(path.crossing);
    let _ = writeln!(out, r#"<circle class="crossing" cx="{cx:.3}" cy="{cy:.3}" r="5"/>"#);
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goldman::{lift_path, stabilize};
    use crate::surface::holed_torus;

    fn picture(n: usize) -> String {
        let rep = holed_torus(2.0, 0.0).unwrap();
        let (x, y): (Word, Word) = ("a".parse().unwrap(), "abb".parse().unwrap());
        let r = stabilize(&rep, &x, &y, 14).unwrap().records.remove(0);
        let path = lift_path(&rep, &x, &y, &r, n).unwrap();
        render_lift(&rep, &x, &path).unwrap()
    }

    #[test]
    fn single_arc() {
        let s = picture(0);
        assert_eq!(s.matches("<polyline").count(), 1);
        assert_eq!(s.matches(r#"class="mid""#).count(), 1);
    }

    #[test]
    fn deterministic_and_well_formed() {
        let s = picture(3);
        assert_eq!(s, picture(3));
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<polyline").count(), 7);
        assert!(!s.contains("NaN") && !s.contains("inf"));
    }
}
