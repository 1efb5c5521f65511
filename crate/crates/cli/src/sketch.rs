//! SVG rendering of tangles.
//!
//! Tangles with geometry are drawn in the plane. Purely combinatorial ones
//! are drawn in the parameter plane `(t_u, t_s)` on a signed log scale, where
//! `W^u` and `W^s` become the coordinate axes.

use std::fmt::Write as _;

use tanglefloer::classify::classify;
use tanglefloer::{Branch, Tangle};

type Pt = (f64, f64);

const MARGIN: f64 = 20.0;

struct Scene {
    title: String,
    curves: Vec<(&'static str, Vec<Pt>)>,
    /// Position, primary, label.
    points: Vec<(Pt, bool, String)>,
}

fn curve_class(b: Branch) -> &'static str {
    if b.is_unstable() {
        "unstable"
    } else {
        "stable"
    }
}

fn planar(t: &Tangle) -> Option<Scene> {
    let g = t.geometry.as_ref()?;
    let class = classify(t);
    let curves = g.polylines.iter().map(|(b, v)| (curve_class(*b), v.clone())).collect();
    let points = t
        .points()
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let at = g.locate(true, p.t_u)?;
            Some((at, class.is_primary(t, i), p.reference().to_string()))
        })
        .collect();
    Some(Scene {
        title: "tangle".into(),
        curves,
        points,
    })
}

fn parameter_plane(t: &Tangle) -> Scene {
    let class = classify(t);
    let unit = t
        .points()
        .iter()
        .flat_map(|p| [p.t_u.abs(), p.t_s.abs()])
        .fold(f64::INFINITY, f64::min);
    let unit = if unit.is_finite() { unit } else { 1.0 };
    let f = |x: f64| x.signum() * (1.0 + x.abs() / unit).log2();
    let points: Vec<(Pt, bool, String)> = t
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| ((f(p.t_u), f(p.t_s)), class.is_primary(t, i), p.reference().to_string()))
        .collect();
    let reach = points
        .iter()
        .map(|((x, y), _, _)| x.abs().max(y.abs()))
        .fold(1.0, f64::max);
    Scene {
        title: "parameter plane".into(),
        curves: vec![
            ("unstable", vec![(-reach, 0.0), (reach, 0.0)]),
            ("stable", vec![(0.0, -reach), (0.0, reach)]),
        ],
        points,
    }
}

fn bounds(s: &Scene) -> (Pt, Pt) {
    let all = s.curves.iter().flat_map(|(_, v)| v.iter()).chain(s.points.iter().map(|(p, _, _)| p));
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    }
    if !lo.0.is_finite() {
        return ((-1.0, -1.0), (1.0, 1.0));
    }
    (lo, hi)
}

/// A square SVG document `width` pixels wide.
pub fn render_svg(t: &Tangle, width: u32) -> String {
    let scene = planar(t).unwrap_or_else(|| parameter_plane(t));
    let w = f64::from(width.max(100));
    let (lo, hi) = bounds(&scene);
    let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-12);
    let scale = (w - 2.0 * MARGIN) / span;
    let map = |(x, y): Pt| (MARGIN + (x - lo.0) * scale, w - MARGIN - (y - lo.1) * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="0 0 {w} {w}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", scene.title);
    s.push_str(
        "<style>.unstable{stroke:#c0392b}.stable{stroke:#2471a3}polyline{fill:none;stroke-width:1}\
         .primary{fill:#000}.other{fill:#999}</style>\n",
    );
    for (class, v) in &scene.curves {
        s.push_str(&format!(r#"<polyline class="{class}" points=""#));
        for (i, &p) in v.iter().enumerate() {
            let (x, y) = map(p);
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x:.2},{y:.2}");
        }
        s.push_str("\"/>\n");
    }
    let (fx, fy) = map((0.0, 0.0));
    let _ = writeln!(
        s,
        r#"<rect x="{:.2}" y="{:.2}" width="6" height="6"><title>x</title></rect>"#,
        fx - 3.0,
        fy - 3.0
    );
    for (p, primary, label) in &scene.points {
        let (x, y) = map(*p);
        let (class, r) = if *primary { ("primary", 3.0) } else { ("other", 1.5) };
        let _ = writeln!(
            s,
            r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="{r}"><title>{}</title></circle>"#,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('\'', "&apos;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use tanglefloer::tgl;

    const PAIR: &str = "surface plane\norientation preserving\nwindow 1\n\
        pt p -1 0.5 2 -1 () () mu=-1\npt p 0 1 1 -1 () () mu=-1\npt p 1 2 0.5 -1 () () mu=-1\n\
        pt q -1 0.75 1.5 +1 () () mu=-2\npt q 0 1.5 0.75 +1 () () mu=-2\npt q 1 3 0.375 +1 () () mu=-2\n";

    #[test]
    fn parameter_plane_sketch() {
        let t = tgl::parse(PAIR).unwrap();
        let svg = render_svg(&t, 400);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("parameter plane"));
        assert_eq!(svg.matches("<circle").count(), 6);
        assert_eq!(svg.matches(r#"class="primary""#).count(), 6);
        assert_eq!(svg, render_svg(&t, 400));
    }

    #[test]
    fn planar_sketch_uses_polylines() {
        let text = format!("{PAIR}polyline u+\nv 0 0\nv 4 0\nend\npolyline s+\nv 0 0\nv 0 4\nend\n");
        let t = tgl::parse(&text).unwrap();
        let svg = render_svg(&t, 400);
        assert!(svg.contains("<title>tangle</title>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("&apos;") || !svg.contains('\''));
    }
}
