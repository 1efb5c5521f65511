//! Reader and writer for the line-oriented TGL tangle format.
//!
//! ```text
//! surface plane
//! orientation preserving
//! window 4
//! pt p 0 1 1 -1 () () mu=-1
//! fix y 1 in bigon:p.0-q.0
//! polyline u+
//! v 0 0
//! end
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tangle::{
    valid_orbit_name, BigonId, Branch, Geometry, MapOrientation, MarkedPoint, PointRecord,
    Surface, Tangle,
};

#[derive(Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok { text: &line[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &line[s..], col: s + 1 });
    }
    out
}

struct Cursor<'a> {
    line: usize,
    toks: Vec<Tok<'a>>,
    pos: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<Tok<'a>> {
        let line = self.line;
        let col = self.end_col;
        let t = *self
            .toks
            .get(self.pos)
            .ok_or_else(|| Error::syntax(line, col, format!("expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).copied()
    }

    fn err(&self, t: &Tok<'_>, msg: impl Into<String>) -> Error {
        Error::syntax(self.line, t.col, msg)
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let t = self.next(what)?;
        let (text, col) = (t.text, t.col);
        text.parse()
            .map_err(|_| Error::syntax(self.line, col, format!("expected {what}, found `{text}`")))
    }

    fn real(&mut self, what: &str) -> Result<f64> {
        let v: f64 = self.parse(what)?;
        if !v.is_finite() {
            let t = &self.toks[self.pos - 1];
            return Err(self.err(&t, format!("{what} must be finite")));
        }
        Ok(v)
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Some(t) => Err(self.err(&t, format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }
}

fn parse_tuple(text: &str) -> Option<Vec<i64>> {
    let inner = match text.strip_prefix('(') {
        Some(rest) => rest.strip_suffix(')')?,
        None => text,
    };
    if inner.is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|s| s.parse().ok()).collect()
}

fn fmt_tuple(v: &[i64]) -> String {
    if v.is_empty() {
        "()".into()
    } else {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

pub fn parse(text: &str) -> Result<Tangle> {
    let mut surface = None;
    let mut orientation = None;
    let mut window = None;
    let mut sigma = None;
    let mut power = 1i64;
    let mut points = Vec::new();
    let mut marked: Vec<MarkedPoint> = Vec::new();
    let mut polylines: BTreeMap<Branch, Vec<(f64, f64)>> = BTreeMap::new();
    let mut open_poly: Option<(Branch, Vec<(f64, f64)>)> = None;
    let mut header = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor {
            line: line_no,
            end_col: content.trim_end().len() + 1,
            toks,
            pos: 0,
        };
        let kw = c.next("keyword")?;
        let (kw_text, kw_col) = (kw.text, kw.col);

        if let Some((branch, verts)) = open_poly.as_mut() {
            match kw_text {
                "v" => {
                    let x = c.real("x coordinate")?;
                    let y = c.real("y coordinate")?;
                    c.finish()?;
                    verts.push((x, y));
                }
                "end" => {
                    c.finish()?;
                    let b = *branch;
                    let (_, v) = open_poly.take().expect("open polyline");
                    polylines.insert(b, v);
                }
                other => {
                    return Err(Error::syntax(
                        line_no,
                        kw_col,
                        format!("expected `v` or `end` inside polyline, found `{other}`"),
                    ))
                }
            }
            continue;
        }

        let expected_header = ["surface", "orientation", "window"];
        if header < 3 {
            if kw_text != expected_header[header] {
                return Err(Error::syntax(
                    line_no,
                    kw_col,
                    format!("expected `{}`", expected_header[header]),
                ));
            }
            let t = c.next("value")?;
            let (v, col) = (t.text, t.col);
            match header {
                0 => {
                    surface = Some(Surface::from_name(v).ok_or_else(|| {
                        Error::syntax(line_no, col, format!("unknown surface `{v}`"))
                    })?)
                }
                1 => {
                    orientation = Some(match v {
                        "preserving" => MapOrientation::Preserving,
                        "reversing" => MapOrientation::Reversing,
                        _ => {
                            return Err(Error::syntax(line_no, col, format!("unknown orientation `{v}`")))
                        }
                    })
                }
                _ => {
                    window = Some(v.parse::<i64>().ok().filter(|k| *k >= 0).ok_or_else(|| {
                        Error::syntax(line_no, col, format!("window must be a nonnegative integer, found `{v}`"))
                    })?)
                }
            }
            c.finish()?;
            header += 1;
            continue;
        }

        match kw_text {
            "sigma" => {
                let t = c.next("sign")?;
                sigma = Some(parse_sign(t.text).ok_or_else(|| c.err(&t, "sigma must be ±1"))?);
                c.finish()?;
            }
            "power" => {
                let t = c.next("power")?;
                power = t
                    .text
                    .parse::<i64>()
                    .ok()
                    .filter(|n| *n >= 1)
                    .ok_or_else(|| c.err(&t, "power must be a positive integer"))?;
                c.finish()?;
            }
            "pt" => points.push(parse_point(&mut c)?),
            "fix" => marked.push(parse_fix(&mut c)?),
            "polyline" => {
                let t = c.next("branch")?;
                let b = Branch::from_name(t.text)
                    .ok_or_else(|| c.err(&t, format!("unknown branch `{}`", t.text)))?;
                if polylines.contains_key(&b) {
                    return Err(c.err(&t, format!("polyline {} given twice", b.name())));
                }
                c.finish()?;
                open_poly = Some((b, Vec::new()));
            }
            other => {
                return Err(Error::syntax(line_no, kw_col, format!("unknown keyword `{other}`")))
            }
        }
    }
    if open_poly.is_some() {
        let n = text.lines().count();
        return Err(Error::syntax(n.max(1), 1, "polyline not terminated by `end`"));
    }
    if header < 3 {
        let n = text.lines().count();
        return Err(Error::syntax(
            n.max(1),
            1,
            format!("missing `{}` header", ["surface", "orientation", "window"][header]),
        ));
    }
    let geometry = (!polylines.is_empty()).then_some(Geometry { polylines });
    let mut t = Tangle::new(
        surface.expect("header"),
        orientation.expect("header"),
        window.expect("header"),
        points,
        marked,
        geometry,
    )?;
    t.sigma01 = sigma;
    if power > t.window.max(1) {
        return Err(Error::WindowTooSmall(format!("power {power} exceeds window {}", t.window)));
    }
    t.power = power;
    Ok(t)
}

fn parse_sign(s: &str) -> Option<i8> {
    match s {
        "+1" | "1" => Some(1),
        "-1" => Some(-1),
        _ => None,
    }
}

fn parse_point(c: &mut Cursor<'_>) -> Result<PointRecord> {
    let t = c.next("orbit name")?;
    if !valid_orbit_name(t.text) {
        return Err(c.err(&t, format!("invalid orbit name `{}`", t.text)));
    }
    let orbit = t.text.to_string();
    let iterate = c.parse("iterate")?;
    let t_u = c.real("t_u")?;
    let t_s = c.real("t_s")?;
    let t = c.next("crossing sign")?;
    let crossing = parse_sign(t.text).ok_or_else(|| c.err(&t, "crossing sign must be ±1"))?;
    let t = c.next("a_u tuple")?;
    let a_u = parse_tuple(t.text).ok_or_else(|| c.err(&t, format!("bad tuple `{}`", t.text)))?;
    let t = c.next("a_s tuple")?;
    let a_s = parse_tuple(t.text).ok_or_else(|| c.err(&t, format!("bad tuple `{}`", t.text)))?;
    let mut mu = None;
    if let Some(t) = c.peek() {
        let v = t
            .text
            .strip_prefix("mu=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| c.err(&t, format!("expected `mu=<int>`, found `{}`", t.text)))?;
        mu = Some(v);
        c.pos += 1;
    }
    c.finish()?;
    Ok(PointRecord {
        orbit,
        iterate,
        t_u,
        t_s,
        crossing,
        a_u,
        a_s,
        mu,
    })
}

fn parse_fix(c: &mut Cursor<'_>) -> Result<MarkedPoint> {
    let t = c.next("marked point name")?;
    if !valid_orbit_name(t.text) {
        return Err(c.err(&t, format!("invalid name `{}`", t.text)));
    }
    let name = t.text.to_string();
    let t = c.next("period")?;
    let period = t
        .text
        .parse::<u32>()
        .ok()
        .filter(|p| *p >= 1)
        .ok_or_else(|| c.err(&t, "period must be a positive integer"))?;
    let mut coords = None;
    let mut containment = None;
    while let Some(t) = c.peek() {
        let (text, col) = (t.text, t.col);
        c.pos += 1;
        match text {
            "at" if coords.is_none() && containment.is_none() => {
                let x = c.real("x coordinate")?;
                let y = c.real("y coordinate")?;
                coords = Some((x, y));
            }
            "in" if containment.is_none() => {
                let rest: Vec<&str> = c.toks[c.pos..].iter().map(|t| t.text).collect();
                let joined = rest.join("");
                let mut list = Vec::new();
                for item in joined.split(',').filter(|s| !s.is_empty()) {
                    list.push(BigonId::parse(item).ok_or_else(|| {
                        Error::syntax(c.line, col, format!("bad bigon identifier `{item}`"))
                    })?);
                }
                c.pos = c.toks.len();
                containment = Some(list);
            }
            _ => return Err(Error::syntax(c.line, col, format!("unexpected `{text}`"))),
        }
    }
    if coords.is_none() && containment.is_none() {
        return Err(Error::Invalid(format!(
            "marked point {name} needs coordinates or a containment table"
        )));
    }
    Ok(MarkedPoint {
        name,
        period,
        coords,
        containment,
    })
}

pub fn emit(t: &Tangle) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "surface {}", t.surface.name());
    let _ = writeln!(s, "orientation {}", t.orientation.name());
    let _ = writeln!(s, "window {}", t.window);
    if let Some(sig) = t.sigma01 {
        let _ = writeln!(s, "sigma {}", if sig > 0 { "+1" } else { "-1" });
    }
    if t.power != 1 {
        let _ = writeln!(s, "power {}", t.power);
    }
    for p in t.points() {
        let _ = write!(
            s,
            "pt {} {} {} {} {} {} {}",
            p.orbit,
            p.iterate,
            p.t_u,
            p.t_s,
            if p.crossing > 0 { "+1" } else { "-1" },
            fmt_tuple(&p.a_u),
            fmt_tuple(&p.a_s)
        );
        if let Some(mu) = p.mu {
            let _ = write!(s, " mu={mu}");
        }
        s.push('\n');
    }
    for m in &t.marked {
        let _ = write!(s, "fix {} {}", m.name, m.period);
        if let Some((x, y)) = m.coords {
            let _ = write!(s, " at {x} {y}");
        }
        if let Some(list) = &m.containment {
            s.push_str(" in");
            if !list.is_empty() {
                let ids: Vec<String> = list.iter().map(|b| b.to_string()).collect();
                let _ = write!(s, " {}", ids.join(","));
            }
        }
        s.push('\n');
    }
    if let Some(g) = &t.geometry {
        for (b, verts) in &g.polylines {
            let _ = writeln!(s, "polyline {}", b.name());
            for (x, y) in verts {
                let _ = writeln!(s, "v {x} {y}");
            }
            s.push_str("end\n");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# two orbits
surface cylinder
orientation preserving
window 1
sigma -1
pt p -1 0.5 2 +1 (0) (0) mu=-1
pt p 0 1 1 +1 0 0 mu=-1
pt p 1 2 0.5 +1 0 0 mu=-1
pt q -1 0.75 1.5 -1 1 1
pt q 0 1.5 0.75 -1 1 1
pt q 1 3 0.375 -1 1 1
fix y 1 in
fix z 2 at 0.1 0.2 in bigon:p.0-q.0,bigon:p.1-q.-1
polyline u+
v 0 0
v 1 0.5
end
";

    #[test]
    fn parse_small() {
        let t = parse(SMALL).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t.sigma01, Some(-1));
        assert_eq!(t.marked[0].containment, Some(vec![]));
        assert_eq!(t.marked[1].containment.as_ref().unwrap().len(), 2);
        assert_eq!(t.point(0).a_u, vec![0]);
        assert_eq!(t.geometry.as_ref().unwrap().polylines.len(), 1);
    }

    #[test]
    fn round_trip() {
        let t = parse(SMALL).unwrap();
        let again = parse(&emit(&t)).unwrap();
        assert_eq!(t, again);
        assert_eq!(emit(&t), emit(&again));
    }

    #[test]
    fn empty_tangle() {
        let t = parse("surface plane\norientation preserving\nwindow 4\n").unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn syntax_positions() {
        let err = parse("surface plane\norientation sideways\n").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (2, 13)),
            e => panic!("{e}"),
        }
        let err = parse("surface plane\norientation preserving\nwindow 0\npt p 0 1 1 +1 () () x\n")
            .unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 4, column: 21, .. }));
    }

    #[test]
    fn label_length_checked() {
        let err = parse("surface torus\norientation preserving\nwindow 0\npt p 0 1 1 +1 0 0,0\n")
            .unwrap_err();
        assert!(matches!(err, Error::LabelLength { expected: 2, found: 1, .. }));
    }
}
