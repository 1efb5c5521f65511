//! Nonemptiness of bigon and heart moduli spaces, decided from the two
//! parameter orders and lift coincidence, plus cutting, gluing and
//! marked-point containment.

use std::fmt;

use crate::classify::Classification;
use crate::error::{Error, Result};
use crate::geom::{self, Pt};
use crate::grading::GradingTable;
use crate::tangle::{between, BigonId, Branch, Geometry, MarkedPoint, Tangle};

pub use crate::geom::winding_index;

#[derive(Debug, Clone, PartialEq)]
pub struct BigonCertificate {
    pub from: usize,
    pub to: usize,
    pub u_span: (f64, f64),
    pub s_span: (f64, f64),
}

impl BigonCertificate {
    pub fn id(&self, t: &Tangle) -> BigonId {
        BigonId {
            from: t.point(self.from).reference(),
            to: t.point(self.to).reference(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoBigon {
    NotContractible,
    Index(Option<i64>),
    /// The corners are concave for the orientation of a strip from `p` to `q`.
    Orientation,
    BlockedBy(Blocker),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Blocker {
    Point(usize),
    Fixed,
}

/// Whether `r` lies strictly inside the would-be bigon `p → q` on the cover.
fn blocks(t: &Tangle, p: usize, q: usize, r: usize) -> bool {
    r != p && r != q && t.strictly_inside(p, q, r) && t.lift_coincident(p, r)
}

fn fixed_blocks(t: &Tangle, p: usize, q: usize) -> bool {
    let (a, b) = (t.point(p), t.point(q));
    between(a.t_u, b.t_u, 0.0) && between(a.t_s, b.t_s, 0.0) && a.is_contractible()
}

/// First obstruction to a bigon between arbitrary contractible points,
/// ignoring the index.
pub fn obstruction(t: &Tangle, p: usize, q: usize) -> Option<Blocker> {
    if fixed_blocks(t, p, q) {
        return Some(Blocker::Fixed);
    }
    (0..t.len()).find(|&r| blocks(t, p, q, r)).map(Blocker::Point)
}

/// Orientation of the corner at `p` spanned by the arcs towards `q`, taken
/// first along `W^u` and then along `W^s`.
pub fn corner_orientation(t: &Tangle, p: usize, q: usize) -> i8 {
    let (a, b) = (t.point(p), t.point(q));
    let du = (b.t_u - a.t_u).signum();
    let ds = (b.t_s - a.t_s).signum();
    (du * ds) as i8 * a.crossing
}

pub fn bigon_check(
    t: &Tangle,
    g: &GradingTable,
    p: usize,
    q: usize,
) -> std::result::Result<BigonCertificate, NoBigon> {
    let (a, b) = (t.point(p), t.point(q));
    if !a.is_contractible() || !b.is_contractible() {
        return Err(NoBigon::NotContractible);
    }
    match g.relative(t, p, q) {
        Some(1) => {}
        other => return Err(NoBigon::Index(other)),
    }
    if corner_orientation(t, p, q) != 1 {
        return Err(NoBigon::Orientation);
    }
    if let Some(b) = obstruction(t, p, q) {
        return Err(NoBigon::BlockedBy(b));
    }
    Ok(BigonCertificate {
        from: p,
        to: q,
        u_span: (a.t_u, b.t_u),
        s_span: (a.t_s, b.t_s),
    })
}

pub fn bigon(t: &Tangle, g: &GradingTable, p: usize, q: usize) -> Option<BigonCertificate> {
    bigon_check(t, g, p, q).ok()
}

/// One of the two points at which a heart can be cut into a pair of bigons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutPoint {
    Primary(usize),
    Fixed,
    /// A non-primary cutting point, when one could be located in the window.
    Secondary(Option<usize>),
}

impl CutPoint {
    pub fn is_primary(self) -> bool {
        matches!(self, CutPoint::Primary(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vertex {
    AtP,
    AtR,
}

/// `B`: both cutting points primary. `C`: one cutting point is the fixed
/// point and the heart is not globally injective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeartShape {
    B,
    C,
}

impl fmt::Display for HeartShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeartShape::B => "b",
            HeartShape::C => "c",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeartCertificate {
    pub from: usize,
    pub to: usize,
    pub concave_vertex: Vertex,
    pub shape: HeartShape,
    pub q_u: CutPoint,
    pub q_s: CutPoint,
}

impl HeartCertificate {
    pub fn globally_injective(&self) -> bool {
        self.shape == HeartShape::B
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mid {
    Point(usize),
    Fixed,
}

fn mid_params(t: &Tangle, m: Mid) -> (f64, f64) {
    match m {
        Mid::Point(i) => (t.point(i).t_u, t.point(i).t_s),
        Mid::Fixed => (0.0, 0.0),
    }
}

/// Intermediate points `q` with bigons `p → q` and `q → r`.
fn gluable_mids(t: &Tangle, class: &Classification, g: &GradingTable, p: usize, r: usize) -> Vec<Mid> {
    let mut out: Vec<Mid> = (0..t.len())
        .filter(|&q| class.is_primary(t, q))
        .filter(|&q| bigon(t, g, p, q).is_some() && bigon(t, g, q, r).is_some())
        .map(Mid::Point)
        .collect();
    if g.get(t, p) == Some(1) && g.get(t, r) == Some(-1) {
        out.push(Mid::Fixed);
    }
    out
}

fn cut_kind(m: Mid) -> CutPoint {
    match m {
        Mid::Point(i) => CutPoint::Primary(i),
        Mid::Fixed => CutPoint::Fixed,
    }
}

/// Non-primary contractible point in the given open segment that splits
/// `p → r` into two unobstructed pieces.
fn secondary_cut(t: &Tangle, class: &Classification, p: usize, r: usize, unstable: bool) -> Option<usize> {
    let (a, b) = (t.point(p), t.point(r));
    let key = |i: usize| if unstable { t.point(i).t_u } else { t.point(i).t_s };
    let (lo, hi) = if unstable { (a.t_u, b.t_u) } else { (a.t_s, b.t_s) };
    let mut cands: Vec<usize> = (0..t.len())
        .filter(|&q| q != p && q != r && !class.is_primary(t, q))
        .filter(|&q| between(lo, hi, key(q)) && t.lift_coincident(p, q) && t.point(q).is_contractible())
        .filter(|&q| obstruction(t, p, q).is_none() && obstruction(t, q, r).is_none())
        .collect();
    cands.sort_by(|&x, &y| (key(x) - lo).abs().total_cmp(&(key(y) - lo).abs()));
    cands.first().copied()
}

pub fn heart(
    t: &Tangle,
    class: &Classification,
    g: &GradingTable,
    p: usize,
    r: usize,
) -> Option<HeartCertificate> {
    if !class.is_primary(t, p) || !class.is_primary(t, r) || g.relative(t, p, r) != Some(2) {
        return None;
    }
    let mids = gluable_mids(t, class, g, p, r);
    if mids.is_empty() {
        return None;
    }
    let (a, b) = (t.point(p), t.point(r));
    let in_u = |m: &Mid| between(a.t_u, b.t_u, mid_params(t, *m).0);
    let in_s = |m: &Mid| between(a.t_s, b.t_s, mid_params(t, *m).1);
    let nearest = |unstable: bool| {
        mids.iter()
            .filter(|m| if unstable { in_u(m) } else { in_s(m) })
            .min_by(|x, y| {
                let (px, py) = (mid_params(t, **x), mid_params(t, **y));
                if unstable {
                    (px.0 - a.t_u).abs().total_cmp(&(py.0 - a.t_u).abs())
                } else {
                    (px.1 - a.t_s).abs().total_cmp(&(py.1 - a.t_s).abs())
                }
            })
            .copied()
    };
    let q_u = match nearest(true) {
        Some(m) => cut_kind(m),
        None => CutPoint::Secondary(secondary_cut(t, class, p, r, true)),
    };
    let q_s = match nearest(false) {
        Some(m) => cut_kind(m),
        None => CutPoint::Secondary(secondary_cut(t, class, p, r, false)),
    };
    let qu_params = match q_u {
        CutPoint::Primary(i) | CutPoint::Secondary(Some(i)) => Some(mid_params(t, Mid::Point(i))),
        CutPoint::Fixed => Some((0.0, 0.0)),
        CutPoint::Secondary(None) => None,
    };
    let concave_vertex = match qu_params {
        Some((_, s)) if between(a.t_s, s, b.t_s) => Vertex::AtR,
        _ => Vertex::AtP,
    };
    let shape = if q_u == CutPoint::Fixed || q_s == CutPoint::Fixed {
        HeartShape::C
    } else {
        HeartShape::B
    };
    Some(HeartCertificate {
        from: p,
        to: r,
        concave_vertex,
        shape,
        q_u,
        q_s,
    })
}

pub fn glue(
    t: &Tangle,
    class: &Classification,
    g: &GradingTable,
    b1: &BigonCertificate,
    b2: &BigonCertificate,
) -> Result<HeartCertificate> {
    if b1.to != b2.from {
        return Err(Error::EndpointMismatch(format!(
            "{} ends at {}, {} starts at {}",
            b1.id(t),
            t.point(b1.to).reference(),
            b2.id(t),
            t.point(b2.from).reference()
        )));
    }
    heart(t, class, g, b1.from, b2.to).ok_or_else(|| {
        Error::Theorem(format!("{} and {} do not glue to a heart", b1.id(t), b2.id(t)))
    })
}

pub fn cut(h: &HeartCertificate) -> (CutPoint, CutPoint) {
    (h.q_u, h.q_s)
}

/// Path along `W^u` (or `W^s`) between signed parameters, through `x` when
/// the endpoints lie on opposite branches.
pub fn manifold_path(g: &Geometry, unstable: bool, from: f64, to: f64) -> Option<Vec<Pt>> {
    let branch = |t: f64| {
        if unstable {
            Branch::unstable(t > 0.0)
        } else {
            Branch::stable(t > 0.0)
        }
    };
    if (from > 0.0) == (to > 0.0) {
        return geom::slice(g.polyline(branch(from))?, from.abs(), to.abs());
    }
    let mut first = geom::slice(g.polyline(branch(from))?, from.abs(), 0.0)?;
    let second = geom::slice(g.polyline(branch(to))?, 0.0, to.abs())?;
    first.extend(second.into_iter().skip(1));
    Some(first)
}

/// Whether a marked point lies inside a bigon: by explicit table when the
/// marked point carries one, else by winding number on the geometry.
pub fn interior_contains(t: &Tangle, b: &BigonCertificate, m: &MarkedPoint) -> Result<bool> {
    if let Some(list) = &m.containment {
        return Ok(list.contains(&b.id(t)));
    }
    let (Some(z), Some(g)) = (m.coords, t.geometry.as_ref()) else {
        return Err(Error::NoContainment(m.name.clone()));
    };
    let (p, q) = (t.point(b.from), t.point(b.to));
    let short = || Error::Degenerate(format!("{} exceeds the grown polylines", b.id(t)));
    let mut lp = manifold_path(g, true, p.t_u, q.t_u).ok_or_else(short)?;
    let back = manifold_path(g, false, q.t_s, p.t_s).ok_or_else(short)?;
    lp.extend(back.into_iter().skip(1));
    lp.pop();
    Ok(winding_index(&lp, z)?.abs() >= 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;
    use crate::grading::GradingSource;
    use crate::tangle::{MapOrientation, PointRecord, Surface};

    fn orbit(name: &str, k: i64, u: f64, s: f64, mu: i64) -> Vec<PointRecord> {
        (-k..=k)
            .map(|n| PointRecord {
                orbit: name.into(),
                iterate: n,
                t_u: 2f64.powf(u + n as f64),
                t_s: 2f64.powf(s - n as f64),
                crossing: if mu % 2 == 0 { 1 } else { -1 },
                a_u: vec![],
                a_s: vec![],
                mu: Some(mu),
            })
            .collect()
    }

    fn pair() -> (Tangle, Classification, GradingTable) {
        let mut pts = orbit("p", 3, 0.0, 0.0, -1);
        pts.extend(orbit("q", 3, 0.5, -0.5, -2));
        let t = Tangle::new(Surface::Plane, MapOrientation::Preserving, 3, pts, vec![], None).unwrap();
        let c = classify(&t);
        let g = crate::grading::resolve_grading(&t, &c).unwrap();
        (t, c, g)
    }

    #[test]
    fn single_pair_bigons() {
        let (t, _, g) = pair();
        let p = t.id("p", 0).unwrap();
        let found: Vec<i64> = (-3..=3)
            .filter(|&n| bigon(&t, &g, p, t.id("q", n).unwrap()).is_some())
            .collect();
        assert_eq!(found, vec![-1, 0]);
        assert!(matches!(
            bigon_check(&t, &g, p, t.id("q", 2).unwrap()),
            Err(NoBigon::BlockedBy(Blocker::Point(_)))
        ));
        assert!(matches!(
            bigon_check(&t, &g, p, t.id("p", 1).unwrap()),
            Err(NoBigon::Index(Some(0)))
        ));
    }

    #[test]
    fn glue_rejects_mismatched_endpoints() {
        let (t, c, g) = pair();
        let b = bigon(&t, &g, t.id("p", 0).unwrap(), t.id("q", 0).unwrap()).unwrap();
        assert!(matches!(glue(&t, &c, &g, &b, &b), Err(Error::EndpointMismatch(_))));
    }

    #[test]
    fn table_containment() {
        let (t, _, g) = pair();
        let b = bigon(&t, &g, t.id("p", 0).unwrap(), t.id("q", 0).unwrap()).unwrap();
        let m = MarkedPoint {
            name: "z".into(),
            period: 1,
            coords: None,
            containment: Some(vec![BigonId::parse("bigon:p.0-q.0").unwrap()]),
        };
        assert!(interior_contains(&t, &b, &m).unwrap());
        let bare = MarkedPoint { containment: None, ..m };
        assert!(matches!(interior_contains(&t, &b, &bare), Err(Error::NoContainment(_))));
    }

    #[test]
    fn index_obstruction_for_hearts() {
        let (t, c, _) = pair();
        let g = GradingTable {
            mu: [("p".to_string(), -1), ("q".to_string(), -1)].into(),
            source: GradingSource::Supplied,
        };
        assert!(heart(&t, &c, &g, t.id("p", 0).unwrap(), t.id("q", 0).unwrap()).is_none());
    }
}
