//! Planar polyline utilities: arclength lookup, orientation predicates,
//! segment crossings and winding numbers.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Pt = (f64, f64);

pub fn sub(a: Pt, b: Pt) -> Pt {
    (a.0 - b.0, a.1 - b.1)
}

pub fn cross(a: Pt, b: Pt) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

pub fn dot(a: Pt, b: Pt) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

pub fn norm(a: Pt) -> f64 {
    a.0.hypot(a.1)
}

pub fn dist(a: Pt, b: Pt) -> f64 {
    norm(sub(a, b))
}

/// Signed area orientation of the triangle `abc`: positive when counterclockwise.
pub fn orient(a: Pt, b: Pt, c: Pt) -> f64 {
    cross(sub(b, a), sub(c, a))
}

/// Signed angle from `a` to `b` in `(-π, π]`.
pub fn signed_angle(a: Pt, b: Pt) -> f64 {
    cross(a, b).atan2(dot(a, b))
}

/// Cumulative arclength at each vertex.
pub fn arclengths(poly: &[Pt]) -> Vec<f64> {
    let mut out = Vec::with_capacity(poly.len());
    let mut acc = 0.0;
    for (i, &v) in poly.iter().enumerate() {
        if i > 0 {
            acc += dist(poly[i - 1], v);
        }
        out.push(acc);
    }
    out
}

/// Point at arclength `s` from the first vertex.
pub fn point_at(poly: &[Pt], s: f64) -> Option<Pt> {
    let (i, frac) = locate(poly, s)?;
    if i + 1 == poly.len() {
        return Some(poly[i]);
    }
    let (a, b) = (poly[i], poly[i + 1]);
    Some((a.0 + frac * (b.0 - a.0), a.1 + frac * (b.1 - a.1)))
}

/// Segment index and fractional position for arclength `s`.
pub fn locate(poly: &[Pt], s: f64) -> Option<(usize, f64)> {
    if poly.is_empty() || s < 0.0 {
        return None;
    }
    let mut acc = 0.0;
    for i in 0..poly.len().saturating_sub(1) {
        let l = dist(poly[i], poly[i + 1]);
        if s <= acc + l {
            let frac = if l > 0.0 { (s - acc) / l } else { 0.0 };
            return Some((i, frac));
        }
        acc += l;
    }
    if (s - acc).abs() <= 1e-12 {
        return Some((poly.len() - 1, 0.0));
    }
    None
}

/// Sub-polyline between arclengths `a` and `b`, reversed when `a > b`.
pub fn slice(poly: &[Pt], a: f64, b: f64) -> Option<Vec<Pt>> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let (i, _) = locate(poly, lo)?;
    let (j, _) = locate(poly, hi)?;
    let mut out = vec![point_at(poly, lo)?];
    out.extend(poly.iter().take(j + 1).skip(i + 1).copied());
    let end = point_at(poly, hi)?;
    if out.last() != Some(&end) {
        out.push(end);
    }
    out.dedup();
    if a > b {
        out.reverse();
    }
    Some(out)
}

/// Unit tangent of the polyline at arclength `s`, oriented by increasing arclength.
pub fn tangent_at(poly: &[Pt], s: f64) -> Option<Pt> {
    let (mut i, _) = locate(poly, s)?;
    if i + 1 >= poly.len() {
        i = poly.len().checked_sub(2)?;
    }
    let d = sub(poly[i + 1], poly[i]);
    let n = norm(d);
    (n > 0.0).then(|| (d.0 / n, d.1 / n))
}

/// Total signed turning of the polyline's edge directions.
pub fn turning(poly: &[Pt]) -> Result<f64> {
    let mut total = 0.0;
    let mut prev: Option<Pt> = None;
    for w in poly.windows(2) {
        let d = sub(w[1], w[0]);
        if norm(d) == 0.0 {
            return Err(Error::Degenerate("repeated polyline vertex".into()));
        }
        if let Some(p) = prev {
            total += signed_angle(p, d);
        }
        prev = Some(d);
    }
    Ok(total)
}

/// Crossing of segments `ab` and `cd` as `(s, t, point)` with `s, t` the
/// fractional positions along each segment.
pub fn segment_crossing(a: Pt, b: Pt, c: Pt, d: Pt) -> Option<(f64, f64, Pt)> {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 > 0.0 || o3 * o4 > 0.0 {
        return None;
    }
    let r = sub(b, a);
    let q = sub(d, c);
    let den = cross(r, q);
    if den == 0.0 {
        return None;
    }
    let w = sub(c, a);
    let s = cross(w, q) / den;
    let t = cross(w, r) / den;
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return None;
    }
    Some((s, t, (a.0 + s * r.0, a.1 + s * r.1)))
}

fn on_segment(a: Pt, b: Pt, z: Pt, tol: f64) -> bool {
    let ab = sub(b, a);
    let l2 = dot(ab, ab);
    let t = if l2 > 0.0 {
        (dot(sub(z, a), ab) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist((a.0 + t * ab.0, a.1 + t * ab.1), z) <= tol
}

/// Winding number of the closed loop through `poly` around `z`.
pub fn winding_index(poly: &[Pt], z: Pt) -> Result<i64> {
    let n = poly.len();
    if n == 0 {
        return Ok(0);
    }
    let mut total = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if on_segment(a, b, z, 1e-9) {
            return Err(Error::OnLoop);
        }
        total += signed_angle(sub(a, z), sub(b, z));
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Pt> {
        vec![(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
    }

    #[test]
    fn winding_square() {
        assert_eq!(winding_index(&square(), (0.0, 0.0)).unwrap(), 1);
        assert_eq!(winding_index(&square(), (3.0, 0.0)).unwrap(), 0);
        let mut rev = square();
        rev.reverse();
        assert_eq!(winding_index(&rev, (0.0, 0.0)).unwrap(), -1);
        assert!(matches!(winding_index(&square(), (1.0, 0.0)), Err(Error::OnLoop)));
    }

    #[test]
    fn winding_doubled() {
        let mut twice = square();
        twice.extend(square());
        assert_eq!(winding_index(&twice, (0.2, -0.3)).unwrap(), 2);
    }

    #[test]
    fn arclength_lookup() {
        let poly = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 2.0)];
        assert_eq!(point_at(&poly, 2.0), Some((1.0, 1.0)));
        assert_eq!(point_at(&poly, 3.0), Some((1.0, 2.0)));
        assert_eq!(point_at(&poly, 3.5), None);
        let s = slice(&poly, 2.5, 0.5).unwrap();
        assert_eq!(s, vec![(1.0, 1.5), (1.0, 0.0), (0.5, 0.0)]);
    }

    #[test]
    fn crossing() {
        let (s, t, p) = segment_crossing((0.0, 0.0), (2.0, 0.0), (1.0, -1.0), (1.0, 3.0)).unwrap();
        assert_eq!((s, t, p), (0.5, 0.25, (1.0, 0.0)));
        assert!(segment_crossing((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)).is_none());
    }

    #[test]
    fn square_turning_is_full_turn() {
        let mut sq = square();
        sq.push(sq[0]);
        sq.push(sq[1]);
        assert!((turning(&sq).unwrap() - 2.0 * PI).abs() < 1e-12);
    }
}
