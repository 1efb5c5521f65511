//! Maslov gradings of homoclinic points: supplied, geometric, and the
//! consistency checks they must pass.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::classify::Classification;
use crate::error::{Error, Result};
use crate::geom::{self, Pt};
use crate::tangle::{Branch, MapOrientation, Tangle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradingSource {
    Supplied,
    Geometric,
}

/// Maslov index `μ(p, x)` per orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct GradingTable {
    pub mu: BTreeMap<String, i64>,
    pub source: GradingSource,
}

impl GradingTable {
    pub fn get(&self, t: &Tangle, i: usize) -> Option<i64> {
        self.mu.get(&t.point(i).orbit).copied()
    }

    /// Relative index `μ(p, q) = μ(p) − μ(q)`.
    pub fn relative(&self, t: &Tangle, p: usize, q: usize) -> Option<i64> {
        Some(self.get(t, p)? - self.get(t, q)?)
    }

    pub fn negated(&self) -> GradingTable {
        GradingTable {
            mu: self.mu.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            source: self.source,
        }
    }
}

fn line_angle(a: Pt, b: Pt) -> f64 {
    geom::signed_angle(a, b).rem_euclid(PI)
}

fn first_dir(poly: &[Pt]) -> Pt {
    geom::sub(poly[1], poly[0])
}

fn last_dir(poly: &[Pt]) -> Pt {
    let n = poly.len();
    geom::sub(poly[n - 1], poly[n - 2])
}

/// `μ(p, x)` from the rotation of the tangent line around the loop that runs
/// along `W^u` from `p` to `x` and back along `W^s`.
pub fn maslov_geometric(t: &Tangle, p: usize) -> Result<i64> {
    let g = t.geometry.as_ref().ok_or(Error::MissingGeometry)?;
    let pt = t.point(p);
    let name = pt.reference().to_string();
    let bu = Branch::unstable(pt.t_u > 0.0);
    let bs = Branch::stable(pt.t_s > 0.0);
    let missing = |b: Branch| Error::Degenerate(format!("{name}: no {} polyline", b.name()));
    let pu = g.polyline(bu).ok_or_else(|| missing(bu))?;
    let ps = g.polyline(bs).ok_or_else(|| missing(bs))?;
    let short = || Error::Degenerate(format!("{name} lies beyond the grown polyline"));
    let u_path = geom::slice(pu, pt.t_u.abs(), 0.0).ok_or_else(short)?;
    let s_path = geom::slice(ps, 0.0, pt.t_s.abs()).ok_or_else(short)?;
    if u_path.len() < 2 || s_path.len() < 2 {
        return Err(Error::Degenerate(format!("{name}: segment too short")));
    }
    let alpha_x = line_angle(last_dir(&u_path), first_dir(&s_path));
    let (a, b) = (first_dir(&u_path), last_dir(&s_path));
    let mut alpha_p = line_angle(a, b);
    for a in [alpha_x, alpha_p] {
        if a < 1e-9 || PI - a < 1e-9 {
            return Err(Error::Degenerate(format!("{name}: tangential corner")));
        }
    }
    // Near-parallel branches: chords cannot resolve which side the corner
    // opens to, the recorded crossing sign can.
    let corner = -pt.t_u.signum() * pt.t_s.signum() * f64::from(pt.crossing);
    if geom::cross(a, b) * corner < 0.0 {
        alpha_p += if alpha_p > PI / 2.0 { -PI } else { PI };
    }
    let theta = geom::turning(&u_path)? + alpha_x + geom::turning(&s_path)? - alpha_p;
    let k = theta / PI;
    let snapped = k.round();
    if (k - snapped).abs() > 1e-6 {
        return Err(Error::Numerical(format!("{name}: index {k} does not snap to an integer")));
    }
    Ok(snapped as i64)
}

/// Gradings from the `mu=` fields, cross-checked against geometry when present.
pub fn resolve_grading(t: &Tangle, class: &Classification) -> Result<GradingTable> {
    let mut supplied = BTreeMap::new();
    for orbit in t.orbits() {
        if let Some(mu) = t.point(t.id(&orbit, 0).expect("iterate 0")).mu {
            supplied.insert(orbit, mu);
        }
    }
    let mut geometric = BTreeMap::new();
    if t.geometry.is_some() {
        for (orbit, c) in &class.by_orbit {
            if !c.contractible {
                continue;
            }
            let p = t.id(orbit, 0).expect("iterate 0");
            match maslov_geometric(t, p) {
                Ok(mu) => {
                    if c.primary && !(1..=3).contains(&mu.abs()) {
                        return Err(Error::GradingRange {
                            point: t.point(p).reference().to_string(),
                            value: mu,
                        });
                    }
                    geometric.insert(orbit.clone(), mu);
                }
                Err(e) if c.primary && !supplied.contains_key(orbit) => return Err(e),
                Err(_) => {}
            }
        }
    }
    let conflicts: Vec<String> = supplied
        .iter()
        .filter(|(o, mu)| geometric.get(*o).is_some_and(|g| g != *mu))
        .map(|(o, _)| format!("{o}.0"))
        .collect();
    if !conflicts.is_empty() {
        return Err(Error::GradingConflict(conflicts));
    }
    for (orbit, c) in &class.by_orbit {
        if c.primary && !supplied.contains_key(orbit) && !geometric.contains_key(orbit) {
            return Err(Error::Ungradable(format!("{orbit}.0")));
        }
    }
    let source = if supplied.is_empty() && !geometric.is_empty() {
        GradingSource::Geometric
    } else {
        GradingSource::Supplied
    };
    let mut mu = geometric;
    mu.extend(supplied);
    Ok(GradingTable { mu, source })
}

#[derive(Debug, Clone, Default)]
pub struct GradingReport {
    pub alternation: Vec<String>,
    pub z_invariance: Vec<String>,
    pub range: Vec<String>,
    pub rank_balance: Vec<String>,
    /// Crossing signs that contradict `ε(p) = σ₀₁ · (−1)^μ(p)`.
    pub parity: Vec<String>,
}

impl GradingReport {
    pub fn is_ok(&self) -> bool {
        self.alternation.is_empty()
            && self.z_invariance.is_empty()
            && self.range.is_empty()
            && self.rank_balance.is_empty()
            && self.parity.is_empty()
    }

    pub fn findings(&self) -> impl Iterator<Item = &String> {
        self.alternation
            .iter()
            .chain(&self.z_invariance)
            .chain(&self.range)
            .chain(&self.rank_balance)
            .chain(&self.parity)
    }
}

/// The primary point adjacent to `p` on the far side of `p` along `W^s`
/// among those lying in `]x, p[_u`.
pub fn adjacent_plus(t: &Tangle, class: &Classification, p: usize) -> Option<usize> {
    let a = t.point(p);
    (0..t.len())
        .filter(|&q| {
            let b = t.point(q);
            class.is_primary(t, q)
                && b.branch_pair() == a.branch_pair()
                && b.t_u.abs() < a.t_u.abs()
                && b.t_s.abs() > a.t_s.abs()
        })
        .min_by(|&x, &y| t.point(x).t_s.abs().total_cmp(&t.point(y).t_s.abs()))
}

pub fn validate_grading(t: &Tangle, class: &Classification, g: &GradingTable) -> GradingReport {
    let mut report = GradingReport::default();
    for p in t.points() {
        if let (Some(mu), Some(&base)) = (p.mu, g.mu.get(&p.orbit)) {
            if mu != base {
                report
                    .z_invariance
                    .push(format!("{}: μ = {mu}, orbit has {base}", p.reference()));
            }
        }
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for (orbit, c) in &class.by_orbit {
        if !c.primary {
            continue;
        }
        match g.mu.get(orbit) {
            Some(&mu) => {
                if !(1..=3).contains(&mu.abs()) {
                    report.range.push(format!("{orbit}: μ = {mu} outside {{±1, ±2, ±3}}"));
                }
                *counts.entry(mu).or_default() += t.power as usize;
            }
            None => report.range.push(format!("{orbit}: no grading")),
        }
    }
    for sign in [1i64, -1] {
        let c = |k: i64| counts.get(&(sign * k)).copied().unwrap_or(0);
        if c(2) != c(1) + c(3) {
            report.rank_balance.push(format!(
                "rk C_{} = {} but rk C_{} + rk C_{} = {}",
                2 * sign,
                c(2),
                sign,
                3 * sign,
                c(1) + c(3)
            ));
        }
    }
    report.parity = parity_findings(t, class, g);
    let d = match t.orientation {
        MapOrientation::Preserving => 1,
        MapOrientation::Reversing => 2,
    };
    for orbit in class.by_orbit.iter().filter(|(_, c)| c.primary).map(|(o, _)| o) {
        let start = t.id(orbit, 0).expect("iterate 0");
        let Some(stop) = t.id(orbit, -d) else { continue };
        let mut chain = vec![start];
        let mut cur = start;
        let mut reached = false;
        while chain.len() <= t.len() {
            match adjacent_plus(t, class, cur) {
                Some(next) => {
                    chain.push(next);
                    if next == stop {
                        reached = true;
                        break;
                    }
                    cur = next;
                }
                None => break,
            }
        }
        if !reached {
            continue;
        }
        let mut prev: Option<i64> = None;
        for w in chain.windows(2) {
            let Some(rel) = g.relative(t, w[0], w[1]) else { break };
            let bad = rel.abs() != 1 || prev == Some(rel);
            if bad {
                report.alternation.push(format!(
                    "{} -> {}: relative index {rel} breaks alternation",
                    t.point(w[0]).reference(),
                    t.point(w[1]).reference()
                ));
            }
            prev = Some(rel);
        }
    }
    report
}

/// `σ₀₁` from the bigons between primary points via
/// `sign(Δt_u) · sign(Δt_s) = σ₀₁ · (−1)^μ(p)`, falling back to the declared value.
pub(crate) fn bigon_sigma(t: &Tangle, class: &Classification, g: &GradingTable) -> Option<i8> {
    for (orbit, c) in &class.by_orbit {
        if !c.primary {
            continue;
        }
        let p = t.id(orbit, 0).expect("iterate 0");
        let Some(mu) = g.get(t, p) else { continue };
        for q in 0..t.len() {
            if class.is_primary(t, q) && crate::moduli::bigon(t, g, p, q).is_some() {
                let (a, b) = (t.point(p), t.point(q));
                let prod = ((b.t_u - a.t_u).signum() * (b.t_s - a.t_s).signum()) as i8;
                return Some(if mu.rem_euclid(2) == 0 { prod } else { -prod });
            }
        }
    }
    t.sigma01
}

fn parity_findings(t: &Tangle, class: &Classification, g: &GradingTable) -> Vec<String> {
    let Some(sigma) = bigon_sigma(t, class, g) else { return Vec::new() };
    let mut out = Vec::new();
    for (orbit, c) in &class.by_orbit {
        if !c.contractible {
            continue;
        }
        let p = t.point(t.id(orbit, 0).expect("iterate 0"));
        let Some(mu) = g.mu.get(orbit) else { continue };
        let expected = if mu.rem_euclid(2) == 0 { sigma } else { -sigma };
        if p.crossing != expected {
            out.push(format!("{}: crossing {} but σ₀₁ = {sigma} and μ = {mu}", p.reference(), p.crossing));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;
    use crate::tangle::{Geometry, PointRecord, Surface};

    /// A lens between `x = (0,0)` and `p = (2,0)` whose loop `u: p→x, s: x→p`
    /// runs counterclockwise when `ccw` is set.
    fn lens(ccw: bool) -> Tangle {
        let n = 200;
        let arc = |sign: f64| -> Vec<Pt> {
            (0..=n)
                .map(|i| {
                    let th = PI * i as f64 / n as f64;
                    (1.0 - th.cos(), sign * 0.5 * th.sin())
                })
                .collect()
        };
        let (u_arc, s_arc) = if ccw { (arc(1.0), arc(-1.0)) } else { (arc(-1.0), arc(1.0)) };
        let len = |v: &Vec<Pt>| *geom::arclengths(v).last().unwrap();
        let (lu, ls) = (len(&u_arc), len(&s_arc));
        let mut polylines = BTreeMap::new();
        polylines.insert(Branch::UPlus, u_arc);
        polylines.insert(Branch::SPlus, s_arc);
        let p = PointRecord {
            orbit: "p".into(),
            iterate: 0,
            t_u: lu,
            t_s: ls,
            crossing: if ccw { 1 } else { -1 },
            a_u: vec![],
            a_s: vec![],
            mu: None,
        };
        Tangle::new(
            Surface::Plane,
            MapOrientation::Preserving,
            0,
            vec![p],
            vec![],
            Some(Geometry { polylines }),
        )
        .unwrap()
    }

    #[test]
    fn convex_lens_has_unit_index() {
        assert_eq!(maslov_geometric(&lens(true), 0).unwrap(), 1);
        assert_eq!(maslov_geometric(&lens(false), 0).unwrap(), -1);
    }

    #[test]
    fn resolve_from_geometry() {
        let t = lens(true);
        let g = resolve_grading(&t, &classify(&t)).unwrap();
        assert_eq!(g.source, GradingSource::Geometric);
        assert_eq!(g.mu["p"], 1);
    }

    #[test]
    fn conflicting_sources_rejected() {
        let t = lens(true);
        let mut pts = t.points().to_vec();
        pts[0].mu = Some(-1);
        let t2 = Tangle::new(t.surface, t.orientation, 0, pts, vec![], t.geometry.clone()).unwrap();
        assert!(matches!(
            resolve_grading(&t2, &classify(&t2)),
            Err(Error::GradingConflict(v)) if v == vec!["p.0".to_string()]
        ));
    }

    #[test]
    fn ungradable_without_data() {
        let mut t = lens(true);
        t.geometry = None;
        assert!(matches!(resolve_grading(&t, &classify(&t)), Err(Error::Ungradable(_))));
    }

    #[test]
    fn range_violation_reported() {
        let t = lens(true);
        let c = classify(&t);
        let g = GradingTable {
            mu: [("p".to_string(), 4)].into(),
            source: GradingSource::Supplied,
        };
        let r = validate_grading(&t, &c, &g);
        assert_eq!(r.range.len(), 1);
    }
}
