//! Intersections of grown branches and their assembly into a tangle.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{self, Pt};
use crate::tangle::{Branch, Geometry, MapOrientation, PointRecord, Surface, Tangle};

use super::grow::{grow_branch, BranchCurve, GrowthParams};
use super::map::{det, invert, FixedPoint, PlanarMap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceParams {
    pub growth: GrowthParams,
    /// Iterates kept on each side of the representative; `None` picks the
    /// largest window every orbit near the fixed point can fill.
    pub window: Option<i64>,
    /// Distance within which a mapped crossing matches a stored one.
    pub match_tol: f64,
    /// Smallest crossing angle accepted as transverse (radians).
    pub min_angle: f64,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            growth: GrowthParams::default(),
            window: None,
            match_tol: 1e-6,
            min_angle: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub unstable: Branch,
    pub stable: Branch,
    pub t_u: f64,
    pub t_s: f64,
    pub pt: Pt,
    pub sign: i8,
    /// Sine of the crossing angle.
    pub sin: f64,
}

#[derive(Debug, Clone)]
pub struct TraceResult {
    pub tangle: Tangle,
    pub fixed_point: FixedPoint,
    pub crossings: Vec<Crossing>,
    /// Orbits seen within the budget but too short for the window.
    pub dropped: usize,
    /// Branches whose growth stopped early, with the arclength reached.
    pub truncated: Vec<(Branch, f64)>,
}

/// Grows the four branches in parallel.
pub fn grow_all(map: &dyn PlanarMap, fp: &FixedPoint, p: &GrowthParams) -> Result<Vec<BranchCurve>> {
    Branch::ALL.par_iter().map(|&b| grow_branch(map, fp, b, p)).collect()
}

type Cell = (i64, i64);

fn cells(a: Pt, b: Pt, size: f64) -> impl Iterator<Item = Cell> {
    let c = |v: f64| (v / size).floor() as i64;
    let (x0, x1) = (c(a.0.min(b.0)), c(a.0.max(b.0)));
    let (y0, y1) = (c(a.1.min(b.1)), c(a.1.max(b.1)));
    (x0..=x1).flat_map(move |x| (y0..=y1).map(move |y| (x, y)))
}

fn solve(m: [[f64; 2]; 2], r: Pt) -> Option<Pt> {
    (det(&m).abs() > 1e-300).then(|| super::map::apply(&invert(&m), r))
}

const NEWTON_TOL: f64 = 1e-13;

/// Newton refinement of a chord crossing onto the exact curves.
fn refine(map: &dyn PlanarMap, u: &BranchCurve, s: &BranchCurve, i: usize, j: usize, fu: f64, fs: f64) -> Option<(f64, f64, Pt, Pt, Pt)> {
    let (du, ua, ub) = u.segment_params(i);
    let (ds, sa, sb) = s.segment_params(j);
    let (mut a, mut b) = (ua + fu * (ub - ua), sa + fs * (sb - sa));
    let mut best: Option<(f64, (f64, f64, Pt, Pt, Pt))> = None;
    let mut polish = 0;
    for _ in 0..40 {
        let (pu, tu) = u.eval(map, du, a);
        let (ps, ts) = s.eval(map, ds, b);
        let r = geom::sub(pu, ps);
        let res = geom::norm(r);
        if best.is_none_or(|(b, _)| res < b) {
            best = Some((res, (a, b, pu, tu, ts)));
        }
        // A few steps past the tolerance pin the parameters down where the
        // branches cross at a shallow angle.
        if res < NEWTON_TOL {
            polish += 1;
            if polish > 3 || res == 0.0 {
                break;
            }
        }
        let step = solve([[tu.0, -ts.0], [tu.1, -ts.1]], r)?;
        a -= step.0;
        b -= step.1;
        if (a - ua).abs() > 2.0 * (ub - ua) + 1e-12 || (b - sa).abs() > 2.0 * (sb - sa) + 1e-12 {
            return None;
        }
    }
    best.filter(|(res, _)| *res < NEWTON_TOL).map(|(_, v)| v)
}

/// Transverse crossings of an unstable and a stable branch, excluding the
/// fixed point itself.
pub fn find_crossings(map: &dyn PlanarMap, u: &BranchCurve, s: &BranchCurve) -> Result<Vec<Crossing>> {
    if u.vertices.len() < 2 || s.vertices.len() < 2 {
        return Ok(Vec::new());
    }
    let size = s
        .vertices
        .windows(2)
        .map(|w| geom::dist(w[0].pt, w[1].pt))
        .fold(1e-9, f64::max);
    let mut grid: HashMap<Cell, Vec<usize>> = HashMap::new();
    for j in 0..s.vertices.len() - 1 {
        for c in cells(s.vertices[j].pt, s.vertices[j + 1].pt, size) {
            grid.entry(c).or_default().push(j);
        }
    }
    let found: Vec<Result<Vec<Crossing>>> = (0..u.vertices.len() - 1)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (u.vertices[i].pt, u.vertices[i + 1].pt);
            let mut js: Vec<usize> = cells(a, b, size).filter_map(|c| grid.get(&c)).flatten().copied().collect();
            js.sort_unstable();
            js.dedup();
            let mut out = Vec::new();
            for j in js {
                let (c, d) = (s.vertices[j].pt, s.vertices[j + 1].pt);
                let Some((fu, fs, _)) = geom::segment_crossing(a, b, c, d) else { continue };
                // Chords of nearly coincident curves cross where the curves do not.
                let Some((pa, pb, pt, tu, ts)) = refine(map, u, s, i, j, fu, fs) else { continue };
                let sin = geom::cross(tu, ts) / (geom::norm(tu) * geom::norm(ts));
                let (du, ua, _) = u.segment_params(i);
                let (ds, sa, _) = s.segment_params(j);
                let t_u = u.arclength[i] + u.arc(map, du, ua, pa);
                let t_s = s.arclength[j] + s.arc(map, ds, sa, pb);
                let oriented = geom::cross(
                    (u.branch.sign() * tu.0, u.branch.sign() * tu.1),
                    (s.branch.sign() * ts.0, s.branch.sign() * ts.1),
                );
                out.push(Crossing {
                    unstable: u.branch,
                    stable: s.branch,
                    t_u: u.branch.sign() * t_u,
                    t_s: s.branch.sign() * t_s,
                    pt,
                    sign: if oriented > 0.0 { 1 } else { -1 },
                    sin: sin.abs(),
                });
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for f in found {
        all.extend(f?);
    }
    all.sort_by(|a, b| a.t_u.abs().total_cmp(&b.t_u.abs()));
    let mut out: Vec<Crossing> = Vec::new();
    for c in all {
        let same = |d: &&Crossing| {
            let resolution = 1e-9_f64.max(NEWTON_TOL * 10.0 / c.sin.min(d.sin));
            geom::dist(d.pt, c.pt) < resolution || ((d.t_u - c.t_u).abs() < 1e-9 && (d.t_s - c.t_s).abs() < 1e-9)
        };
        if out.iter().rev().take_while(|d| c.t_u.abs() - d.t_u.abs() < 1e-6).any(|d| same(&d)) {
            continue;
        }
        out.push(c);
    }
    Ok(out)
}

/// Orbits of crossings under the map, each listed forward.
///
/// Near the fixed point the tolerance shrinks in proportion to the distance,
/// since consecutive iterates crowd together there.
fn orbits(map: &dyn PlanarMap, origin: Pt, cs: &[Crossing], tol: f64) -> Result<Vec<Vec<usize>>> {
    let cell = |p: Pt| ((p.0 / tol).floor() as i64, (p.1 / tol).floor() as i64);
    let mut grid: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, c) in cs.iter().enumerate() {
        grid.entry(cell(c.pt)).or_default().push(i);
    }
    let mut next = vec![None; cs.len()];
    let mut prev = vec![None; cs.len()];
    for (i, c) in cs.iter().enumerate() {
        let img = map.forward(c.pt);
        let radius = tol * geom::dist(img, origin).min(1.0);
        let (cx, cy) = cell(img);
        let best = (cx - 1..=cx + 1)
            .flat_map(|x| (cy - 1..=cy + 1).map(move |y| (x, y)))
            .filter_map(|k| grid.get(&k))
            .flatten()
            .copied()
            .map(|j| (geom::dist(cs[j].pt, img), j))
            .filter(|&(d, _)| d <= radius)
            .min_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((_, j)) = best {
            if let Some(other) = prev[j] {
                return Err(Error::Numerical(format!(
                    "crossings {other} and {i} both map onto {j}; tighten the match tolerance"
                )));
            }
            next[i] = Some(j);
            prev[j] = Some(i);
        }
    }
    let mut out = Vec::new();
    for start in (0..cs.len()).filter(|&i| prev[i].is_none()) {
        let mut chain = vec![start];
        while let Some(j) = next[*chain.last().expect("nonempty")] {
            chain.push(j);
        }
        out.push(chain);
    }
    Ok(out)
}

/// Member closest to the fixed point in the sense of `max(|t_u|, |t_s|)`.
fn centre(cs: &[Crossing], chain: &[usize]) -> usize {
    let key = |i: usize| cs[chain[i]].t_u.abs().max(cs[chain[i]].t_s.abs());
    (0..chain.len()).min_by(|&a, &b| key(a).total_cmp(&key(b))).expect("nonempty chain")
}

/// Assembles the tangle from grown branches: crossings, orbits under the map,
/// a symmetric window around each orbit's most central member, geometry.
pub fn extract_tangle(map: &dyn PlanarMap, fp: &FixedPoint, curves: &[BranchCurve], p: &TraceParams) -> Result<TraceResult> {
    let by_branch: BTreeMap<Branch, &BranchCurve> = curves.iter().map(|c| (c.branch, c)).collect();
    let mut crossings = Vec::new();
    for bu in [Branch::UPlus, Branch::UMinus] {
        for bs in [Branch::SPlus, Branch::SMinus] {
            if let (Some(u), Some(s)) = (by_branch.get(&bu), by_branch.get(&bs)) {
                crossings.extend(find_crossings(map, u, s)?);
            }
        }
    }
    let chains = orbits(map, fp.point, &crossings, p.match_tol)?;
    let extents: Vec<(usize, i64, i64)> = chains
        .iter()
        .map(|ch| {
            let z = centre(&crossings, ch);
            (z, z as i64, (ch.len() - 1 - z) as i64)
        })
        .collect();
    let window = match p.window {
        Some(k) => k,
        None => auto_window(&crossings, &chains, &extents),
    };
    let mut kept: Vec<(f64, usize)> = Vec::new();
    for (ci, &(z, back, fwd)) in extents.iter().enumerate() {
        if back >= window && fwd >= window {
            let c = crossings[chains[ci][z]];
            kept.push((c.t_u.abs(), ci));
        }
    }
    kept.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(_, ci) in &kept {
        let (z, _, _) = extents[ci];
        let members = &chains[ci][(z as i64 - window) as usize..=(z as i64 + window) as usize];
        if members.iter().all(|&i| crossings[i].sin < p.min_angle.sin()) {
            let c = crossings[chains[ci][z]];
            return Err(Error::Numerical(format!(
                "near-tangency of {} and {} at {:?}",
                c.unstable.name(),
                c.stable.name(),
                c.pt
            )));
        }
    }
    let mut points = Vec::new();
    for (n, &(_, ci)) in kept.iter().enumerate() {
        let (z, _, _) = extents[ci];
        let name = format!("h{}", n + 1);
        for k in -window..=window {
            let c = crossings[chains[ci][(z as i64 + k) as usize]];
            points.push(PointRecord {
                orbit: name.clone(),
                iterate: k,
                t_u: c.t_u,
                t_s: c.t_s,
                crossing: c.sign,
                a_u: Vec::new(),
                a_s: Vec::new(),
                mu: None,
            });
        }
    }
    let geometry = Geometry {
        polylines: curves.iter().map(|c| (c.branch, c.polyline())).collect(),
    };
    let mut tangle = Tangle::new(Surface::Plane, MapOrientation::Preserving, window, points, Vec::new(), Some(geometry))?;
    let (eu, es) = fp.eigenvectors;
    tangle.sigma01 = Some(if geom::cross(eu, es) > 0.0 { 1 } else { -1 });
    Ok(TraceResult {
        tangle,
        fixed_point: *fp,
        crossings,
        dropped: chains.len() - kept.len(),
        truncated: curves.iter().filter(|c| c.truncated).map(|c| (c.branch, c.length())).collect(),
    })
}

/// Largest window that every orbit centred inside the inner half of both
/// budgets can fill, so that no point near the fixed point is lost.
fn auto_window(cs: &[Crossing], chains: &[Vec<usize>], extents: &[(usize, i64, i64)]) -> i64 {
    let reach_u = cs.iter().map(|c| c.t_u.abs()).fold(0.0, f64::max);
    let reach_s = cs.iter().map(|c| c.t_s.abs()).fold(0.0, f64::max);
    chains
        .iter()
        .zip(extents)
        .filter(|(ch, (z, _, _))| {
            let c = cs[ch[*z]];
            c.t_u.abs() <= reach_u / 2.0 && c.t_s.abs() <= reach_s / 2.0
        })
        .map(|(_, &(_, b, f))| b.min(f))
        .min()
        .unwrap_or(0)
}

/// Fixed point, growth and extraction in one go.
pub fn trace(map: &dyn PlanarMap, guess: Pt, p: &TraceParams) -> Result<TraceResult> {
    let fp = super::map::find_fixed_point(map, guess)?;
    let curves = grow_all(map, &fp, &p.growth)?;
    extract_tangle(map, &fp, &curves, p)
}
