//! `(r, s)`-moves: creation and annihilation of a pair of intersection
//! families adjacent in both orders, their classification, and the chain maps
//! relating the complexes before and after a primary move.
//!
//! Script lines:
//!
//! ```text
//! mv create u+s+ after_u=p.0 after_s=x sign=+1 label=()
//! mv create u+s+ after_u=p.0 after_s=p.1 sign=+1 label=(1) order=parallel names=s,r
//! mv annihilate u+s+ after_u=p.0 after_s=x
//! ```
//!
//! The created pair occupies the open slot following `after_u` along the
//! unstable branch and the slot following `after_s` along the stable branch
//! (`x` names the fixed point). Inside a slot the two points sit at one and
//! two thirds of the way out. The point nearer `x` along the unstable branch
//! comes first: it gets the first of `names`, crossing `sign` and grading `mu`
//! when supplied. With the default `order=crossed` it is the farther of the
//! two along the stable branch; `order=parallel` keeps it nearer on both.
//! `label` is `a_u − a_s`; the stable labels are inherited from `after_s`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::chain::{quotient_boundary, Analysis, SignKind, Variant};
use crate::classify::{classify, validate, Classification, PointKind};
use crate::error::{Error, Result};
use crate::grading::{bigon_sigma, resolve_grading};
use crate::homology::{homology_of, Homology};
use crate::matrix::Matrix;
use crate::tangle::{valid_orbit_name, BranchPair, ClassId, PointRecord, PointRef, Tangle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Create,
    Annihilate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairOrder {
    #[default]
    Crossed,
    Parallel,
}

/// `None` stands for the fixed point.
pub type Anchor = Option<PointRef>;

#[derive(Debug, Clone, PartialEq)]
pub struct MoveSpec {
    pub direction: Direction,
    pub pair: BranchPair,
    pub after_u: Anchor,
    pub after_s: Anchor,
    pub sign: Option<i8>,
    pub label: Option<Vec<i64>>,
    pub mu: Option<i64>,
    pub names: Option<(String, String)>,
    pub order: PairOrder,
}

fn anchor_text(a: &Anchor) -> String {
    a.as_ref().map_or_else(|| "x".to_string(), |r| r.to_string())
}

fn tuple_text(v: &[i64]) -> String {
    let inner: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", inner.join(","))
}

impl fmt::Display for MoveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Create => "create",
            Direction::Annihilate => "annihilate",
        };
        write!(
            f,
            "mv {dir} {} after_u={} after_s={}",
            self.pair,
            anchor_text(&self.after_u),
            anchor_text(&self.after_s)
        )?;
        if let Some(s) = self.sign {
            write!(f, " sign={}", if s > 0 { "+1" } else { "-1" })?;
        }
        if let Some(l) = &self.label {
            write!(f, " label={}", tuple_text(l))?;
        }
        if let Some(m) = self.mu {
            write!(f, " mu={m}")?;
        }
        if let Some((a, b)) = &self.names {
            write!(f, " names={a},{b}")?;
        }
        if self.order == PairOrder::Parallel {
            write!(f, " order=parallel")?;
        }
        Ok(())
    }
}

impl MoveSpec {
    /// The annihilation undoing a creation (and vice versa, minus the
    /// creation data, which must then be supplied).
    pub fn inverse(&self) -> MoveSpec {
        MoveSpec {
            direction: match self.direction {
                Direction::Create => Direction::Annihilate,
                Direction::Annihilate => Direction::Create,
            },
            ..self.clone()
        }
    }
}

fn parse_tuple(s: &str) -> Option<Vec<i64>> {
    let inner = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(s);
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|x| x.trim().parse().ok()).collect()
}

fn parse_anchor(s: &str) -> Option<Anchor> {
    if s == "x" {
        Some(None)
    } else {
        PointRef::parse(s).map(Some)
    }
}

/// Parses a move script; blank lines and `#` comments are skipped.
pub fn parse_script(text: &str) -> Result<Vec<MoveSpec>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_line(ln + 1, line)?);
    }
    Ok(out)
}

fn parse_line(ln: usize, line: &str) -> Result<MoveSpec> {
    let mut toks = Vec::new();
    let mut col = 0;
    for word in line.split_whitespace() {
        let at = line[col..].find(word).expect("token in line") + col;
        toks.push((word, at + 1));
        col = at + word.len();
    }
    let err = |c: usize, msg: String| Error::syntax(ln, c, msg);
    let end = line.trim_end().len() + 1;
    let tok = |i: usize, what: &str| toks.get(i).copied().ok_or_else(|| err(end, format!("expected {what}")));
    let (kw, c0) = tok(0, "`mv`")?;
    if kw != "mv" {
        return Err(err(c0, format!("expected `mv`, found `{kw}`")));
    }
    let (d, c1) = tok(1, "create or annihilate")?;
    let direction = match d {
        "create" => Direction::Create,
        "annihilate" => Direction::Annihilate,
        _ => return Err(err(c1, format!("unknown move direction `{d}`"))),
    };
    let (bp, c2) = tok(2, "branch pair")?;
    let pair = BranchPair::parse(bp).ok_or_else(|| err(c2, format!("bad branch pair `{bp}`")))?;
    let mut fields: BTreeMap<&str, (&str, usize)> = BTreeMap::new();
    for &(w, c) in &toks[3..] {
        let (k, v) = w.split_once('=').ok_or_else(|| err(c, format!("expected key=value, found `{w}`")))?;
        if fields.insert(k, (v, c)).is_some() {
            return Err(err(c, format!("repeated field `{k}`")));
        }
    }
    let mut take = |k: &str| fields.remove(k);
    let anchor = |f: Option<(&str, usize)>, k: &str| -> Result<Anchor> {
        let (v, c) = f.ok_or_else(|| err(end, format!("missing {k}=")))?;
        parse_anchor(v).ok_or_else(|| err(c, format!("bad point `{v}`")))
    };
    let after_u = anchor(take("after_u"), "after_u")?;
    let after_s = anchor(take("after_s"), "after_s")?;
    let sign = match take("sign") {
        Some((v, c)) => Some(match v {
            "+1" | "1" => 1,
            "-1" => -1,
            _ => return Err(err(c, format!("sign must be ±1, found `{v}`"))),
        }),
        None => None,
    };
    let label = match take("label") {
        Some((v, c)) => Some(parse_tuple(v).ok_or_else(|| err(c, format!("bad tuple `{v}`")))?),
        None => None,
    };
    let mu = match take("mu") {
        Some((v, c)) => Some(v.parse().map_err(|_| err(c, format!("bad grading `{v}`")))?),
        None => None,
    };
    let names = match take("names") {
        Some((v, c)) => {
            let (a, b) = v
                .split_once(',')
                .filter(|(a, b)| valid_orbit_name(a) && valid_orbit_name(b) && a != b)
                .ok_or_else(|| err(c, format!("names must be two distinct orbit names, found `{v}`")))?;
            Some((a.to_string(), b.to_string()))
        }
        None => None,
    };
    let order = match take("order") {
        Some(("crossed", _)) | None => PairOrder::Crossed,
        Some(("parallel", _)) => PairOrder::Parallel,
        Some((v, c)) => return Err(err(c, format!("order must be crossed or parallel, found `{v}`"))),
    };
    if let Some((k, (_, c))) = fields.into_iter().next() {
        return Err(err(c, format!("unknown field `{k}`")));
    }
    if direction == Direction::Create && (sign.is_none() || label.is_none()) {
        return Err(err(end, "create needs sign= and label=".into()));
    }
    Ok(MoveSpec {
        direction,
        pair,
        after_u,
        after_s,
        sign,
        label,
        mu,
        names,
        order,
    })
}

/// Points on one branch of one manifold, ordered away from the fixed point.
fn branch_order(t: &Tangle, unstable: bool, positive: bool) -> Vec<usize> {
    let param = |i: usize| {
        let p = t.point(i);
        if unstable {
            p.t_u
        } else {
            p.t_s
        }
    };
    let mut v: Vec<usize> = (0..t.len()).filter(|&i| (param(i) > 0.0) == positive).collect();
    v.sort_by(|&a, &b| param(a).abs().total_cmp(&param(b).abs()));
    v
}

fn param(t: &Tangle, i: usize, unstable: bool) -> f64 {
    let p = t.point(i);
    if unstable {
        p.t_u
    } else {
        p.t_s
    }
}

fn shifted(r: &PointRef, n: i64) -> PointRef {
    PointRef::new(r.orbit.clone(), r.iterate + n)
}

/// Slot bounds at iterate 0: the anchor (`None` = x) and its successor
/// (`None` = beyond the last stored point).
struct Slot {
    unstable: bool,
    positive: bool,
    lo: Anchor,
    hi: Option<PointRef>,
}

impl Slot {
    fn new(t: &Tangle, unstable: bool, positive: bool, anchor: &Anchor) -> Result<Slot> {
        let order = branch_order(t, unstable, positive);
        let pos = match anchor {
            None => None,
            Some(r) => {
                let i = t.lookup(r).ok_or_else(|| Error::Move(format!("no point {r}")))?;
                let k = order.iter().position(|&j| j == i).ok_or_else(|| {
                    Error::Move(format!(
                        "{r} is not on the {} branch of the {} manifold",
                        if positive { "positive" } else { "negative" },
                        if unstable { "unstable" } else { "stable" }
                    ))
                })?;
                Some(k)
            }
        };
        let next = pos.map_or(0, |k| k + 1);
        Ok(Slot {
            unstable,
            positive,
            lo: anchor.clone(),
            hi: order.get(next).map(|&j| t.point(j).reference()),
        })
    }

    /// Absolute parameter bounds of the slot carried to iterate `n`.
    fn bounds(&self, t: &Tangle, n: i64) -> Result<(bool, f64, f64)> {
        let find = |r: &PointRef| t.lookup(&shifted(r, n));
        let lo = match &self.lo {
            None => Some(None),
            Some(r) => find(r).map(Some),
        };
        let hi = self.hi.as_ref().map(find);
        let reversing_flip = t.orientation == crate::tangle::MapOrientation::Reversing && n.rem_euclid(2) == 1;
        let positive = match (&lo, &hi) {
            (Some(Some(i)), _) | (_, Some(Some(i))) => param(t, *i, self.unstable) > 0.0,
            _ => self.positive != reversing_flip,
        };
        let order = branch_order(t, self.unstable, positive);
        let abs = |i: usize| param(t, i, self.unstable).abs();
        let pos_of = |i: usize| order.iter().position(|&j| j == i).expect("point on its branch");
        let (lo_v, hi_v) = match (lo, hi) {
            (Some(lo), hi) => {
                let k = lo.map_or(0, |i| pos_of(i) + 1);
                let lo_v = lo.map_or(0.0, abs);
                let succ = order.get(k).copied();
                match hi {
                    Some(Some(h)) if succ != Some(h) => {
                        return Err(Error::Move(format!(
                            "insertion slot is not preserved at iterate {n}: the move would overlap other iterates"
                        )))
                    }
                    _ => {}
                }
                let hi_v = match succ {
                    Some(j) => abs(j),
                    None if lo_v > 0.0 => 2.0 * lo_v,
                    None => return Err(Error::Move(format!("empty branch at iterate {n}"))),
                };
                (lo_v, hi_v)
            }
            (None, Some(Some(h))) => {
                let k = pos_of(h);
                let lo_v = if k == 0 { 0.0 } else { abs(order[k - 1]) };
                (lo_v, abs(h))
            }
            (None, _) => {
                let beyond = self.lo.as_ref().map_or(0, |r| r.iterate + n);
                let far = (beyond > t.window) == self.unstable;
                match (far, order.first(), order.last()) {
                    (true, _, Some(&j)) => (abs(j), 2.0 * abs(j)),
                    (false, Some(&j), _) => (0.0, abs(j)),
                    _ => return Err(Error::Move(format!("insertion slot leaves the window at iterate {n}"))),
                }
            }
        };
        Ok((positive, lo_v, hi_v))
    }
}

fn fresh_names(t: &Tangle) -> (String, String) {
    let taken: BTreeSet<String> = t.orbits().into_iter().collect();
    (1..)
        .map(|k| (format!("r{k}"), format!("s{k}")))
        .find(|(a, b)| !taken.contains(a) && !taken.contains(b))
        .expect("unbounded supply")
}

fn sgn(x: f64) -> i64 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

/// `μ(target)` from a graded neighbour across the bigon joining them.
fn index_across(t: &Tangle, sigma: i8, from: usize, mu_from: i64, to: usize) -> i64 {
    let (a, b) = (t.point(from), t.point(to));
    let p = sgn(b.t_u - a.t_u) * sgn(b.t_s - a.t_s);
    let parity = if mu_from.rem_euclid(2) == 0 { 1 } else { -1 };
    mu_from - sigma as i64 * parity * p
}

/// Whether `p` and `q` are neighbours in both orders.
fn adjacent(t: &Tangle, p: usize, q: usize) -> bool {
    let (a, b) = (t.point(p), t.point(q));
    if a.branch_pair() != b.branch_pair() {
        return false;
    }
    !(0..t.len()).any(|r| {
        r != p
            && r != q
            && (crate::tangle::between(a.t_u, b.t_u, t.point(r).t_u)
                || crate::tangle::between(a.t_s, b.t_s, t.point(r).t_s))
    })
}

/// Applies a move to every iterate in the window. Geometry is discarded and
/// gradings of existing orbits are frozen into the point records.
pub fn apply_move(t: &Tangle, spec: &MoveSpec) -> Result<Tangle> {
    match spec.direction {
        Direction::Create => create(t, spec),
        Direction::Annihilate => annihilate(t, spec),
    }
}

fn frozen_points(t: &Tangle) -> Vec<PointRecord> {
    let grading = resolve_grading(t, &classify(t)).ok();
    t.points()
        .iter()
        .map(|p| {
            let mut p = p.clone();
            if p.mu.is_none() {
                p.mu = grading.as_ref().and_then(|g| g.mu.get(&p.orbit).copied());
            }
            p
        })
        .collect()
}

fn rebuild(t: &Tangle, points: Vec<PointRecord>) -> Result<Tangle> {
    let mut out = t.clone();
    out.geometry = None;
    out.set_points(points)?;
    Ok(out)
}

fn create(t: &Tangle, spec: &MoveSpec) -> Result<Tangle> {
    let sign = spec.sign.ok_or_else(|| Error::Move("create needs a crossing sign".into()))?;
    let label = spec.label.clone().ok_or_else(|| Error::Move("create needs a label".into()))?;
    let h = t.surface.h_rank();
    if label.len() != h {
        return Err(Error::LabelLength {
            point: "move label".into(),
            expected: h,
            found: label.len(),
        });
    }
    let (first, second) = spec.names.clone().unwrap_or_else(|| fresh_names(t));
    for n in [&first, &second] {
        if t.id(n, 0).is_some() {
            return Err(Error::Move(format!("orbit {n} already exists")));
        }
    }
    let a_s = match &spec.after_s {
        None => vec![0; h],
        Some(r) => t
            .lookup(r)
            .map(|i| t.point(i).a_s.clone())
            .ok_or_else(|| Error::Move(format!("no point {r}")))?,
    };
    let a_u: Vec<i64> = a_s.iter().zip(&label).map(|(s, l)| s + l).collect();
    let su = Slot::new(t, true, spec.pair.u_positive, &spec.after_u)?;
    let ss = Slot::new(t, false, spec.pair.s_positive, &spec.after_s)?;
    let mut points = frozen_points(t);
    for n in -t.window..=t.window {
        let (pu, lo_u, hi_u) = su.bounds(t, n)?;
        let (ps, lo_s, hi_s) = ss.bounds(t, n)?;
        let at = |lo: f64, hi: f64, frac: f64, pos: bool| {
            let v = lo + (hi - lo) * frac;
            if pos {
                v
            } else {
                -v
            }
        };
        let (s_first, s_second) = match spec.order {
            PairOrder::Crossed => (2.0 / 3.0, 1.0 / 3.0),
            PairOrder::Parallel => (1.0 / 3.0, 2.0 / 3.0),
        };
        for (name, fu, fs, c) in [(&first, 1.0 / 3.0, s_first, sign), (&second, 2.0 / 3.0, s_second, -sign)] {
            points.push(PointRecord {
                orbit: name.clone(),
                iterate: n,
                t_u: at(lo_u, hi_u, fu, pu),
                t_s: at(lo_s, hi_s, fs, ps),
                crossing: c,
                a_u: a_u.clone(),
                a_s: a_s.clone(),
                mu: None,
            });
        }
    }
    let mut out = rebuild(t, points.clone())?;
    if label.iter().all(|&l| l == 0) {
        let mu = match spec.mu {
            Some(m) => m,
            None => infer_index(t, &out, &first, &second)?,
        };
        let a0 = out.id(&first, 0).expect("created");
        let b0 = out.id(&second, 0).expect("created");
        let sigma = sigma_of(t)?;
        let expected = if mu.rem_euclid(2) == 0 { sigma } else { -sigma };
        if sign != expected {
            return Err(Error::Move(format!(
                "sign={sign:+} contradicts the index {mu} of {first}; the finger needs sign={expected:+}"
            )));
        }
        let mu_b = index_across(&out, sigma, a0, mu, b0);
        for p in points.iter_mut() {
            if p.orbit == first {
                p.mu = Some(mu);
            } else if p.orbit == second {
                p.mu = Some(mu_b);
            }
        }
        out = rebuild(t, points)?;
    }
    let report = validate(&out);
    if let Some(e) = report.errors.first() {
        return Err(Error::Move(format!("move breaks the tangle: {e}")));
    }
    Ok(out)
}

fn sigma_of(t: &Tangle) -> Result<i8> {
    let class = classify(t);
    let g = resolve_grading(t, &class).ok();
    g.and_then(|g| bigon_sigma(t, &class, &g))
        .or(t.sigma01)
        .ok_or_else(|| Error::Move("σ₀₁ unknown: supply mu= for the created pair".into()))
}

/// Grading of the first created point from a graded contractible neighbour
/// adjacent in both orders to either created point.
fn infer_index(before: &Tangle, after: &Tangle, first: &str, second: &str) -> Result<i64> {
    let sigma = sigma_of(before)?;
    let grading = resolve_grading(before, &classify(before)).ok();
    let a0 = after.id(first, 0).expect("created");
    let b0 = after.id(second, 0).expect("created");
    let mut found: Option<i64> = None;
    for c in 0..after.len() {
        let cp = after.point(c);
        if cp.orbit == first || cp.orbit == second || !cp.is_contractible() {
            continue;
        }
        let Some(mu_c) = cp.mu.or_else(|| grading.as_ref().and_then(|g| g.mu.get(&cp.orbit).copied())) else {
            continue;
        };
        for (target, is_first) in [(a0, true), (b0, false)] {
            if !after.lift_coincident(c, target) || !adjacent(after, c, target) {
                continue;
            }
            let mut mu = index_across(after, sigma, c, mu_c, target);
            if !is_first {
                mu = index_across(after, sigma, b0, mu, a0);
            }
            match found {
                Some(m) if m != mu => {
                    return Err(Error::Move(format!(
                        "neighbours disagree on the grading of {first}: {m} and {mu}"
                    )))
                }
                _ => found = Some(mu),
            }
        }
    }
    found.ok_or_else(|| Error::Move(format!("no graded neighbour fixes the grading of {first}; supply mu=")))
}

fn annihilate(t: &Tangle, spec: &MoveSpec) -> Result<Tangle> {
    let following = |unstable: bool, positive: bool, anchor: &Anchor| -> Result<Vec<usize>> {
        let order = branch_order(t, unstable, positive);
        let start = match anchor {
            None => 0,
            Some(r) => {
                let i = t.lookup(r).ok_or_else(|| Error::Move(format!("no point {r}")))?;
                order
                    .iter()
                    .position(|&j| j == i)
                    .ok_or_else(|| Error::Move(format!("{r} is not on the requested branch")))?
                    + 1
            }
        };
        let mut v: Vec<usize> = order.iter().skip(start).take(2).copied().collect();
        v.sort();
        Ok(v)
    };
    let u = following(true, spec.pair.u_positive, &spec.after_u)?;
    let s = following(false, spec.pair.s_positive, &spec.after_s)?;
    if u.len() != 2 || u != s {
        return Err(Error::Move("no pair adjacent in both orders after the anchors".into()));
    }
    let (a, b) = (t.point(u[0]), t.point(u[1]));
    if a.orbit == b.orbit || a.iterate != b.iterate || a.crossing == b.crossing || a.label() != b.label() {
        return Err(Error::Move(format!(
            "{} and {} do not form an annihilable pair",
            a.reference(),
            b.reference()
        )));
    }
    let gone = [a.orbit.clone(), b.orbit.clone()];
    for n in -t.window..=t.window {
        let (i, j) = (t.id(&gone[0], n).expect("window"), t.id(&gone[1], n).expect("window"));
        if !adjacent(t, i, j) {
            return Err(Error::Move(format!("{} and {} are not adjacent at iterate {n}", gone[0], gone[1])));
        }
    }
    let points = t.points().iter().filter(|p| !gone.contains(&p.orbit)).cloned().collect();
    let mut out = t.clone();
    out.set_points(points)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    Primary,
    Mixed { flips: usize },
    Secondary,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveKind::Primary => f.write_str("primary"),
            MoveKind::Mixed { flips } => write!(f, "mixed ({flips} flips)"),
            MoveKind::Secondary => f.write_str("secondary"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveClassification {
    pub kind: MoveKind,
    /// The pair, larger tangle's orbit names.
    pub pair: (String, String),
    /// Orbits other than the pair whose primary status differs.
    pub flipped: Vec<String>,
}

fn primary_orbits(c: &Classification) -> BTreeSet<String> {
    c.by_orbit.iter().filter(|(_, c)| c.primary).map(|(o, _)| o.clone()).collect()
}

/// Compares the primary sets on either side of a single move, in either
/// direction.
pub fn classify_move(before: &Tangle, after: &Tangle) -> Result<MoveClassification> {
    let ob: BTreeSet<String> = before.orbits().into_iter().collect();
    let oa: BTreeSet<String> = after.orbits().into_iter().collect();
    let created: Vec<String> = oa.difference(&ob).cloned().collect();
    let removed: Vec<String> = ob.difference(&oa).cloned().collect();
    let (big, pair) = match (created.len(), removed.len()) {
        (2, 0) => (after, created),
        (0, 2) => (before, removed),
        _ => return Err(Error::Move("tangles do not differ by one pair of orbits".into())),
    };
    let (cb, ca) = (classify(before), classify(after));
    let (pb, pa) = (primary_orbits(&cb), primary_orbits(&ca));
    let flipped: Vec<String> = pb.symmetric_difference(&pa).filter(|o| !pair.contains(o)).cloned().collect();
    let cbig = classify(big);
    let new_primary = pair.iter().filter(|o| cbig.by_orbit[*o].kind() == PointKind::Primary).count();
    let kind = match new_primary {
        2 if flipped.is_empty() => MoveKind::Primary,
        0 if flipped.is_empty() => MoveKind::Secondary,
        _ => MoveKind::Mixed { flips: flipped.len() },
    };
    Ok(MoveClassification {
        kind,
        pair: (pair[0].clone(), pair[1].clone()),
        flipped,
    })
}

/// Chain maps between the complexes before (`𝔡`) and after (`𝔡'`) a primary
/// creation of `⟨r⟩, ⟨s⟩` with `μ(r, s) = 1`, on the direct sum of all degrees.
#[derive(Debug, Clone)]
pub struct MoveMaps {
    pub before: Vec<ClassId>,
    pub after: Vec<ClassId>,
    pub r: String,
    pub s: String,
    pub d: Matrix<i64>,
    pub d_after: Matrix<i64>,
    pub f: Matrix<i64>,
    pub g: Matrix<i64>,
    pub h: Matrix<i64>,
    /// Identities that failed, empty when all hold.
    pub failures: Vec<String>,
}

/// Flattens a graded boundary into one matrix on `gens` (degree-major).
fn total_boundary(c: &crate::chain::ChainComplex<i64>) -> (Vec<ClassId>, Matrix<i64>) {
    let mut gens = Vec::new();
    let mut offset = BTreeMap::new();
    for (&k, v) in &c.generators {
        offset.insert(k, gens.len());
        gens.extend(v.iter().cloned());
    }
    let mut d = Matrix::zeros(gens.len(), gens.len());
    for (&k, m) in &c.boundaries {
        let (Some(&co), Some(&ro)) = (offset.get(&k), offset.get(&(k - 1))) else { continue };
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                d[(ro + i, co + j)] = m[(i, j)];
            }
        }
    }
    (gens, d)
}

pub fn primary_move_maps(before: &Tangle, after: &Tangle) -> Result<MoveMaps> {
    let class = classify_move(before, after)?;
    if class.kind != MoveKind::Primary || after.len() < before.len() {
        return Err(Error::Move(format!("expected a primary creation, found a {} move", class.kind)));
    }
    let (ab, aa) = (Analysis::new(before.clone())?, Analysis::new(after.clone())?);
    let (gb, d) = total_boundary(&quotient_boundary(&ab, Variant::Primary, SignKind::M)?);
    let (ga, d2) = total_boundary(&quotient_boundary(&aa, Variant::Primary, SignKind::M)?);
    let (x, y) = class.pair.clone();
    let (mx, my) = (aa.grading.mu[&x], aa.grading.mu[&y]);
    let (r, s) = match mx - my {
        1 => (x, y),
        -1 => (y, x),
        _ => return Err(Error::Theorem(format!("created pair has index difference {}", mx - my))),
    };
    let mut failures = Vec::new();
    let t = &aa.tangle;
    for n in -t.window..=t.window {
        if n == 0 {
            continue;
        }
        let (Some(ri), Some(si)) = (t.id(&r, 0), t.id(&s, n)) else { continue };
        if aa.bigon(ri, si).is_some() {
            failures.push(format!("m'({r}, {s}^{n}) ≠ 0"));
        }
    }
    let pos = |gens: &[ClassId], o: &str| gens.iter().position(|c| c.orbit == o && c.residue == 0);
    let (ri, si) = (pos(&ga, &r).expect("generator"), pos(&ga, &s).expect("generator"));
    let eps = d2[(si, ri)];
    if eps.abs() != 1 {
        return Err(Error::Theorem(format!("m'({r}, {s}) = {eps}, expected ±1")));
    }
    let into: Vec<usize> = gb.iter().map(|c| ga.iter().position(|x| x == c).expect("old generator survives")).collect();
    let (nb, na) = (gb.len(), ga.len());
    let mut pi = Matrix::zeros(nb, na);
    let mut inc = Matrix::zeros(na, nb);
    for (i, &j) in into.iter().enumerate() {
        pi[(i, j)] = 1;
        inc[(j, i)] = 1;
    }
    let mut f = pi.clone();
    for i in 0..nb {
        f[(i, si)] = -eps * (0..na).map(|k| pi[(i, k)] * d2[(k, ri)]).sum::<i64>();
    }
    let mut g = inc.clone();
    for (j, &jj) in into.iter().enumerate() {
        g[(ri, j)] -= eps * d2[(si, jj)];
    }
    let mut h = Matrix::zeros(na, na);
    h[(ri, si)] = -eps;
    let check = |name: &str, lhs: Matrix<i64>, rhs: Matrix<i64>, failures: &mut Vec<String>| {
        if lhs != rhs {
            failures.push(name.to_string());
        }
    };
    check("f𝔡' = 𝔡f", &f * &d2, &d * &f, &mut failures);
    check("g𝔡 = 𝔡'g", &g * &d, &d2 * &g, &mut failures);
    check("f∘g = Id", &f * &g, Matrix::identity(nb), &mut failures);
    check(
        "g∘f − Id = h𝔡' + 𝔡'h",
        &(&g * &f) - &Matrix::identity(na),
        &(&h * &d2) + &(&d2 * &h),
        &mut failures,
    );
    Ok(MoveMaps {
        before: gb,
        after: ga,
        r,
        s,
        d,
        d_after: d2,
        f,
        g,
        h,
        failures,
    })
}

#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub before: Homology,
    pub after: Homology,
    pub csi: (bool, bool),
    pub classification: Option<MoveClassification>,
    /// For secondary moves: whether the boundary matrices coincide.
    pub boundaries_identical: Option<bool>,
}

impl InvarianceReport {
    pub fn invariant(&self) -> bool {
        self.before.same_groups(&self.after) && self.boundaries_identical != Some(false)
    }
}

/// Primary homology on both sides. The tangles need not differ by one move;
/// when they do, the move is classified as well.
pub fn invariance_check(before: &Tangle, after: &Tangle) -> Result<InvarianceReport> {
    let (ab, aa) = (Analysis::new(before.clone())?, Analysis::new(after.clone())?);
    let (cb, ca) = (
        quotient_boundary(&ab, Variant::Primary, SignKind::M)?,
        quotient_boundary(&aa, Variant::Primary, SignKind::M)?,
    );
    let classification = classify_move(before, after).ok();
    let boundaries_identical = classification
        .as_ref()
        .filter(|c| c.kind == MoveKind::Secondary)
        .map(|_| cb.generators == ca.generators && cb.boundaries == ca.boundaries);
    Ok(InvarianceReport {
        before: homology_of(&cb)?,
        after: homology_of(&ca)?,
        csi: (validate(before).csi, validate(after).csi),
        classification,
        boundaries_identical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tgl;

    fn pair_tangle() -> Tangle {
        let mut s = String::from("surface plane\norientation preserving\nwindow 3\nsigma +1\n");
        for n in -3i32..=3 {
            let (pu, ps) = (2f64.powi(n), 2f64.powi(-n));
            s += &format!("pt p {n} {pu} {ps} -1 () () mu=-1\n");
            s += &format!("pt q {n} {} {} +1 () () mu=-2\n", 1.5 * pu, 0.75 * ps);
        }
        tgl::parse(&s).unwrap()
    }

    #[test]
    fn script_round_trip() {
        let text = "mv create u+s- after_u=p.0 after_s=x sign=-1 label=(1,0) mu=2 names=a,b order=parallel\n";
        let m = parse_script(text).unwrap();
        assert_eq!(format!("{}\n", m[0]), text);
        assert_eq!(m[0].after_s, None);
    }

    #[test]
    fn script_errors() {
        let e = parse_script("mv create u+s+ after_u=p.0 after_s=x sign=2 label=()").unwrap_err();
        assert!(matches!(e, Error::Syntax { line: 1, column: 38, .. }), "{e:?}");
        assert!(parse_script("mv create u+s+ after_u=p.0 after_s=x").is_err());
        assert!(parse_script("mv annihilate u+s+ after_u=p.0 after_s=x bogus=1").is_err());
    }

    #[test]
    fn create_then_annihilate_restores() {
        let t = pair_tangle();
        let spec = &parse_script("mv create u+s+ after_u=q.0 after_s=p.1 sign=-1 label=()").unwrap()[0];
        let after = apply_move(&t, spec).unwrap();
        assert_eq!(after.len(), t.len() + 2 * 7);
        let back = apply_move(&after, &spec.inverse()).unwrap();
        assert_eq!(back.points().len(), t.points().len());
        for (a, b) in back.points().iter().zip(t.points()) {
            assert_eq!((a.t_u, a.t_s, &a.orbit), (b.t_u, b.t_s, &b.orbit));
        }
    }

    #[test]
    fn finger_move_is_primary_with_valid_maps() {
        let t = pair_tangle();
        let spec = &parse_script("mv create u+s+ after_u=q.0 after_s=p.1 sign=-1 label=()").unwrap()[0];
        let after = apply_move(&t, spec).unwrap();
        let c = classify_move(&t, &after).unwrap();
        assert_eq!(c.kind, MoveKind::Primary);
        let maps = primary_move_maps(&t, &after).unwrap();
        assert!(maps.failures.is_empty(), "{:?}", maps.failures);
        assert!(invariance_check(&t, &after).unwrap().invariant());
    }

    #[test]
    fn occupied_anchor_rejected() {
        let t = pair_tangle();
        let spec = &parse_script("mv create u+s+ after_u=zz.0 after_s=x sign=+1 label=()").unwrap()[0];
        assert!(matches!(apply_move(&t, spec), Err(Error::Move(_))));
        let spec = &parse_script("mv annihilate u+s+ after_u=p.0 after_s=x").unwrap()[0];
        assert!(matches!(apply_move(&t, spec), Err(Error::Move(_))));
    }
}
