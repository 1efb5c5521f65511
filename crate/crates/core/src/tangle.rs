//! Combinatorial tangle model: homoclinic points stored by their parameters
//! along the unstable and stable manifolds, over a finite window of iterates.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Surface {
    Plane,
    Cylinder,
    Torus,
}

impl Surface {
    /// Length of the abelianized homotopy labels.
    pub fn h_rank(self) -> usize {
        match self {
            Surface::Plane => 0,
            Surface::Cylinder => 1,
            Surface::Torus => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Surface::Plane => "plane",
            Surface::Cylinder => "cylinder",
            Surface::Torus => "torus",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "plane" => Some(Surface::Plane),
            "cylinder" => Some(Surface::Cylinder),
            "torus" => Some(Surface::Torus),
            _ => None,
        }
    }
}

/// Whether the map preserves the orientation of both invariant manifolds or
/// reverses both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapOrientation {
    Preserving,
    Reversing,
}

impl MapOrientation {
    pub fn name(self) -> &'static str {
        match self {
            MapOrientation::Preserving => "preserving",
            MapOrientation::Reversing => "reversing",
        }
    }
}

/// One of the four branches of `W^u \ {x}` and `W^s \ {x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    UPlus,
    UMinus,
    SPlus,
    SMinus,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::UPlus, Branch::UMinus, Branch::SPlus, Branch::SMinus];

    pub fn name(self) -> &'static str {
        match self {
            Branch::UPlus => "u+",
            Branch::UMinus => "u-",
            Branch::SPlus => "s+",
            Branch::SMinus => "s-",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Branch::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn is_unstable(self) -> bool {
        matches!(self, Branch::UPlus | Branch::UMinus)
    }

    /// +1 for the positive-parameter branch, -1 otherwise.
    pub fn sign(self) -> f64 {
        match self {
            Branch::UPlus | Branch::SPlus => 1.0,
            Branch::UMinus | Branch::SMinus => -1.0,
        }
    }

    pub fn unstable(positive: bool) -> Self {
        if positive {
            Branch::UPlus
        } else {
            Branch::UMinus
        }
    }

    pub fn stable(positive: bool) -> Self {
        if positive {
            Branch::SPlus
        } else {
            Branch::SMinus
        }
    }

    /// The same branch with the roles of the manifolds exchanged.
    pub fn swapped(self) -> Self {
        match self {
            Branch::UPlus => Branch::SPlus,
            Branch::UMinus => Branch::SMinus,
            Branch::SPlus => Branch::UPlus,
            Branch::SMinus => Branch::UMinus,
        }
    }
}

/// A pair of branches `(W^u_±, W^s_±)`, written `u+s-` etc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchPair {
    pub u_positive: bool,
    pub s_positive: bool,
}

impl BranchPair {
    pub const ALL: [BranchPair; 4] = [
        BranchPair { u_positive: true, s_positive: true },
        BranchPair { u_positive: true, s_positive: false },
        BranchPair { u_positive: false, s_positive: true },
        BranchPair { u_positive: false, s_positive: false },
    ];

    pub fn of(t_u: f64, t_s: f64) -> Self {
        BranchPair {
            u_positive: t_u > 0.0,
            s_positive: t_s > 0.0,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let b = s.as_bytes();
        if b.len() != 4 || b[0] != b'u' || b[2] != b's' {
            return None;
        }
        let sign = |c: u8| match c {
            b'+' => Some(true),
            b'-' => Some(false),
            _ => None,
        };
        Some(BranchPair {
            u_positive: sign(b[1])?,
            s_positive: sign(b[3])?,
        })
    }
}

impl fmt::Display for BranchPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |p: bool| if p { '+' } else { '-' };
        write!(f, "u{}s{}", c(self.u_positive), c(self.s_positive))
    }
}

/// Reference to a stored point `p^n` by orbit name and iterate, written `p.n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointRef {
    pub orbit: String,
    pub iterate: i64,
}

impl PointRef {
    pub fn new(orbit: impl Into<String>, iterate: i64) -> Self {
        PointRef {
            orbit: orbit.into(),
            iterate,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let (orbit, it) = s.split_once('.')?;
        if !valid_orbit_name(orbit) {
            return None;
        }
        Some(PointRef::new(orbit, it.parse().ok()?))
    }
}

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.orbit, self.iterate)
    }
}

/// Identifier of a bigon between two stored points, `bigon:p.0-q.-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BigonId {
    pub from: PointRef,
    pub to: PointRef,
}

impl BigonId {
    pub fn parse(s: &str) -> Option<Self> {
        let body = s.strip_prefix("bigon:")?;
        let (orbit_p, rest) = body.split_once('.')?;
        let digits = rest
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '-')
            .map(|(i, _)| i)?;
        let n: i64 = rest[..digits].parse().ok()?;
        let to = PointRef::parse(&rest[digits + 1..])?;
        if !valid_orbit_name(orbit_p) {
            return None;
        }
        Some(BigonId {
            from: PointRef::new(orbit_p, n),
            to,
        })
    }
}

impl fmt::Display for BigonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bigon:{}-{}", self.from, self.to)
    }
}

pub fn valid_orbit_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub orbit: String,
    pub iterate: i64,
    pub t_u: f64,
    pub t_s: f64,
    pub crossing: i8,
    pub a_u: Vec<i64>,
    pub a_s: Vec<i64>,
    pub mu: Option<i64>,
}

impl PointRecord {
    pub fn reference(&self) -> PointRef {
        PointRef::new(self.orbit.clone(), self.iterate)
    }

    pub fn label(&self) -> Vec<i64> {
        self.a_u.iter().zip(&self.a_s).map(|(u, s)| u - s).collect()
    }

    pub fn is_contractible(&self) -> bool {
        self.a_u == self.a_s
    }

    pub fn branch_pair(&self) -> BranchPair {
        BranchPair::of(self.t_u, self.t_s)
    }
}

/// A periodic point of the map, used by the chaotic sign system.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPoint {
    pub name: String,
    pub period: u32,
    pub coords: Option<(f64, f64)>,
    pub containment: Option<Vec<BigonId>>,
}

/// Polylines for the grown branches. Each polyline starts at the fixed point
/// and points are located by arclength: `|t|` along the branch named by the
/// sign of `t`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Geometry {
    pub polylines: BTreeMap<Branch, Vec<(f64, f64)>>,
}

impl Geometry {
    pub fn polyline(&self, b: Branch) -> Option<&[(f64, f64)]> {
        self.polylines.get(&b).map(|v| v.as_slice())
    }

    /// Position at signed arclength `t` along `W^u` (`unstable`) or `W^s`.
    pub fn locate(&self, unstable: bool, t: f64) -> Option<(f64, f64)> {
        let b = if unstable {
            Branch::unstable(t > 0.0)
        } else {
            Branch::stable(t > 0.0)
        };
        crate::geom::point_at(self.polyline(b)?, t.abs())
    }
}

/// Equivalence class of a point under the action of the map's power.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId {
    pub orbit: String,
    pub residue: i64,
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.orbit, self.residue)
    }
}

#[derive(Debug, Clone)]
pub struct Tangle {
    pub surface: Surface,
    pub orientation: MapOrientation,
    pub window: i64,
    /// The tangle describes the action of `φ^power` on the stored points.
    pub power: i64,
    /// `sign det(γ̇_u(0), γ̇_s(0))` when known.
    pub sigma01: Option<i8>,
    pub marked: Vec<MarkedPoint>,
    pub geometry: Option<Geometry>,
    points: Vec<PointRecord>,
    index: HashMap<(String, i64), usize>,
}

impl PartialEq for Tangle {
    fn eq(&self, other: &Self) -> bool {
        self.surface == other.surface
            && self.orientation == other.orientation
            && self.window == other.window
            && self.power == other.power
            && self.sigma01 == other.sigma01
            && self.marked == other.marked
            && self.geometry == other.geometry
            && self.points == other.points
    }
}

impl Tangle {
    /// Builds a tangle, enforcing the structural invariants: label lengths,
    /// nonzero and pairwise distinct parameters, and complete windows.
    pub fn new(
        surface: Surface,
        orientation: MapOrientation,
        window: i64,
        mut points: Vec<PointRecord>,
        marked: Vec<MarkedPoint>,
        geometry: Option<Geometry>,
    ) -> Result<Self> {
        if window < 0 {
            return Err(Error::Invalid(format!("negative window {window}")));
        }
        let h = surface.h_rank();
        for p in &points {
            for tuple in [&p.a_u, &p.a_s] {
                if tuple.len() != h {
                    return Err(Error::LabelLength {
                        point: p.reference().to_string(),
                        expected: h,
                        found: tuple.len(),
                    });
                }
            }
            if p.t_u == 0.0 || p.t_s == 0.0 || !p.t_u.is_finite() || !p.t_s.is_finite() {
                return Err(Error::Invalid(format!(
                    "{} has a zero or non-finite parameter",
                    p.reference()
                )));
            }
            if p.crossing != 1 && p.crossing != -1 {
                return Err(Error::Invalid(format!("{} has crossing sign {}", p.reference(), p.crossing)));
            }
        }
        for (which, key) in [
            ("unstable", (|p: &PointRecord| p.t_u) as fn(&PointRecord) -> f64),
            ("stable", |p: &PointRecord| p.t_s),
        ] {
            let mut sorted: Vec<&PointRecord> = points.iter().collect();
            sorted.sort_by(|a, b| key(a).total_cmp(&key(b)));
            for w in sorted.windows(2) {
                if key(w[0]) == key(w[1]) {
                    return Err(Error::DuplicateParameter {
                        which,
                        value: key(w[0]),
                        first: w[0].reference().to_string(),
                        second: w[1].reference().to_string(),
                    });
                }
            }
        }
        points.sort_by(|a, b| (&a.orbit, a.iterate).cmp(&(&b.orbit, b.iterate)));
        let mut index = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert((p.orbit.clone(), p.iterate), i).is_some() {
                return Err(Error::Invalid(format!("{} listed twice", p.reference())));
            }
            if p.iterate.abs() > window {
                return Err(Error::Invalid(format!("{} lies outside window {window}", p.reference())));
            }
        }
        let orbits: BTreeSet<&str> = points.iter().map(|p| p.orbit.as_str()).collect();
        for o in orbits {
            for n in -window..=window {
                if !index.contains_key(&(o.to_string(), n)) {
                    return Err(Error::MissingIterate {
                        orbit: o.to_string(),
                        iterate: n,
                    });
                }
            }
        }
        Ok(Tangle {
            surface,
            orientation,
            window,
            power: 1,
            sigma01: None,
            marked,
            geometry,
            points,
            index,
        })
    }

    /// The tangle with no intersection points.
    pub fn empty(surface: Surface) -> Self {
        Tangle::new(surface, MapOrientation::Preserving, 0, Vec::new(), Vec::new(), None)
            .expect("empty tangle is valid")
    }

    pub fn points(&self) -> &[PointRecord] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &PointRecord {
        &self.points[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn id(&self, orbit: &str, iterate: i64) -> Option<usize> {
        self.index.get(&(orbit.to_string(), iterate)).copied()
    }

    pub fn lookup(&self, r: &PointRef) -> Option<usize> {
        self.id(&r.orbit, r.iterate)
    }

    pub fn orbits(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.points.iter().map(|p| p.orbit.as_str()).collect();
        set.into_iter().map(String::from).collect()
    }

    /// Orientation behaviour of `φ^power`.
    pub fn effective_orientation(&self) -> MapOrientation {
        if self.orientation == MapOrientation::Reversing && self.power % 2 != 0 {
            MapOrientation::Reversing
        } else {
            MapOrientation::Preserving
        }
    }

    /// Class of a point under the action of `φ^power`.
    pub fn class_of(&self, i: usize) -> ClassId {
        let p = &self.points[i];
        ClassId {
            orbit: p.orbit.clone(),
            residue: p.iterate.rem_euclid(self.power),
        }
    }

    /// Index of the chosen representative of `p`'s orbit class.
    pub fn representative(&self, c: &ClassId) -> Option<usize> {
        self.id(&c.orbit, c.residue)
    }

    /// Number of steps of `φ^power` from the representative of `p`'s class to `p`.
    pub fn class_shift(&self, i: usize) -> i64 {
        self.points[i].iterate.div_euclid(self.power)
    }

    /// Whether `r` and `p` are the same point on the universal cover when
    /// both are reached along lifted segments from `p`.
    pub fn lift_coincident(&self, p: usize, r: usize) -> bool {
        let (p, r) = (&self.points[p], &self.points[r]);
        (0..p.a_u.len()).all(|k| r.a_u[k] - p.a_u[k] == r.a_s[k] - p.a_s[k])
    }

    /// Whether `r` lies strictly inside both segments `]p,q[_u` and `]p,q[_s`.
    pub fn strictly_inside(&self, p: usize, q: usize, r: usize) -> bool {
        let (a, b, c) = (&self.points[p], &self.points[q], &self.points[r]);
        between(a.t_u, b.t_u, c.t_u) && between(a.t_s, b.t_s, c.t_s)
    }

    /// Whether `r` lies strictly inside both `]x,p[_u` and `]x,p[_s`.
    pub fn strictly_below(&self, p: usize, r: usize) -> bool {
        let (a, c) = (&self.points[p], &self.points[r]);
        between(0.0, a.t_u, c.t_u) && between(0.0, a.t_s, c.t_s)
    }

    /// Copy with the window shrunk to `k` (points with `|n| > k` dropped).
    pub fn restrict(&self, k: i64) -> Result<Tangle> {
        if k > self.window || k < 0 {
            return Err(Error::WindowTooSmall(format!(
                "cannot restrict window {} to {k}",
                self.window
            )));
        }
        let points = self
            .points
            .iter()
            .filter(|p| p.iterate.abs() <= k)
            .cloned()
            .collect();
        let mut t = Tangle::new(
            self.surface,
            self.orientation,
            k,
            points,
            self.marked.clone(),
            self.geometry.clone(),
        )?;
        t.power = self.power;
        t.sigma01 = self.sigma01;
        Ok(t)
    }

    /// The tangle of `φ^{-1}`: the manifolds exchange roles, iterates and
    /// gradings change sign.
    pub fn inverse(&self) -> Tangle {
        let points = self
            .points
            .iter()
            .map(|p| PointRecord {
                orbit: p.orbit.clone(),
                iterate: -p.iterate,
                t_u: p.t_s,
                t_s: p.t_u,
                crossing: -p.crossing,
                a_u: p.a_s.clone(),
                a_s: p.a_u.clone(),
                mu: p.mu.map(|m| -m),
            })
            .collect();
        let geometry = self.geometry.as_ref().map(|g| Geometry {
            polylines: g
                .polylines
                .iter()
                .map(|(b, v)| (b.swapped(), v.clone()))
                .collect(),
        });
        let mut t = Tangle::new(
            self.surface,
            self.orientation,
            self.window,
            points,
            self.marked.clone(),
            geometry,
        )
        .expect("inverse preserves structural invariants");
        t.power = self.power;
        t.sigma01 = self.sigma01.map(|s| -s);
        t.marked = self
            .marked
            .iter()
            .map(|m| MarkedPoint {
                containment: m.containment.as_ref().map(|list| {
                    list.iter()
                        .map(|b| BigonId {
                            from: PointRef::new(b.to.orbit.clone(), -b.to.iterate),
                            to: PointRef::new(b.from.orbit.clone(), -b.from.iterate),
                        })
                        .collect()
                }),
                ..m.clone()
            })
            .collect();
        t
    }

    /// The tangle of `φ^n`. Points are shared; classes become `⟨p^j⟩` for
    /// `j = 0..|n|-1`. Negative `n` passes through [`Tangle::inverse`].
    pub fn iterate(&self, n: i64) -> Result<Tangle> {
        if n == 0 {
            return Err(Error::Invalid("iterate by zero".into()));
        }
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let power = base.power * n.abs();
        if power > base.window {
            return Err(Error::WindowTooSmall(format!(
                "window {} cannot hold {power} representatives",
                base.window
            )));
        }
        let mut t = base;
        t.power = power;
        Ok(t)
    }

    pub(crate) fn set_points(&mut self, points: Vec<PointRecord>) -> Result<()> {
        let mut t = Tangle::new(
            self.surface,
            self.orientation,
            self.window,
            points,
            self.marked.clone(),
            self.geometry.clone(),
        )?;
        t.power = self.power;
        t.sigma01 = self.sigma01;
        *self = t;
        Ok(())
    }
}

pub(crate) fn between(a: f64, b: f64, c: f64) -> bool {
    if a < b {
        a < c && c < b
    } else {
        b < c && c < a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(orbit: &str, n: i64, t_u: f64, t_s: f64) -> PointRecord {
        PointRecord {
            orbit: orbit.into(),
            iterate: n,
            t_u,
            t_s,
            crossing: 1,
            a_u: vec![],
            a_s: vec![],
            mu: Some(-1),
        }
    }

    fn single(k: i64) -> Vec<PointRecord> {
        (-k..=k)
            .map(|n| pt("p", n, 2f64.powi(n as i32), 2f64.powi(-n as i32)))
            .collect()
    }

    #[test]
    fn bigon_id_round_trip() {
        for s in ["bigon:p.0-q.-1", "bigon:z_1.-3-q'.12"] {
            assert_eq!(BigonId::parse(s).unwrap().to_string(), s);
        }
        assert!(BigonId::parse("bigon:p0-q.1").is_none());
    }

    #[test]
    fn branch_pair_names() {
        for bp in BranchPair::ALL {
            assert_eq!(BranchPair::parse(&bp.to_string()), Some(bp));
        }
    }

    #[test]
    fn duplicate_parameter_rejected() {
        let mut pts = single(1);
        pts[0].t_u = pts[1].t_u;
        let err = Tangle::new(Surface::Plane, MapOrientation::Preserving, 1, pts, vec![], None)
            .unwrap_err();
        assert!(err.to_string().contains("duplicate unstable parameter"));
    }

    #[test]
    fn missing_iterate_rejected() {
        let mut pts = single(2);
        pts.remove(0);
        let err = Tangle::new(Surface::Plane, MapOrientation::Preserving, 2, pts, vec![], None)
            .unwrap_err();
        assert!(matches!(err, Error::MissingIterate { .. }));
    }

    #[test]
    fn inverse_is_involution() {
        let t = Tangle::new(Surface::Plane, MapOrientation::Preserving, 2, single(2), vec![], None)
            .unwrap();
        assert_eq!(t.inverse().inverse(), t);
        assert_eq!(t.inverse().point(0).mu, Some(1));
    }

    #[test]
    fn iterate_classes() {
        let t = Tangle::new(Surface::Plane, MapOrientation::Preserving, 3, single(3), vec![], None)
            .unwrap();
        let t3 = t.iterate(3).unwrap();
        let classes: BTreeSet<ClassId> = (0..t3.len()).map(|i| t3.class_of(i)).collect();
        assert_eq!(classes.len(), 3);
        assert!(t.iterate(4).is_err());
    }
}
