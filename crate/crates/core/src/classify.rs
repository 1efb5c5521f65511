//! Point classification (primary, semi-primary, secondary), tangle invariant
//! checks and frames.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::tangle::{BranchPair, MapOrientation, PointRef, Tangle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointKind {
    Primary,
    /// Semi-primary with a nonzero homotopy label.
    Noncontractible,
    Secondary,
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointKind::Primary => "primary",
            PointKind::Noncontractible => "noncontractible",
            PointKind::Secondary => "secondary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PointClass {
    pub contractible: bool,
    pub primary: bool,
    pub semi_primary: bool,
}

impl PointClass {
    pub fn kind(self) -> PointKind {
        if self.primary {
            PointKind::Primary
        } else if self.semi_primary && !self.contractible {
            PointKind::Noncontractible
        } else {
            PointKind::Secondary
        }
    }
}

/// Classification of every orbit, read off its iterate-0 point.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub by_orbit: BTreeMap<String, PointClass>,
}

impl Classification {
    pub fn of(&self, t: &Tangle, i: usize) -> PointClass {
        self.by_orbit[&t.point(i).orbit]
    }

    pub fn is_primary(&self, t: &Tangle, i: usize) -> bool {
        self.of(t, i).primary
    }

    /// Generators of the semi-primary complex: contractible semi-primary points.
    pub fn is_semi_generator(&self, t: &Tangle, i: usize) -> bool {
        let c = self.of(t, i);
        c.contractible && c.semi_primary
    }
}

pub fn classify(t: &Tangle) -> Classification {
    let mut by_orbit = BTreeMap::new();
    for orbit in t.orbits() {
        let p = t.id(&orbit, 0).expect("every orbit stores iterate 0");
        let mut any_below = false;
        let mut contractible_below = false;
        for r in 0..t.len() {
            if r != p && t.strictly_below(p, r) {
                any_below = true;
                if t.point(r).is_contractible() {
                    contractible_below = true;
                    break;
                }
            }
        }
        let contractible = t.point(p).is_contractible();
        by_orbit.insert(
            orbit,
            PointClass {
                contractible,
                primary: contractible && !contractible_below,
                semi_primary: !any_below,
            },
        );
    }
    Classification { by_orbit }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    pub csi: bool,
    pub classification: Classification,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    /// Branch pairs carrying at least one contractible point.
    pub fn contractible_pairs(t: &Tangle) -> Vec<BranchPair> {
        let mut out: Vec<BranchPair> = t
            .points()
            .iter()
            .filter(|p| p.is_contractible())
            .map(|p| p.branch_pair())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

pub fn validate(t: &Tangle) -> ValidationReport {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let reversing = t.orientation == MapOrientation::Reversing;
    for orbit in t.orbits() {
        let base = t.point(t.id(&orbit, 0).expect("iterate 0"));
        for n in -t.window..t.window {
            let a = t.point(t.id(&orbit, n).expect("complete window"));
            let b = t.point(t.id(&orbit, n + 1).expect("complete window"));
            if b.t_u.abs() <= a.t_u.abs() {
                errors.push(format!("{} -> {}: unstable parameter does not expand", a.reference(), b.reference()));
            }
            if b.t_s.abs() >= a.t_s.abs() {
                errors.push(format!("{} -> {}: stable parameter does not contract", a.reference(), b.reference()));
            }
            let flips = (a.t_u > 0.0) != (b.t_u > 0.0);
            let flips_s = (a.t_s > 0.0) != (b.t_s > 0.0);
            if flips != reversing || flips_s != reversing {
                errors.push(format!(
                    "{} -> {}: branch change inconsistent with a {} map",
                    a.reference(),
                    b.reference(),
                    t.orientation.name()
                ));
            }
            if !reversing && a.crossing != b.crossing {
                errors.push(format!("{} -> {}: crossing sign changes along the orbit", a.reference(), b.reference()));
            }
        }
        for n in -t.window..=t.window {
            let p = t.point(t.id(&orbit, n).expect("complete window"));
            if p.label() != base.label() {
                errors.push(format!("{}: homotopy label differs from {}", p.reference(), base.reference()));
            }
            if p.mu != base.mu {
                warnings.push(format!("{}: grading differs from {}", p.reference(), base.reference()));
            }
        }
    }
    for m in &t.marked {
        for b in m.containment.iter().flatten() {
            if t.lookup(&b.from).is_none() || t.lookup(&b.to).is_none() {
                warnings.push(format!("marked point {} refers to {b} outside the window", m.name));
            }
        }
    }
    let pairs = ValidationReport::contractible_pairs(t);
    ValidationReport {
        errors,
        warnings,
        csi: pairs.len() == 4,
        classification: classify(t),
    }
}

/// The region `[p, p^d]_u ∪ [p, p^d]_s` spanned by a primary point and its
/// next iterate on the same branch pair.
#[derive(Debug, Clone)]
pub struct Frame {
    pub anchor: usize,
    pub end: usize,
    /// Points strictly inside `]p, p^d[_u`, ordered away from `x`.
    pub u_segment: Vec<usize>,
    /// Points strictly inside `]p, p^d[_s`, ordered away from `x`.
    pub s_segment: Vec<usize>,
}

impl Frame {
    /// Points inside both open segments.
    pub fn interior(&self) -> Vec<usize> {
        self.u_segment
            .iter()
            .copied()
            .filter(|i| self.s_segment.contains(i))
            .collect()
    }
}

pub fn frame(t: &Tangle, class: &Classification, p: usize) -> Result<Frame> {
    if !class.is_primary(t, p) {
        return Err(Error::NotPrimary(t.point(p).reference().to_string()));
    }
    let d = match t.effective_orientation() {
        MapOrientation::Preserving => 1,
        MapOrientation::Reversing => 2,
    } * t.power;
    let anchor = t.point(p);
    let end = t.id(&anchor.orbit, anchor.iterate + d).ok_or_else(|| {
        Error::WindowTooSmall(format!("frame of {} needs iterate {}", anchor.reference(), anchor.iterate + d))
    })?;
    let e = t.point(end);
    let mut u_segment: Vec<usize> = (0..t.len())
        .filter(|&r| crate::tangle::between(anchor.t_u, e.t_u, t.point(r).t_u))
        .collect();
    let mut s_segment: Vec<usize> = (0..t.len())
        .filter(|&r| crate::tangle::between(anchor.t_s, e.t_s, t.point(r).t_s))
        .collect();
    u_segment.sort_by(|&a, &b| t.point(a).t_u.abs().total_cmp(&t.point(b).t_u.abs()));
    s_segment.sort_by(|&a, &b| t.point(a).t_s.abs().total_cmp(&t.point(b).t_s.abs()));
    Ok(Frame {
        anchor: p,
        end,
        u_segment,
        s_segment,
    })
}

/// Primary points grouped by the orbit they represent in a frame.
pub fn frame_primary_orbits(t: &Tangle, class: &Classification, f: &Frame) -> BTreeMap<String, Vec<PointRef>> {
    let mut out: BTreeMap<String, Vec<PointRef>> = BTreeMap::new();
    for i in f.interior() {
        if class.is_primary(t, i) {
            let p = t.point(i);
            out.entry(p.orbit.clone()).or_default().push(p.reference());
        }
    }
    out
}
