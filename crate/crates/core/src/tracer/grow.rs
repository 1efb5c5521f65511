//! Growing invariant-manifold branches by iterating a fundamental domain.
//!
//! A branch point is addressed by `(depth, u)`: the seed
//! `x + δ Λ^u e` on the linear fundamental domain (`u ∈ [0, 1]`) pushed
//! `depth` times through the map (the inverse map for stable branches).
//! Points and tangents are always evaluated exactly from this address, so
//! refinement inserts genuine curve points rather than interpolants.

use crate::error::{Error, Result};
use crate::geom::{self, Pt};
use crate::tangle::Branch;

use super::map::{apply, FixedPoint, PlanarMap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthParams {
    /// Seed distance from the fixed point.
    pub delta: f64,
    /// Arclength to grow.
    pub budget: f64,
    pub l_max: f64,
    pub theta_max: f64,
    /// Cap on fundamental-domain iterations.
    pub max_depth: u32,
}

impl Default for GrowthParams {
    fn default() -> Self {
        GrowthParams {
            delta: 1e-6,
            budget: 10.0,
            l_max: 0.01,
            theta_max: 0.2,
            max_depth: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub depth: u32,
    pub u: f64,
    pub pt: Pt,
}

#[derive(Debug, Clone)]
pub struct BranchCurve {
    pub branch: Branch,
    pub origin: Pt,
    dir: Pt,
    factor: f64,
    delta: f64,
    /// Vertices after the fixed point, ordered away from it.
    pub vertices: Vec<Vertex>,
    /// Arclength from the fixed point to each vertex along the exact curve.
    pub arclength: Vec<f64>,
    /// Growth stopped short of the budget because the parametrisation ran out
    /// of floating point resolution.
    pub truncated: bool,
}

const GL_NODES: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

impl BranchCurve {
    pub fn unstable(&self) -> bool {
        self.branch.is_unstable()
    }

    /// Exact curve point and derivative with respect to `u`.
    pub fn eval(&self, map: &dyn PlanarMap, depth: u32, u: f64) -> (Pt, Pt) {
        let scale = self.delta * self.factor.powf(u);
        let mut z = (self.origin.0 + scale * self.dir.0, self.origin.1 + scale * self.dir.1);
        let dl = scale * self.factor.ln();
        let mut v = (dl * self.dir.0, dl * self.dir.1);
        for _ in 0..depth {
            if self.unstable() {
                v = apply(&map.jacobian(z), v);
                z = map.forward(z);
            } else {
                v = apply(&map.inverse_jacobian(z), v);
                z = map.inverse(z);
            }
        }
        (z, v)
    }

    /// Exact arclength of the curve over `u ∈ [a, b]` at a fixed depth.
    pub fn arc(&self, map: &dyn PlanarMap, depth: u32, a: f64, b: f64) -> f64 {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        GL_NODES
            .iter()
            .map(|&(x, w)| w * geom::norm(self.eval(map, depth, mid + half * x).1))
            .sum::<f64>()
            * half
    }

    /// Parameter range of segment `i` (vertex `i` to `i + 1`); a segment
    /// crossing into the next domain is read in the earlier one.
    pub fn segment_params(&self, i: usize) -> (u32, f64, f64) {
        let a = self.vertices[i];
        let b = self.vertices[i + 1];
        (a.depth, a.u, if b.depth == a.depth { b.u } else { 1.0 })
    }

    /// The polyline from the fixed point through every vertex.
    pub fn polyline(&self) -> Vec<Pt> {
        std::iter::once(self.origin).chain(self.vertices.iter().map(|v| v.pt)).collect()
    }

    pub fn length(&self) -> f64 {
        self.arclength.last().copied().unwrap_or(0.0)
    }
}

/// Chords shorter than this are dominated by roundoff in deep iterates and
/// are accepted without a bending test.
const NOISE_FLOOR: f64 = 1e-9;

/// Parameter steps below this cannot be resolved in double precision.
const MIN_STEP: f64 = 1e-12;

fn turn(a: Pt, b: Pt, c: Pt) -> f64 {
    geom::signed_angle(geom::sub(b, a), geom::sub(c, b)).abs()
}

/// Grows one branch out to the arclength budget. Each fundamental domain is
/// walked left to right, bisecting any piece whose chord is too long or
/// bends too much, so work stops as soon as the budget is reached.
pub fn grow_branch(map: &dyn PlanarMap, fp: &FixedPoint, branch: Branch, p: &GrowthParams) -> Result<BranchCurve> {
    let (eigen, lambda) = if branch.is_unstable() {
        (fp.eigenvectors.0, fp.eigenvalues.0)
    } else {
        (fp.eigenvectors.1, 1.0 / fp.eigenvalues.1)
    };
    if lambda <= 0.0 {
        return Err(Error::Numerical("negative eigenvalues are not supported by the tracer".into()));
    }
    let sign = branch.sign();
    let mut curve = BranchCurve {
        branch,
        origin: fp.point,
        dir: (sign * eigen.0, sign * eigen.1),
        factor: lambda,
        delta: p.delta,
        vertices: Vec::new(),
        arclength: Vec::new(),
        truncated: false,
    };
    let mut length = p.delta;
    curve.vertices.push(Vertex {
        depth: 0,
        u: 0.0,
        pt: curve.eval(map, 0, 0.0).0,
    });
    curve.arclength.push(length);
    for depth in 0..p.max_depth {
        let end = curve.eval(map, depth, 1.0).0;
        let mut stack: Vec<(f64, f64, Pt)> = vec![(0.0, 1.0, end)];
        while let Some((a, b, pb)) = stack.pop() {
            let last = *curve.vertices.last().expect("seeded");
            let pa = last.pt;
            let m = (a + b) / 2.0;
            let pm = curve.eval(map, depth, m).0;
            let prev = (curve.vertices.len() >= 2).then(|| curve.vertices[curve.vertices.len() - 2].pt);
            let chord = geom::dist(pa, pb);
            let split = chord > p.l_max
                || (chord > NOISE_FLOOR
                    && (turn(pa, pm, pb) > p.theta_max / 2.0 || prev.is_some_and(|q| turn(q, pa, pb) > p.theta_max)));
            if split {
                if b - a < MIN_STEP {
                    curve.truncated = true;
                    return Ok(curve);
                }
                stack.push((m, b, pb));
                stack.push((a, m, pm));
                continue;
            }
            length += curve.arc(map, depth, a, b);
            let v = if b < 1.0 {
                Vertex { depth, u: b, pt: pb }
            } else {
                Vertex {
                    depth: depth + 1,
                    u: 0.0,
                    pt: curve.eval(map, depth + 1, 0.0).0,
                }
            };
            curve.vertices.push(v);
            curve.arclength.push(length);
            if length >= p.budget {
                return Ok(curve);
            }
        }
    }
    Err(Error::Numerical(format!(
        "{} branch: depth cap {} reached before arclength {}",
        branch.name(),
        p.max_depth,
        p.budget
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracer::map::{builtin_map, find_fixed_point};

    #[test]
    fn short_branch_follows_eigenvector() {
        let m = builtin_map("henon", &[0.0, 0.3]).unwrap();
        let fp = find_fixed_point(m.as_ref(), (0.0, 0.0)).unwrap();
        let p = GrowthParams {
            budget: 1e-3,
            ..Default::default()
        };
        for b in Branch::ALL {
            let c = grow_branch(m.as_ref(), &fp, b, &p).unwrap();
            let last = c.vertices.last().unwrap().pt;
            let e = if b.is_unstable() { fp.eigenvectors.0 } else { fp.eigenvectors.1 };
            let ang = geom::signed_angle((b.sign() * e.0, b.sign() * e.1), last).abs();
            assert!(ang < 1e-3, "{b:?}: {ang}");
        }
    }

    #[test]
    fn exact_arclength_beats_chords() {
        let m = builtin_map("henon", &[0.0, 0.3]).unwrap();
        let fp = find_fixed_point(m.as_ref(), (0.0, 0.0)).unwrap();
        let p = GrowthParams {
            budget: 3.0,
            ..Default::default()
        };
        let c = grow_branch(m.as_ref(), &fp, Branch::UPlus, &p).unwrap();
        let poly = c.polyline();
        let chords = geom::arclengths(&poly);
        let exact = c.length();
        assert!(exact >= *chords.last().unwrap() - 1e-9);
        assert!(exact - chords.last().unwrap() < 1e-3);
        for w in poly.windows(2) {
            assert!(geom::dist(w[0], w[1]) <= p.l_max + 1e-12);
        }
    }
}
