//! Self-convergence of traced tangles under refinement of the polyline
//! tolerances.

use crate::classify::classify;
use crate::error::{Error, Result};
use crate::geom::Pt;

use super::extract::{trace, TraceParams};
use super::map::PlanarMap;

/// Parameter changes below this are indistinguishable from roundoff.
pub const FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    /// `l_max` at each level.
    pub levels: Vec<f64>,
    /// Primary points at each level as `(t_u, t_s)` of iterate 0, ordered by `t_u`.
    pub primaries: Vec<Vec<(f64, f64)>>,
    /// Largest parameter change between consecutive levels.
    pub changes: Vec<f64>,
}

impl Convergence {
    /// Ratio of consecutive changes; infinite when both sit below [`FLOOR`].
    pub fn factor(&self) -> f64 {
        match self.changes.as_slice() {
            [.., a, b] if *a <= FLOOR && *b <= FLOOR => f64::INFINITY,
            [.., a, b] => a / b.max(FLOOR),
            _ => f64::NAN,
        }
    }

    pub fn converged(&self, min_factor: f64) -> bool {
        self.factor() >= min_factor
    }
}

fn primaries(map: &dyn PlanarMap, guess: Pt, p: &TraceParams) -> Result<Vec<(f64, f64)>> {
    let r = trace(map, guess, p)?;
    let t = &r.tangle;
    let class = classify(t);
    let mut out: Vec<(f64, f64)> = class
        .by_orbit
        .iter()
        .filter(|(_, c)| c.primary)
        .map(|(o, _)| {
            let pt = t.point(t.id(o, 0).expect("iterate 0"));
            (pt.t_u, pt.t_s)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Traces at `l_max`, `l_max/2`, ... (with `theta_max` halved alongside) for
/// `levels` levels and records how far the primary points move. The window
/// of the coarsest trace is kept fixed.
pub fn self_convergence(map: &dyn PlanarMap, guess: Pt, base: &TraceParams, levels: usize) -> Result<Convergence> {
    let mut p = base.clone();
    if p.window.is_none() {
        p.window = Some(trace(map, guess, base)?.tangle.window);
    }
    let mut out = Convergence {
        levels: Vec::new(),
        primaries: Vec::new(),
        changes: Vec::new(),
    };
    for _ in 0..levels {
        let pts = primaries(map, guess, &p)?;
        if let Some(prev) = out.primaries.last() {
            if prev.len() != pts.len() {
                return Err(Error::Numerical(format!(
                    "primary count changed from {} to {} at l_max = {}",
                    prev.len(),
                    pts.len(),
                    p.growth.l_max
                )));
            }
            let change = prev
                .iter()
                .zip(&pts)
                .map(|(a, b)| (a.0 - b.0).abs().max((a.1 - b.1).abs()))
                .fold(0.0, f64::max);
            out.changes.push(change);
        }
        out.levels.push(p.growth.l_max);
        out.primaries.push(pts);
        p.growth.l_max /= 2.0;
        p.growth.theta_max /= 2.0;
    }
    Ok(out)
}
