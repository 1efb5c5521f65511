//! Numerical tangles: invariant manifolds of explicit planar maps grown as
//! polylines, intersected, and assembled into a [`Tangle`](crate::Tangle).

pub mod converge;
pub mod extract;
pub mod grow;
pub mod map;

pub use converge::{self_convergence, Convergence};
pub use extract::{extract_tangle, find_crossings, grow_all, trace, Crossing, TraceParams, TraceResult};
pub use grow::{grow_branch, BranchCurve, GrowthParams};
pub use map::{builtin_map, find_fixed_point, FixedPoint, HenonFamily, PlanarMap};
