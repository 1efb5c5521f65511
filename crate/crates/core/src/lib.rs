//! Homoclinic Floer homology of two-dimensional symplectomorphisms, computed
//! from combinatorial tangle descriptions or numerically traced manifolds.

pub mod error;
pub mod chain;
pub mod classify;
pub mod geom;
pub mod grading;
pub mod homology;
pub mod laurent;
pub mod matrix;
pub mod moduli;
pub mod moves;
pub mod snf;
pub mod tangle;
pub mod tgl;
pub mod tracer;

pub use error::{Error, ErrorKind, Result};
pub use tangle::{
    BigonId, Branch, BranchPair, ClassId, Geometry, MapOrientation, MarkedPoint, PointRecord,
    PointRef, Surface, Tangle,
};
