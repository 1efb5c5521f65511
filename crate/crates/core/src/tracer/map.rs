//! Explicit area-preserving planar maps and their hyperbolic fixed points.

use crate::error::{Error, Result};
use crate::geom::Pt;

pub type Mat2 = [[f64; 2]; 2];

pub fn apply(m: &Mat2, v: Pt) -> Pt {
    (m[0][0] * v.0 + m[0][1] * v.1, m[1][0] * v.0 + m[1][1] * v.1)
}

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn invert(m: &Mat2) -> Mat2 {
    let d = det(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

pub trait PlanarMap: Send + Sync {
    fn name(&self) -> String;
    fn forward(&self, p: Pt) -> Pt;
    fn inverse(&self, p: Pt) -> Pt;
    fn jacobian(&self, p: Pt) -> Mat2;

    /// Jacobian of the inverse map at `p`.
    fn inverse_jacobian(&self, p: Pt) -> Mat2 {
        invert(&self.jacobian(self.inverse(p)))
    }
}

/// `(x, y) ↦ (x + y + ε f(x), y + ε f(x))` with `f(x) = −τx³ − (1−τ)x² + x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HenonFamily {
    pub tau: f64,
    pub eps: f64,
}

impl HenonFamily {
    fn f(&self, x: f64) -> f64 {
        -self.tau * x * x * x - (1.0 - self.tau) * x * x + x
    }

    fn df(&self, x: f64) -> f64 {
        -3.0 * self.tau * x * x - 2.0 * (1.0 - self.tau) * x + 1.0
    }
}

impl PlanarMap for HenonFamily {
    fn name(&self) -> String {
        format!("henon tau={} eps={}", self.tau, self.eps)
    }

    fn forward(&self, (x, y): Pt) -> Pt {
        let e = self.eps * self.f(x);
        (x + y + e, y + e)
    }

    fn inverse(&self, (x, y): Pt) -> Pt {
        let x0 = x - y;
        (x0, y - self.eps * self.f(x0))
    }

    fn jacobian(&self, (x, _): Pt) -> Mat2 {
        let d = self.eps * self.df(x);
        [[1.0 + d, 1.0], [d, 1.0]]
    }
}

/// `name` is `henon` (or `henon_family`) with `params = [τ, ε]`.
pub fn builtin_map(name: &str, params: &[f64]) -> Result<Box<dyn PlanarMap>> {
    match name {
        "henon" | "henon_family" => {
            let [tau, eps] = params else {
                return Err(Error::Invalid(format!("{name} takes (tau, eps), got {} parameters", params.len())));
            };
            if !(0.0..=1.0).contains(tau) {
                return Err(Error::Invalid(format!("tau = {tau} outside [0, 1]")));
            }
            if !(*eps > 0.0) {
                return Err(Error::Invalid(format!("eps = {eps} must be positive")));
            }
            Ok(Box::new(HenonFamily { tau: *tau, eps: *eps }))
        }
        _ => Err(Error::Invalid(format!("unknown map `{name}`"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub point: Pt,
    /// Expanding then contracting eigenvalue.
    pub eigenvalues: (f64, f64),
    /// Unit eigenvectors, each with its first nonzero component positive.
    pub eigenvectors: (Pt, Pt),
}

fn normalized(v: Pt) -> Pt {
    let n = v.0.hypot(v.1);
    let (x, y) = (v.0 / n, v.1 / n);
    if x < -1e-14 || (x.abs() <= 1e-14 && y < 0.0) {
        (-x, -y)
    } else {
        (x, y)
    }
}

fn eigenvector(m: &Mat2, l: f64) -> Pt {
    let a = (m[0][1], l - m[0][0]);
    let b = (l - m[1][1], m[1][0]);
    if a.0.hypot(a.1) >= b.0.hypot(b.1) {
        normalized(a)
    } else {
        normalized(b)
    }
}

/// Newton iteration on `Φ(z) − z`, then the eigen-decomposition of `DΦ`.
pub fn find_fixed_point(map: &dyn PlanarMap, guess: Pt) -> Result<FixedPoint> {
    let mut z = guess;
    let mut converged = false;
    for _ in 0..50 {
        let f = map.forward(z);
        let r = (f.0 - z.0, f.1 - z.1);
        if r.0.hypot(r.1) < 1e-12 {
            converged = true;
            break;
        }
        let mut j = map.jacobian(z);
        j[0][0] -= 1.0;
        j[1][1] -= 1.0;
        if det(&j).abs() < 1e-300 {
            return Err(Error::Numerical("singular Newton step".into()));
        }
        let step = apply(&invert(&j), r);
        z = (z.0 - step.0, z.1 - step.1);
    }
    if !converged {
        return Err(Error::Numerical(format!("Newton did not converge from {guess:?}")));
    }
    let j = map.jacobian(z);
    let tr = j[0][0] + j[1][1];
    let d = det(&j);
    let disc = tr * tr - 4.0 * d;
    if disc <= 0.0 {
        return Err(Error::Numerical(format!("fixed point {z:?} is not hyperbolic")));
    }
    let root = disc.sqrt();
    let (l1, l2) = if tr >= 0.0 {
        let l1 = (tr + root) / 2.0;
        (l1, d / l1)
    } else {
        let l1 = (tr - root) / 2.0;
        (l1, d / l1)
    };
    if !(l1.abs() > 1.0 && l2.abs() < 1.0) {
        return Err(Error::Numerical(format!("fixed point {z:?} is not hyperbolic")));
    }
    Ok(FixedPoint {
        point: z,
        eigenvalues: (l1, l2),
        eigenvectors: (eigenvector(&j, l1), eigenvector(&j, l2)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn origin_is_fixed() {
        let m = builtin_map("henon", &[0.0, 0.1]).unwrap();
        assert_eq!(m.forward((0.0, 0.0)), (0.0, 0.0));
        assert_eq!(m.jacobian((0.0, 0.0)), [[1.1, 1.0], [0.1, 1.0]]);
    }

    #[test]
    fn area_preserving_and_invertible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let tau = rng.gen_range(0.0..=1.0);
            let eps = rng.gen_range(0.01..1.0);
            let m = HenonFamily { tau, eps };
            let p = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            // det [[1+εf', 1], [εf', 1]] = 1 symbolically
            assert!((det(&m.jacobian(p)) - 1.0).abs() < 1e-8);
            let back = m.inverse(m.forward(p));
            assert!((back.0 - p.0).abs() < 1e-10 && (back.1 - p.1).abs() < 1e-10);
        }
    }

    #[test]
    fn newton_and_spectrum() {
        let m = builtin_map("henon", &[0.0, 0.1]).unwrap();
        let fp = find_fixed_point(m.as_ref(), (0.01, 0.01)).unwrap();
        assert!(fp.point.0.abs() < 1e-12 && fp.point.1.abs() < 1e-12);
        let (l1, l2) = fp.eigenvalues;
        for l in [l1, l2] {
            assert!((l * l - 2.1 * l + 1.0).abs() < 1e-12);
        }
        assert!((l1 * l2 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(builtin_map("henon", &[0.0, 0.0]).is_err());
        assert!(builtin_map("logistic", &[0.0, 0.1]).is_err());
    }
}
