//! Structural checks shared by the property suites and the acceptance run.
//! Each returns how many instances it verified, or a description of the
//! first violation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use tanglefloer::chain::{equivariant_boundary, quotient_boundary, sign, Analysis, ChainComplex, SignKind, Variant};
use tanglefloer::homology::{cohomology_of, homology_of, rank_growth_check};
use tanglefloer::matrix::Matrix;
use tanglefloer::moduli::{heart, CutPoint};
use tanglefloer::moves::{classify_move, primary_move_maps, MoveKind};
use tanglefloer::snf::{smith_normal_form, to_big};
use tanglefloer::{ErrorKind, Tangle};

use super::oracle::{det, determinantal_divisors, matmul, rank, rows};
use super::{random_create, random_sequence, sign_systems};

pub type Checked = Result<usize, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn square_zero(c: &ChainComplex<i64>, what: &str) -> Checked {
    let mut n = 0;
    for &k in c.boundaries.keys() {
        let (Some(lo), Some(hi)) = (c.boundaries.get(&(k - 1)), c.boundaries.get(&k)) else { continue };
        let prod = matmul(&rows(lo), &rows(hi), lo.cols(), hi.cols());
        ensure!(prod.iter().flatten().all(|&x| x == 0), "{what}: ∂∂ ≠ 0 in degree {k}");
        n += 1;
    }
    Ok(n)
}

/// ∂∂ = 0 for every variant that can be built; only refusals for missing
/// data are tolerated.
pub fn boundary_squares(t: &Tangle, what: &str) -> Checked {
    let a = Analysis::new(t.clone()).map_err(|e| format!("{what}: {e}"))?;
    let mut n = 0;
    for (v, k) in sign_systems() {
        match quotient_boundary(&a, v, k) {
            Ok(c) => n += square_zero(&c, &format!("{what} {v} {k:?}"))?,
            Err(e) => ensure!(e.kind() == ErrorKind::Computation, "{what} {v} {k:?}: {e}"),
        }
    }
    let e = equivariant_boundary(&a).map_err(|e| format!("{what} equivariant: {e}"))?;
    e.check_square().map_err(|e| format!("{what} equivariant: {e}"))?;
    Ok(n + 1)
}

/// `m(p, q_u) m(q_u, r) = −m(p, q_s) m(q_s, r)` for hearts cut at two
/// primary points.
pub fn heart_antisymmetry(t: &Tangle, what: &str) -> Checked {
    let a = Analysis::new(t.clone()).map_err(|e| e.to_string())?;
    let t = &a.tangle;
    let mut n = 0;
    for p in (0..t.len()).filter(|&p| t.point(p).iterate == 0 && a.is_primary(p)) {
        for r in (0..t.len()).filter(|&r| a.is_primary(r)) {
            let Some(h) = heart(t, &a.class, &a.grading, p, r) else { continue };
            let (CutPoint::Primary(qu), CutPoint::Primary(qs)) = (h.q_u, h.q_s) else { continue };
            let m = |x, y| sign(&a, SignKind::M, x, y).map_err(|e| e.to_string());
            let (left, right) = (m(p, qu)? * m(qu, r)?, m(p, qs)? * m(qs, r)?);
            let name = format!("{what}: heart {} -> {}", t.point(p).reference(), t.point(r).reference());
            ensure!(left != 0, "{name} does not cut into bigons");
            ensure!(left == -right, "{name}: {left} vs {right}");
            n += 1;
        }
    }
    Ok(n)
}

/// Boundaries for windows `K` and `K + 1` agree from the stored window down
/// to the point where bigons no longer fit.
pub fn window_stability(t: &Tangle, what: &str) -> Checked {
    let a = Analysis::new(t.clone()).map_err(|e| e.to_string())?;
    let mut n = 0;
    for (v, kind) in sign_systems() {
        let Ok(full) = quotient_boundary(&a, v, kind) else { continue };
        n += 1;
        let mut k = t.window - 1;
        while k >= t.power {
            let r = a.restrict(k).map_err(|e| e.to_string())?;
            match quotient_boundary(&r, v, kind) {
                Ok(c) => ensure!(c == full, "{what} {v} {kind:?}: window {k} differs"),
                Err(e) => {
                    ensure!(e.kind() == ErrorKind::Computation, "{what} {v} {kind:?}: {e}");
                    break;
                }
            }
            n += 1;
            k -= 1;
        }
        ensure!(k < t.window - 1, "{what} {v} {kind:?}: unstable just below the stored window");
    }
    Ok(n)
}

/// The chain-map identities of a primary creation, recomputed here.
pub fn move_maps(before: &Tangle, after: &Tangle) -> Checked {
    let m = primary_move_maps(before, after).map_err(|e| e.to_string())?;
    ensure!(m.failures.is_empty(), "{:?}", m.failures);
    let (nb, na) = (m.before.len(), m.after.len());
    let (d, d2, f, g, h) = (rows(&m.d), rows(&m.d_after), rows(&m.f), rows(&m.g), rows(&m.h));
    ensure!(matmul(&f, &d2, na, na) == matmul(&d, &f, nb, na), "f𝔡' ≠ 𝔡f");
    ensure!(matmul(&g, &d, nb, nb) == matmul(&d2, &g, na, nb), "g𝔡 ≠ 𝔡'g");
    let fg = matmul(&f, &g, na, nb);
    for (i, row) in fg.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            ensure!(x == i64::from(i == j), "f∘g ≠ Id at ({i}, {j})");
        }
    }
    let gf = matmul(&g, &f, nb, na);
    let (hd, dh) = (matmul(&h, &d2, na, na), matmul(&d2, &h, na, na));
    for i in 0..na {
        for j in 0..na {
            ensure!(gf[i][j] - i64::from(i == j) == hd[i][j] + dh[i][j], "g∘f − Id ≠ h𝔡' + 𝔡'h at ({i}, {j})");
        }
    }
    Ok(1)
}

/// A random primary creation on `t`.
pub fn random_primary_move(t: &Tangle, rng: &mut impl Rng) -> Option<Tangle> {
    (0..40).find_map(|_| {
        let (_, after) = random_create(t, rng, 50)?;
        (classify_move(t, &after).ok()?.kind == MoveKind::Primary).then_some(after)
    })
}

fn primary_homology(t: &Tangle) -> Result<tanglefloer::homology::Homology, String> {
    let a = Analysis::new(t.clone()).map_err(|e| e.to_string())?;
    let c = quotient_boundary(&a, Variant::Primary, SignKind::M).map_err(|e| e.to_string())?;
    homology_of(&c).map_err(|e| e.to_string())
}

/// Graded homology is unchanged along a random csi-preserving sequence; ∂∂ = 0
/// on the final tangle. Returns the number of moves made.
pub fn sequence_invariance(t: &Tangle, rng: &mut impl Rng, len: usize) -> Checked {
    let base = primary_homology(t)?;
    let steps = random_sequence(t, rng, len);
    for (spec, after) in &steps {
        let h = primary_homology(after)?;
        ensure!(base.same_groups(&h), "after {spec}: {:?} vs {:?}", h.nonzero(), base.nonzero());
    }
    if let Some((_, last)) = steps.last() {
        boundary_squares(last, "sequence")?;
    }
    Ok(steps.len())
}

/// `rk H(φ) ≤ rk H(φⁿ)` degreewise with the iterate maps verified, `n ≤ 5`.
pub fn rank_growth(t: &Tangle, what: &str) -> Checked {
    let a = Analysis::new(t.clone()).map_err(|e| e.to_string())?;
    let mut n_checked = 0;
    for n in 1..=5 {
        for v in [Variant::Primary, Variant::SemiPrimary] {
            let r = rank_growth_check(&a, n, v, SignKind::M).map_err(|e| format!("{what} {v} n={n}: {e}"))?;
            for (k, g) in &r.base.groups {
                ensure!(g.free_rank <= r.iterated.rank(*k), "{what} {v} n={n}: rank drops in degree {k}");
            }
            n_checked += 1;
        }
    }
    Ok(n_checked)
}

/// `H^k(φ) = H_{−k}(φ⁻¹)`.
pub fn cohomology_duality(t: &Tangle, what: &str) -> Checked {
    let a = Analysis::new(t.clone()).map_err(|e| e.to_string())?;
    let mut n = 0;
    for v in [Variant::Primary, Variant::SemiPrimary] {
        let co = cohomology_of(&a, v, SignKind::M).map_err(|e| format!("{what} {v}: {e}"))?;
        let inv = quotient_boundary(&a.inverse(), v, SignKind::M).and_then(|c| homology_of(&c)).map_err(|e| e.to_string())?;
        let degrees: std::collections::BTreeSet<i64> = co.groups.keys().copied().chain(inv.groups.keys().map(|k| -k)).collect();
        for k in degrees {
            ensure!(co.group(k) == inv.group(-k), "{what} {v}: H^{k} ≠ H_{}(φ⁻¹)", -k);
        }
        n += 1;
    }
    Ok(n)
}

fn big_det(m: &Matrix<BigInt>) -> i64 {
    let r: Vec<Vec<i64>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| i64::try_from(x).unwrap_or(i64::MAX)).collect())
        .collect();
    det(&r)
}

/// `U·A·V = D`, unimodularity, divisibility, and agreement with the
/// determinantal divisors and the rational rank.
pub fn snf_against_oracle(a: &[Vec<i64>], r: usize, c: usize) -> Checked {
    let m = to_big(&Matrix::from_rows(a.to_vec(), c));
    let s = smith_normal_form(&m);
    ensure!(&(&s.u * &m) * &s.v == s.d, "U·A·V ≠ D for {a:?}");
    ensure!(big_det(&s.u).abs() == 1 && big_det(&s.v).abs() == 1, "U or V not unimodular for {a:?}");
    for i in 0..r {
        for j in 0..c {
            ensure!(i == j || s.d[(i, j)].is_zero(), "D not diagonal for {a:?}");
        }
    }
    let diag = s.diagonal();
    for w in diag.windows(2) {
        ensure!((&w[1] % &w[0]).is_zero(), "{} does not divide {} for {a:?}", w[0], w[1]);
    }
    let oracle = determinantal_divisors(a, r, c);
    ensure!(diag.len() == oracle.len() && diag.len() == rank(a), "rank mismatch for {a:?}");
    let mut prod = BigInt::one();
    for (d, o) in diag.iter().zip(&oracle) {
        prod *= d.abs();
        ensure!(prod == BigInt::from(*o), "invariant factors {diag:?} vs divisors {oracle:?} for {a:?}");
    }
    Ok(1)
}
