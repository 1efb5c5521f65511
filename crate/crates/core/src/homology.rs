//! Homology of boundary-matrix complexes: finitely generated abelian groups
//! over `Z` and `Z/2`, modules over `Q[T, T⁻¹]`, cohomology, zeta sequences
//! and iterate rank growth.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::chain::{quotient_boundary, Analysis, ChainComplex, Coefficients, SignKind, Variant};
use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::matrix::Matrix;
use crate::snf::{rank_mod2, smith_normal_form, to_big};
use crate::tangle::ClassId;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroup {
    pub free_rank: usize,
    /// Invariant factors `d₁ | d₂ | …`, each at least 2.
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn free(r: usize) -> Self {
        AbelianGroup {
            free_rank: r,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

/// Graded homology with its coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homology {
    pub coefficients: Coefficients,
    pub groups: BTreeMap<i64, AbelianGroup>,
}

impl Homology {
    pub fn group(&self, k: i64) -> AbelianGroup {
        self.groups.get(&k).cloned().unwrap_or_default()
    }

    pub fn rank(&self, k: i64) -> usize {
        self.group(k).free_rank
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.groups
            .iter()
            .map(|(k, g)| if k.rem_euclid(2) == 0 { g.free_rank as i64 } else { -(g.free_rank as i64) })
            .sum()
    }

    /// Nonzero groups only, so that complexes differing by zero degrees compare equal.
    pub fn nonzero(&self) -> BTreeMap<i64, AbelianGroup> {
        self.groups
            .iter()
            .filter(|(_, g)| !g.is_zero())
            .map(|(k, g)| (*k, g.clone()))
            .collect()
    }

    pub fn same_groups(&self, other: &Homology) -> bool {
        self.nonzero() == other.nonzero()
    }

    pub fn format_group(&self, g: &AbelianGroup) -> String {
        let base = match self.coefficients {
            Coefficients::Z2 => "(Z/2)",
            _ => "Z",
        };
        let mut parts = Vec::new();
        match g.free_rank {
            0 => {}
            1 => parts.push(base.to_string()),
            r => parts.push(format!("{base}^{r}")),
        }
        parts.extend(g.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// `H_<k> = ...` lines, highest degree first.
    pub fn report_lines(&self) -> Vec<String> {
        self.groups
            .iter()
            .rev()
            .map(|(k, g)| format!("H_{k} = {}", self.format_group(g)))
            .collect()
    }
}

impl fmt::Display for Homology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.report_lines() {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

fn group_z(c: &ChainComplex<i64>, k: i64, ranks: &BTreeMap<i64, (usize, Vec<BigInt>)>) -> AbelianGroup {
    let dim = c.rank(k);
    let (rk_out, _) = ranks.get(&k).cloned().unwrap_or_default();
    let (rk_in, factors) = ranks.get(&(k + 1)).cloned().unwrap_or_default();
    AbelianGroup {
        free_rank: dim - rk_out - rk_in,
        torsion: factors.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

pub fn homology_of(c: &ChainComplex<i64>) -> Result<Homology> {
    c.check_square()?;
    let degrees: Vec<i64> = c.boundaries.keys().copied().collect();
    let ranks: BTreeMap<i64, (usize, Vec<BigInt>)> = degrees
        .par_iter()
        .map(|&k| {
            let m = c.boundary(k);
            let entry = match c.coefficients {
                Coefficients::Z2 => (rank_mod2(&m), Vec::new()),
                _ => {
                    let s = smith_normal_form(&to_big(&m));
                    let d = s.diagonal();
                    (d.len(), d)
                }
            };
            (k, entry)
        })
        .collect();
    let groups = c.degrees().into_iter().map(|k| (k, group_z(c, k, &ranks))).collect();
    Ok(Homology {
        coefficients: c.coefficients,
        groups,
    })
}

/// A finitely generated module over `Q[T, T⁻¹]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentModule {
    pub free_rank: usize,
    /// Non-unit invariant factors, normalized monic with lowest exponent 0.
    pub torsion: Vec<Laurent>,
}

impl LaurentModule {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for LaurentModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("L".to_string()),
            r => parts.push(format!("L^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("L/({d})")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

pub fn laurent_homology(c: &ChainComplex<Laurent>) -> Result<BTreeMap<i64, LaurentModule>> {
    c.check_square()?;
    let diag: BTreeMap<i64, Vec<Laurent>> = c
        .boundaries
        .keys()
        .map(|&k| (k, smith_normal_form(&c.boundary(k)).diagonal()))
        .collect();
    let mut out = BTreeMap::new();
    for k in c.degrees() {
        let rk_out = diag.get(&k).map_or(0, Vec::len);
        let incoming = diag.get(&(k + 1)).cloned().unwrap_or_default();
        out.insert(
            k,
            LaurentModule {
                free_rank: c.rank(k) - rk_out - incoming.len(),
                torsion: incoming.into_iter().filter(|d| !d.is_unit()).collect(),
            },
        );
    }
    Ok(out)
}

/// The dual complex: `D_{-k} = C_k` with boundary `∂_{k+1}ᵀ`.
pub fn dual_complex(c: &ChainComplex<i64>) -> ChainComplex<i64> {
    let generators = c.generators.iter().map(|(k, v)| (-k, v.clone())).collect();
    let boundaries = c
        .boundaries
        .iter()
        .map(|(k, m)| (-(k - 1), m.transpose()))
        .collect();
    ChainComplex {
        variant: c.variant,
        coefficients: c.coefficients,
        generators,
        boundaries,
    }
}

/// `H^k(φ)`, computed from the transposed differential and checked against
/// `H_{-k}(φ⁻¹)`.
pub fn cohomology_of(a: &Analysis, variant: Variant, kind: SignKind) -> Result<Homology> {
    let c = quotient_boundary(a, variant, kind)?;
    let dual = homology_of(&dual_complex(&c))?;
    let inverse = homology_of(&quotient_boundary(&a.inverse(), variant, inverse_kind(kind))?)?;
    if !dual.same_groups(&inverse) {
        return Err(Error::Theorem(format!(
            "cohomology {:?} differs from homology of the inverse {:?}",
            dual.nonzero(),
            inverse.nonzero()
        )));
    }
    Ok(Homology {
        coefficients: dual.coefficients,
        groups: dual.groups.into_iter().map(|(k, g)| (-k, g)).collect(),
    })
}

fn inverse_kind(kind: SignKind) -> SignKind {
    use crate::chain::Orientation::*;
    match kind {
        SignKind::N(o) => SignKind::N(match o {
            UPlus => SPlus,
            UMinus => SMinus,
            SPlus => UPlus,
            SMinus => UMinus,
        }),
        k => k,
    }
}

/// `(χ_1..χ_N, coefficients of exp(Σ χ_n zⁿ / n) up to z^N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaSequence {
    pub chi: Vec<i64>,
    pub series: Vec<BigRational>,
    pub homologies: Vec<Homology>,
}

pub fn zeta_series(chi: &[i64]) -> Vec<BigRational> {
    if chi.is_empty() {
        return Vec::new();
    }
    let mut b = vec![BigRational::one()];
    for m in 1..=chi.len() {
        let mut acc = BigRational::zero();
        for k in 1..=m {
            acc += BigRational::from(BigInt::from(chi[k - 1])) * b[m - k].clone();
        }
        b.push(acc / BigRational::from(BigInt::from(m)));
    }
    b
}

pub fn zeta_sequence(a: &Analysis, n_max: usize) -> Result<ZetaSequence> {
    let homologies: Vec<Homology> = (1..=n_max as i64)
        .map(|n| {
            let an = a.iterate(n)?;
            homology_of(&quotient_boundary(&an, Variant::Chaotic, SignKind::Nu)?)
        })
        .collect::<Result<_>>()?;
    let chi: Vec<i64> = homologies.iter().map(Homology::euler_characteristic).collect();
    Ok(ZetaSequence {
        series: zeta_series(&chi),
        chi,
        homologies,
    })
}

#[derive(Debug, Clone)]
pub struct RankGrowthReport {
    pub base: Homology,
    pub iterated: Homology,
    pub findings: Vec<String>,
}

/// `f(⟨p^j⟩) = ⟨p⟩` as a matrix `C_k(φⁿ) → C_k(φ)`.
fn projection(base: &[ClassId], iter: &[ClassId]) -> Matrix<i64> {
    let mut m = Matrix::zeros(base.len(), iter.len());
    for (j, c) in iter.iter().enumerate() {
        let i = base.iter().position(|b| b.orbit == c.orbit).expect("same orbits");
        m[(i, j)] = 1;
    }
    m
}

/// `n · g(⟨p⟩) = Σ_j ⟨p^j⟩` as a matrix `C_k(φ) → C_k(φⁿ)`.
fn scaled_section(base: &[ClassId], iter: &[ClassId]) -> Matrix<i64> {
    projection(base, iter).transpose()
}

pub fn rank_growth_check(a: &Analysis, n: i64, variant: Variant, kind: SignKind) -> Result<RankGrowthReport> {
    if n < 1 {
        return Err(Error::Invalid(format!("iterate {n} must be positive")));
    }
    let c1 = quotient_boundary(a, variant, kind)?;
    let an = a.iterate(n)?;
    let cn = quotient_boundary(&an, variant, kind)?;
    let h1 = homology_of(&c1)?;
    let hn = homology_of(&cn)?;
    let mut findings = Vec::new();
    for k in c1.degrees() {
        if h1.rank(k) > hn.rank(k) {
            findings.push(format!("rk H_{k}: {} for φ exceeds {} for φ^{n}", h1.rank(k), hn.rank(k)));
        }
    }
    let empty = Vec::new();
    for k in c1.degrees().into_iter().chain(cn.degrees()) {
        let b = c1.generators.get(&k).unwrap_or(&empty);
        let it = cn.generators.get(&k).unwrap_or(&empty);
        let f = projection(b, it);
        let g = scaled_section(b, it);
        let fg = &f * &g;
        let n_id = Matrix::<i64>::identity(b.len()).map(|x| x * n);
        if fg != n_id {
            findings.push(format!("f∘g ≠ Id in degree {k}"));
        }
        let bl = c1.generators.get(&(k - 1)).unwrap_or(&empty);
        let itl = cn.generators.get(&(k - 1)).unwrap_or(&empty);
        let f_low = projection(bl, itl);
        let g_low = scaled_section(bl, itl);
        if &f_low * &cn.boundary(k) != &c1.boundary(k) * &f {
            findings.push(format!("f is not a chain map in degree {k}"));
        }
        if &cn.boundary(k) * &g != &g_low * &c1.boundary(k) {
            findings.push(format!("g is not a chain map in degree {k}"));
        }
    }
    let kernel = kernel_complex(&cn);
    for k in cn.degrees() {
        if cn.rank(k) != kernel.rank(k) + c1.rank(k) {
            findings.push(format!("rk C_{k}(φ^{n}) ≠ rk (ker f)_{k} + rk C_{k}(φ)"));
        }
    }
    let hk = homology_of(&kernel)?;
    if hk.euler_characteristic() - hn.euler_characteristic() + h1.euler_characteristic() != 0 {
        findings.push("Euler characteristics of 0 → ker f → C(φⁿ) → C(φ) → 0 do not add up".into());
    }
    if !findings.is_empty() {
        return Err(Error::Theorem(findings.join("; ")));
    }
    Ok(RankGrowthReport {
        base: h1,
        iterated: hn,
        findings,
    })
}

/// The subcomplex `ker f ⊂ C(φⁿ)` in the basis `⟨p^j⟩ − ⟨p^0⟩`, `j ≥ 1`.
fn kernel_complex(cn: &ChainComplex<i64>) -> ChainComplex<i64> {
    let basis = |k: i64| -> Vec<ClassId> {
        cn.generators
            .get(&k)
            .map(|v| v.iter().filter(|c| c.residue != 0).cloned().collect())
            .unwrap_or_default()
    };
    let mut generators = BTreeMap::new();
    for k in cn.degrees() {
        let b = basis(k);
        if !b.is_empty() {
            generators.insert(k, b);
        }
    }
    let mut boundaries = BTreeMap::new();
    for (&k, cols) in &generators {
        let Some(rows) = generators.get(&(k - 1)) else { continue };
        let d = cn.boundary(k);
        let gens_k = &cn.generators[&k];
        let gens_l = &cn.generators[&(k - 1)];
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (j, c) in cols.iter().enumerate() {
            let col_hi = gens_k.iter().position(|x| x == c).expect("generator");
            let col_lo = gens_k
                .iter()
                .position(|x| x.orbit == c.orbit && x.residue == 0)
                .expect("residue 0");
            for (i, r) in rows.iter().enumerate() {
                let row = gens_l.iter().position(|x| x == r).expect("generator");
                m[(i, j)] = d[(row, col_hi)] - d[(row, col_lo)];
            }
        }
        boundaries.insert(k, m);
    }
    ChainComplex {
        variant: cn.variant,
        coefficients: cn.coefficients,
        generators,
        boundaries,
    }
}
