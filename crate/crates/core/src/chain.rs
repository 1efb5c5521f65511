//! Sign systems and boundary-matrix assembly for the primary, semi-primary,
//! chaotic and equivariant complexes.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::classify::{classify, Classification};
use crate::error::{Error, Result};
use crate::grading::{resolve_grading, GradingTable};
use crate::laurent::Laurent;
use crate::matrix::Matrix;
use crate::moduli::{bigon, interior_contains, BigonCertificate};
use crate::tangle::{ClassId, MapOrientation, Tangle};

/// A tangle together with its classification and grading.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub tangle: Tangle,
    pub class: Classification,
    pub grading: GradingTable,
}

impl Analysis {
    pub fn new(tangle: Tangle) -> Result<Self> {
        let class = classify(&tangle);
        let grading = resolve_grading(&tangle, &class)?;
        Ok(Analysis {
            tangle,
            class,
            grading,
        })
    }

    /// Re-analyses a derived tangle (iterate, inverse, restriction) reusing
    /// the grading table, which is keyed by orbit.
    pub fn derive(&self, tangle: Tangle, grading: GradingTable) -> Analysis {
        let class = classify(&tangle);
        Analysis {
            tangle,
            class,
            grading,
        }
    }

    pub fn iterate(&self, n: i64) -> Result<Analysis> {
        let g = if n < 0 { self.grading.negated() } else { self.grading.clone() };
        Ok(self.derive(self.tangle.iterate(n)?, g))
    }

    pub fn inverse(&self) -> Analysis {
        self.derive(self.tangle.inverse(), self.grading.negated())
    }

    pub fn restrict(&self, k: i64) -> Result<Analysis> {
        Ok(self.derive(self.tangle.restrict(k)?, self.grading.clone()))
    }

    pub fn bigon(&self, p: usize, q: usize) -> Option<BigonCertificate> {
        bigon(&self.tangle, &self.grading, p, q)
    }

    pub fn mu(&self, i: usize) -> Option<i64> {
        self.grading.get(&self.tangle, i)
    }

    pub fn is_primary(&self, i: usize) -> bool {
        self.class.is_primary(&self.tangle, i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    UPlus,
    UMinus,
    SPlus,
    SMinus,
}

impl Orientation {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "u+" => Some(Orientation::UPlus),
            "u-" => Some(Orientation::UMinus),
            "s+" => Some(Orientation::SPlus),
            "s-" => Some(Orientation::SMinus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignKind {
    M,
    N(Orientation),
    /// m-signs suppressed on bigons containing a marked periodic point.
    Nu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Primary,
    SemiPrimary,
    Chaotic,
    Equivariant,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Primary => "primary",
            Variant::SemiPrimary => "semi-primary",
            Variant::Chaotic => "chaotic",
            Variant::Equivariant => "equivariant",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficients {
    Z,
    Z2,
    LaurentQ,
}

fn sgn(x: f64) -> i64 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Sign of a bigon from its jump direction on the shared branch.
pub fn jump_sign(t: &Tangle, p: usize, q: usize) -> Result<i64> {
    let (a, b) = (t.point(p), t.point(q));
    let u = ((a.t_u > 0.0) == (b.t_u > 0.0)).then(|| if b.t_u.abs() > a.t_u.abs() { 1 } else { -1 });
    let s = ((a.t_s > 0.0) == (b.t_s > 0.0)).then(|| if b.t_s.abs() < a.t_s.abs() { 1 } else { -1 });
    match (u, s) {
        (Some(x), Some(y)) if x != y => Err(Error::Theorem(format!(
            "jump directions of {} -> {} disagree on the two shared branches",
            a.reference(),
            b.reference()
        ))),
        (Some(x), _) | (None, Some(x)) => Ok(x),
        (None, None) => Err(Error::Theorem(format!(
            "{} and {} share no branch",
            a.reference(),
            b.reference()
        ))),
    }
}

pub fn m_sign(a: &Analysis, p: usize, q: usize) -> Result<i64> {
    for i in [p, q] {
        if !a.is_primary(i) {
            return Err(Error::NotPrimary(a.tangle.point(i).reference().to_string()));
        }
    }
    match a.bigon(p, q) {
        Some(_) => jump_sign(&a.tangle, p, q),
        None => Ok(0),
    }
}

pub fn orientation_sign(t: &Tangle, p: usize, q: usize, o: Orientation) -> i64 {
    let (a, b) = (t.point(p), t.point(q));
    match o {
        Orientation::UPlus => sgn(b.t_u - a.t_u),
        Orientation::UMinus => -sgn(b.t_u - a.t_u),
        Orientation::SPlus => sgn(b.t_s - a.t_s),
        Orientation::SMinus => -sgn(b.t_s - a.t_s),
    }
}

pub fn n_sign(a: &Analysis, p: usize, q: usize, o: Orientation) -> i64 {
    match a.bigon(p, q) {
        Some(_) => orientation_sign(&a.tangle, p, q, o),
        None => 0,
    }
}

/// m-sign, or 0 when a marked point of period dividing the tangle's power
/// lies inside the bigon.
pub fn nu_sign(a: &Analysis, p: usize, q: usize) -> Result<i64> {
    let m = m_sign(a, p, q)?;
    if m == 0 {
        return Ok(0);
    }
    let b = a.bigon(p, q).expect("nonzero sign has a bigon");
    let n = a.tangle.power as u32;
    for mk in a.tangle.marked.iter().filter(|mk| n % mk.period == 0) {
        if interior_contains(&a.tangle, &b, mk)? {
            return Ok(0);
        }
    }
    Ok(m)
}

pub fn sign(a: &Analysis, kind: SignKind, p: usize, q: usize) -> Result<i64> {
    match kind {
        SignKind::M => m_sign(a, p, q),
        SignKind::N(o) => Ok(n_sign(a, p, q, o)),
        SignKind::Nu => nu_sign(a, p, q),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainComplex<T> {
    pub variant: Variant,
    pub coefficients: Coefficients,
    /// Generators per degree, sorted by orbit name and residue.
    pub generators: BTreeMap<i64, Vec<ClassId>>,
    /// `∂_k : C_k → C_{k-1}`; rows index `C_{k-1}`, columns `C_k`.
    pub boundaries: BTreeMap<i64, Matrix<T>>,
}

impl<T: Clone + Zero> ChainComplex<T> {
    pub fn rank(&self, k: i64) -> usize {
        self.generators.get(&k).map_or(0, Vec::len)
    }

    pub fn boundary(&self, k: i64) -> Matrix<T> {
        self.boundaries
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.rank(k - 1), self.rank(k)))
    }

    /// Degrees where the complex or its boundaries may be nonzero.
    pub fn degrees(&self) -> Vec<i64> {
        let mut ks: Vec<i64> = self.generators.keys().copied().collect();
        ks.sort();
        ks
    }

    pub fn generator_index(&self, c: &ClassId) -> Option<(i64, usize)> {
        self.generators
            .iter()
            .find_map(|(k, v)| v.iter().position(|x| x == c).map(|i| (*k, i)))
    }
}

impl ChainComplex<i64> {
    /// `∂_{k-1} ∘ ∂_k = 0` for every `k` (mod 2 over `Z/2`).
    pub fn check_square(&self) -> Result<()> {
        for &k in self.generators.keys() {
            let prod = &self.boundary(k - 1) * &self.boundary(k);
            let zero = match self.coefficients {
                Coefficients::Z2 => prod.entries().all(|x| x % 2 == 0),
                _ => prod.is_zero(),
            };
            if !zero {
                return Err(Error::BoundarySquare(k));
            }
        }
        Ok(())
    }

    pub fn to_big(&self) -> ChainComplex<BigInt> {
        ChainComplex {
            variant: self.variant,
            coefficients: self.coefficients,
            generators: self.generators.clone(),
            boundaries: self
                .boundaries
                .iter()
                .map(|(k, m)| (*k, m.map(|&x| BigInt::from(x))))
                .collect(),
        }
    }
}

impl ChainComplex<Laurent> {
    pub fn check_square(&self) -> Result<()> {
        for &k in self.generators.keys() {
            if !(&self.boundary(k - 1) * &self.boundary(k)).is_zero() {
                return Err(Error::BoundarySquare(k));
            }
        }
        Ok(())
    }

    /// Specialization `T = 1`.
    pub fn at_one(&self) -> ChainComplex<i64> {
        ChainComplex {
            variant: Variant::Primary,
            coefficients: Coefficients::Z,
            generators: self.generators.clone(),
            boundaries: self
                .boundaries
                .iter()
                .map(|(k, m)| {
                    let v = m.map(|x| {
                        let r = x.at_one();
                        i64::try_from(r.to_integer()).expect("small integer entry")
                    });
                    (*k, v)
                })
                .collect(),
        }
    }
}

fn generator_filter(a: &Analysis, variant: Variant, orbit: &str) -> bool {
    let c = a.class.by_orbit[orbit];
    match variant {
        Variant::SemiPrimary => c.contractible && c.semi_primary,
        _ => c.primary,
    }
}

fn generators(a: &Analysis, variant: Variant) -> Result<BTreeMap<i64, Vec<ClassId>>> {
    let mut out: BTreeMap<i64, Vec<ClassId>> = BTreeMap::new();
    for orbit in a.tangle.orbits() {
        if !generator_filter(a, variant, &orbit) {
            continue;
        }
        let mu = *a
            .grading
            .mu
            .get(&orbit)
            .ok_or_else(|| Error::Ungradable(format!("{orbit}.0")))?;
        for residue in 0..a.tangle.power {
            out.entry(mu).or_default().push(ClassId {
                orbit: orbit.clone(),
                residue,
            });
        }
    }
    Ok(out)
}

/// Entries of `∂_k` as `(row, col, point q, shift)` contributions from the
/// representative of each column class.
fn assemble<T, F>(
    a: &Analysis,
    gens: &BTreeMap<i64, Vec<ClassId>>,
    entry: F,
) -> Result<BTreeMap<i64, Matrix<T>>>
where
    T: Clone + Zero + Send + std::ops::Add<Output = T>,
    F: Fn(usize, usize) -> Result<Option<T>> + Sync,
{
    let t = &a.tangle;
    let mut out = BTreeMap::new();
    for (&k, cols) in gens {
        let Some(rows) = gens.get(&(k - 1)) else { continue };
        let row_of: BTreeMap<&ClassId, usize> = rows.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let columns: Vec<Result<Vec<(usize, T)>>> = cols
            .par_iter()
            .map(|c| {
                let p = t
                    .representative(c)
                    .ok_or_else(|| Error::WindowTooSmall(format!("no representative for {c}")))?;
                let mut col = Vec::new();
                for q in 0..t.len() {
                    let Some(&row) = row_of.get(&t.class_of(q)) else { continue };
                    if let Some(v) = entry(p, q)? {
                        col.push((row, v));
                    }
                }
                Ok(col)
            })
            .collect();
        let mut m = Matrix::<T>::zeros(rows.len(), cols.len());
        for (j, col) in columns.into_iter().enumerate() {
            for (i, v) in col? {
                let cur = m[(i, j)].clone();
                m[(i, j)] = cur + v;
            }
        }
        out.insert(k, m);
    }
    Ok(out)
}

fn quotient_once(a: &Analysis, variant: Variant, kind: SignKind) -> Result<ChainComplex<i64>> {
    let gens = generators(a, variant)?;
    let z2 = matches!(kind, SignKind::N(_)) && a.tangle.effective_orientation() == MapOrientation::Reversing;
    let mut boundaries = assemble(a, &gens, |p, q| {
        let s = match (variant, kind) {
            (Variant::SemiPrimary, SignKind::M) => match a.bigon(p, q) {
                Some(_) => jump_sign(&a.tangle, p, q)?,
                None => 0,
            },
            _ => sign(a, kind, p, q)?,
        };
        Ok((s != 0).then_some(s))
    })?;
    if z2 {
        for m in boundaries.values_mut() {
            *m = m.map(|x| x.rem_euclid(2));
        }
    }
    Ok(ChainComplex {
        variant,
        coefficients: if z2 { Coefficients::Z2 } else { Coefficients::Z },
        generators: gens,
        boundaries,
    })
}

fn stable<T: PartialEq + fmt::Debug>(
    a: &Analysis,
    build: impl Fn(&Analysis) -> Result<T>,
) -> Result<T> {
    let full = build(a)?;
    if a.tangle.is_empty() {
        return Ok(full);
    }
    let k = a.tangle.window;
    if k < a.tangle.power {
        return Err(Error::WindowTooSmall(format!(
            "window {k} cannot check stability of representatives 0..{}",
            a.tangle.power - 1
        )));
    }
    let smaller = build(&a.restrict(k - 1)?)?;
    if smaller != full {
        return Err(Error::WindowUnstable(format!("window {k} and {} give different boundaries", k - 1)));
    }
    Ok(full)
}

/// Boundary of the quotient complex, checked for window stability.
pub fn quotient_boundary(a: &Analysis, variant: Variant, kind: SignKind) -> Result<ChainComplex<i64>> {
    let kind = match variant {
        Variant::Chaotic => SignKind::Nu,
        _ => kind,
    };
    stable(a, |x| quotient_once(x, variant, kind))
}

fn equivariant_once(a: &Analysis) -> Result<ChainComplex<Laurent>> {
    let gens = generators(a, Variant::Primary)?;
    let t = &a.tangle;
    let boundaries = assemble(a, &gens, |p, q| {
        let m = m_sign(a, p, q)?;
        Ok((m != 0).then(|| {
            let shift = t.class_shift(q) - t.class_shift(p);
            Laurent::monomial(BigInt::from(m), shift)
        }))
    })?;
    Ok(ChainComplex {
        variant: Variant::Equivariant,
        coefficients: Coefficients::LaurentQ,
        generators: gens,
        boundaries,
    })
}

/// Boundary `𝔡 p = Σ_n m(p, q^n) T^n q` on orbit generators.
pub fn equivariant_boundary(a: &Analysis) -> Result<ChainComplex<Laurent>> {
    stable(a, equivariant_once)
}

/// `σ₀₁` implied by the bigons through `n_u · n_s = σ₀₁ · (−1)^μ(p)`;
/// `None` without bigons.
pub fn implied_sigma01(a: &Analysis) -> Result<Option<i8>> {
    let t = &a.tangle;
    let mut found: Option<i8> = None;
    for (orbit, c) in &a.class.by_orbit {
        if !c.primary {
            continue;
        }
        let p = t.id(orbit, 0).expect("iterate 0");
        let Some(mu) = a.mu(p) else { continue };
        for q in 0..t.len() {
            if !a.is_primary(q) || a.bigon(p, q).is_none() {
                continue;
            }
            let prod = orientation_sign(t, p, q, Orientation::UPlus) * orientation_sign(t, p, q, Orientation::SPlus);
            let sigma = (prod * if mu.rem_euclid(2) == 0 { 1 } else { -1 }) as i8;
            match found {
                Some(s) if s != sigma => {
                    return Err(Error::Theorem(format!(
                        "bigon {} -> {} implies σ₀₁ = {sigma}, others imply {s}",
                        t.point(p).reference(),
                        t.point(q).reference()
                    )))
                }
                _ => found = Some(sigma),
            }
        }
    }
    if let (Some(s), Some(h)) = (found, t.sigma01) {
        if s != h {
            return Err(Error::Theorem(format!("declared σ₀₁ = {h} but bigons imply {s}")));
        }
    }
    Ok(found.or(t.sigma01))
}

/// Direction of each homoclinic loop, keyed by the index ±1 primary orbit
/// whose convex corner at `x` it is read from: `+1` when the loop leaving `x`
/// along `W^u` and returning along `W^s` runs clockwise.
pub fn loop_orientations(a: &Analysis) -> Result<BTreeMap<String, i8>> {
    let Some(sigma) = implied_sigma01(a)? else { return Ok(BTreeMap::new()) };
    let t = &a.tangle;
    let mut out = BTreeMap::new();
    for (orbit, c) in &a.class.by_orbit {
        let p = t.id(orbit, 0).expect("iterate 0");
        if !c.primary || a.mu(p).map(i64::abs) != Some(1) {
            continue;
        }
        let pt = t.point(p);
        out.insert(orbit.clone(), -(sgn(pt.t_u) * sgn(pt.t_s)) as i8 * sigma);
    }
    Ok(out)
}

/// The common direction of all loops; `None` without loops or when they
/// run in opposite directions.
pub fn loop_orientation(a: &Analysis) -> Result<Option<i8>> {
    let o = loop_orientations(a)?;
    let mut dirs = o.values();
    let first = dirs.next().copied();
    Ok(first.filter(|f| dirs.all(|d| d == f)))
}

fn class_list(cs: &[ClassId]) -> String {
    cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn laurent_entry(x: &Laurent) -> String {
    let Some(terms) = x.integer_terms() else { return x.to_string().replace(' ', "") };
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (c, e)) in terms.iter().rev().enumerate() {
        if i > 0 && c.sign() != num_bigint::Sign::Minus {
            s.push('+');
        }
        let _ = write!(s, "{c}*T^{e}");
    }
    s
}

pub trait DumpEntry {
    fn dump(&self) -> String;
}

impl DumpEntry for i64 {
    fn dump(&self) -> String {
        self.to_string()
    }
}

impl DumpEntry for Laurent {
    fn dump(&self) -> String {
        laurent_entry(self)
    }
}

/// `deg <k>: rows=<classes> cols=<classes>` followed by the matrix rows.
pub fn dump<T: DumpEntry + Clone + Zero>(c: &ChainComplex<T>) -> String {
    let mut s = String::new();
    for k in c.degrees() {
        let rows = c.generators.get(&(k - 1)).map(|v| class_list(v)).unwrap_or_default();
        let cols = class_list(&c.generators[&k]);
        let _ = writeln!(s, "deg {k}: rows={rows} cols={cols}");
        let m = c.boundary(k);
        for i in 0..m.rows() {
            let row: Vec<String> = m.row(i).iter().map(DumpEntry::dump).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangle::{PointRecord, Surface};

    fn orbit(name: &str, k: i64, u: f64, s: f64, mu: i64) -> Vec<PointRecord> {
        (-k..=k)
            .map(|n| PointRecord {
                orbit: name.into(),
                iterate: n,
                t_u: 2f64.powf(u + n as f64),
                t_s: 2f64.powf(s - n as f64),
                crossing: if mu % 2 == 0 { 1 } else { -1 },
                a_u: vec![],
                a_s: vec![],
                mu: Some(mu),
            })
            .collect()
    }

    fn single_pair() -> Analysis {
        let mut pts = orbit("p", 4, 0.0, 0.0, -1);
        pts.extend(orbit("q", 4, 0.5, -0.5, -2));
        let t = Tangle::new(Surface::Plane, MapOrientation::Preserving, 4, pts, vec![], None).unwrap();
        Analysis::new(t).unwrap()
    }

    #[test]
    fn single_pair_quotient_vanishes() {
        let a = single_pair();
        let c = quotient_boundary(&a, Variant::Primary, SignKind::M).unwrap();
        assert_eq!(c.boundary(-1), Matrix::from_rows(vec![vec![0]], 1));
        c.check_square().unwrap();
    }

    #[test]
    fn single_pair_equivariant() {
        let a = single_pair();
        let c = equivariant_boundary(&a).unwrap();
        assert_eq!(c.boundary(-1)[(0, 0)].to_string(), "1 - T^-1");
        assert_eq!(c.at_one().boundary(-1), Matrix::from_rows(vec![vec![0]], 1));
    }

    #[test]
    fn n_signs_flip_with_orientation() {
        let a = single_pair();
        let plus = quotient_boundary(&a, Variant::Primary, SignKind::N(Orientation::UPlus)).unwrap();
        let minus = quotient_boundary(&a, Variant::Primary, SignKind::N(Orientation::UMinus)).unwrap();
        assert_eq!(plus.boundary(-1), (-&minus.boundary(-1)));
    }

    #[test]
    fn empty_tangle_has_no_generators() {
        let a = Analysis::new(Tangle::empty(Surface::Plane)).unwrap();
        let c = quotient_boundary(&a, Variant::Primary, SignKind::M).unwrap();
        assert!(c.generators.is_empty());
        assert!(equivariant_boundary(&a).unwrap().boundaries.is_empty());
    }

    #[test]
    fn dump_format() {
        let a = single_pair();
        let c = quotient_boundary(&a, Variant::Primary, SignKind::M).unwrap();
        assert_eq!(dump(&c), "deg -2: rows= cols=q^0\ndeg -1: rows=q^0 cols=p^0\n0\n");
        let e = equivariant_boundary(&a).unwrap();
        assert!(dump(&e).contains("1*T^0-1*T^-1"));
    }
}
