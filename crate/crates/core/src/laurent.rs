//! Laurent polynomials `Q[T, T⁻¹]` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `Σ coeffs[i] · T^(low + i)`, normalized so that the first and last
/// coefficients are nonzero (or `coeffs` is empty for zero).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Laurent {
    low: i64,
    coeffs: Vec<BigRational>,
}

impl Laurent {
    pub fn monomial(c: impl Into<BigRational>, e: i64) -> Self {
        Laurent::from_parts(e, vec![c.into()])
    }

    pub fn from_int_terms(terms: &[(i64, i64)]) -> Self {
        terms
            .iter()
            .fold(Laurent::zero(), |acc, &(c, e)| acc + Laurent::monomial(BigInt::from(c), e))
    }

    fn from_parts(mut low: i64, mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        coeffs.drain(..lead);
        low += lead as i64;
        if coeffs.is_empty() {
            low = 0;
        }
        Laurent { low, coeffs }
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    /// `high − low`, the Euclidean size; zero for units.
    pub fn span(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, e: i64) -> BigRational {
        let i = e - self.low;
        if i < 0 {
            return BigRational::zero();
        }
        self.coeffs
            .get(i as usize)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Evaluation at `T = 1`.
    pub fn at_one(&self) -> BigRational {
        self.coeffs.iter().fold(BigRational::zero(), |a, c| a + c)
    }

    /// Division with remainder: `self = q·d + r`, `span(r) < span(d)`.
    pub fn div_rem(&self, d: &Laurent) -> (Laurent, Laurent) {
        assert!(!d.is_zero(), "division by zero");
        if self.is_zero() {
            return (Laurent::zero(), Laurent::zero());
        }
        // Work with the polynomial parts A(T) = T^-a.low · a, B(T) likewise.
        let mut rem = self.coeffs.clone();
        let b = &d.coeffs;
        let db = b.len() - 1;
        let lead = b[db].clone();
        let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(db).max(1)];
        while rem.len() > db && !rem.is_empty() {
            let k = rem.len() - 1 - db;
            let c = rem.last().expect("nonempty").clone() / lead.clone();
            for (i, bi) in b.iter().enumerate() {
                rem[k + i] = rem[k + i].clone() - c.clone() * bi.clone();
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (
            Laurent::from_parts(self.low - d.low, quot),
            Laurent::from_parts(self.low, rem),
        )
    }

    /// Unit `u` with `u · self` monic and of lowest exponent 0, plus its inverse.
    pub fn normalizer(&self) -> (Laurent, Laurent) {
        if self.is_zero() {
            return (Laurent::one(), Laurent::one());
        }
        let lead = self.coeffs.last().expect("nonzero").clone();
        let u = Laurent::monomial(lead.recip(), -self.low);
        let inv = Laurent::monomial(lead, self.low);
        (u, inv)
    }

    /// Integer coefficients when all coefficients are integral.
    pub fn integer_terms(&self) -> Option<Vec<(BigInt, i64)>> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| c.is_integer().then(|| (c.to_integer(), self.low + i as i64)))
            .collect()
    }
}

impl Zero for Laurent {
    fn zero() -> Self {
        Laurent { low: 0, coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Laurent {
    fn one() -> Self {
        Laurent::monomial(BigInt::one(), 0)
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(self, rhs: Laurent) -> Laurent {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let low = self.low.min(rhs.low);
        let high = self.high().max(rhs.high());
        let coeffs = (low..=high).map(|e| self.coeff(e) + rhs.coeff(e)).collect();
        Laurent::from_parts(low, coeffs)
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent {
            low: self.low,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(self, rhs: Laurent) -> Laurent {
        self + (-rhs)
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        if self.is_zero() || rhs.is_zero() {
            return Laurent::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Laurent::from_parts(self.low + rhs.low, coeffs)
    }
}

fn power(e: i64) -> String {
    match e {
        0 => String::new(),
        1 => "T".into(),
        _ => format!("T^{e}"),
    }
}

impl fmt::Display for Laurent {
    /// Highest power first, e.g. `T - 1`, `2*T^-1 + 1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let e = self.low + i as i64;
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let p = power(e);
            if p.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&p)?;
            } else {
                write!(f, "{mag}*{p}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(terms: &[(i64, i64)]) -> Laurent {
        Laurent::from_int_terms(terms)
    }

    #[test]
    fn arithmetic() {
        let a = l(&[(1, 0), (-1, -1)]);
        assert_eq!(a.to_string(), "1 - T^-1");
        let b = a.clone() * Laurent::monomial(BigInt::from(1), 1);
        assert_eq!(b.to_string(), "T - 1");
        assert!((a.clone() - a).is_zero());
        assert_eq!(b.at_one(), BigRational::zero());
    }

    #[test]
    fn euclidean_division() {
        let a = l(&[(1, 3), (2, 0), (5, -2)]);
        let d = l(&[(1, 1), (-1, 0)]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(q.clone() * d.clone() + r.clone(), a);
        assert!(r.span() < d.span() || r.is_zero());
    }

    #[test]
    fn normalizer_makes_monic() {
        let a = l(&[(-2, -1), (2, -2)]);
        let (u, inv) = a.normalizer();
        assert_eq!((u.clone() * a).to_string(), "T - 1");
        assert!((u * inv).is_one());
    }
}
