//! Smith normal form over Euclidean rings (the integers and `Q[T, T⁻¹]`).

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::laurent::Laurent;
use crate::matrix::Matrix;

pub trait EuclideanRing:
    Clone + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    type Size: Ord;
    fn size(&self) -> Self::Size;
    fn div_rem_e(&self, d: &Self) -> (Self, Self);
    /// Unit `u` (and its inverse) turning `self` into its canonical associate.
    fn normalizer(&self) -> (Self, Self);
}

impl EuclideanRing for BigInt {
    type Size = BigUint;
    fn size(&self) -> BigUint {
        self.magnitude().clone()
    }
    fn div_rem_e(&self, d: &Self) -> (Self, Self) {
        self.div_mod_floor(d)
    }
    fn normalizer(&self) -> (Self, Self) {
        if self.is_negative() {
            (-BigInt::one(), -BigInt::one())
        } else {
            (BigInt::one(), BigInt::one())
        }
    }
}

impl EuclideanRing for Laurent {
    type Size = usize;
    fn size(&self) -> usize {
        self.span()
    }
    fn div_rem_e(&self, d: &Self) -> (Self, Self) {
        self.div_rem(d)
    }
    fn normalizer(&self) -> (Self, Self) {
        Laurent::normalizer(self)
    }
}

/// `U · A · V = D` with `U`, `V` invertible and `D` diagonal, each diagonal
/// entry dividing the next.
#[derive(Debug, Clone)]
pub struct Snf<T> {
    pub u: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: EuclideanRing> Snf<T> {
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

fn min_entry<T: EuclideanRing>(d: &Matrix<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.size() < d[(bi, bj)].size()) {
                best = Some((i, j));
            }
        }
    }
    best
}

pub fn smith_normal_form<T: EuclideanRing>(a: &Matrix<T>) -> Snf<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::<T>::identity(m);
    let mut v = Matrix::<T>::identity(n);
    for t in 0..m.min(n) {
        let Some((pi, pj)) = min_entry(&d, t) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let pivot = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let (q, r) = d[(i, t)].div_rem_e(&pivot);
                d.row_axpy(i, t, &q);
                u.row_axpy(i, t, &q);
                if !r.is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (q, r) = d[(t, j)].div_rem_e(&pivot);
                d.col_axpy(j, t, &q);
                v.col_axpy(j, t, &q);
                if !r.is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let (pi, pj) = min_entry_cross(&d, t);
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].div_rem_e(&pivot).1.is_zero());
            match bad {
                Some((i, _)) => {
                    let minus_one = -T::one();
                    d.row_axpy(t, i, &minus_one);
                    u.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        let (unit, _) = d[(t, t)].normalizer();
        d.scale_row(t, &unit);
        u.scale_row(t, &unit);
    }
    Snf { u, d, v }
}

/// Smallest nonzero entry in row `t` or column `t` (from position `t`).
fn min_entry_cross<T: EuclideanRing>(d: &Matrix<T>, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut consider = |i: usize, j: usize| {
        let x = &d[(i, j)];
        if !x.is_zero() && (d[best].is_zero() || x.size() < d[best].size()) {
            best = (i, j);
        }
    };
    for i in t..d.rows() {
        consider(i, t);
    }
    for j in t..d.cols() {
        consider(t, j);
    }
    best
}

pub fn to_big(a: &Matrix<i64>) -> Matrix<BigInt> {
    a.map(|&x| BigInt::from(x))
}

/// Rank of an integer matrix over the field with two elements.
pub fn rank_mod2(a: &Matrix<i64>) -> usize {
    let mut rows: Vec<Vec<bool>> = (0..a.rows())
        .map(|i| a.row(i).iter().map(|x| x.rem_euclid(2) == 1).collect())
        .collect();
    let mut rank = 0;
    for c in 0..a.cols() {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: Vec<Vec<i64>>, cols: usize) -> Matrix<BigInt> {
        to_big(&Matrix::from_rows(rows, cols))
    }

    fn diag(s: &Snf<BigInt>) -> Vec<i64> {
        s.diagonal().iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn identity_and_zero() {
        let id = big(vec![vec![1, 0], vec![0, 1]], 2);
        assert_eq!(diag(&smith_normal_form(&id)), vec![1, 1]);
        let z = big(vec![vec![0, 0, 0]], 3);
        assert_eq!(smith_normal_form(&z).rank(), 0);
    }

    #[test]
    fn two_by_two() {
        let a = big(vec![vec![2, 4], vec![6, 8]], 2);
        let s = smith_normal_form(&a);
        assert_eq!(diag(&s), vec![2, 4]);
        assert_eq!(&(&s.u * &a) * &s.v, s.d);
    }

    #[test]
    fn divisibility_repair() {
        let a = big(vec![vec![2, 0], vec![0, 3]], 2);
        assert_eq!(diag(&smith_normal_form(&a)), vec![1, 6]);
    }

    #[test]
    fn laurent_cyclic() {
        let t = |terms: &[(i64, i64)]| Laurent::from_int_terms(terms);
        let a = Matrix::from_rows(vec![vec![t(&[(1, 0), (-1, -1)])]], 1);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal()[0].to_string(), "T - 1");
    }

    #[test]
    fn mod2_rank() {
        let a = Matrix::from_rows(vec![vec![1, 1], vec![1, -1]], 2);
        assert_eq!(rank_mod2(&a), 1);
    }
}
