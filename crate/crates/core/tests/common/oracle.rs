//! Independent reference computations used to cross-check the library.

use num_integer::Integer;
use rand::Rng;

/// Plain nested-loop product.
pub fn matmul(a: &[Vec<i64>], b: &[Vec<i64>], inner: usize, cols: usize) -> Vec<Vec<i64>> {
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn rows(m: &tanglefloer::matrix::Matrix<i64>) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// Cofactor expansion.
pub fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `d_k = gcd of the k × k minors` for `k = 1 ..` while nonzero. The
/// invariant factors are the successive quotients.
pub fn determinantal_divisors(a: &[Vec<i64>], rows: usize, cols: usize) -> Vec<i64> {
    let mut out = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut g = 0i64;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let m: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j]).collect()).collect();
                g = g.gcd(&det(&m));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g);
    }
    out
}

/// Rank over `Q` by fraction-free elimination in `i128`.
pub fn rank(a: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            let (a, b) = (m[r][c], m[i][c]);
            for j in 0..cols {
                m[i][j] = m[i][j] * a - m[r][j] * b;
            }
            let g = m[i].iter().fold(0i128, |g, &x| g.gcd(&x));
            if g > 1 {
                m[i].iter_mut().for_each(|x| *x /= g);
            }
        }
        r += 1;
    }
    r
}

/// A random `r × c` matrix with `1 ≤ r, c ≤ 4` and small entries, a quarter
/// of them zero.
pub fn random_matrix(rng: &mut impl Rng) -> (usize, usize, Vec<Vec<i64>>) {
    let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
    let m = (0..r)
        .map(|_| (0..c).map(|_| if rng.gen_bool(0.25) { 0 } else { rng.gen_range(-6..=6) }).collect())
        .collect();
    (r, c, m)
}
