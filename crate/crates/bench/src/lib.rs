//! Shared inputs for the benchmarks.

use tanglefloer::matrix::Matrix;
use tanglefloer::{tgl, Tangle};

pub const FIGURE8: &str = include_str!("../../../fixtures/figure8.tgl");
pub const TILTED: &str = include_str!("../../../fixtures/tilted.tgl");
pub const CHAOS: &str = include_str!("../../../fixtures/chaos.tgl");

pub fn tangle(text: &str) -> Tangle {
    tgl::parse(text).expect("bundled fixtures parse")
}

/// A dense `n × n` integer matrix with a fixed pseudo-random pattern.
pub fn dense(n: usize) -> Matrix<i64> {
    let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    x ^= x << 13;
                    x ^= x >> 7;
                    x ^= x << 17;
                    (x % 13) as i64 - 6
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows, n)
}
