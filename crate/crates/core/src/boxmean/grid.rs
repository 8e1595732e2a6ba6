//! Tensor-grid evaluation of sum over nodes of f(|S(x)|^2).
//!
//! Axis j holds a table of e(x_{j,m} n^j) for every node m and every n, so a
//! node's sum is the product of one row per axis. Partial products are built
//! level by level, which costs about N multiplications per node.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::phase::PhaseEngine;
use crate::summation::{pairwise_sum, pairwise_sum_c};
use crate::weyl::e;

/// Row-major table: entry (m, i) is the factor of node m at n = i + 1.
pub(crate) struct AxisTable {
    pub nodes: usize,
    pub data: Vec<Complex64>,
}

impl AxisTable {
    fn row(&self, m: usize, n: usize) -> &[Complex64] {
        &self.data[m * n..(m + 1) * n]
    }
}

/// Nodes x = xi + delta (m + 1/2) / count on axis j (1-based degree), with
/// the monomial phase x n^j reduced exactly.
pub(crate) fn midpoint_axis(xi: f64, delta: f64, count: usize, j: usize, n: u64) -> AxisTable {
    let mut data = Vec::with_capacity(count * n as usize);
    let mut coords = vec![0.0; j];
    for m in 0..count {
        let x = xi + delta * (m as f64 + 0.5) / count as f64;
        coords[j - 1] = x - x.floor();
        let eng = PhaseEngine::new(&coords);
        data.extend((1..=n).map(|k| e(eng.phase(k))));
    }
    AxisTable { nodes: count, data }
}

/// Nodes m / modulus on the full circle; phases m n^j mod modulus are exact.
pub(crate) fn torus_axis(modulus: u64, j: usize, n: u64) -> AxisTable {
    let roots: Vec<Complex64> = (0..modulus).map(|r| e(r as f64 / modulus as f64)).collect();
    let md = modulus as u128;
    let pw: Vec<u128> = (1..=n as u128)
        .map(|k| {
            let mut p = 1u128;
            for _ in 0..j {
                p = p * (k % md) % md;
            }
            p
        })
        .collect();
    let mut data = Vec::with_capacity(modulus as usize * n as usize);
    for m in 0..md {
        data.extend(pw.iter().map(|p| roots[(m * p % md) as usize]));
    }
    AxisTable {
        nodes: modulus as usize,
        data,
    }
}

/// Sum over all grid nodes of f(|S|^2) where S = sum_n a_n prod_j T_j(m_j, n).
pub(crate) fn grid_sum<F>(tables: &[AxisTable], a: &[Complex64], f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let n = a.len();
    let first = &tables[0];
    let vals: Vec<f64> = (0..first.nodes)
        .into_par_iter()
        .map(|m| {
            let p: Vec<Complex64> = a.iter().zip(first.row(m, n)).map(|(x, y)| x * y).collect();
            descend(&tables[1..], &p, &f)
        })
        .collect();
    pairwise_sum(&vals)
}

fn descend<F: Fn(f64) -> f64>(tables: &[AxisTable], p: &[Complex64], f: &F) -> f64 {
    let n = p.len();
    match tables.split_first() {
        None => f(pairwise_sum_c(p).norm_sqr()),
        Some((t, rest)) => {
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            let vals: Vec<f64> = (0..t.nodes)
                .map(|m| {
                    if rest.is_empty() {
                        let s = pairwise_prod_sum(p, t.row(m, n), &mut buf);
                        f(s.norm_sqr())
                    } else {
                        let q: Vec<Complex64> = p.iter().zip(t.row(m, n)).map(|(x, y)| x * y).collect();
                        descend(rest, &q, f)
                    }
                })
                .collect();
            pairwise_sum(&vals)
        }
    }
}

fn pairwise_prod_sum(p: &[Complex64], row: &[Complex64], buf: &mut [Complex64]) -> Complex64 {
    for ((b, x), y) in buf.iter_mut().zip(p).zip(row) {
        *b = x * y;
    }
    pairwise_sum_c(buf)
}
