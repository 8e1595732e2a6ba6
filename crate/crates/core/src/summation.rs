//! Order-fixed summation so results do not depend on the thread schedule.

use num_complex::Complex64;
use rayon::prelude::*;

/// Items per block in blocked parallel reductions. Block boundaries depend
/// only on the problem size, never on the number of threads.
pub const BLOCK: usize = 4096;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_c(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

/// Sum of f(i) for i in 0..n: pairwise inside fixed blocks, blocks in
/// parallel, then pairwise over block totals.
pub fn par_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let nblocks = n.div_ceil(BLOCK);
    let totals: Vec<f64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n);
            let buf: Vec<f64> = (lo..hi).map(&f).collect();
            pairwise_sum(&buf)
        })
        .collect();
    pairwise_sum(&totals)
}

pub fn par_sum_c<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let nblocks = n.div_ceil(BLOCK);
    let totals: Vec<Complex64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n);
            let buf: Vec<Complex64> = (lo..hi).map(&f).collect();
            pairwise_sum_c(&buf)
        })
        .collect();
    pairwise_sum_c(&totals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_integers() {
        let xs: Vec<f64> = (1..=10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 50_005_000.0);
        assert_eq!(par_sum(10_000, |i| (i + 1) as f64), 50_005_000.0);
    }

    #[test]
    fn independent_of_thread_count() {
        let f = |i: usize| ((i as f64) * 0.37).sin();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| par_sum(100_000, f));
        let b = three.install(|| par_sum(100_000, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
