//! Sorted table of power-sum profiles of nondecreasing s-tuples.

use rayon::prelude::*;

use crate::error::{LabError, Result};

/// Bytes per table entry during the build (key + count, plus the sort copy).
pub const BYTES_PER_ENTRY: u128 = 64;

fn overflow(what: &str) -> LabError {
    LabError::Overflow(what.to_string())
}

/// (sum n_i, sum n_i^2, ..., sum n_i^d) with checked 128-bit arithmetic.
pub fn power_sum_profile(tuple: &[u64], d: usize) -> Result<Vec<i128>> {
    if d == 0 {
        return Err(LabError::Domain("d must be >= 1".into()));
    }
    let mut out = vec![0i128; d];
    for &n in tuple {
        let mut pw: i128 = 1;
        for slot in out.iter_mut() {
            pw = pw.checked_mul(n as i128).ok_or_else(|| overflow("n^j"))?;
            *slot = slot.checked_add(pw).ok_or_else(|| overflow("power sum"))?;
        }
    }
    Ok(out)
}

/// binomial(n, k) in u128, saturating.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = match r.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    r
}

/// Number of nondecreasing s-tuples from [1,N].
pub fn multiset_count(s: u32, n: u64) -> u128 {
    binomial(n as u128 + s as u128 - 1, s as u128)
}

/// Packs a profile into one u128 when every component fits its field.
/// Component 1 sits in the highest bits, so numeric order is lexicographic.
#[derive(Clone, Debug)]
pub struct KeyCodec {
    /// lowest possible value of each component (s, the all-ones tuple)
    base: i128,
    /// largest offset of each component, s(N^i - 1)
    span: Vec<i128>,
    bits: Vec<u32>,
    packed: bool,
}

impl KeyCodec {
    pub fn new(s: u32, d: usize, n: u64) -> Result<Self> {
        let mut span = Vec::with_capacity(d);
        let mut pw: i128 = 1;
        for _ in 0..d {
            pw = pw.checked_mul(n as i128).ok_or_else(|| overflow("N^d"))?;
            span.push((pw - 1).checked_mul(s as i128).ok_or_else(|| overflow("sN^d"))?);
        }
        let bits: Vec<u32> = span.iter().map(|&m| 128 - (m as u128).leading_zeros()).collect();
        let packed = bits.iter().sum::<u32>() <= 128;
        Ok(KeyCodec {
            base: s as i128,
            span,
            bits,
            packed,
        })
    }

    pub fn is_packed(&self) -> bool {
        self.packed
    }

    pub fn span(&self) -> &[i128] {
        &self.span
    }

    /// Offsets g_i - s, or None when some component is out of range.
    pub fn offsets(&self, g: &[i128]) -> Option<Vec<u128>> {
        g.iter()
            .zip(&self.span)
            .map(|(&v, &m)| {
                let o = v - self.base;
                (0..=m).contains(&o).then_some(o as u128)
            })
            .collect()
    }

    pub fn pack(&self, off: &[u128]) -> u128 {
        let mut k: u128 = 0;
        for (o, b) in off.iter().zip(&self.bits) {
            k = if *b == 128 { *o } else { (k << b) | o };
        }
        k
    }

    pub fn unpack(&self, mut k: u128) -> Vec<i128> {
        let mut out = vec![0i128; self.bits.len()];
        for i in (0..self.bits.len()).rev() {
            let b = self.bits[i];
            let mask = if b == 128 { u128::MAX } else { (1u128 << b) - 1 };
            out[i] = (k & mask) as i128 + self.base;
            k = if b == 128 { 0 } else { k >> b };
        }
        out
    }
}

#[derive(Clone, Debug)]
enum Keys {
    Packed(Vec<u128>),
    Wide(Vec<Vec<u128>>),
}

/// rho_s(g): ordered s-tuples in [1,N]^s with profile g.
#[derive(Clone, Debug)]
pub struct ProfileTable {
    pub s: u32,
    pub d: usize,
    pub n: u64,
    codec: KeyCodec,
    keys: Keys,
    counts: Vec<u128>,
}

fn factorial(k: u32) -> u128 {
    (1..=k as u128).product()
}

/// Depth-first walk over nondecreasing tuples, tracking offset power sums.
struct Walker<'a, F> {
    n: u64,
    sf: u128,
    powers: &'a [Vec<u128>],
    sums: Vec<Vec<u128>>,
    tuple: Vec<u64>,
    emit: F,
}

impl<F: FnMut(&[u128], u128)> Walker<'_, F> {
    fn go(&mut self, pos: usize, lo: u64, hi: u64) {
        if pos == self.tuple.len() {
            // multinomial s! / prod(multiplicity!)
            let mut denom: u128 = 1;
            let mut run: u128 = 1;
            for i in 1..self.tuple.len() {
                if self.tuple[i] == self.tuple[i - 1] {
                    run += 1;
                    denom *= run;
                } else {
                    run = 1;
                }
            }
            (self.emit)(&self.sums[pos], self.sf / denom);
            return;
        }
        for v in lo..=hi {
            self.tuple[pos] = v;
            for j in 0..self.sums[pos].len() {
                self.sums[pos + 1][j] = self.sums[pos][j] + self.powers[v as usize][j];
            }
            self.go(pos + 1, v, self.n);
        }
    }
}

/// Nondecreasing tuples whose first entry is `first`, reported as
/// (offset profile, multinomial weight).
fn walk_shard(s: u32, n: u64, first: u64, powers: &[Vec<u128>], emit: impl FnMut(&[u128], u128)) {
    let d = powers[0].len();
    let mut w = Walker {
        n,
        sf: factorial(s),
        powers,
        sums: vec![vec![0u128; d]; s as usize + 1],
        tuple: vec![0u64; s as usize],
        emit,
    };
    w.go(0, first, first);
}

fn compress<K: Ord + Clone>(mut v: Vec<(K, u128)>) -> Vec<(K, u128)> {
    v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(K, u128)> = Vec::with_capacity(v.len());
    for (k, c) in v {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += c,
            _ => out.push((k, c)),
        }
    }
    out.shrink_to_fit();
    out
}

impl ProfileTable {
    /// Builds the table, refusing when the pre-flight estimate exceeds
    /// `mem_budget` bytes.
    pub fn build(s: u32, d: usize, n: u64, mem_budget: u128) -> Result<Self> {
        if s == 0 || d == 0 || n == 0 {
            return Err(LabError::Domain(format!(
                "need s, d, N >= 1 (got s={s} d={d} N={n})"
            )));
        }
        let entries = multiset_count(s, n);
        let needed = entries.saturating_mul(BYTES_PER_ENTRY);
        if needed > mem_budget {
            return Err(LabError::Budget {
                what: format!("profile table for s={s} d={d} N={n}"),
                needed,
                budget: mem_budget,
            });
        }
        let codec = KeyCodec::new(s, d, n)?;
        // offsets of n^j from the all-ones profile: n^j - 1 per slot
        let powers: Vec<Vec<u128>> = (0..=n)
            .map(|v| {
                (1..=d as u32)
                    .map(|j| (v as u128).pow(j).saturating_sub(1))
                    .collect()
            })
            .collect();
        let shards: Vec<u64> = (1..=n).collect();
        let (keys, counts) = if codec.packed {
            let parts: Vec<Vec<(u128, u128)>> = shards
                .par_iter()
                .map(|&first| {
                    let mut v = Vec::new();
                    walk_shard(s, n, first, &powers, |off, w| v.push((codec.pack(off), w)));
                    compress(v)
                })
                .collect();
            let all = compress(parts.into_iter().flatten().collect());
            let (k, c): (Vec<u128>, Vec<u128>) = all.into_iter().unzip();
            (Keys::Packed(k), c)
        } else {
            let parts: Vec<Vec<(Vec<u128>, u128)>> = shards
                .par_iter()
                .map(|&first| {
                    let mut v = Vec::new();
                    walk_shard(s, n, first, &powers, |off, w| v.push((off.to_vec(), w)));
                    compress(v)
                })
                .collect();
            let all = compress(parts.into_iter().flatten().collect());
            let (k, c): (Vec<Vec<u128>>, Vec<u128>) = all.into_iter().unzip();
            (Keys::Wide(k), c)
        };
        Ok(ProfileTable {
            s,
            d,
            n,
            codec,
            keys,
            counts,
        })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn codec(&self) -> &KeyCodec {
        &self.codec
    }

    pub fn is_packed(&self) -> bool {
        self.codec.packed
    }

    /// Profile of the i-th entry (sorted lexicographically).
    pub fn profile(&self, i: usize) -> Vec<i128> {
        match &self.keys {
            Keys::Packed(k) => self.codec.unpack(k[i]),
            Keys::Wide(k) => k[i].iter().map(|&o| o as i128 + self.codec.base).collect(),
        }
    }

    pub fn count_at(&self, i: usize) -> u128 {
        self.counts[i]
    }

    /// rho(g), zero for absent profiles.
    pub fn get(&self, g: &[i128]) -> u128 {
        let Some(off) = self.codec.offsets(g) else {
            return 0;
        };
        let idx = match &self.keys {
            Keys::Packed(k) => k.binary_search(&self.codec.pack(&off)),
            Keys::Wide(k) => k.binary_search(&off),
        };
        idx.map_or(0, |i| self.counts[i])
    }

    /// sum of rho(g) over the table, which is N^s.
    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    /// sum_g rho(g)^2.
    pub fn self_correlation(&self) -> Result<u128> {
        self.counts.iter().try_fold(0u128, |acc, &c| {
            c.checked_mul(c)
                .and_then(|v| acc.checked_add(v))
                .ok_or_else(|| overflow("sum of squares"))
        })
    }

    /// sum_g rho(g) rho(g + h).
    pub fn correlation(&self, h: &[i128]) -> Result<u128> {
        if h.iter().all(|&x| x == 0) {
            return self.self_correlation();
        }
        let parts: Vec<Result<u128>> = (0..self.len())
            .into_par_iter()
            .with_min_len(1024)
            .map(|i| {
                let g = self.profile(i);
                let shifted: Vec<i128> = g.iter().zip(h).map(|(a, b)| a + b).collect();
                let other = self.get(&shifted);
                self.counts[i].checked_mul(other).ok_or_else(|| overflow("rho product"))
            })
            .collect();
        parts.into_iter().try_fold(0u128, |acc, r| {
            acc.checked_add(r?).ok_or_else(|| overflow("correlation"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles() {
        assert_eq!(power_sum_profile(&[1, 2], 2).unwrap(), vec![3, 5]);
        assert_eq!(power_sum_profile(&[3], 3).unwrap(), vec![3, 9, 27]);
        assert_eq!(power_sum_profile(&[1, 1, 1], 1).unwrap(), vec![3]);
        assert!(power_sum_profile(&[u64::MAX], 3).is_err());
    }

    #[test]
    fn codec_roundtrip() {
        let c = KeyCodec::new(3, 3, 17).unwrap();
        assert!(c.is_packed());
        let g = vec![10, 200, 3000];
        let off = c.offsets(&g).unwrap();
        assert_eq!(c.unpack(c.pack(&off)), g);
        assert!(c.offsets(&[2, 5, 5]).is_none());
    }

    #[test]
    fn table_totals_and_lookup() {
        let t = ProfileTable::build(2, 2, 7, u128::MAX).unwrap();
        assert_eq!(t.total(), 49);
        // (1,2) and (2,1) share profile (3,5)
        assert_eq!(t.get(&[3, 5]), 2);
        assert_eq!(t.get(&[2, 2]), 1);
        assert_eq!(t.get(&[4, 9]), 0);
    }

    #[test]
    fn wide_keys_agree_with_packed() {
        // d = 7 with N = 400 overflows 128 packed bits
        let c = KeyCodec::new(2, 7, 400).unwrap();
        assert!(!c.is_packed());
        let t = ProfileTable::build(2, 7, 400, u128::MAX).unwrap();
        assert_eq!(t.total(), 160_000);
        assert_eq!(t.self_correlation().unwrap(), 2 * 400 * 400 - 400);
    }

    #[test]
    fn budget_is_enforced() {
        let e = ProfileTable::build(3, 2, 1000, 1 << 20).unwrap_err();
        assert!(matches!(e, LabError::Budget { .. }));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(multiset_count(2, 4), 10);
        assert_eq!(binomial(3, 5), 0);
    }
}
