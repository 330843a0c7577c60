//! Exact integer combinatorics: binomials, multinomials, pair-class counts
//! and balanced test-class counts.
//!
//! All counts are arbitrary precision. Out-of-range binomials vanish
//! (`C(b, a) = 0` for `a < 0` or `a > b`), which the class-count formulas
//! rely on.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{ensure, Result};

/// Exact nonnegative count.
pub type BigCount = BigUint;

/// Default largest `n` whose binomial row is memoised.
pub const DEFAULT_CACHE_LIMIT: u64 = 2_000;
/// Hard bound on the number of memoised rows.
const MAX_CACHED_ROWS: usize = 4_096;
/// Below this many factors the product tree is not worth it.
const PRODUCT_TREE_THRESHOLD: u64 = 256;

/// Memo of binomial rows `C(n, 0..=n/2)`, filled on demand.
///
/// Safe for concurrent readers and writers. Rows above `limit` are computed
/// directly and never stored.
#[derive(Debug)]
pub struct BinomialCache {
    limit: u64,
    rows: RwLock<HashMap<u64, Arc<Vec<BigUint>>>>,
}

impl BinomialCache {
    pub fn new(limit: u64) -> Self {
        BinomialCache {
            limit,
            rows: RwLock::new(HashMap::new()),
        }
    }

    /// Process-wide cache with [`DEFAULT_CACHE_LIMIT`].
    pub fn global() -> &'static BinomialCache {
        static CACHE: OnceLock<BinomialCache> = OnceLock::new();
        CACHE.get_or_init(|| BinomialCache::new(DEFAULT_CACHE_LIMIT))
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn cached_rows(&self) -> usize {
        self.rows.read().map(|r| r.len()).unwrap_or(0)
    }

    /// `C(n, k)` with the vanishing convention for `k` outside `0..=n`.
    pub fn choose(&self, n: u64, k: i64) -> BigUint {
        if k < 0 || k as u64 > n {
            return BigUint::zero();
        }
        let k = (k as u64).min(n - k as u64);
        if n > self.limit {
            return binom_direct(n, k);
        }
        self.row(n)
            .map(|row| row[k as usize].clone())
            .unwrap_or_else(|| binom_direct(n, k))
    }

    fn row(&self, n: u64) -> Option<Arc<Vec<BigUint>>> {
        if let Some(row) = self.rows.read().ok()?.get(&n) {
            return Some(Arc::clone(row));
        }
        let half = (n / 2) as usize;
        let mut row = Vec::with_capacity(half + 1);
        let mut cur = BigUint::one();
        row.push(cur.clone());
        for k in 0..half as u64 {
            cur = cur * (n - k) / (k + 1);
            row.push(cur.clone());
        }
        let row = Arc::new(row);
        let mut rows = self.rows.write().ok()?;
        if rows.len() < MAX_CACHED_ROWS {
            rows.entry(n).or_insert_with(|| Arc::clone(&row));
        }
        Some(row)
    }
}

fn range_product(lo: u64, hi: u64) -> BigUint {
    // product of lo..=hi, balanced so the big multiplications stay even
    if lo > hi {
        return BigUint::one();
    }
    if hi - lo < 16 {
        let mut acc = BigUint::one();
        for x in lo..=hi {
            acc *= x;
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    range_product(lo, mid) * range_product(mid + 1, hi)
}

fn binom_direct(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    if k < PRODUCT_TREE_THRESHOLD {
        let mut acc = BigUint::one();
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    } else {
        range_product(n - k + 1, n) / range_product(1, k)
    }
}

/// `C(n, k)` through the global cache; zero outside `0..=n`.
pub(crate) fn choose(n: u64, k: i64) -> BigUint {
    BinomialCache::global().choose(n, k)
}

/// Like [`choose`] but also vanishes for a negative upper index, which
/// arises when a pair class cannot fit into `n` items.
pub(crate) fn choose_i(n: i64, k: i64) -> BigUint {
    if n < 0 {
        BigUint::zero()
    } else {
        choose(n as u64, k)
    }
}

/// Binomial coefficient. Returns 0 when `k < 0` or `k > n`.
pub fn binom(n: i64, k: i64) -> Result<BigCount> {
    ensure!(n >= 0, "binom: n must be nonnegative, got {n}");
    Ok(choose(n as u64, k))
}

/// Multinomial coefficient `n! / prod(parts_i!)`.
///
/// Any negative part gives 0. Nonnegative parts must sum to `n`.
pub fn multinom(n: i64, parts: &[i64]) -> Result<BigCount> {
    ensure!(n >= 0, "multinom: n must be nonnegative, got {n}");
    if parts.iter().any(|&p| p < 0) {
        return Ok(BigUint::zero());
    }
    let total: i64 = parts.iter().sum();
    ensure!(total == n, "multinom: parts {parts:?} sum to {total}, expected {n}");
    let mut rest = n as u64;
    let mut acc = BigUint::one();
    for &p in parts {
        acc *= choose(rest, p);
        rest -= p as u64;
    }
    Ok(acc)
}

/// Sizes of a pair of targets: `|T| = l`, `|T'| = m`, `|T ∩ T'| = p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairClassParams {
    pub n: u64,
    pub l: u64,
    pub m: u64,
    pub p: u64,
}

impl PairClassParams {
    pub fn new(n: u64, l: u64, m: u64, p: u64) -> Result<Self> {
        let params = PairClassParams { n, l, m, p };
        params.validate()?;
        Ok(params)
    }

    /// `0 <= p <= m <= l <= n` and `p < l`.
    pub fn validate(&self) -> Result<()> {
        let PairClassParams { n, l, m, p } = *self;
        ensure!(
            p <= m && m <= l && l <= n,
            "pair class needs 0 <= p <= m <= l <= n, got n={n} l={l} m={m} p={p}"
        );
        ensure!(p < l, "pair class needs p < l (distinct targets), got l={l} p={p}");
        Ok(())
    }
}

/// A pair class together with a test of size `s` meeting `T \ T'` in `u`
/// items, `T' \ T` in `v` items and `T ∩ T'` in `r` items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TestClassParams {
    pub pair: PairClassParams,
    pub s: u64,
    pub u: i64,
    pub v: i64,
    pub r: i64,
}

/// Number of unordered pairs `{T, T'}` with the given class.
pub fn pair_count(params: PairClassParams) -> Result<BigCount> {
    params.validate()?;
    let PairClassParams { n, l, m, p } = params;
    let (n, l, m, p) = (n as i64, l as i64, m as i64, p as i64);
    let ordered = multinom(n, &[p, m - p, l - p, n - l - m + p])?;
    Ok(if m == l { ordered >> 1 } else { ordered })
}

/// Number of size-`s` tests falling into the given test class for one
/// fixed representative pair. Out-of-range `u`, `v`, `r` count zero.
pub fn r_count(params: TestClassParams) -> Result<BigCount> {
    params.pair.validate()?;
    let TestClassParams { pair, s, u, v, r } = params;
    ensure!(s <= pair.n, "r_count: test size {s} exceeds n={}", pair.n);
    let PairClassParams { n, l, m, p } = pair;
    let (n, l, m, p, s) = (n as i64, l as i64, m as i64, p as i64, s as i64);
    Ok(choose_i(p, r) * choose_i(l - p, u) * choose_i(m - p, v) * choose_i(n - l - m + p, s - r - u - v))
}

/// Natural log of `C(n, k)` for `0 <= k <= n`.
pub fn log_binom(n: u64, k: u64) -> Result<f64> {
    ensure!(k <= n, "log_binom: k={k} out of range for n={n}");
    Ok(ln_binom_f64(n, k))
}

pub(crate) fn ln_binom_f64(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if k <= 10_000 {
        // every factor is > 1, so the positive sum keeps relative accuracy
        (0..k).map(|i| ((n - i) as f64 / (k - i) as f64).ln()).sum()
    } else {
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
    }
}

/// `ln(x!)`; exact summation for small `x`, Stirling series otherwise.
pub(crate) fn ln_factorial(x: u64) -> f64 {
    if x < 32 {
        return (2..=x).map(|i| (i as f64).ln()).sum();
    }
    let xf = x as f64 + 1.0;
    // ln Γ(xf) by Stirling with four correction terms; error < 1e-17 here
    let inv = 1.0 / xf;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (xf - 0.5) * xf.ln() - xf + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// Natural log of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `num / den` rounded to `f64`, accurate even when both exceed `f64`.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "ratio_to_f64: zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let mantissa = q.to_f64().unwrap_or(f64::INFINITY);
    scale_pow2(mantissa, -shift)
}

/// `ln(num / den)` without forming the quotient as a float.
pub fn ln_ratio(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return f64::NEG_INFINITY;
    }
    let r = ratio_to_f64(num, den);
    if r > 1e-300 && r.is_finite() {
        r.ln()
    } else {
        ln_big(num) - ln_big(den)
    }
}

fn scale_pow2(x: f64, mut e: i64) -> f64 {
    let mut x = x;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Signed difference helper for inclusion-exclusion sums.
pub(crate) fn to_nonneg(x: BigInt) -> BigUint {
    x.to_biguint().expect("inclusion-exclusion count went negative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn naive_factorial(n: u64) -> BigUint {
        (1..=n).fold(BigUint::one(), |acc, x| acc * x)
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(5, 2).unwrap(), b(10));
        assert_eq!(binom(5, -1).unwrap(), b(0));
        assert_eq!(binom(10, 3).unwrap(), b(120));
        assert_eq!(binom(5, 6).unwrap(), b(0));
        assert!(binom(-1, 0).is_err());
    }

    #[test]
    fn multinom_examples() {
        assert_eq!(multinom(4, &[1, 1, 1, 1]).unwrap(), b(24));
        assert_eq!(multinom(4, &[2, -1, 3, 0]).unwrap(), b(0));
        assert_eq!(multinom(6, &[2, 2, 2]).unwrap(), b(90));
        assert!(multinom(6, &[2, 2, 1]).is_err());
        assert!(multinom(-2, &[]).is_err());
    }

    #[test]
    fn pair_count_examples() {
        assert_eq!(pair_count(PairClassParams { n: 2, l: 1, m: 1, p: 0 }).unwrap(), b(1));
        assert_eq!(pair_count(PairClassParams { n: 4, l: 2, m: 2, p: 1 }).unwrap(), b(12));
        assert_eq!(pair_count(PairClassParams { n: 4, l: 2, m: 2, p: 0 }).unwrap(), b(3));
        assert!(pair_count(PairClassParams { n: 4, l: 2, m: 2, p: 2 }).is_err());
        assert!(pair_count(PairClassParams { n: 4, l: 1, m: 2, p: 0 }).is_err());
    }

    #[test]
    fn r_count_examples() {
        let pair = PairClassParams { n: 4, l: 2, m: 2, p: 1 };
        let one = r_count(TestClassParams {
            pair,
            s: 2,
            u: 1,
            v: 0,
            r: 0,
        })
        .unwrap();
        assert_eq!(one, b(1));
        let over = r_count(TestClassParams {
            pair,
            s: 2,
            u: 0,
            v: 0,
            r: 2,
        })
        .unwrap();
        assert_eq!(over, b(0));
        let pair = PairClassParams {
            n: 10,
            l: 3,
            m: 3,
            p: 0,
        };
        let empty = r_count(TestClassParams {
            pair,
            s: 0,
            u: 0,
            v: 0,
            r: 0,
        })
        .unwrap();
        assert_eq!(empty, b(1));
        let pair = PairClassParams { n: 4, l: 2, m: 2, p: 1 };
        assert!(r_count(TestClassParams {
            pair,
            s: 5,
            u: 0,
            v: 0,
            r: 0
        })
        .is_err());
    }

    /// Brute-force the size-2 test count for T={0,1}, T'={1,2} in n=4.
    #[test]
    fn r_count_matches_hand_enumeration() {
        let t = [0usize, 1];
        let t2 = [1usize, 2];
        let mut hits = 0;
        for a in 0..4 {
            for c in a + 1..4 {
                let x = [a, c];
                let u = x.iter().filter(|i| t.contains(i) && !t2.contains(i)).count();
                let v = x.iter().filter(|i| t2.contains(i) && !t.contains(i)).count();
                let r = x.iter().filter(|i| t.contains(i) && t2.contains(i)).count();
                if (u, v, r) == (1, 0, 0) {
                    hits += 1;
                }
            }
        }
        assert_eq!(hits, 1);
    }

    #[test]
    fn log_binom_examples() {
        assert!((log_binom(5, 2).unwrap() - 10f64.ln()).abs() < 1e-15);
        assert_eq!(log_binom(17, 0).unwrap(), 0.0);
        assert_eq!(log_binom(17, 17).unwrap(), 0.0);
        let exact = ln_big(&binom(100, 50).unwrap());
        let got = log_binom(100, 50).unwrap();
        assert!(((got - exact) / exact).abs() < 1e-12);
        assert!(log_binom(3, 4).is_err());
    }

    #[test]
    fn log_binom_large_arguments() {
        for &(n, k) in &[
            (40_000u64, 15_000u64),
            (100_000, 20_630),
            (5_000, 2_500),
            (1_000_000, 3),
        ] {
            let exact = ln_big(&binom(n as i64, k as i64).unwrap());
            let got = log_binom(n, k).unwrap();
            assert!(((got - exact) / exact).abs() < 1e-12, "n={n} k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn direct_and_cached_rows_agree() {
        let small = BinomialCache::new(0);
        let cached = BinomialCache::new(1000);
        for n in [0u64, 1, 7, 300, 999] {
            for k in [-1i64, 0, 1, 3, (n / 3) as i64, (n / 2) as i64, n as i64, n as i64 + 1] {
                assert_eq!(small.choose(n, k), cached.choose(n, k), "n={n} k={k}");
            }
        }
        assert!(cached.cached_rows() > 0);
        assert!(small.cached_rows() <= 1);
    }

    #[test]
    fn ratio_conversion_is_accurate_for_huge_operands() {
        let num = binom(3000, 1400).unwrap();
        let den = binom(3000, 1500).unwrap();
        let got = ratio_to_f64(&num, &den);
        let expected = (ln_big(&num) - ln_big(&den)).exp();
        assert!(((got - expected) / expected).abs() < 1e-12);
        assert_eq!(ratio_to_f64(&b(3), &b(4)), 0.75);
        assert_eq!(ratio_to_f64(&b(0), &b(4)), 0.0);
    }

    #[test]
    fn pair_class_partition_matches_subset_pair_count() {
        for n in 1..=8u64 {
            for d in 1..=4u64.min(n) {
                let total: BigUint = (0..d)
                    .map(|p| pair_count(PairClassParams { n, l: d, m: d, p }).unwrap())
                    .sum();
                let c = choose(n, d as i64);
                let expected = &c * (&c - 1u32) / 2u32;
                assert_eq!(total, expected, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn pair_count_matches_brute_force() {
        for n in 1..=8usize {
            let masks: Vec<u32> = (0..1u32 << n).collect();
            let mut counts: HashMap<(u32, u32, u32), u64> = HashMap::new();
            for &a in &masks {
                for &c in &masks {
                    let (l, m) = (a.count_ones(), c.count_ones());
                    let p = (a & c).count_ones();
                    if a == c || m > l {
                        continue;
                    }
                    // unordered pairs: count (a, c) once when sizes differ,
                    // and each unordered same-size pair twice
                    *counts.entry((l, m, p)).or_default() += 1;
                }
            }
            for ((l, m, p), ordered) in counts {
                let expected = if l == m { ordered / 2 } else { ordered };
                let got = pair_count(PairClassParams {
                    n: n as u64,
                    l: l as u64,
                    m: m as u64,
                    p: p as u64,
                })
                .unwrap();
                assert_eq!(got, b(expected), "n={n} l={l} m={m} p={p}");
            }
        }
    }

    #[test]
    fn completeness_identity() {
        for n in 1..=10u64 {
            for l in 1..=n {
                for m in 0..=l {
                    for p in 0..=m.min(l - 1) {
                        let pair = PairClassParams { n, l, m, p };
                        for s in 0..=n {
                            let mut total = BigUint::zero();
                            for r in 0..=p as i64 {
                                for u in 0..=(l - p) as i64 {
                                    for v in 0..=(m - p) as i64 {
                                        total += r_count(TestClassParams { pair, s, u, v, r }).unwrap();
                                    }
                                }
                            }
                            let expected = if l + m - p <= n {
                                choose(n, s as i64)
                            } else {
                                BigUint::zero()
                            };
                            assert_eq!(total, expected, "n={n} l={l} m={m} p={p} s={s}");
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn binom_matches_factorials(n in 0u64..=20, k in 0u64..=20) {
            prop_assume!(k <= n);
            let expected = naive_factorial(n) / (naive_factorial(k) * naive_factorial(n - k));
            prop_assert_eq!(binom(n as i64, k as i64).unwrap(), expected);
        }

        #[test]
        fn multinom_matches_factorials(parts in proptest::collection::vec(0i64..=6, 1..5)) {
            let n: i64 = parts.iter().sum();
            let denom = parts.iter().fold(BigUint::one(), |acc, &p| acc * naive_factorial(p as u64));
            prop_assert_eq!(multinom(n, &parts).unwrap(), naive_factorial(n as u64) / denom);
        }
    }
}
