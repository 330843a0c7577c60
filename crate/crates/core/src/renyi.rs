//! Rényi coefficients and single-test non-separation probabilities.
//!
//! For a pair of targets `(T, T')` of class `(l, m, p)` and a uniformly random
//! test of size `s`, the Rényi coefficient `K` counts tests that give equal
//! results on `T` and `T'`. The ratio `K / C(n, s)` is the probability `q` that
//! one random test fails to separate the pair. Designs with random test sizes
//! mix these ratios over the size distribution.

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::exactcomb::{choose, choose_i, ln_binom_f64, ln_ratio, ratio_to_f64, to_nonneg, BigCount};

/// Test function `f(X, T) = min(h, |X ∩ T|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelSpec {
    /// Threshold `h >= 1`; `h = 1` is the binary model, `h = 2` the
    /// multiaccess channel.
    Threshold(u64),
    /// `h = ∞`; the result is the number of defectives in the pool.
    Additive,
}

impl ModelSpec {
    pub const BINARY: ModelSpec = ModelSpec::Threshold(1);

    pub fn threshold(h: u64) -> Result<Self> {
        ensure!(h >= 1, "model threshold h must be >= 1");
        Ok(ModelSpec::Threshold(h))
    }

    pub fn validate(&self) -> Result<()> {
        if let ModelSpec::Threshold(h) = self {
            ensure!(*h >= 1, "model threshold h must be >= 1");
        }
        Ok(())
    }

    /// Threshold used in the counting sums; `Additive` maps to `n`.
    pub fn effective_h(&self, n: u64) -> u64 {
        match *self {
            ModelSpec::Threshold(h) => h.min(n.max(1)),
            ModelSpec::Additive => n.max(1),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, ModelSpec::Threshold(1))
    }

    /// Outcome of one test meeting the target in `hits` items.
    #[inline]
    pub fn outcome(&self, hits: u32) -> u32 {
        match *self {
            ModelSpec::Threshold(h) => hits.min(h.min(u32::MAX as u64) as u32),
            ModelSpec::Additive => hits,
        }
    }
}

impl std::fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelSpec::Threshold(1) => write!(f, "binary"),
            ModelSpec::Threshold(h) => write!(f, "h={h}"),
            ModelSpec::Additive => write!(f, "additive"),
        }
    }
}

/// Distribution of a single random test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DesignDist {
    /// Uniform over all tests of exactly `s` items.
    ConstantWeight { s: u64 },
    /// Each item enters independently with probability `kappa`.
    Bernoulli { kappa: f64 },
    /// Size drawn from `pmf` over `0..=n`, then a uniform subset of that size.
    SizeDist { pmf: Vec<f64> },
}

/// Binomial size weights below this fraction of the peak are dropped.
pub const BERNOULLI_CUTOFF: f64 = 1e-18;

/// Test-size weights of a [`DesignDist`] after truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeWeights {
    pub weights: Vec<(u64, f64)>,
    /// Probability mass dropped by the truncation.
    pub truncated_mass: f64,
}

impl DesignDist {
    pub fn validate(&self, n: u64) -> Result<()> {
        match self {
            DesignDist::ConstantWeight { s } => {
                ensure!(
                    *s >= 1 && *s <= n,
                    "constant-weight design needs 1 <= s <= n, got s={s} n={n}"
                )
            }
            DesignDist::Bernoulli { kappa } => {
                ensure!(
                    *kappa > 0.0 && *kappa < 1.0,
                    "Bernoulli design needs 0 < kappa < 1, got {kappa}"
                )
            }
            DesignDist::SizeDist { pmf } => {
                ensure!(
                    pmf.len() as u64 == n + 1,
                    "size distribution needs {} entries, got {}",
                    n + 1,
                    pmf.len()
                );
                ensure!(
                    pmf.iter().all(|w| *w >= 0.0 && w.is_finite()),
                    "size distribution has a negative entry"
                );
                let total: f64 = pmf.iter().sum();
                ensure!((total - 1.0).abs() <= 1e-12, "size distribution sums to {total}, not 1");
            }
        }
        Ok(())
    }

    pub fn size_weights(&self, n: u64) -> Result<SizeWeights> {
        self.validate(n)?;
        Ok(match self {
            DesignDist::ConstantWeight { s } => SizeWeights {
                weights: vec![(*s, 1.0)],
                truncated_mass: 0.0,
            },
            DesignDist::Bernoulli { kappa } => {
                let (lk, lk1) = (kappa.ln(), (-kappa).ln_1p());
                let ln_pmf: Vec<f64> = (0..=n)
                    .map(|s| ln_binom_f64(n, s) + s as f64 * lk + (n - s) as f64 * lk1)
                    .collect();
                let peak = ln_pmf.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let cut = peak + BERNOULLI_CUTOFF.ln();
                let mut weights = Vec::new();
                let mut truncated_mass = 0.0;
                for (s, lp) in ln_pmf.into_iter().enumerate() {
                    if lp >= cut {
                        weights.push((s as u64, lp.exp()));
                    } else {
                        truncated_mass += lp.exp();
                    }
                }
                SizeWeights {
                    weights,
                    truncated_mass,
                }
            }
            DesignDist::SizeDist { pmf } => SizeWeights {
                weights: pmf
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(s, w)| (s as u64, *w))
                    .collect(),
                truncated_mass: 0.0,
            },
        })
    }
}

fn check_class(n: u64, l: u64, m: u64, p: u64, s: u64) -> Result<()> {
    ensure!(
        p <= m && m <= l && l <= n,
        "class needs 0 <= p <= m <= l <= n, got n={n} l={l} m={m} p={p}"
    );
    ensure!(s <= n, "test size s={s} exceeds n={n}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn r_term(n: i64, l: i64, m: i64, p: i64, s: i64, u: i64, v: i64, r: i64) -> BigUint {
    choose_i(p, r) * choose_i(l - p, u) * choose_i(m - p, v) * choose_i(n - l - m + p, s - r - u - v)
}

/// Rényi coefficient for the threshold model by the three-sum formula.
///
/// Requires `l >= m`; callers normalise the pair first.
pub fn k_general(model: ModelSpec, n: u64, l: u64, m: u64, p: u64, s: u64) -> Result<BigCount> {
    model.validate()?;
    check_class(n, l, m, p, s)?;
    let h = model.effective_h(n) as i64;
    let (n, l, m, p, s) = (n as i64, l as i64, m as i64, p as i64, s as i64);
    let mut total = BigUint::zero();
    for r in 0..=p {
        // equal counts inside T \ T' and T' \ T
        for u in 0..=m - p {
            total += r_term(n, l, m, p, s, u, u, r);
        }
        // both sides saturate the threshold
        let w = (h - r).max(0);
        for u in w..=l - p {
            for v in u + 1..=m - p {
                total += r_term(n, l, m, p, s, u, v, r);
            }
        }
        for v in w..=m - p {
            for u in v + 1..=l - p {
                total += r_term(n, l, m, p, s, u, v, r);
            }
        }
    }
    Ok(total)
}

/// Rényi coefficient for the additive model.
pub fn k_additive(n: u64, l: u64, m: u64, p: u64, s: u64) -> Result<BigCount> {
    check_class(n, l, m, p, s)?;
    let (n, l, m, p, s) = (n as i64, l as i64, m as i64, p as i64, s as i64);
    Ok((0..=m - p)
        .map(|u| choose_i(l - p, u) * choose_i(m - p, u) * choose_i(n - l - m + 2 * p, s - 2 * u))
        .sum())
}

/// Rényi coefficient for the binary model.
pub fn k_binary(n: u64, l: u64, m: u64, p: u64, s: u64) -> Result<BigCount> {
    check_class(n, l, m, p, s)?;
    let (total, separating) = binary_parts(n, l, m, p, s);
    Ok(total - separating)
}

/// `(C(n,s), C(n,s) - K)` for the binary model.
fn binary_parts(n: u64, l: u64, m: u64, p: u64, s: u64) -> (BigUint, BigUint) {
    let s = s as i64;
    let total = choose(n, s);
    let sep = BigInt::from(choose(n - l, s)) + BigInt::from(choose(n - m, s))
        - BigInt::from(choose_i(n as i64 - l as i64 - m as i64 + p as i64, s)) * 2;
    (total, to_nonneg(sep))
}

/// Rényi coefficient using the cheapest exact route for the model.
pub fn k_coefficient(model: ModelSpec, n: u64, l: u64, m: u64, p: u64, s: u64) -> Result<BigCount> {
    Ok(counts(model, n, l, m, p, s)?.0)
}

/// `(K, C(n,s) - K, C(n,s))` for a normalised class.
fn counts(model: ModelSpec, n: u64, l: u64, m: u64, p: u64, s: u64) -> Result<(BigUint, BigUint, BigUint)> {
    model.validate()?;
    check_class(n, l, m, p, s)?;
    let h = model.effective_h(n);
    if h == 1 {
        let (total, sep) = binary_parts(n, l, m, p, s);
        return Ok((&total - &sep, sep, total));
    }
    let total = choose(n, s as i64);
    let k = if h >= l {
        // min(h, ·) never binds
        k_additive(n, l, m, p, s)?
    } else {
        k_general(model, n, l, m, p, s)?
    };
    let sep = &total - &k;
    Ok((k, sep, total))
}

fn normalise(l: u64, m: u64) -> (u64, u64) {
    (l.max(m), l.min(m))
}

/// Exact `q` for a constant-weight design, as a reduced fraction.
///
/// Arguments `l` and `m` may come in either order. Identical targets
/// (`l = m = p`) give 0.
pub fn q_rational(model: ModelSpec, n: u64, l: u64, m: u64, p: u64, s: u64) -> Result<Ratio<BigUint>> {
    let (l, m) = normalise(l, m);
    check_class(n, l, m, p, s)?;
    if l == p {
        ensure!(m == p, "class with p = l must have m = l");
        return Ok(Ratio::new(BigUint::zero(), choose(n, s as i64)));
    }
    let (k, _, total) = counts(model, n, l, m, p, s)?;
    Ok(Ratio::new(k, total))
}

/// Non-separation probability with its logarithms, each computed from
/// exact counts so that `ln q` stays accurate for `q` near 1 and `ln(1-q)`
/// for `q` near 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonSeparation {
    pub q: f64,
    pub ln_q: f64,
    /// `ln(1 - q)`
    pub ln_sep: f64,
}

impl NonSeparation {
    pub const IDENTICAL: NonSeparation = NonSeparation {
        q: 0.0,
        ln_q: f64::NEG_INFINITY,
        ln_sep: 0.0,
    };

    fn from_counts(k: &BigUint, sep: &BigUint, total: &BigUint) -> Self {
        NonSeparation {
            q: ratio_to_f64(k, total),
            ln_q: ln_ratio(k, total),
            ln_sep: ln_ratio(sep, total),
        }
    }

    fn from_parts(q: f64, sep: f64) -> Self {
        NonSeparation {
            q,
            ln_q: if q > 0.0 { q.ln() } else { f64::NEG_INFINITY },
            ln_sep: if sep > 0.0 { sep.ln() } else { f64::NEG_INFINITY },
        }
    }
}

/// Non-separation probability `q` for one random test from `design`.
pub fn q_ratio(model: ModelSpec, n: u64, l: u64, m: u64, p: u64, design: &DesignDist) -> Result<f64> {
    Ok(non_separation(model, n, l, m, p, design)?.q)
}

/// [`q_ratio`] with logarithms of `q` and `1 - q`.
pub fn non_separation(model: ModelSpec, n: u64, l: u64, m: u64, p: u64, design: &DesignDist) -> Result<NonSeparation> {
    let weights = design.size_weights(n)?;
    non_separation_weighted(model, n, l, m, p, &weights)
}

pub(crate) fn non_separation_weighted(
    model: ModelSpec,
    n: u64,
    l: u64,
    m: u64,
    p: u64,
    weights: &SizeWeights,
) -> Result<NonSeparation> {
    let (l, m) = normalise(l, m);
    check_class(n, l, m, p, 0)?;
    if l == p {
        ensure!(m == p, "class with p = l must have m = l");
        return Ok(NonSeparation::IDENTICAL);
    }
    if let [(s, w)] = weights.weights.as_slice() {
        if *w == 1.0 {
            let (k, sep, total) = counts(model, n, l, m, p, *s)?;
            return Ok(NonSeparation::from_counts(&k, &sep, &total));
        }
    }
    // mixtures: accumulate q and 1 - q separately, both are positive sums
    let (mut q, mut sep) = (0.0, 0.0);
    for &(s, w) in &weights.weights {
        let (k, sp, total) = counts(model, n, l, m, p, s)?;
        q += w * ratio_to_f64(&k, &total);
        sep += w * ratio_to_f64(&sp, &total);
    }
    Ok(NonSeparation::from_parts(q, sep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcomb::binom;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    /// Oracle: enumerate all size-s tests over n items for the concrete pair
    /// T = {0..l}, T' = {l-p..l-p+m}, count equal outcomes.
    fn brute_k(h: u32, n: usize, l: usize, m: usize, p: usize, s: usize) -> u64 {
        let t: u32 = (0..l).fold(0, |acc, i| acc | 1 << i);
        let t2: u32 = (l - p..l - p + m).fold(0, |acc, i| acc | 1 << i);
        (0u32..1 << n)
            .filter(|x| x.count_ones() as usize == s)
            .filter(|x| (x & t).count_ones().min(h) == (x & t2).count_ones().min(h))
            .count() as u64
    }

    #[test]
    fn k_general_examples() {
        assert_eq!(k_general(ModelSpec::BINARY, 10, 3, 3, 2, 3).unwrap(), b(90));
        assert_eq!(brute_k(1, 10, 3, 3, 2, 3), 90);
        assert_eq!(
            k_general(ModelSpec::Additive, 12, 4, 3, 1, 5).unwrap(),
            k_additive(12, 4, 3, 1, 5).unwrap()
        );
    }

    #[test]
    fn k_additive_examples() {
        assert_eq!(k_additive(4, 2, 2, 1, 2).unwrap(), b(2));
        assert_eq!(brute_k(u32::MAX, 4, 2, 2, 1, 2), 2);
        assert_eq!(k_additive(9, 3, 3, 3, 4).unwrap(), binom(9, 4).unwrap());
        assert_eq!(
            q_ratio(ModelSpec::Additive, 9, 3, 3, 3, &DesignDist::ConstantWeight { s: 4 }).unwrap(),
            0.0
        );
    }

    #[test]
    fn k_binary_examples() {
        assert_eq!(k_binary(10, 3, 3, 2, 3).unwrap(), b(90));
        assert_eq!(k_binary(10, 3, 3, 0, 3).unwrap(), b(58));
        assert_eq!(brute_k(1, 10, 3, 3, 0, 3), 58);
        assert_eq!(k_binary(10, 3, 3, 1, 10).unwrap(), b(1));
        let q = q_ratio(ModelSpec::BINARY, 10, 3, 3, 1, &DesignDist::ConstantWeight { s: 10 }).unwrap();
        assert_eq!(q, 1.0);
    }

    #[test]
    fn q_ratio_examples() {
        let q = q_ratio(ModelSpec::BINARY, 10, 3, 3, 2, &DesignDist::ConstantWeight { s: 3 }).unwrap();
        assert_eq!(q, 0.75);
        for model in [ModelSpec::BINARY, ModelSpec::Threshold(2), ModelSpec::Additive] {
            let q = q_ratio(model, 10, 4, 4, 4, &DesignDist::ConstantWeight { s: 3 }).unwrap();
            assert_eq!(q, 0.0);
        }
        let exact = q_rational(ModelSpec::BINARY, 10, 3, 3, 2, 3).unwrap();
        assert_eq!(exact, Ratio::new(b(3), b(4)));
    }

    /// Binary, Bernoulli design: direct summation of the closed form
    /// `1 - 2 Σ_s (C(n-d,s) - C(n-2d+p,s)) κ^s (1-κ)^(n-s)` for l = m = d.
    #[test]
    fn bernoulli_matches_direct_summation() {
        let (n, d, p, kappa) = (20u64, 3u64, 1u64, 0.15f64);
        let mut sum = 0.0;
        for s in 0..=n {
            let a = ratio_to_f64(&choose(n - d, s as i64), &b(1));
            let c = ratio_to_f64(&choose(n - 2 * d + p, s as i64), &b(1));
            sum += (a - c) * kappa.powi(s as i32) * (1.0 - kappa).powi((n - s) as i32);
        }
        let oracle = 1.0 - 2.0 * sum;
        let got = q_ratio(ModelSpec::BINARY, n, d, d, p, &DesignDist::Bernoulli { kappa }).unwrap();
        assert!((got - oracle).abs() < 1e-13, "{got} vs {oracle}");
    }

    #[test]
    fn size_dist_point_mass_equals_constant_weight() {
        let n = 12u64;
        for s in 1..=n {
            let mut pmf = vec![0.0; n as usize + 1];
            pmf[s as usize] = 1.0;
            for (l, m, p) in [(3, 3, 0), (4, 2, 1), (2, 2, 1)] {
                let a = non_separation(
                    ModelSpec::BINARY,
                    n,
                    l,
                    m,
                    p,
                    &DesignDist::SizeDist { pmf: pmf.clone() },
                )
                .unwrap();
                let c = non_separation(ModelSpec::BINARY, n, l, m, p, &DesignDist::ConstantWeight { s }).unwrap();
                assert_eq!(a, c);
            }
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(k_general(ModelSpec::BINARY, 5, 2, 3, 1, 2).is_err());
        assert!(k_binary(5, 3, 2, 1, 6).is_err());
        assert!(ModelSpec::threshold(0).is_err());
        assert!(DesignDist::Bernoulli { kappa: 1.0 }.validate(5).is_err());
        assert!(DesignDist::ConstantWeight { s: 0 }.validate(5).is_err());
        assert!(DesignDist::SizeDist { pmf: vec![0.5, 0.4] }.validate(1).is_err());
    }

    #[test]
    fn bernoulli_truncation_is_reported() {
        let w = DesignDist::Bernoulli { kappa: 0.1 }.size_weights(1000).unwrap();
        assert!(w.truncated_mass > 0.0 && w.truncated_mass < 1e-15);
        let total: f64 = w.weights.iter().map(|(_, x)| x).sum();
        assert!((total + w.truncated_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_general_non_increasing_in_threshold() {
        let n = 10;
        for l in 1..=6u64 {
            for m in 0..=l {
                for p in 0..=m.min(l - 1) {
                    for s in 0..=n {
                        let mut prev = choose(n, s as i64);
                        for h in 1..=n {
                            let k = k_general(ModelSpec::Threshold(h), n, l, m, p, s).unwrap();
                            assert!(k <= prev, "h={h} l={l} m={m} p={p} s={s}");
                            assert!(k <= choose(n, s as i64));
                            prev = k;
                        }
                    }
                }
            }
        }
    }
}
