//! Asymptotic expansions `M(n) = C ln n + c` of existence bounds, their
//! closed forms for the additive and binary models, and the simple
//! approximations relating `n`, `d`, `N` and `γ`.
//!
//! Everything in the expansion machinery uses natural logarithms; the
//! closed-form evaluators return values in the same units as `N`.

use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::exactcomb::{ln_binom_f64, ln_factorial, ratio_to_f64};
use crate::renyi::{non_separation, DesignDist, ModelSpec};

/// Relative tolerance for deciding which terms attain the maximum in `C`.
const TIE_TOLERANCE: f64 = 1e-9;

/// Absolute tolerance of the bisection root finders.
const ROOT_TOLERANCE: f64 = 1e-10;

/// One term `q_n ~ c n^alpha` with ratio `r` in `Σ q_n r^M = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub c: f64,
    pub alpha: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionResult {
    /// Coefficient of `ln n`.
    pub big_c: f64,
    /// Constant term.
    pub c: f64,
    /// Indices of the terms attaining the maximum in `big_c`.
    pub attaining: Vec<usize>,
}

impl ExpansionResult {
    pub fn m_at(&self, n: f64) -> f64 {
        self.big_c * n.ln() + self.c
    }
}

/// Unique root `M` of the strictly decreasing `Σ q_i r_i^M = 1`.
pub fn solve_m(terms: &[(f64, f64)]) -> Result<f64> {
    ensure!(!terms.is_empty(), "need at least one term");
    for &(q, r) in terms {
        ensure!(q > 0.0 && q.is_finite(), "term weights must be positive, got {q}");
        ensure!(r > 0.0 && r < 1.0, "term ratios must lie in (0, 1), got {r}");
    }
    let count = terms.len() as f64;
    let ln_sum = |m: f64| {
        let xs: Vec<f64> = terms.iter().map(|&(q, r)| q.ln() + m * r.ln()).collect();
        crate::bounds::log_sum_exp(&xs)
    };
    // one term alone is >= 1 at `lo`; every term is <= 1/I at `hi`
    let mut lo = terms
        .iter()
        .map(|&(q, r)| q.ln() / -r.ln())
        .fold(f64::NEG_INFINITY, f64::max)
        - 1.0;
    let mut hi = terms
        .iter()
        .map(|&(q, r)| (count * q).ln() / -r.ln())
        .fold(f64::NEG_INFINITY, f64::max)
        + 1.0;
    debug_assert!(ln_sum(lo) >= 0.0 && ln_sum(hi) <= 0.0);
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if ln_sum(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `⌊M⌋ + 1`.
pub fn n_from_m(m: f64) -> u64 {
    (m.floor() + 1.0).max(1.0) as u64
}

/// Smallest `k >= 1` with `Σ q_i r_i^k < 1`, by direct search.
pub fn direct_n(terms: &[(f64, f64)]) -> Result<u64> {
    let m = solve_m(terms)?;
    let below = |k: u64| {
        let xs: Vec<f64> = terms.iter().map(|&(q, r)| q.ln() + k as f64 * r.ln()).collect();
        crate::bounds::log_sum_exp(&xs) < 0.0
    };
    let mut k = (m.floor() - 2.0).max(1.0) as u64;
    while k > 1 && below(k - 1) {
        k -= 1;
    }
    while !below(k) {
        k += 1;
    }
    Ok(k)
}

/// `C = max α_i / (-ln r_i)` and the constant `c` solving
/// `Σ_{j ∈ J} c_j r_j^c = 1` over the maximising set `J`.
pub fn expansion_constants(terms: &[ExpansionTerm]) -> Result<ExpansionResult> {
    ensure!(!terms.is_empty(), "need at least one term");
    ensure!(
        terms.iter().any(|t| t.alpha > 0.0),
        "at least one exponent must be positive"
    );
    for t in terms {
        ensure!(t.c > 0.0 && t.r > 0.0 && t.r < 1.0, "invalid term {t:?}");
    }
    let slopes: Vec<f64> = terms.iter().map(|t| t.alpha / -t.r.ln()).collect();
    let big_c = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let attaining: Vec<usize> = (0..terms.len())
        .filter(|&i| (big_c - slopes[i]).abs() <= TIE_TOLERANCE * big_c.abs())
        .collect();
    let reduced: Vec<(f64, f64)> = attaining.iter().map(|&i| (terms[i].c, terms[i].r)).collect();
    Ok(ExpansionResult {
        big_c,
        c: solve_m(&reduced)?,
        attaining,
    })
}

/// Limit of the non-separation probability of a class `(l, m, p)` when
/// each item enters a test independently with probability `lambda`.
pub fn limit_non_separation(model: ModelSpec, lambda: f64, l: u64, m: u64, p: u64) -> f64 {
    let (l, m) = (l.max(m), l.min(m));
    let binom = |n: u64, k: u64| ln_binom_f64(n, k).exp();
    let mut q = 0.0;
    for r in 0..=p {
        for u in 0..=l - p {
            for v in 0..=m - p {
                if model.outcome((r + u) as u32) != model.outcome((r + v) as u32) {
                    continue;
                }
                let inside = (r + u + v) as i32;
                q += binom(p, r)
                    * binom(l - p, u)
                    * binom(m - p, v)
                    * lambda.powi(inside)
                    * (1.0 - lambda).powi((l + m - p) as i32 - inside);
            }
        }
    }
    q
}

/// Leading coefficient of the number of unordered pairs in class
/// `(l, m, p)`: `Q(n, l, m, p) ~ c n^(l+m-p)`.
pub fn pair_leading_coefficient(l: u64, m: u64, p: u64) -> f64 {
    let (l, m) = (l.max(m), l.min(m));
    let base = ln_factorial(p) + ln_factorial(m - p) + ln_factorial(l - p);
    if m == l {
        (-(ln_factorial(p) + 2.0 * ln_factorial(m - p)) - LN_2).exp()
    } else {
        (-base).exp()
    }
}

/// Target spaces for exact recovery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    ExactD,
    UpToD,
}

/// Terms of the weak-recovery bound for `d` defectives with test fraction
/// `lambda`: one per overlap `p < d`.
pub fn weak_recovery_terms(model: ModelSpec, d: u64, lambda: f64, gamma: f64) -> Result<Vec<ExpansionTerm>> {
    ensure!(d >= 1, "need d >= 1");
    ensure!(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
    ensure!(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    Ok((0..d)
        .map(|p| ExpansionTerm {
            c: (ln_factorial(d) - ln_factorial(p) - 2.0 * ln_factorial(d - p)).exp() / gamma,
            alpha: (d - p) as f64,
            r: limit_non_separation(model, lambda, d, d, p),
        })
        .collect())
}

/// Terms of the zero-error bound, one per pair class of the space.
pub fn exact_recovery_terms(model: ModelSpec, space: SpaceKind, d: u64, lambda: f64) -> Result<Vec<ExpansionTerm>> {
    ensure!(d >= 1, "need d >= 1");
    ensure!(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
    let sizes: Vec<u64> = match space {
        SpaceKind::ExactD => vec![d],
        SpaceKind::UpToD => (0..=d).collect(),
    };
    let mut terms = Vec::new();
    for &l in &sizes {
        for &m in sizes.iter().filter(|&&m| m <= l) {
            for p in 0..=m {
                if p == l {
                    continue;
                }
                terms.push(ExpansionTerm {
                    c: pair_leading_coefficient(l, m, p),
                    alpha: (l + m - p) as f64,
                    r: limit_non_separation(model, lambda, l, m, p),
                });
            }
        }
    }
    Ok(terms)
}

/// Exact finite-`n` weak-recovery terms `(q_n, r_n)` for constant-weight
/// tests of size `s`; `⌊solve_m⌋ + 1` of these is the bound's `N_γ`
/// whenever the clamp is inactive.
pub fn weak_recovery_finite_terms(model: ModelSpec, n: u64, d: u64, s: u64, gamma: f64) -> Result<Vec<(f64, f64)>> {
    ensure!(d >= 1 && d < n, "need 1 <= d < n");
    ensure!(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    let design = DesignDist::ConstantWeight { s };
    let mut terms = Vec::new();
    for p in 0..d {
        if 2 * d - p > n {
            continue;
        }
        // ordered pairs per target: C(d, p) C(n - d, d - p)
        let ln_count = ln_binom_f64(d, p) + ln_binom_f64(n - d, d - p);
        let q = non_separation(model, n, d, d, p, &design)?;
        terms.push(((ln_count - gamma.ln()).exp(), q.q));
    }
    Ok(terms)
}

/// `F(d) = 2d - log2((2d)!) + 2 log2(d!)`.
pub fn f_denominator(d: u64) -> f64 {
    (2.0 * d as f64 * LN_2 - ln_factorial(2 * d) + 2.0 * ln_factorial(d)) / LN_2
}

/// `G(d) = -log2(1 - 2 d^d / (d+1)^(d+1))`.
pub fn g_denominator(d: u64) -> f64 {
    let d = d as f64;
    let ratio = (LN_2 + d * d.ln() - (d + 1.0) * (d + 1.0).ln()).exp();
    -(-ratio).ln_1p() / LN_2
}

/// `H(d) = -log2(1 - (d-1)^(d-1) / d^d)`.
pub fn h_denominator(d: u64) -> f64 {
    let d = d as f64;
    let ratio = ((d - 1.0) * (d - 1.0).ln() - d * d.ln()).exp();
    -(-ratio).ln_1p() / LN_2
}

fn log2_factorial(k: u64) -> f64 {
    ln_factorial(k) / LN_2
}

/// Zero-error bound for the additive model at `λ = 1/2`:
/// `(d+1) log2 n - log2 (d-1)! - 1`.
pub fn additive_exact_m0(n: f64, d: u64) -> f64 {
    (d + 1) as f64 * n.log2() - log2_factorial(d - 1) - 1.0
}

/// Weak-recovery bound for the additive model at `λ = 1/2`:
/// `(d log2 n - log2(d! γ)) / F(d)`.
pub fn additive_weak_m_gamma(n: f64, d: u64, gamma: f64) -> f64 {
    (d as f64 * n.log2() - log2_factorial(d) - gamma.log2()) / f_denominator(d)
}

/// Zero-error bound for the binary model at its optimal `λ`
/// (`1/(d+1)` for exactly `d`, `1/d` for at most `d` defectives).
pub fn binary_exact_m0(n: f64, d: u64, space: SpaceKind) -> f64 {
    match space {
        SpaceKind::ExactD => additive_exact_m0(n, d) / g_denominator(d),
        SpaceKind::UpToD => (d as f64 * n.log2() - log2_factorial(d - 1)) / h_denominator(d),
    }
}

/// Optimal test fraction `1 - 2^(-1/d)` for binary weak recovery.
pub fn binary_weak_lambda(d: u64) -> f64 {
    1.0 - 2f64.powf(-1.0 / d as f64)
}

/// Test size `⌊n (1 - 2^(-1/d))⌋` for binary weak recovery.
pub fn binary_weak_s(n: u64, d: u64) -> u64 {
    ((n as f64 * binary_weak_lambda(d)).floor() as u64).max(1)
}

/// Constant `c` in `N_γ ≈ d log2 n + c`, solving
/// `Σ_{p<d} 2^(-c(d-p)/d) d!/(p! (d-p)!²) = γ`.
pub fn binary_weak_c(d: u64, gamma: f64) -> Result<f64> {
    ensure!(d >= 1, "need d >= 1");
    ensure!(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    let terms: Vec<(f64, f64)> = (0..d)
        .map(|p| {
            let w = (ln_factorial(d) - ln_factorial(p) - 2.0 * ln_factorial(d - p)).exp() / gamma;
            (w, 2f64.powf(-((d - p) as f64) / d as f64))
        })
        .collect();
    solve_m(&terms)
}

/// Lower bound `c* = d log2(d / γ)` on [`binary_weak_c`].
pub fn c_star(d: u64, gamma: f64) -> f64 {
    d as f64 * (d as f64 / gamma).log2()
}

/// `N_γ ≈ d log2 n + d log2(d/γ)`.
pub fn approx_n(n: f64, d: u64, gamma: f64) -> f64 {
    d as f64 * n.log2() + c_star(d, gamma)
}

/// `γ* ≈ 2^(-N/d) n d`, the inverse of [`approx_n`].
pub fn approx_gamma(n: f64, d: u64, n_tests: f64) -> f64 {
    2f64.powf(-n_tests / d as f64) * n * d as f64
}

/// Leading-order forms for `d = ⌊n^β⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SparseForm {
    AdditiveWeak,
    AdditiveExact,
    BinaryExactD,
    BinaryUpToD,
}

/// Sparse-regime leading terms; only the leading order is meaningful.
pub fn sparse_regime(n: f64, beta: f64, form: SparseForm) -> Result<f64> {
    ensure!(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
    if matches!(form, SparseForm::BinaryExactD | SparseForm::BinaryUpToD) {
        ensure!(beta < 0.5, "binary sparse forms need beta < 1/2");
    }
    let nb = n.powf(beta);
    let d = nb.floor();
    Ok(match form {
        SparseForm::AdditiveWeak => nb * (1.0 + 2.0 * (1.0 - beta) * n.ln()) / (PI * nb).ln(),
        SparseForm::AdditiveExact => (d + 1.0 + beta / 2.0) * n.log2(),
        SparseForm::BinaryExactD => d * E * 2f64.sqrt().ln() * ((d + 1.0 + beta / 2.0) * n.log2()),
        SparseForm::BinaryUpToD => (nb - 1.0).floor() * E * LN_2 * ((d + beta / 2.0) * n.log2()),
    })
}

/// Exact value of a constant-weight design's non-separation probability
/// as `f64`, for comparisons against [`limit_non_separation`].
pub fn finite_non_separation(model: ModelSpec, n: u64, l: u64, m: u64, p: u64, s: u64) -> Result<f64> {
    let r = crate::renyi::q_rational(model, n, l, m, p, s)?;
    Ok(ratio_to_f64(r.numer(), r.denom()))
}
