//! Union-bound upper bounds `γ*` on the failure probability of random
//! designs, their inversion to design lengths `N_γ`, and zero-error lengths.
//!
//! A bound is prepared once per `(model, n, prior, design)` as a table of
//! pair classes `(b, m, p)` with their log multiplicities and exact
//! non-separation probabilities. Evaluating it at a given `N` is then a
//! log-sum-exp over the table, clamped per prior stratum.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::exactcomb::{choose, ln_big, ln_binom_f64, pair_count, PairClassParams};
use crate::renyi::{non_separation_weighted, DesignDist, ModelSpec, NonSeparation};

/// Largest design length the inversion search will try.
pub const MAX_TESTS: u64 = 10_000_000;

/// Distribution of the defective set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PriorSpec {
    /// Uniform over all sets of exactly `d` items.
    ExactD { d: u64 },
    /// Size drawn from `weights` over `0..=d`, then uniform given the size.
    UpToD { d: u64, weights: Vec<f64> },
    /// Each item defective independently with probability `q`.
    Binomial { q: f64 },
}

impl PriorSpec {
    /// `UpToD` whose size weights make the target uniform on all sets of at
    /// most `d` items.
    pub fn up_to_uniform(n: u64, d: u64) -> Result<Self> {
        ensure!(d <= n, "up_to_d needs d <= n");
        let counts: Vec<f64> = (0..=d).map(|b| ln_binom_f64(n, b)).collect();
        let peak = counts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = counts.iter().map(|c| (c - peak).exp()).collect();
        let total: f64 = raw.iter().sum();
        Ok(PriorSpec::UpToD {
            d,
            weights: raw.iter().map(|w| w / total).collect(),
        })
    }

    pub fn validate(&self, n: u64) -> Result<()> {
        match self {
            PriorSpec::ExactD { d } => ensure!(*d >= 1 && *d <= n, "exact_d needs 1 <= d <= n, got d={d} n={n}"),
            PriorSpec::UpToD { d, weights } => {
                ensure!(*d <= n, "up_to_d needs d <= n, got d={d} n={n}");
                ensure!(
                    weights.len() as u64 == d + 1,
                    "up_to_d needs {} weights, got {}",
                    d + 1,
                    weights.len()
                );
                ensure!(
                    weights.iter().all(|w| *w >= 0.0 && w.is_finite()),
                    "up_to_d weights must be nonnegative"
                );
                let total: f64 = weights.iter().sum();
                ensure!((total - 1.0).abs() <= 1e-12, "up_to_d weights sum to {total}, not 1");
            }
            PriorSpec::Binomial { q } => ensure!(*q > 0.0 && *q < 1.0, "binomial prior needs 0 < q < 1, got {q}"),
        }
        Ok(())
    }

    /// The target space the prior lives on.
    pub fn target_space(&self, n: u64) -> TargetSpace {
        match self {
            PriorSpec::ExactD { d } => TargetSpace::exact(n, *d),
            PriorSpec::UpToD { d, .. } => TargetSpace::up_to(n, *d),
            PriorSpec::Binomial { .. } => TargetSpace::up_to(n, n),
        }
    }

    /// `Pr{|T| = b}` for every `b` with positive weight.
    pub fn size_weights(&self, n: u64) -> Result<Vec<(u64, f64)>> {
        self.validate(n)?;
        Ok(match self {
            PriorSpec::ExactD { d } => vec![(*d, 1.0)],
            PriorSpec::UpToD { weights, .. } => weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w > 0.0)
                .map(|(b, w)| (b as u64, *w))
                .collect(),
            PriorSpec::Binomial { q } => {
                let (lq, lq1) = (q.ln(), (-q).ln_1p());
                (0..=n)
                    .map(|b| (b, (ln_binom_f64(n, b) + b as f64 * lq + (n - b) as f64 * lq1).exp()))
                    .filter(|(_, w)| *w > 0.0)
                    .collect()
            }
        })
    }
}

/// All subsets of `n` items whose size lies in `sizes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSpace {
    pub n: u64,
    pub sizes: RangeInclusive<u64>,
}

impl TargetSpace {
    pub fn exact(n: u64, d: u64) -> Self {
        TargetSpace { n, sizes: d..=d }
    }

    pub fn up_to(n: u64, d: u64) -> Self {
        TargetSpace { n, sizes: 0..=d }
    }

    pub fn contains_size(&self, size: u64) -> bool {
        self.sizes.contains(&size)
    }

    /// Number of targets, saturating at `u64::MAX`.
    pub fn cardinality(&self) -> u64 {
        let mut total: u64 = 0;
        for b in self.sizes.clone() {
            let c = choose(self.n, b as i64);
            let c = u64::try_from(c).unwrap_or(u64::MAX);
            total = total.saturating_add(c);
        }
        total
    }

    fn validate(&self) -> Result<()> {
        ensure!(
            *self.sizes.end() <= self.n && self.sizes.start() <= self.sizes.end(),
            "target sizes {:?} invalid for n={}",
            self.sizes,
            self.n
        );
        Ok(())
    }
}

/// Up to `lies` wrong answers per design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LieSpec {
    pub lies: u64,
    /// All wrong answers share one value, which halves the distance needed.
    pub same_answer: bool,
}

impl LieSpec {
    pub const NONE: LieSpec = LieSpec {
        lies: 0,
        same_answer: false,
    };

    pub fn new(lies: u64, same_answer: bool) -> Self {
        LieSpec { lies, same_answer }
    }

    /// Number of disagreeing results a pair may have and still be confused.
    pub fn tolerance(&self) -> u64 {
        if self.same_answer {
            self.lies
        } else {
            2 * self.lies
        }
    }

    /// Smallest design length the lie bound is defined for.
    pub fn min_tests(&self) -> u64 {
        self.tolerance().max(1)
    }
}

/// How the `min{1, ·}` clamp is applied inside a prior stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ClampMode {
    /// Clamp the whole per-stratum sum.
    #[default]
    Stratum,
    /// Clamp only the same-size part of each stratum.
    SameSizeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ClassTerm {
    m: u64,
    p: u64,
    /// `ln(C(b, p) C(n - b, m - p))`: number of targets `T'` in this class
    /// for one fixed `T`.
    ln_count: f64,
    q: NonSeparation,
}

#[derive(Debug, Clone)]
struct Stratum {
    size: u64,
    weight: f64,
    classes: Vec<ClassTerm>,
}

/// Per-stratum diagnostics of a bound evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumReport {
    pub size: u64,
    pub weight: f64,
    /// Unclamped sum over `T' != T` of the pair terms.
    pub sum: f64,
    pub clamped: bool,
    /// `weight * clamped sum`
    pub contribution: f64,
}

/// Contribution of one `(b, m, p)` class, weighted by `Pr{|T| = b}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermReport {
    pub b: u64,
    pub m: u64,
    pub p: u64,
    pub q: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub n_tests: u64,
    pub gamma_star: f64,
    pub strata: Vec<StratumReport>,
    /// Empty unless requested.
    pub terms: Vec<TermReport>,
}

/// A prepared bound `N ↦ γ*(N)`.
#[derive(Debug, Clone)]
pub struct GammaBound {
    strata: Vec<Stratum>,
    lies: LieSpec,
    clamp: ClampMode,
}

impl GammaBound {
    pub fn new(model: ModelSpec, n: u64, prior: &PriorSpec, design: &DesignDist) -> Result<Self> {
        Self::with_options(model, n, prior, design, LieSpec::NONE, ClampMode::Stratum)
    }

    pub fn with_options(
        model: ModelSpec,
        n: u64,
        prior: &PriorSpec,
        design: &DesignDist,
        lies: LieSpec,
        clamp: ClampMode,
    ) -> Result<Self> {
        ensure!(n >= 2, "need at least two items, got n={n}");
        model.validate()?;
        prior.validate(n)?;
        let size_weights = design.size_weights(n)?;
        let space = prior.target_space(n);
        let mut cache: HashMap<(u64, u64, u64), NonSeparation> = HashMap::new();
        let mut strata = Vec::new();
        for (b, weight) in prior.size_weights(n)? {
            let mut classes = Vec::new();
            for m in space.sizes.clone() {
                for p in 0..=b.min(m) {
                    if m == b && p == b {
                        continue; // T' = T
                    }
                    if m - p > n - b {
                        continue; // no such T'
                    }
                    let key = (b.max(m), b.min(m), p);
                    let q = match cache.get(&key) {
                        Some(q) => *q,
                        None => {
                            let q = non_separation_weighted(model, n, key.0, key.1, p, &size_weights)?;
                            cache.insert(key, q);
                            q
                        }
                    };
                    let count: BigUint = choose(b, p as i64) * choose(n - b, (m - p) as i64);
                    classes.push(ClassTerm {
                        m,
                        p,
                        ln_count: ln_big(&count),
                        q,
                    });
                }
            }
            strata.push(Stratum {
                size: b,
                weight,
                classes,
            });
        }
        Ok(GammaBound { strata, lies, clamp })
    }

    pub fn lies(&self) -> LieSpec {
        self.lies
    }

    /// `γ*(N)`.
    pub fn gamma_star(&self, n_tests: u64) -> f64 {
        self.evaluate_inner(n_tests, false).gamma_star
    }

    /// `γ*(N)` with per-stratum diagnostics.
    pub fn evaluate(&self, n_tests: u64) -> BoundResult {
        self.evaluate_inner(n_tests, false)
    }

    /// [`GammaBound::evaluate`] plus every class contribution.
    pub fn evaluate_verbose(&self, n_tests: u64) -> BoundResult {
        self.evaluate_inner(n_tests, true)
    }

    fn evaluate_inner(&self, n_tests: u64, with_terms: bool) -> BoundResult {
        let tol = self.lies.tolerance();
        let mut total = 0.0;
        let mut strata = Vec::with_capacity(self.strata.len());
        let mut terms = Vec::new();
        let mut same = Vec::new();
        let mut other = Vec::new();
        for stratum in &self.strata {
            same.clear();
            other.clear();
            for class in &stratum.classes {
                let x = class.ln_count + ln_pair_term(n_tests, &class.q, tol);
                if class.m == stratum.size {
                    same.push(x);
                } else {
                    other.push(x);
                }
                if with_terms {
                    terms.push(TermReport {
                        b: stratum.size,
                        m: class.m,
                        p: class.p,
                        q: class.q.q,
                        value: stratum.weight * x.exp(),
                    });
                }
            }
            let s_same = log_sum_exp(&same).exp();
            let s_other = log_sum_exp(&other).exp();
            let sum = s_same + s_other;
            let (value, clamped) = match self.clamp {
                ClampMode::Stratum => (sum.min(1.0), sum > 1.0),
                ClampMode::SameSizeOnly => (s_other + s_same.min(1.0), s_same > 1.0),
            };
            let contribution = stratum.weight * value;
            total += contribution;
            strata.push(StratumReport {
                size: stratum.size,
                weight: stratum.weight,
                sum,
                clamped,
                contribution,
            });
        }
        BoundResult {
            n_tests,
            gamma_star: total.min(1.0),
            strata,
            terms,
        }
    }

    /// Smallest `N` with `γ*(N) < gamma`.
    pub fn invert(&self, gamma: f64) -> Result<u64> {
        ensure!(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1), got {gamma}");
        search_min(gamma, self.lies.min_tests(), |n| Ok(self.gamma_star(n)))
    }
}

/// `ln Σ_{l <= tol} C(N, l) q^(N-l) (1-q)^l`, the log-probability that a
/// pair disagrees in at most `tol` of `N` tests.
fn ln_pair_term(n_tests: u64, q: &NonSeparation, tol: u64) -> f64 {
    if tol == 0 {
        return n_tests as f64 * q.ln_q;
    }
    if n_tests <= tol {
        return 0.0;
    }
    if q.q == 0.0 {
        return f64::NEG_INFINITY;
    }
    if q.ln_sep == f64::NEG_INFINITY {
        return 0.0;
    }
    let terms: Vec<f64> = (0..=tol)
        .map(|l| ln_binom_f64(n_tests, l) + (n_tests - l) as f64 * q.ln_q + l as f64 * q.ln_sep)
        .collect();
    log_sum_exp(&terms)
}

/// Max-shifted `ln Σ exp(x_i)`; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Smallest `N >= start` with `f(N) < threshold`, for non-increasing `f`:
/// doubling to bracket, then integer bisection.
fn search_min<F>(threshold: f64, start: u64, mut f: F) -> Result<u64>
where
    F: FnMut(u64) -> Result<f64>,
{
    let start = start.max(1);
    if f(start)? < threshold {
        return Ok(start);
    }
    let mut lo = start;
    let mut hi = start;
    loop {
        if hi >= MAX_TESTS {
            return Err(Error::NotFound(format!(
                "bound stays at or above {threshold} for every N <= {MAX_TESTS}"
            )));
        }
        hi = hi.saturating_mul(2).min(MAX_TESTS);
        if f(hi)? < threshold {
            break;
        }
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(mid)? < threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `N` with `bound(N) < gamma_target`, assuming `bound` is
/// non-increasing in `N`.
pub fn invert_to_n<F>(gamma_target: f64, bound: F) -> Result<u64>
where
    F: FnMut(u64) -> Result<f64>,
{
    ensure!(
        gamma_target > 0.0 && gamma_target < 1.0,
        "gamma must lie in (0, 1), got {gamma_target}"
    );
    search_min(gamma_target, 1, bound)
}

/// `γ*` for a uniformly random defective set of exactly `d` items.
pub fn gamma_star_exact_d(model: ModelSpec, n: u64, d: u64, design: &DesignDist, n_tests: u64) -> Result<BoundResult> {
    ensure!(d >= 1 && d < n, "exact_d bound needs 1 <= d < n, got d={d} n={n}");
    gamma_star_prior(model, n, &PriorSpec::ExactD { d }, design, n_tests)
}

/// `γ*` for an exchangeable prior.
pub fn gamma_star_prior(
    model: ModelSpec,
    n: u64,
    prior: &PriorSpec,
    design: &DesignDist,
    n_tests: u64,
) -> Result<BoundResult> {
    ensure!(n_tests >= 1, "design length must be >= 1");
    Ok(GammaBound::new(model, n, prior, design)?.evaluate(n_tests))
}

/// `γ*` when up to `lies.lies` results may be wrong.
pub fn gamma_star_lies(
    model: ModelSpec,
    n: u64,
    prior: &PriorSpec,
    design: &DesignDist,
    n_tests: u64,
    lies: LieSpec,
) -> Result<BoundResult> {
    ensure!(
        n_tests >= lies.min_tests(),
        "design length {n_tests} is below the minimum {} for {} lies",
        lies.min_tests(),
        lies.lies
    );
    let bound = GammaBound::with_options(model, n, prior, design, lies, ClampMode::Stratum)?;
    Ok(bound.evaluate(n_tests))
}

/// Smallest `N` whose bound drops below `gamma`.
pub fn n_gamma(
    model: ModelSpec,
    n: u64,
    prior: &PriorSpec,
    design: &DesignDist,
    lies: LieSpec,
    gamma: f64,
) -> Result<u64> {
    GammaBound::with_options(model, n, prior, design, lies, ClampMode::Stratum)?.invert(gamma)
}

/// Pair classes of a target space with their exact unordered pair counts,
/// for the zero-error lengths.
#[derive(Debug, Clone)]
pub struct PairSum {
    classes: Vec<(f64, NonSeparation)>,
    lies: LieSpec,
}

impl PairSum {
    pub fn new(model: ModelSpec, space: &TargetSpace, design: &DesignDist, lies: LieSpec) -> Result<Self> {
        model.validate()?;
        space.validate()?;
        let n = space.n;
        let weights = design.size_weights(n)?;
        let mut classes = Vec::new();
        for l in space.sizes.clone() {
            for m in space.sizes.clone().filter(|&m| m <= l) {
                for p in 0..=m {
                    if p == l {
                        continue;
                    }
                    let count = pair_count(PairClassParams { n, l, m, p })?;
                    if count == BigUint::from(0u32) {
                        continue;
                    }
                    let q = non_separation_weighted(model, n, l, m, p, &weights)?;
                    classes.push((ln_big(&count), q));
                }
            }
        }
        Ok(PairSum { classes, lies })
    }

    /// Expected number of unseparated pairs after `N` tests.
    pub fn value(&self, n_tests: u64) -> f64 {
        let tol = self.lies.tolerance();
        let xs: Vec<f64> = self
            .classes
            .iter()
            .map(|(ln_count, q)| ln_count + ln_pair_term(n_tests, q, tol))
            .collect();
        log_sum_exp(&xs).exp()
    }

    /// Smallest `N` with [`PairSum::value`] below 1.
    pub fn min_tests(&self) -> Result<u64> {
        search_min(1.0, self.lies.min_tests(), |n| Ok(self.value(n)))
    }
}

/// Smallest `N` for which some design of length `N` separates every pair.
pub fn n_zero(model: ModelSpec, space: &TargetSpace, design: &DesignDist) -> Result<u64> {
    PairSum::new(model, space, design, LieSpec::NONE)?.min_tests()
}

/// [`n_zero`] with up to `lies` wrong answers.
pub fn n_zero_lies(model: ModelSpec, space: &TargetSpace, design: &DesignDist, lies: LieSpec) -> Result<u64> {
    PairSum::new(model, space, design, lies)?.min_tests()
}
