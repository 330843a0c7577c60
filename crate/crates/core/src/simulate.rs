//! Seeded Monte Carlo estimates of separation probabilities, COMP decoding,
//! and identifiability under lies.
//!
//! Repetition `i` draws its target and then its design from ChaCha8
//! stream `i`, so nested designs share prefixes across lengths, and
//! workers only ever add integer counts, so a run depends on the seed and
//! not on the number of workers.

use itertools::Itertools;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{LieSpec, PriorSpec, TargetSpace};
use crate::designs::{
    improved_design_with, macula_disjunct, sample_design_with, uniform_subset, Design, ImprovedOptions, Seed,
};
use crate::error::{ensure, Error, Result};
use crate::itemset::ItemSet;
use crate::renyi::{DesignDist, ModelSpec};

/// Largest target space the exhaustive decoder enumerates by default.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 200_000;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// How the alternatives `T' != T` are searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decoder {
    /// Every member of the target space, refusing spaces above `cap`.
    Exhaustive { cap: u64 },
    /// Only `T'` with `|T Δ T'| <= radius`.
    Neighbor { radius: usize },
    /// Only `T'` inside the COMP candidate set; exact for the binary model
    /// without lies.
    CompFiltered,
    /// Depth-first search over the whole space, abandoning a partial `T'`
    /// once too many tests already exceed their observed result. Exact for
    /// every model and lie count, with no cap.
    Pruned,
}

impl Decoder {
    pub fn exhaustive() -> Self {
        Decoder::Exhaustive {
            cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }

    pub fn neighbor() -> Self {
        Decoder::Neighbor { radius: 2 }
    }
}

/// `min(h, |X ∩ T|)`.
pub fn test_result(x: &ItemSet, t: &ItemSet, model: ModelSpec) -> u32 {
    model.outcome(x.intersection_len(t) as u32)
}

/// Result vector of `design` on target `t`.
pub fn results(design: &Design, t: &ItemSet, model: ModelSpec) -> Vec<u32> {
    design.tests().iter().map(|x| test_result(x, t, model)).collect()
}

/// Items that appear in no negative test.
pub fn comp_decode(design: &Design, results: &[u32]) -> Result<ItemSet> {
    ensure!(
        results.len() == design.len(),
        "{} results for a design of {} tests",
        results.len(),
        design.len()
    );
    let mut candidates = ItemSet::full(design.n());
    for (x, &r) in design.tests().iter().zip(results) {
        if r == 0 {
            for j in x.iter() {
                candidates.remove(j);
            }
        }
    }
    Ok(candidates)
}

/// True iff no other target in `space` gives the same result vector.
pub fn is_separated(
    design: &Design,
    t: &ItemSet,
    space: &TargetSpace,
    model: ModelSpec,
    decoder: Decoder,
) -> Result<bool> {
    Ok(!confusable(design, t, space, model, decoder, 1)?)
}

/// True iff every other target's result vector differs from `t`'s in at
/// least `tolerance + 1` tests, i.e. `2L + 1` for `L` lies and `L + 1`
/// when all lies share one answer.
pub fn is_identifiable_with_lies(
    design: &Design,
    t: &ItemSet,
    space: &TargetSpace,
    model: ModelSpec,
    lies: LieSpec,
    decoder: Decoder,
) -> Result<bool> {
    Ok(!confusable(design, t, space, model, decoder, lies.tolerance() + 1)?)
}

/// Whether some `T' != T` has result distance below `min_dist`.
fn confusable(
    design: &Design,
    t: &ItemSet,
    space: &TargetSpace,
    model: ModelSpec,
    decoder: Decoder,
    min_dist: u64,
) -> Result<bool> {
    ensure!(
        t.universe() == design.n() && space.n == design.n() as u64,
        "target, space and design disagree on n"
    );
    ensure!(
        space.contains_size(t.len() as u64),
        "target of size {} is outside the target space",
        t.len()
    );
    model.validate()?;
    let probe = Probe::new(design, t, model);
    match decoder {
        Decoder::Exhaustive { cap } => {
            let card = space.cardinality();
            if card > cap {
                return Err(Error::CapExceeded(format!(
                    "target space has {card} members, above the exhaustive cap {cap}; use the neighbor decoder"
                )));
            }
            let all = ItemSet::full(design.n());
            Ok(probe.any_within(&all, space, min_dist))
        }
        Decoder::CompFiltered => {
            ensure!(
                model.is_binary() && min_dist == 1,
                "the COMP-filtered decoder is exact only for the binary model without lies"
            );
            let candidates = comp_decode(design, &probe.results)?;
            Ok(probe.any_within(&candidates, space, min_dist))
        }
        Decoder::Neighbor { radius } => Ok(probe.any_neighbor(space, radius, min_dist)),
        Decoder::Pruned => Ok(probe.any_pruned(space, min_dist)),
    }
}

/// Search state of [`Probe::any_pruned`].
struct PrunedSearch<'p> {
    tests_of: Vec<Vec<usize>>,
    results: &'p [u32],
    h: u32,
    min_dist: u64,
    counts: Vec<u32>,
    chosen: Vec<usize>,
    /// Tests whose count already exceeds an unsaturated result.
    overshoot: u64,
}

impl PrunedSearch<'_> {
    fn add(&mut self, j: usize) {
        self.chosen.push(j);
        for &x in &self.tests_of[j] {
            self.counts[x] += 1;
            if self.results[x] < self.h && self.counts[x] == self.results[x] + 1 {
                self.overshoot += 1;
            }
        }
    }

    fn remove(&mut self) {
        let j = self.chosen.pop().expect("non-empty");
        for &x in &self.tests_of[j] {
            if self.results[x] < self.h && self.counts[x] == self.results[x] + 1 {
                self.overshoot -= 1;
            }
            self.counts[x] -= 1;
        }
    }

    /// Tests whose result needs more than `slots` further items.
    fn unreachable(&self, slots: usize) -> u64 {
        let slots = slots as u32;
        self.counts
            .iter()
            .zip(self.results)
            .filter(|&(&c, &r)| c < r && r - c > slots)
            .count() as u64
    }

    fn distance(&self) -> u64 {
        self.counts
            .iter()
            .zip(self.results)
            .filter(|&(&c, &r)| c.min(self.h) != r)
            .count() as u64
    }

    /// Completes `chosen` to `size` items from `start..`, skipping `t`.
    fn extend(&mut self, start: usize, size: usize, t: &ItemSet) -> bool {
        if self.overshoot >= self.min_dist {
            return false;
        }
        if self.chosen.len() == size {
            return self.distance() < self.min_dist && !(size == t.len() && self.chosen.iter().all(|&j| t.contains(j)));
        }
        if self.overshoot + self.unreachable(size - self.chosen.len()) >= self.min_dist {
            return false;
        }
        let n = self.tests_of.len();
        for j in start..=n - (size - self.chosen.len()) {
            self.add(j);
            let found = self.extend(j + 1, size, t);
            self.remove();
            if found {
                return true;
            }
        }
        false
    }
}

struct Probe<'a> {
    design: &'a Design,
    t: &'a ItemSet,
    model: ModelSpec,
    counts: Vec<u32>,
    results: Vec<u32>,
}

impl<'a> Probe<'a> {
    fn new(design: &'a Design, t: &'a ItemSet, model: ModelSpec) -> Self {
        let counts: Vec<u32> = design.tests().iter().map(|x| x.intersection_len(t) as u32).collect();
        let results = counts.iter().map(|&c| model.outcome(c)).collect();
        Probe {
            design,
            t,
            model,
            counts,
            results,
        }
    }

    /// Distance from `t`'s results to `other`'s, counting no further than
    /// `limit`.
    fn distance_up_to(&self, other: &ItemSet, limit: u64) -> u64 {
        let mut dist = 0;
        for (x, &r) in self.design.tests().iter().zip(&self.results) {
            if test_result(x, other, self.model) != r {
                dist += 1;
                if dist >= limit {
                    break;
                }
            }
        }
        dist
    }

    /// Any `T' != T`, `T' ⊆ pool`, of admissible size within distance.
    fn any_within(&self, pool: &ItemSet, space: &TargetSpace, min_dist: u64) -> bool {
        let items = pool.indices();
        let n = self.design.n();
        for b in space.sizes.clone() {
            if b as usize > items.len() {
                break;
            }
            for combo in items.iter().combinations(b as usize) {
                let mut other = ItemSet::empty(n);
                combo.into_iter().for_each(|&j| other.insert(j));
                if &other != self.t && self.distance_up_to(&other, min_dist) < min_dist {
                    return true;
                }
            }
        }
        false
    }

    fn any_pruned(&self, space: &TargetSpace, min_dist: u64) -> bool {
        let n = self.design.n();
        let mut search = PrunedSearch {
            tests_of: self.design.columns().iter().map(ItemSet::indices).collect(),
            results: &self.results,
            h: self.model.effective_h(n as u64).min(u32::MAX as u64) as u32,
            min_dist,
            counts: vec![0; self.design.len()],
            chosen: Vec::new(),
            overshoot: 0,
        };
        space
            .sizes
            .clone()
            .take_while(|&b| b as usize <= n)
            .any(|b| search.extend(0, b as usize, self.t))
    }

    fn any_neighbor(&self, space: &TargetSpace, radius: usize, min_dist: u64) -> bool {
        let n_tests = self.design.len();
        let h = self.model.effective_h(self.design.n() as u64).min(u32::MAX as u64) as u32;
        let mut le_h = ItemSet::empty(n_tests);
        let mut lt_h = ItemSet::empty(n_tests);
        for (i, &c) in self.counts.iter().enumerate() {
            if c <= h {
                le_h.insert(i);
            }
            if c < h {
                lt_h.insert(i);
            }
        }
        let cols = self.design.columns();
        let inside = self.t.indices();
        let outside = self.t.complement().indices();
        let size = inside.len() as u64;
        let close = |words: &mut dyn Iterator<Item = u64>| -> bool {
            let mut dist = 0u64;
            for w in words {
                dist += w.count_ones() as u64;
                if dist >= min_dist {
                    return false;
                }
            }
            true
        };
        if radius >= 1 {
            if size >= 1 && space.contains_size(size - 1) {
                for &i in &inside {
                    let mut diff = cols[i].words().iter().zip(le_h.words()).map(|(c, l)| c & l);
                    if close(&mut diff) {
                        return true;
                    }
                }
            }
            if space.contains_size(size + 1) {
                for &j in &outside {
                    let mut diff = cols[j].words().iter().zip(lt_h.words()).map(|(c, l)| c & l);
                    if close(&mut diff) {
                        return true;
                    }
                }
            }
        }
        if radius >= 2 && space.contains_size(size) {
            for &i in &inside {
                let ci = cols[i].words();
                for &j in &outside {
                    let cj = cols[j].words();
                    let mut diff =
                        (0..ci.len()).map(|w| (ci[w] & !cj[w] & le_h.words()[w]) | (cj[w] & !ci[w] & lt_h.words()[w]));
                    if close(&mut diff) {
                        return true;
                    }
                }
            }
        }
        // larger moves: remove `a` items and add `b`
        for total in 2..=radius {
            for a in 0..=total {
                let b = total - a;
                if (a, b) == (1, 1) || a > inside.len() || b > outside.len() {
                    continue;
                }
                if !space.contains_size(size + b as u64 - a as u64) {
                    continue;
                }
                for removed in inside.iter().combinations(a) {
                    let mut base = self.t.clone();
                    removed.iter().for_each(|&&i| base.remove(i));
                    for added in outside.iter().combinations(b) {
                        let mut other = base.clone();
                        added.iter().for_each(|&&j| other.insert(j));
                        if self.distance_up_to(&other, min_dist) < min_dist {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// A random defective set drawn from `prior`.
pub fn sample_target<R: Rng + ?Sized>(prior: &PriorSpec, n: usize, rng: &mut R) -> ItemSet {
    match prior {
        PriorSpec::ExactD { d } => uniform_subset(n, *d as usize, rng),
        PriorSpec::UpToD { weights, .. } => {
            let size = WeightedIndex::new(weights).expect("validated weights").sample(rng);
            uniform_subset(n, size, rng)
        }
        PriorSpec::Binomial { q } => {
            let mut t = ItemSet::empty(n);
            for j in 0..n {
                if rng.random_bool(*q) {
                    t.insert(j);
                }
            }
            t
        }
    }
}

/// Where each repetition's design comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignSource {
    Fixed(Design),
    Random {
        dist: DesignDist,
        n_tests: usize,
    },
    Improved {
        s: usize,
        n_tests: usize,
        options: ImprovedOptions,
    },
}

impl DesignSource {
    fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Design> {
        Ok(match self {
            DesignSource::Fixed(d) => d.clone(),
            DesignSource::Random { dist, n_tests } => sample_design_with(dist, n, *n_tests, rng),
            DesignSource::Improved { s, n_tests, options } => improved_design_with(n, *s, *n_tests, *options, rng)?,
        })
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            DesignSource::Fixed(d) => ensure!(d.n() == n, "fixed design has n={} but the run has n={n}", d.n()),
            DesignSource::Random { dist, .. } => dist.validate(n as u64)?,
            DesignSource::Improved { s, .. } => ensure!(*s <= n, "test size {s} exceeds n={n}"),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub model: ModelSpec,
    pub n: usize,
    pub prior: PriorSpec,
    pub design: DesignSource,
    pub decoder: Decoder,
    pub lies: LieSpec,
    pub reps: u64,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl SimConfig {
    pub fn new(model: ModelSpec, n: usize, prior: PriorSpec, design: DesignSource) -> Self {
        SimConfig {
            model,
            n,
            prior,
            design,
            decoder: Decoder::neighbor(),
            lies: LieSpec::NONE,
            reps: 10_000,
            seed: 0,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.reps >= 1, "reps must be >= 1");
        self.model.validate()?;
        self.prior.validate(self.n as u64)?;
        self.design.validate(self.n)
    }

    fn space(&self) -> TargetSpace {
        self.prior.target_space(self.n as u64)
    }
}

/// Estimated success probability with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub successes: u64,
    pub reps: u64,
    pub p_hat: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SimResult {
    pub fn from_counts(successes: u64, reps: u64) -> Self {
        assert!(reps >= 1 && successes <= reps);
        let n = reps as f64;
        let p = successes as f64 / n;
        let z2 = Z95 * Z95;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
        SimResult {
            successes,
            reps,
            p_hat: p,
            se: (p * (1.0 - p) / n).sqrt(),
            ci_low: if successes == 0 { 0.0 } else { (centre - half).max(0.0) },
            ci_high: if successes == reps {
                1.0
            } else {
                (centre + half).min(1.0)
            },
        }
    }
}

/// Runs `reps` repetitions in parallel, each returning `K` success flags,
/// and returns the per-flag success counts.
fn run_reps<const K: usize, F>(reps: u64, seed: u64, workers: usize, rep: F) -> Result<[u64; K]>
where
    F: Fn(&mut ChaCha8Rng) -> Result<[bool; K]> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| {
        (0..reps)
            .into_par_iter()
            .map(|i| {
                let mut rng = Seed { seed, stream: i }.rng();
                rep(&mut rng).map(|flags| flags.map(u64::from))
            })
            .try_reduce(
                || [0u64; K],
                |mut acc, x| {
                    acc.iter_mut().zip(x).for_each(|(a, b)| *a += b);
                    Ok(acc)
                },
            )
    })
}

/// Fraction of repetitions in which the drawn target is separated (or
/// identifiable under `config.lies`).
pub fn estimate_separation(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let space = config.space();
    let [ok] = run_reps(config.reps, config.seed, config.workers, |rng| {
        let t = sample_target(&config.prior, config.n, rng);
        let design = config.design.draw(config.n, rng)?;
        Ok([is_identifiable_with_lies(
            &design,
            &t,
            &space,
            config.model,
            config.lies,
            config.decoder,
        )?])
    })?;
    Ok(SimResult::from_counts(ok, config.reps))
}

/// Success counts for every prefix length of nested designs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationCurve {
    pub reps: u64,
    /// `successes[k]`: repetitions separated by the first `k` tests.
    pub successes: Vec<u64>,
}

impl SeparationCurve {
    pub fn at(&self, n_tests: usize) -> SimResult {
        SimResult::from_counts(self.successes[n_tests], self.reps)
    }

    /// Smallest prefix length whose estimate reaches `target`.
    pub fn first_reaching(&self, target: f64) -> Option<usize> {
        self.successes
            .iter()
            .position(|&k| k as f64 / self.reps as f64 >= target)
    }
}

/// Estimates the separation probability of every prefix `D_1, …, D_k` of
/// the drawn designs at once. Identifiability only improves as tests are
/// added, so each repetition bisects for its shortest identifying prefix.
pub fn separation_curve(config: &SimConfig) -> Result<SeparationCurve> {
    config.validate()?;
    let space = config.space();
    let n_max = match &config.design {
        DesignSource::Fixed(d) => d.len(),
        DesignSource::Random { n_tests, .. } | DesignSource::Improved { n_tests, .. } => *n_tests,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {} workers: {e}", config.workers)))?;
    let first = pool.install(|| {
        (0..config.reps)
            .into_par_iter()
            .map(|i| {
                let mut rng = Seed {
                    seed: config.seed,
                    stream: i,
                }
                .rng();
                let t = sample_target(&config.prior, config.n, &mut rng);
                let design = config.design.draw(config.n, &mut rng)?;
                let ok = |k: usize| {
                    is_identifiable_with_lies(&design.prefix(k), &t, &space, config.model, config.lies, config.decoder)
                };
                if !ok(n_max)? {
                    return Ok(None);
                }
                let (mut lo, mut hi) = (0, n_max);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if ok(mid)? {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                Ok(Some(lo))
            })
            .collect::<Result<Vec<Option<usize>>>>()
    })?;
    let mut hist = vec![0u64; n_max + 1];
    for k in first.into_iter().flatten() {
        hist[k] += 1;
    }
    let successes = hist
        .iter()
        .scan(0u64, |acc, &k| {
            *acc += k;
            Some(*acc)
        })
        .collect();
    Ok(SeparationCurve {
        reps: config.reps,
        successes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompEfficiency {
    /// COMP returns exactly the target.
    pub comp: SimResult,
    pub separated: SimResult,
    pub ratio: f64,
}

/// `Pr{COMP returns exactly T} / Pr{T is separated}` for the binary model.
pub fn comp_efficiency(config: &SimConfig) -> Result<CompEfficiency> {
    config.validate()?;
    ensure!(config.model.is_binary(), "COMP efficiency needs the binary model");
    let space = config.space();
    let [comp, sep] = run_reps(config.reps, config.seed, config.workers, |rng| {
        let t = sample_target(&config.prior, config.n, rng);
        let design = config.design.draw(config.n, rng)?;
        let exact = comp_decode(&design, &results(&design, &t, config.model))? == t;
        Ok([exact, is_separated(&design, &t, &space, config.model, config.decoder)?])
    })?;
    if sep == 0 {
        return Err(Error::UndefinedResult("no repetition separated its target".into()));
    }
    Ok(CompEfficiency {
        comp: SimResult::from_counts(comp, config.reps),
        separated: SimResult::from_counts(sep, config.reps),
        ratio: comp as f64 / sep as f64,
    })
}

/// Setup for comparing a Macula 2-disjunct design against random and
/// improved designs of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjunctConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Disjunctness of the Macula matrix.
    pub disjunct_d: usize,
    /// True number of defectives.
    pub defectives: usize,
    pub reps: u64,
    pub seed: u64,
    pub workers: usize,
    pub improved: ImprovedOptions,
}

impl DisjunctConfig {
    pub fn new(n: usize, m: usize, k: usize, defectives: usize) -> Self {
        DisjunctConfig {
            n,
            m,
            k,
            disjunct_d: 2,
            defectives,
            reps: 100_000,
            seed: 0,
            workers: 0,
            improved: ImprovedOptions::default(),
        }
    }

    /// Test size for the random and improved designs,
    /// `ceil(n (1 - 2^(-1/d)))`.
    pub fn random_test_size(&self) -> usize {
        let s = (self.n as f64 * (1.0 - 2f64.powf(-1.0 / self.defectives as f64))).ceil() as usize;
        s.clamp(1, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisjunctComparison {
    pub n_tests: usize,
    pub s: usize,
    /// Disjunct design, full decoding.
    pub disjunct_full: SimResult,
    /// Disjunct design, COMP only.
    pub disjunct_comp: SimResult,
    /// Random constant-weight design.
    pub random: SimResult,
    /// Improved design.
    pub improved: SimResult,
}

pub fn evaluate_disjunct_comparison(cfg: &DisjunctConfig) -> Result<DisjunctComparison> {
    ensure!(cfg.reps >= 1, "reps must be >= 1");
    ensure!(
        cfg.defectives >= 1 && cfg.defectives < cfg.n,
        "need 1 <= defectives < n"
    );
    let macula = macula_disjunct(cfg.m, cfg.k, cfg.disjunct_d, cfg.n)?;
    let n_tests = macula.len();
    let s = cfg.random_test_size();
    let space = TargetSpace::exact(cfg.n as u64, cfg.defectives as u64);
    let random = DesignDist::ConstantWeight { s: s as u64 };
    let [full, comp, rand_ok, improved_ok] = run_reps(cfg.reps, cfg.seed, cfg.workers, |rng| {
        let t = uniform_subset(cfg.n, cfg.defectives, rng);
        let r = results(&macula, &t, ModelSpec::BINARY);
        let comp_exact = comp_decode(&macula, &r)? == t;
        let full = is_separated(&macula, &t, &space, ModelSpec::BINARY, Decoder::CompFiltered)?;
        let d_random = sample_design_with(&random, cfg.n, n_tests, rng);
        let ok_random = is_separated(&d_random, &t, &space, ModelSpec::BINARY, Decoder::CompFiltered)?;
        let d_improved = improved_design_with(cfg.n, s, n_tests, cfg.improved, rng)?;
        let ok_improved = is_separated(&d_improved, &t, &space, ModelSpec::BINARY, Decoder::CompFiltered)?;
        Ok([full, comp_exact, ok_random, ok_improved])
    })?;
    Ok(DisjunctComparison {
        n_tests,
        s,
        disjunct_full: SimResult::from_counts(full, cfg.reps),
        disjunct_comp: SimResult::from_counts(comp, cfg.reps),
        random: SimResult::from_counts(rand_ok, cfg.reps),
        improved: SimResult::from_counts(improved_ok, cfg.reps),
    })
}
