//! Test designs: random samplers, the quasi-random improved construction,
//! Macula's disjunct matrices, and Hamming-distance diagnostics.

use itertools::Itertools;
use log::warn;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::exactcomb::{choose, ratio_to_f64};
use crate::itemset::ItemSet;
use crate::renyi::DesignDist;

/// Seed plus stream id for the ChaCha8 generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub seed: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(seed: u64) -> Self {
        Seed { seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Seed { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// An ordered list of tests over `n` items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    n: usize,
    tests: Vec<ItemSet>,
}

#[derive(Serialize, Deserialize)]
struct DesignJson {
    n: usize,
    #[serde(rename = "N")]
    n_tests: usize,
    tests: Vec<Vec<usize>>,
}

impl Design {
    pub fn empty(n: usize) -> Self {
        Design { n, tests: Vec::new() }
    }

    pub fn new(n: usize, tests: Vec<ItemSet>) -> Result<Self> {
        ensure!(
            tests.iter().all(|t| t.universe() == n),
            "every test must be a subset of the same {n} items"
        );
        Ok(Design { n, tests })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of tests `N`.
    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    pub fn tests(&self) -> &[ItemSet] {
        &self.tests
    }

    pub fn push(&mut self, test: ItemSet) -> Result<()> {
        ensure!(
            test.universe() == self.n,
            "test universe {} != n={}",
            test.universe(),
            self.n
        );
        self.tests.push(test);
        Ok(())
    }

    /// The first `k` tests.
    pub fn prefix(&self, k: usize) -> Design {
        Design {
            n: self.n,
            tests: self.tests[..k.min(self.tests.len())].to_vec(),
        }
    }

    /// `N × n` incidence matrix, rows = tests.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        self.tests
            .iter()
            .map(|t| (0..self.n).map(|j| t.contains(j) as u8).collect())
            .collect()
    }

    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let mut design = Design::empty(n);
        for row in rows {
            ensure!(row.len() == n, "ragged matrix");
            let mut t = ItemSet::empty(n);
            for (j, &a) in row.iter().enumerate() {
                match a {
                    0 => {}
                    1 => t.insert(j),
                    _ => return Err(Error::invalid(format!("matrix entry {a} is not 0/1"))),
                }
            }
            design.tests.push(t);
        }
        Ok(design)
    }

    /// Column `j` as a set of test indices.
    pub fn columns(&self) -> Vec<ItemSet> {
        let mut cols = vec![ItemSet::empty(self.tests.len()); self.n];
        for (i, t) in self.tests.iter().enumerate() {
            for j in t.iter() {
                cols[j].insert(i);
            }
        }
        cols
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.n];
        for t in &self.tests {
            for j in t.iter() {
                w[j] += 1;
            }
        }
        w
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n={} N={}\n", self.n, self.tests.len());
        for t in &self.tests {
            for j in 0..self.n {
                out.push(if t.contains(j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty design file".into()))?;
        let (mut n, mut n_tests) = (None, None);
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("N", v)) => n_tests = v.parse::<usize>().ok(),
                _ => return Err(Error::Parse(format!("bad header field {field:?}"))),
            }
        }
        let (n, n_tests) = match (n, n_tests) {
            (Some(n), Some(t)) => (n, t),
            _ => return Err(Error::Parse(format!("header must be `n=<n> N=<N>`, got {header:?}"))),
        };
        let mut design = Design::empty(n);
        for (row, line) in lines.enumerate() {
            let line = line.trim();
            if line.len() != n {
                return Err(Error::Parse(format!(
                    "row {row} has {} columns, expected {n}",
                    line.len()
                )));
            }
            let mut t = ItemSet::empty(n);
            for (j, c) in line.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => t.insert(j),
                    _ => return Err(Error::Parse(format!("row {row}: unexpected character {c:?}"))),
                }
            }
            design.tests.push(t);
        }
        if design.len() != n_tests {
            return Err(Error::Parse(format!(
                "header says N={n_tests}, found {} rows",
                design.len()
            )));
        }
        Ok(design)
    }

    pub fn to_json(&self) -> String {
        let doc = DesignJson {
            n: self.n,
            n_tests: self.tests.len(),
            tests: self.tests.iter().map(ItemSet::indices).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("design serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DesignJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.tests.len() != doc.n_tests {
            return Err(Error::Parse(format!(
                "N={} but {} tests listed",
                doc.n_tests,
                doc.tests.len()
            )));
        }
        let tests = doc
            .tests
            .iter()
            .map(|ix| ItemSet::from_indices(doc.n, ix))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        Design::new(doc.n, tests)
    }
}

pub(crate) fn uniform_subset<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> ItemSet {
    let mut t = ItemSet::empty(n);
    for i in index::sample(rng, n, s) {
        t.insert(i);
    }
    t
}

/// One random test drawn from `dist`.
pub fn sample_test<R: Rng + ?Sized>(dist: &DesignDist, n: usize, rng: &mut R) -> ItemSet {
    match dist {
        DesignDist::ConstantWeight { s } => uniform_subset(n, *s as usize, rng),
        DesignDist::Bernoulli { kappa } => {
            let mut t = ItemSet::empty(n);
            for j in 0..n {
                if rng.random_bool(*kappa) {
                    t.insert(j);
                }
            }
            t
        }
        DesignDist::SizeDist { pmf } => {
            let size = WeightedIndex::new(pmf).expect("validated pmf").sample(rng);
            uniform_subset(n, size, rng)
        }
    }
}

/// `N` independent tests from `dist`.
pub fn sample_design(dist: &DesignDist, n: usize, n_tests: usize, seed: Seed) -> Result<Design> {
    dist.validate(n as u64)?;
    let mut rng = seed.rng();
    Ok(sample_design_with(dist, n, n_tests, &mut rng))
}

pub(crate) fn sample_design_with<R: Rng + ?Sized>(dist: &DesignDist, n: usize, n_tests: usize, rng: &mut R) -> Design {
    Design {
        n,
        tests: (0..n_tests).map(|_| sample_test(dist, n, rng)).collect(),
    }
}

/// Where [`candidate_test`] draws the remaining items when fewer than `s`
/// items share the minimum frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FallbackPool {
    /// Every item above the minimum frequency.
    #[default]
    AboveMinimum,
    /// Frequency tiers in increasing order, sampling within the tier that
    /// overflows.
    NextTier,
}

/// A test of size `s` favouring the items used least so far.
pub fn candidate_test<R: Rng + ?Sized>(design: &Design, s: usize, pool: FallbackPool, rng: &mut R) -> Result<ItemSet> {
    ensure!(s <= design.n(), "test size {s} exceeds n={}", design.n());
    Ok(candidate_from_frequencies(&design.column_weights(), s, pool, rng))
}

fn candidate_from_frequencies<R: Rng + ?Sized>(freq: &[usize], s: usize, pool: FallbackPool, rng: &mut R) -> ItemSet {
    let n = freq.len();
    let min = freq.iter().copied().min().unwrap_or(0);
    let tied: Vec<usize> = (0..n).filter(|&j| freq[j] == min).collect();
    let mut t = ItemSet::empty(n);
    if tied.len() >= s {
        for k in index::sample(rng, tied.len(), s) {
            t.insert(tied[k]);
        }
        return t;
    }
    for &j in &tied {
        t.insert(j);
    }
    let mut need = s - tied.len();
    let rest: Vec<usize> = (0..n).filter(|&j| freq[j] > min).collect();
    if rest.len() < need {
        warn!(
            "candidate_test: only {} items above the minimum, {} needed; sampling uniformly",
            rest.len(),
            need
        );
        return uniform_subset(n, s, rng);
    }
    match pool {
        FallbackPool::AboveMinimum => {
            for k in index::sample(rng, rest.len(), need) {
                t.insert(rest[k]);
            }
        }
        FallbackPool::NextTier => {
            let tiers = rest.iter().map(|&j| freq[j]).sorted().dedup();
            for f in tiers {
                let tier: Vec<usize> = rest.iter().copied().filter(|&j| freq[j] == f).collect();
                if tier.len() <= need {
                    need -= tier.len();
                    tier.iter().for_each(|&j| t.insert(j));
                } else {
                    for k in index::sample(rng, tier.len(), need) {
                        t.insert(tier[k]);
                    }
                    need = 0;
                }
                if need == 0 {
                    break;
                }
            }
        }
    }
    t
}

/// Parameters of [`improved_design`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprovedOptions {
    pub n_candidates: usize,
    pub guided_fraction: f64,
    pub fallback: FallbackPool,
}

impl Default for ImprovedOptions {
    fn default() -> Self {
        ImprovedOptions {
            n_candidates: 100,
            guided_fraction: 0.75,
            fallback: FallbackPool::AboveMinimum,
        }
    }
}

/// Greedy quasi-random constant-weight design: each new row is the
/// candidate farthest (max-min Hamming distance, then max total distance)
/// from the rows chosen so far.
///
/// The output is nested: its first `k` rows are what the same seed
/// produces for `N = k`.
pub fn improved_design(n: usize, s: usize, n_tests: usize, seed: Seed, opts: ImprovedOptions) -> Result<Design> {
    improved_design_with(n, s, n_tests, opts, &mut seed.rng())
}

pub(crate) fn improved_design_with<R: Rng + ?Sized>(
    n: usize,
    s: usize,
    n_tests: usize,
    opts: ImprovedOptions,
    rng: &mut R,
) -> Result<Design> {
    ensure!(s <= n, "test size {s} exceeds n={n}");
    ensure!(opts.n_candidates >= 1, "need at least one candidate");
    ensure!(
        (0.0..=1.0).contains(&opts.guided_fraction),
        "guided_fraction must lie in [0, 1], got {}",
        opts.guided_fraction
    );
    let mut design = Design::empty(n);
    if n_tests == 0 {
        return Ok(design);
    }
    let mut freq = vec![0usize; n];
    let first = uniform_subset(n, s, rng);
    first.iter().for_each(|j| freq[j] += 1);
    design.tests.push(first);
    let guided = ((opts.guided_fraction * opts.n_candidates as f64).ceil() as usize).min(opts.n_candidates);
    let uniform = opts.n_candidates - guided;
    let distinct = choose(n as u64, s as i64) >= uniform.into();
    let mut candidates = Vec::with_capacity(opts.n_candidates);
    while design.len() < n_tests {
        candidates.clear();
        for _ in 0..guided {
            candidates.push(candidate_from_frequencies(&freq, s, opts.fallback, rng));
        }
        let start = candidates.len();
        while candidates.len() - start < uniform {
            let t = uniform_subset(n, s, rng);
            if distinct && candidates[start..].contains(&t) {
                continue;
            }
            candidates.push(t);
        }
        let mut best = 0;
        let mut best_key = (0usize, 0usize);
        for (i, c) in candidates.iter().enumerate() {
            let (mut min, mut sum) = (usize::MAX, 0usize);
            for row in &design.tests {
                let h = c.hamming(row);
                min = min.min(h);
                sum += h;
            }
            if i == 0 || (min, sum) > best_key {
                best = i;
                best_key = (min, sum);
            }
        }
        let chosen = candidates.swap_remove(best);
        chosen.iter().for_each(|j| freq[j] += 1);
        design.tests.push(chosen);
    }
    Ok(design)
}

/// Macula's `d`-disjunct matrix: rows are the `d`-subsets of `{0, …, m-1}`,
/// columns the first `n` of its `k`-subsets in lexicographic order, with an
/// entry 1 when the row label is contained in the column label.
pub fn macula_disjunct(m: usize, k: usize, d: usize, n: usize) -> Result<Design> {
    ensure!(
        d < k && k < m,
        "macula construction needs d < k < m, got d={d} k={k} m={m}"
    );
    let max_n = choose(m as u64, k as i64);
    ensure!(
        n >= 1 && max_n >= n.into(),
        "n={n} exceeds the {max_n} columns available for m={m} k={k}"
    );
    let rows: Vec<Vec<usize>> = (0..m).combinations(d).collect();
    let cols: Vec<Vec<usize>> = (0..m).combinations(k).take(n).collect();
    let tests = rows
        .iter()
        .map(|r| {
            let mut t = ItemSet::empty(n);
            for (j, c) in cols.iter().enumerate() {
                if r.iter().all(|x| c.contains(x)) {
                    t.insert(j);
                }
            }
            t
        })
        .collect();
    Design::new(n, tests)
}

/// Exhaustive check that no column's support is covered by the union of
/// any `d` other columns.
pub fn is_disjunct(design: &Design, d: usize) -> bool {
    let cols = design.columns();
    let n = cols.len();
    for j in 0..n {
        let others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
        for group in others.iter().combinations(d.min(others.len())) {
            let mut union = ItemSet::empty(design.len());
            for &&i in &group {
                union.union_with(&cols[i]);
            }
            if cols[j].is_subset(&union) {
                return false;
            }
        }
    }
    true
}

/// Distribution of the Hamming distance between two independent uniform
/// rows of weight `s`: `(2x, Pr)` for `x = 0..=s`.
pub fn hamming_row_pmf(n: usize, s: usize) -> Result<Vec<(usize, f64)>> {
    ensure!(2 * s <= n, "hamming_row_pmf needs s <= n/2, got s={s} n={n}");
    let total = choose(n as u64, s as i64);
    Ok((0..=s)
        .map(|x| {
            let count = choose(s as u64, (s - x) as i64) * choose((n - s) as u64, x as i64);
            (2 * x, ratio_to_f64(&count, &total))
        })
        .collect())
}

/// Smallest Hamming distance between two rows.
pub fn min_pairwise_hamming(design: &Design) -> Result<usize> {
    ensure!(design.len() >= 2, "need at least two rows");
    let t = design.tests();
    Ok((0..t.len())
        .flat_map(|i| (0..i).map(move |j| t[i].hamming(&t[j])))
        .min()
        .expect("at least one pair"))
}

/// `counts[h]` = number of row pairs at Hamming distance `h`, `h = 0..=n`.
pub fn distance_histogram(design: &Design) -> Result<Vec<u64>> {
    ensure!(design.len() >= 2, "need at least two rows");
    let t = design.tests();
    let mut counts = vec![0u64; design.n() + 1];
    for i in 0..t.len() {
        for j in 0..i {
            counts[t[i].hamming(&t[j])] += 1;
        }
    }
    Ok(counts)
}
