//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero only
//! when a check outside the documented known-red set goes red.
//!
//! Monte Carlo criteria run a reduced smoke version by default; set
//! `GTLAB_FULL=1` for the full repetition counts and tolerances.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::Rng;

use gtlab_core::asymptotics::{binary_weak_c, binary_weak_s, c_star, n_from_m, solve_m, weak_recovery_finite_terms};
use gtlab_core::designs::{improved_design, macula_disjunct, min_pairwise_hamming, sample_design};
use gtlab_core::exactcomb::{pair_count, r_count, PairClassParams, TestClassParams};
use gtlab_core::renyi::{k_additive, k_binary, k_general, q_ratio, q_rational};
use gtlab_core::simulate::{
    comp_decode, estimate_separation, evaluate_disjunct_comparison, is_separated, results, sample_target, DesignSource,
    DisjunctConfig,
};
use gtlab_core::tables::{self, reproduce, ReproduceOptions, TableId, Value};
use gtlab_core::{
    Decoder, DesignDist, GammaBound, ImprovedOptions, ModelSpec, PriorSpec, Seed, SimConfig, TargetSpace,
};

/// Exact-table cells that differ from the published integers.
const KNOWN_RED_EXACT: [&str; 2] = ["bin-binom3 0.15 gamma=0.01 n=100", "lies-L1 0.30 gamma=0.01 n=10"];

/// Disjunct-comparison cells outside tolerance in both modes.
const KNOWN_RED_DISJUNCT: [&str; 2] = ["disjunct-d3 n=50 (d)", "disjunct-d4 n=100 (b)"];

/// Monte Carlo cells outside the full-mode tolerance with the neighbor
/// decoder, all estimated above the published value.
const KNOWN_RED_MC_FULL: [&str; 14] = [
    "add-g05 0.30 n=50 estimate",
    "add-g05 0.30 n=150 estimate",
    "add-g10 0.30 n=20 estimate",
    "add-g10 0.30 n=50 estimate",
    "add-g10 0.30 n=150 estimate",
    "add-g10 0.40 n=100 estimate",
    "add-g10 0.40 n=150 estimate",
    "add-g10 0.50 n=20 estimate",
    "add-g10 0.50 n=100 estimate",
    "bin-g05 0.50 n=200 estimate",
    "bin-g10 0.10 n=100 estimate",
    "bin-g10 0.50 n=200 estimate",
    "bin-g25 0.40 n=50 estimate",
    "bin-g25 0.50 n=50 estimate",
];

const KNOWN_RED_DECODER: [&str; 2] = ["neighbor radius 2", "neighbor radius 4"];

const EXACT_RUNTIME: Duration = Duration::from_secs(60);
const ASYMPT_RUNTIME: Duration = Duration::from_secs(1);
const ASYMPT_TOL_FINE: f64 = 0.001;
const ASYMPT_TOL_COARSE: f64 = 0.01;
const DISJUNCT_TOL: f64 = 0.02;
const MC_TOL: f64 = 0.01;
const SMOKE_MC_TOL: f64 = 0.03;
const TREND_MIN_GAIN: f64 = 0.02;
const ASYMPT_INVERT_TOL: f64 = 1.0;

struct Mode {
    full: bool,
    mc_reps: u64,
    mc_tol: f64,
    disjunct_reps: u64,
    disjunct_tol: f64,
}

impl Mode {
    fn from_env() -> Self {
        if std::env::var("GTLAB_FULL").is_ok_and(|v| v == "1") {
            Mode {
                full: true,
                mc_reps: 50_000,
                mc_tol: MC_TOL,
                disjunct_reps: 100_000,
                disjunct_tol: DISJUNCT_TOL,
            }
        } else {
            Mode {
                full: false,
                mc_reps: 5_000,
                mc_tol: SMOKE_MC_TOL,
                disjunct_reps: 10_000,
                disjunct_tol: DISJUNCT_TOL,
            }
        }
    }
}

/// Outcome of one criterion: the failing checks and a summary.
struct Outcome {
    failures: Vec<String>,
    summary: String,
}

#[derive(Default)]
struct Report {
    unexpected: Vec<String>,
    recovered: Vec<String>,
}

impl Report {
    fn record(&mut self, number: u32, title: &str, known_red: &[&str], outcome: Outcome) {
        let verdict = if outcome.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("{verdict} {number} {title}: {}", outcome.summary);
        if !outcome.failures.is_empty() {
            line += &format!(" [failing: {}]", outcome.failures.join("; "));
        }
        println!("{line}");
        let known: BTreeSet<&str> = known_red.iter().copied().collect();
        for f in &outcome.failures {
            if !known.iter().any(|k| f.starts_with(k)) {
                self.unexpected.push(format!("criterion {number}: {f}"));
            }
        }
        for k in known {
            if !outcome.failures.iter().any(|f| f.starts_with(k)) {
                self.recovered.push(format!("criterion {number}: {k}"));
            }
        }
    }
}

fn exact_tables() -> Outcome {
    let ids = [
        TableId::BinD3Exact,
        TableId::BinBinom3,
        TableId::BinVsBern,
        TableId::LiesL1,
        TableId::LiesL2,
    ];
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cells = 0;
    for id in ids {
        let table = reproduce(id, &ReproduceOptions::default()).unwrap();
        cells += table.cells().count();
        for (row, column, value, published) in table.integer_mismatches() {
            failures.push(format!(
                "{} {row} {column} computed {value} published {published}",
                id.ascii_name()
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > EXACT_RUNTIME {
        failures.push(format!("runtime {elapsed:?}"));
    }
    Outcome {
        summary: format!("{} of {cells} integer cells differ, {elapsed:.1?}", failures.len()),
        failures,
    }
}

fn asymptotic_constants() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, &d) in tables::published::ASYMPT_D.iter().enumerate() {
        let tol = if i < 4 { ASYMPT_TOL_FINE } else { ASYMPT_TOL_COARSE };
        let c = binary_weak_c(d, 0.02).unwrap();
        let star = c_star(d, 0.02);
        for (name, value, published) in [
            ("c", c, tables::published::ASYMPT_C[i]),
            ("c*", star, tables::published::ASYMPT_C_STAR[i]),
        ] {
            let err = (value - published).abs();
            worst = worst.max(err / tol);
            if err > tol {
                failures.push(format!("{name} d={d} computed {value:.4} published {published}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > ASYMPT_RUNTIME {
        failures.push(format!("runtime {elapsed:?}"));
    }
    Outcome {
        summary: format!("largest error {worst:.2} of tolerance, {elapsed:.1?}"),
        failures,
    }
}

fn monte_carlo_tables(mode: &Mode) -> Outcome {
    let ids = [
        (TableId::AddGamma05, 0.05),
        (TableId::AddGamma10, 0.10),
        (TableId::BinGamma05, 0.05),
        (TableId::BinGamma10, 0.10),
        (TableId::BinGamma25, 0.25),
    ];
    let opts = ReproduceOptions {
        reps: Some(mode.mc_reps),
        ..ReproduceOptions::default()
    };
    let mut failures = Vec::new();
    let mut cells = 0;
    let mut worst: f64 = 0.0;
    for (id, gamma_star) in ids {
        let table = reproduce(id, &opts).unwrap();
        for row in &table.rows {
            for (col, cell) in table.columns.iter().zip(&row.cells) {
                if !col.starts_with("1-gamma") {
                    continue;
                }
                cells += 1;
                let (Value::Real(p, _), Value::Real(published, _)) = (cell.value, cell.published) else {
                    panic!("{id} {col}: missing estimate");
                };
                let se = (p * (1.0 - p) / mode.mc_reps as f64).sqrt();
                let err = (p - published).abs();
                worst = worst.max(err);
                let size = col.trim_start_matches("1-gamma ");
                if err > mode.mc_tol {
                    failures.push(format!(
                        "{} {} {size} estimate {p:.4} published {published}",
                        id.ascii_name(),
                        row.label
                    ));
                }
                if p + 3.0 * se < 1.0 - gamma_star {
                    failures.push(format!(
                        "{} {} {size} below 1-gamma*: estimate {p:.4}",
                        id.ascii_name(),
                        row.label
                    ));
                }
            }
        }
    }
    Outcome {
        summary: format!(
            "{cells} cells at {} reps, tolerance {}, largest deviation {worst:.4}",
            mode.mc_reps, mode.mc_tol
        ),
        failures,
    }
}

fn disjunct_comparison(mode: &Mode) -> Outcome {
    let mut failures = Vec::new();
    let mut cfg = DisjunctConfig::new(50, 8, 3, 3);
    cfg.reps = mode.disjunct_reps;
    cfg.seed = 1;
    let res = evaluate_disjunct_comparison(&cfg).unwrap();
    let (_, published) = tables::published::DISJUNCT_3[0];
    let estimates = [res.disjunct_full, res.disjunct_comp, res.random, res.improved];
    let mut shown = Vec::new();
    for ((label, est), published) in ["(a)", "(b)", "(c)", "(d)"].iter().zip(estimates).zip(published) {
        shown.push(format!("{label} {:.3}/{published}", est.p_hat));
        if (est.p_hat - published).abs() > mode.disjunct_tol {
            failures.push(format!(
                "disjunct-d3 n=50 {label} estimate {:.4} published {published}",
                est.p_hat
            ));
        }
    }

    // COMP on the Macula matrix for n = 100, four defectives
    let macula = macula_disjunct(9, 4, 2, 100).unwrap();
    let prior = PriorSpec::ExactD { d: 4 };
    let mut rng = Seed::new(1).rng();
    let reps = 100_000;
    let hits = (0..reps)
        .filter(|_| {
            let t = sample_target(&prior, 100, &mut rng);
            comp_decode(&macula, &results(&macula, &t, ModelSpec::BINARY)).unwrap() == t
        })
        .count();
    let p = hits as f64 / reps as f64;
    let published = tables::published::DISJUNCT_4[1].1[1];
    shown.push(format!("d=4 n=100 (b) {p:.3}/{published}"));
    if (p - published).abs() > mode.disjunct_tol {
        failures.push(format!("disjunct-d4 n=100 (b) estimate {p:.4} published {published}"));
    }
    Outcome {
        summary: format!(
            "{} reps, tolerance {}: {}",
            mode.disjunct_reps,
            mode.disjunct_tol,
            shown.join(", ")
        ),
        failures,
    }
}

fn popcount(x: u32) -> u64 {
    u64::from(x.count_ones())
}

fn binom_by_count(n: u64, k: u64) -> BigUint {
    BigUint::from((0u32..1 << n).filter(|&x| popcount(x) == k).count())
}

fn oracle_equivalence() -> Outcome {
    let mut failures = Vec::new();
    let mut checks = 0u64;
    for n in 2u64..=10 {
        let models = [
            ModelSpec::BINARY,
            ModelSpec::threshold(2).unwrap(),
            ModelSpec::threshold(n).unwrap(),
        ];
        for l in 1u64..=3 {
            for m in 0..=l {
                for p in 0..=m.min(l - 1) {
                    if l + m - p > n {
                        continue;
                    }
                    let t = (1u32 << l) - 1;
                    let t2 = ((1u32 << p) - 1) | (((1u32 << (m - p)) - 1) << l);
                    for model in models {
                        let h = model.effective_h(n);
                        let mut fails = vec![0u64; n as usize + 1];
                        let mut total = vec![0u64; n as usize + 1];
                        for x in 0u32..1 << n {
                            let s = popcount(x) as usize;
                            total[s] += 1;
                            if popcount(x & t).min(h) == popcount(x & t2).min(h) {
                                fails[s] += 1;
                            }
                        }
                        for s in 0..=n {
                            checks += 1;
                            let (k, all) = (fails[s as usize], total[s as usize]);
                            let exact = q_rational(model, n, l, m, p, s).unwrap();
                            if exact != Ratio::new(BigUint::from(k), BigUint::from(all)) {
                                failures.push(format!("q n={n} l={l} m={m} p={p} s={s} h={h}"));
                            }
                            if s == 0 {
                                continue;
                            }
                            let float = q_ratio(model, n, l, m, p, &DesignDist::ConstantWeight { s }).unwrap();
                            if (float - k as f64 / all as f64).abs() > 1e-15 {
                                failures.push(format!("q_ratio n={n} l={l} m={m} p={p} s={s} h={h}"));
                            }
                        }
                    }
                    for s in 0..=n {
                        checks += 3;
                        let binary = k_general(ModelSpec::BINARY, n, l, m, p, s).unwrap();
                        if binary != k_binary(n, l, m, p, s).unwrap() {
                            failures.push(format!("k_general h=1 n={n} l={l} m={m} p={p} s={s}"));
                        }
                        if s >= 1 {
                            let saturated = k_general(ModelSpec::threshold(s).unwrap(), n, l, m, p, s).unwrap();
                            if saturated != k_additive(n, l, m, p, s).unwrap() {
                                failures.push(format!("k_general h=s n={n} l={l} m={m} p={p} s={s}"));
                            }
                        }
                        let pair = PairClassParams::new(n, l, m, p).unwrap();
                        let mut sum = BigUint::ZERO;
                        for r in 0..=p as i64 {
                            for u in 0..=(l - p) as i64 {
                                for v in 0..=(m - p) as i64 {
                                    sum += r_count(TestClassParams { pair, s, u, v, r }).unwrap();
                                }
                            }
                        }
                        if sum != binom_by_count(n, s) {
                            failures.push(format!("sum R n={n} l={l} m={m} p={p} s={s}"));
                        }
                    }
                }
            }
        }
        for d in 1u64..=3.min(n) {
            checks += 1;
            let subsets = binom_by_count(n, d);
            let pairs = &subsets * (&subsets - 1u32) / 2u32;
            let sum: BigUint = (0..d)
                .filter(|&p| 2 * d - p <= n)
                .map(|p| pair_count(PairClassParams::new(n, d, d, p).unwrap()).unwrap())
                .sum();
            if sum != pairs {
                failures.push(format!("sum Q n={n} d={d}"));
            }
        }
    }
    Outcome {
        summary: format!("{checks} exact comparisons against enumeration"),
        failures,
    }
}

fn decoder_validation() -> Outcome {
    let n = 12;
    let instances = 10_000u64;
    let space = TargetSpace::exact(n as u64, 3);
    let prior = PriorSpec::ExactD { d: 3 };
    let mut rng = Seed::new(6).rng();
    let mut disagree = [0u64; 2];
    for i in 0..instances {
        let s = rng.random_range(1..=n as u64);
        let n_tests = rng.random_range(5..=40);
        let design = sample_design(
            &DesignDist::ConstantWeight { s },
            n,
            n_tests,
            Seed { seed: 6, stream: i },
        )
        .unwrap();
        let t = sample_target(&prior, n, &mut rng);
        let truth = is_separated(&design, &t, &space, ModelSpec::BINARY, Decoder::exhaustive()).unwrap();
        for (slot, radius) in [2, 4].into_iter().enumerate() {
            if is_separated(&design, &t, &space, ModelSpec::BINARY, Decoder::Neighbor { radius }).unwrap() != truth {
                disagree[slot] += 1;
            }
        }
    }
    let mut failures = Vec::new();
    if disagree[0] > 0 {
        failures.push(format!("neighbor radius 2 disagrees on {} of {instances}", disagree[0]));
    }
    if disagree[1] > 0 {
        failures.push(format!("neighbor radius 4 disagrees on {} of {instances}", disagree[1]));
    }
    Outcome {
        summary: format!(
            "{instances} instances, disagreements radius 2: {}, radius 4: {}",
            disagree[0], disagree[1]
        ),
        failures,
    }
}

fn improvement_trend() -> Outcome {
    let (n, s) = (50, 11);
    let mut random = Vec::new();
    let mut improved = Vec::new();
    for seed in 0..200 {
        let r = sample_design(&DesignDist::ConstantWeight { s: s as u64 }, n, 30, Seed::new(seed)).unwrap();
        let i = improved_design(n, s, 30, Seed::new(seed), ImprovedOptions::default()).unwrap();
        random.push(min_pairwise_hamming(&r).unwrap());
        improved.push(min_pairwise_hamming(&i).unwrap());
    }
    random.sort_unstable();
    improved.sort_unstable();
    let (median_random, median_improved) = (random[100], improved[100]);

    let estimate = |design| {
        let mut cfg = SimConfig::new(ModelSpec::BINARY, n, PriorSpec::ExactD { d: 3 }, design);
        cfg.reps = 4_000;
        cfg.seed = 7;
        cfg.decoder = Decoder::CompFiltered;
        estimate_separation(&cfg).unwrap().p_hat
    };
    let p_random = estimate(DesignSource::Random {
        dist: DesignDist::ConstantWeight { s: s as u64 },
        n_tests: 20,
    });
    let p_improved = estimate(DesignSource::Improved {
        s,
        n_tests: 20,
        options: ImprovedOptions::default(),
    });

    let mut failures = Vec::new();
    if median_improved <= median_random {
        failures.push(format!(
            "median distance improved {median_improved} random {median_random}"
        ));
    }
    if p_improved - p_random < TREND_MIN_GAIN {
        failures.push(format!("separation improved {p_improved:.4} random {p_random:.4}"));
    }
    Outcome {
        summary: format!(
            "median min distance {median_improved} vs {median_random}, separation at N=20 {p_improved:.3} vs {p_random:.3}"
        ),
        failures,
    }
}

fn cross_module() -> Outcome {
    let mut failures = Vec::new();
    let mut shown = Vec::new();
    for d in [2u64, 3] {
        for n in [1_000u64, 10_000, 100_000] {
            for gamma in [0.02, 0.05] {
                let s = binary_weak_s(n, d);
                let terms = weak_recovery_finite_terms(ModelSpec::BINARY, n, d, s, gamma).unwrap();
                let from_root = n_from_m(solve_m(&terms).unwrap());
                let bound = GammaBound::new(
                    ModelSpec::BINARY,
                    n,
                    &PriorSpec::ExactD { d },
                    &DesignDist::ConstantWeight { s },
                )
                .unwrap();
                let inverted = bound.invert(gamma).unwrap();
                if from_root.abs_diff(inverted) > 1 {
                    failures.push(format!("root {from_root} invert {inverted} d={d} n={n} gamma={gamma}"));
                }
                if n == 10_000 {
                    let approx = d as f64 * (n as f64).log2() + binary_weak_c(d, gamma).unwrap();
                    let err = (inverted as f64 - approx).abs();
                    shown.push(format!("d={d} gamma={gamma} {inverted} vs {approx:.2}"));
                    if err > ASYMPT_INVERT_TOL {
                        failures.push(format!("expansion {approx:.3} invert {inverted} d={d} gamma={gamma}"));
                    }
                }
            }
        }
    }
    Outcome {
        summary: format!("at n=10^4: {}", shown.join(", ")),
        failures,
    }
}

fn main() {
    let mode = Mode::from_env();
    println!("acceptance run, {} mode", if mode.full { "full" } else { "smoke" });
    let mut report = Report::default();
    report.record(1, "exact bound tables", &KNOWN_RED_EXACT, exact_tables());
    report.record(2, "asymptotic constants", &[], asymptotic_constants());
    let mc_known: &[&str] = if mode.full { &KNOWN_RED_MC_FULL } else { &[] };
    report.record(3, "Monte Carlo tables", mc_known, monte_carlo_tables(&mode));
    report.record(
        4,
        "disjunct comparison",
        &KNOWN_RED_DISJUNCT,
        disjunct_comparison(&mode),
    );
    report.record(5, "oracle equivalence", &[], oracle_equivalence());
    report.record(6, "decoder validation", &KNOWN_RED_DECODER, decoder_validation());
    report.record(7, "improved design trend", &[], improvement_trend());
    report.record(8, "cross-module consistency", &[], cross_module());
    for r in &report.recovered {
        println!("note: known-red check now passes, {r}");
    }
    if !report.unexpected.is_empty() {
        eprintln!("unexpected failures:\n{}", report.unexpected.join("\n"));
        std::process::exit(1);
    }
}
