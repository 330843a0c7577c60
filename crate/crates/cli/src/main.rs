mod manifest;
mod spec;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gtlab_core::asymptotics::{
    additive_exact_m0, additive_weak_m_gamma, approx_n, binary_exact_m0, binary_weak_c, binary_weak_lambda, c_star,
    expansion_constants, n_from_m, weak_recovery_terms, SpaceKind,
};
use gtlab_core::bounds::{n_zero_lies, ClampMode};
use gtlab_core::designs::{improved_design, macula_disjunct, sample_design, FallbackPool};
use gtlab_core::simulate::{estimate_separation, separation_curve, DesignSource};
use gtlab_core::tables::{reproduce, ReproduceOptions, Table};
use gtlab_core::{
    Decoder, Design, DesignDist, Error, GammaBound, ImprovedOptions, LieSpec, ModelSpec, Seed, SimConfig, TableId,
};

use manifest::{emit, RunManifest};
use spec::{parse_model, DesignArg, PriorArg};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    NotFound(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::NotFound(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::NotFound(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotFound(_) | Error::UndefinedResult(_) => Failure::NotFound(e.to_string()),
            Error::Io(_) => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "gtlab", version, about = "Group testing bounds, designs and simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Upper bound γ* on the failure probability of a random design.
    Bound(BoundArgs),
    /// Smallest design length whose bound reaches a target.
    Invert(InvertArgs),
    /// Generate a design.
    #[command(subcommand)]
    Design(DesignCommand),
    /// Monte Carlo estimate of the separation probability.
    Simulate(SimulateArgs),
    /// Asymptotic constants and approximations.
    Asympt(AsymptArgs),
    /// Recompute one of the published reference tables as CSV.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Clone)]
struct Problem {
    /// binary, additive or h=<k>
    #[arg(long, value_parser = parse_model)]
    model: ModelSpec,
    /// Number of items.
    #[arg(long)]
    n: u64,
    /// d=<d>, upto=<d>[:weights-file] or binom=<q>
    #[arg(long)]
    prior: PriorArg,
    /// s=<s>, bern=<κ> or dist=<file>
    #[arg(long)]
    design: DesignArg,
    /// Number of wrong answers tolerated.
    #[arg(long, default_value_t = 0)]
    lies: u64,
    /// All wrong answers share one value.
    #[arg(long, requires = "lies")]
    same_answer: bool,
}

impl Problem {
    fn lie_spec(&self) -> LieSpec {
        LieSpec::new(self.lies, self.same_answer)
    }

    fn params(&self) -> serde_json::Value {
        json!({
            "model": self.model.to_string(),
            "n": self.n,
            "prior": format!("{:?}", self.prior),
            "design": format!("{:?}", self.design),
            "lies": self.lies,
            "same_answer": self.same_answer,
        })
    }

    fn bound(&self) -> Result<GammaBound, Failure> {
        let prior = self.prior.resolve(self.n)?;
        let design = self.design.resolve(self.n)?;
        Ok(GammaBound::with_options(
            self.model,
            self.n,
            &prior,
            &design,
            self.lie_spec(),
            ClampMode::Stratum,
        )?)
    }
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    problem: Problem,
    /// Design length.
    #[arg(long = "N")]
    n_tests: u64,
    /// Print per-class contributions.
    #[arg(long)]
    verbose: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct InvertArgs {
    #[command(flatten)]
    problem: Problem,
    /// Target failure probability.
    #[arg(long, required_unless_present = "exact_recovery")]
    gamma: Option<f64>,
    /// Smallest length with a design separating every pair instead.
    #[arg(long, conflicts_with = "gamma")]
    exact_recovery: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignFormat {
    Text,
    Json,
}

#[derive(Args)]
struct DesignOutput {
    #[arg(long, value_enum, default_value_t = DesignFormat::Text)]
    format: DesignFormat,
    /// Output file; a manifest is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DesignCommand {
    /// Independent uniform tests of `s` items.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long = "N")]
        n_tests: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: DesignOutput,
    },
    /// Greedy max-min Hamming distance design.
    Improved {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long = "N")]
        n_tests: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        candidates: usize,
        /// Fraction of frequency-guided candidates.
        #[arg(long, default_value_t = 0.75)]
        guided: f64,
        /// Fill short minimum-frequency pools tier by tier.
        #[arg(long)]
        next_tier: bool,
        #[command(flatten)]
        output: DesignOutput,
    },
    /// Macula's disjunct matrix.
    Macula {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: DesignOutput,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Neighbor,
    Exhaustive,
    Comp,
    Pruned,
}

impl DecoderArg {
    fn decoder(self, radius: usize, cap: u64) -> Decoder {
        match self {
            DecoderArg::Neighbor => Decoder::Neighbor { radius },
            DecoderArg::Exhaustive => Decoder::Exhaustive { cap },
            DecoderArg::Comp => Decoder::CompFiltered,
            DecoderArg::Pruned => Decoder::Pruned,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    problem: Problem,
    /// Design length.
    #[arg(long = "N")]
    n_tests: usize,
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = DecoderArg::Neighbor)]
    decoder: DecoderArg,
    /// Neighbor decoder search radius.
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Largest target space the exhaustive decoder accepts.
    #[arg(long, default_value_t = gtlab_core::simulate::DEFAULT_EXHAUSTIVE_CAP)]
    cap: u64,
    /// Use improved designs with the test size from `--design s=<s>`.
    #[arg(long)]
    improved: bool,
    /// Fixed design file instead of random designs.
    #[arg(long, conflicts_with = "improved")]
    design_file: Option<PathBuf>,
    /// Report every prefix length up to `--N`.
    #[arg(long)]
    curve: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AsymptArgs {
    #[arg(long, value_parser = parse_model, default_value = "binary")]
    model: ModelSpec,
    #[arg(long)]
    d: u64,
    #[arg(long)]
    gamma: f64,
    /// Test fraction; defaults to the optimum for the model.
    #[arg(long)]
    lambda: Option<f64>,
    /// Evaluate the expansions at this number of items.
    #[arg(long)]
    n: Option<f64>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Table id, e.g. bin-d3-exact or asympt-c.
    id: String,
    /// Required for Monte Carlo tables.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Decoder for the Monte Carlo tables.
    #[arg(long, value_enum, default_value_t = DecoderArg::Neighbor)]
    decoder: DecoderArg,
    /// Neighbor decoder search radius.
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Restrict to these values of n.
    #[arg(long = "n", num_args = 1..)]
    only_n: Option<Vec<u64>>,
    /// Add the published value after each computed column.
    #[arg(long)]
    with_published: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Bound(args) => cmd_bound(args),
        Command::Invert(args) => cmd_invert(args),
        Command::Design(cmd) => cmd_design(cmd),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Asympt(args) => cmd_asympt(args),
        Command::Reproduce(args) => cmd_reproduce(args),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn cmd_bound(args: BoundArgs) -> Result<(), Failure> {
    let lies = args.problem.lie_spec();
    if args.n_tests == 0 {
        return Err(usage("--N must be at least 1"));
    }
    if args.n_tests < lies.min_tests() {
        return Err(usage(format!(
            "--N {} is below {} for {} lies",
            args.n_tests,
            lies.min_tests(),
            lies.lies
        )));
    }
    let bound = args.problem.bound()?;
    let result = if args.verbose {
        bound.evaluate_verbose(args.n_tests)
    } else {
        bound.evaluate(args.n_tests)
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&result).expect("result serialises"));
        return Ok(());
    }
    println!("gamma_star = {:.6e}", result.gamma_star);
    if args.verbose {
        for s in &result.strata {
            println!(
                "stratum b={} weight={:.6e} sum={:.6e} clamped={} contribution={:.6e}",
                s.size, s.weight, s.sum, s.clamped, s.contribution
            );
        }
        for t in &result.terms {
            println!("term b={} m={} p={} q={:.6e} value={:.6e}", t.b, t.m, t.p, t.q, t.value);
        }
    }
    Ok(())
}

fn cmd_invert(args: InvertArgs) -> Result<(), Failure> {
    let p = &args.problem;
    if args.exact_recovery {
        let prior = p.prior.resolve(p.n)?;
        let design = p.design.resolve(p.n)?;
        let n0 = n_zero_lies(p.model, &prior.target_space(p.n), &design, p.lie_spec())?;
        println!("{n0}");
        return Ok(());
    }
    let gamma = args.gamma.expect("clap requires --gamma");
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(usage(format!("--gamma must lie in (0, 1), got {gamma}")));
    }
    println!("{}", p.bound()?.invert(gamma)?);
    Ok(())
}

fn write_design(
    design: &Design,
    output: &DesignOutput,
    manifest: impl FnOnce(Vec<PathBuf>) -> RunManifest,
) -> Result<(), Failure> {
    let text = match output.format {
        DesignFormat::Text => design.to_text(),
        DesignFormat::Json => design.to_json() + "\n",
    };
    emit(&text, output.out.as_deref(), manifest)
}

fn cmd_design(cmd: DesignCommand) -> Result<(), Failure> {
    match cmd {
        DesignCommand::Random {
            n,
            s,
            n_tests,
            seed,
            output,
        } => {
            let design = sample_design(&DesignDist::ConstantWeight { s: s as u64 }, n, n_tests, Seed::new(seed))?;
            let params = json!({"kind": "random", "n": n, "s": s, "N": n_tests});
            write_design(&design, &output, |o| RunManifest::new("design", params, Some(seed), o))
        }
        DesignCommand::Improved {
            n,
            s,
            n_tests,
            seed,
            candidates,
            guided,
            next_tier,
            output,
        } => {
            let opts = ImprovedOptions {
                n_candidates: candidates,
                guided_fraction: guided,
                fallback: if next_tier {
                    FallbackPool::NextTier
                } else {
                    FallbackPool::AboveMinimum
                },
            };
            let design = improved_design(n, s, n_tests, Seed::new(seed), opts)?;
            let params = json!({"kind": "improved", "n": n, "s": s, "N": n_tests, "options": opts});
            write_design(&design, &output, |o| RunManifest::new("design", params, Some(seed), o))
        }
        DesignCommand::Macula { m, k, d, n, output } => {
            let design = macula_disjunct(m, k, d, n)?;
            let params = json!({"kind": "macula", "m": m, "k": k, "d": d, "n": n});
            write_design(&design, &output, |o| RunManifest::new("design", params, None, o))
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let p = &args.problem;
    let n = p.n as usize;
    let prior = p.prior.resolve(p.n)?;
    let source = if let Some(path) = &args.design_file {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let design = if text.trim_start().starts_with('{') {
            Design::from_json(&text)?
        } else {
            Design::from_text(&text)?
        };
        if design.len() < args.n_tests {
            return Err(usage(format!(
                "design file has {} tests, fewer than --N {}",
                design.len(),
                args.n_tests
            )));
        }
        DesignSource::Fixed(design.prefix(args.n_tests))
    } else if args.improved {
        let DesignArg::ConstantWeight(s) = p.design else {
            return Err(usage("--improved needs --design s=<s>"));
        };
        DesignSource::Improved {
            s: s as usize,
            n_tests: args.n_tests,
            options: ImprovedOptions::default(),
        }
    } else {
        DesignSource::Random {
            dist: p.design.resolve(p.n)?,
            n_tests: args.n_tests,
        }
    };
    let mut cfg = SimConfig::new(p.model, n, prior, source);
    cfg.decoder = args.decoder.decoder(args.radius, args.cap);
    cfg.lies = p.lie_spec();
    cfg.reps = args.reps;
    cfg.seed = args.seed;
    cfg.workers = args.workers;

    let mut params = p.params();
    params["N"] = json!(args.n_tests);
    params["reps"] = json!(args.reps);
    params["decoder"] = json!(format!("{:?}", cfg.decoder));
    params["improved"] = json!(args.improved);
    params["design_file"] = json!(args.design_file);
    params["curve"] = json!(args.curve);

    let text = if args.curve {
        let curve = separation_curve(&cfg)?;
        let rows: Vec<_> = (0..=args.n_tests).map(|k| (k, curve.at(k))).collect();
        match args.format {
            TableFormat::Json => {
                let list: Vec<_> = rows.iter().map(|(k, r)| json!({"N": k, "result": r})).collect();
                serde_json::to_string_pretty(&list).expect("serialises") + "\n"
            }
            TableFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["N", "successes", "reps", "p_hat", "se", "ci_low", "ci_high"])
                    .map_err(csv_failure)?;
                for (k, r) in &rows {
                    w.serialize((k, r.successes, r.reps, r.p_hat, r.se, r.ci_low, r.ci_high))
                        .map_err(csv_failure)?;
                }
                String::from_utf8(w.into_inner().map_err(|e| Failure::Io(e.to_string()))?).expect("utf8")
            }
        }
    } else {
        let r = estimate_separation(&cfg)?;
        match args.format {
            TableFormat::Json => {
                serde_json::to_string_pretty(&json!({"params": params, "result": r})).expect("serialises") + "\n"
            }
            TableFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.serialize(r).map_err(csv_failure)?;
                String::from_utf8(w.into_inner().map_err(|e| Failure::Io(e.to_string()))?).expect("utf8")
            }
        }
    };
    let seed = args.seed;
    emit(&text, args.out.as_deref(), |o| {
        RunManifest::new("simulate", params, Some(seed), o)
    })
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn cmd_asympt(args: AsymptArgs) -> Result<(), Failure> {
    let d = args.d;
    if d < 1 {
        return Err(usage("--d must be at least 1"));
    }
    let lambda = match (args.lambda, args.model) {
        (Some(l), _) => l,
        (None, ModelSpec::Additive) => 0.5,
        (None, m) if m.is_binary() => binary_weak_lambda(d),
        (None, _) => return Err(usage("--lambda is required for threshold models other than binary")),
    };
    let terms = weak_recovery_terms(args.model, d, lambda, args.gamma)?;
    let exp = expansion_constants(&terms)?;
    println!("lambda = {lambda:.6}");
    println!("C = {:.6}", exp.big_c);
    println!("c = {:.6}", exp.c);
    if args.model.is_binary() {
        println!("c_binary = {:.6}", binary_weak_c(d, args.gamma)?);
        println!("c_star = {:.6}", c_star(d, args.gamma));
    }
    if let Some(n) = args.n {
        let m = exp.m_at(n);
        println!("M(n) = {m:.6}");
        println!("N(n) = {}", n_from_m(m));
        match args.model {
            ModelSpec::Additive => {
                println!("additive_weak_M = {:.6}", additive_weak_m_gamma(n, d, args.gamma));
                if d >= 1 {
                    println!("additive_exact_M0 = {:.6}", additive_exact_m0(n, d));
                }
            }
            m if m.is_binary() => {
                println!("approx_N = {:.6}", approx_n(n, d, args.gamma));
                println!("binary_exact_M0 = {:.6}", binary_exact_m0(n, d, SpaceKind::ExactD));
                if d >= 2 {
                    println!("binary_up_to_M0 = {:.6}", binary_exact_m0(n, d, SpaceKind::UpToD));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<(), Failure> {
    let id: TableId = args.id.parse()?;
    if id.is_stochastic() && args.seed.is_none() {
        return Err(usage(format!("{id} is a Monte Carlo table; pass --seed")));
    }
    let opts = ReproduceOptions {
        reps: args.reps,
        seed: args.seed.unwrap_or(0),
        workers: args.workers,
        only_n: args.only_n.clone(),
        decoder: args
            .decoder
            .decoder(args.radius, gtlab_core::simulate::DEFAULT_EXHAUSTIVE_CAP),
    };
    let table = reproduce(id, &opts)?;
    let text = render_table(&table, args.format, args.with_published);
    let params = json!({
        "table": id.name(),
        "reps": args.reps.unwrap_or(id.default_reps()),
        "workers": args.workers,
        "decoder": format!("{:?}", opts.decoder),
        "n": args.only_n,
        "with_published": args.with_published,
    });
    emit(&text, args.out.as_deref(), |o| {
        RunManifest::new("reproduce", params, args.seed, o)
    })
}

fn render_table(table: &Table, format: TableFormat, with_published: bool) -> String {
    match format {
        TableFormat::Csv => table.to_csv(with_published),
        TableFormat::Json => serde_json::to_string_pretty(table).expect("table serialises") + "\n",
    }
}
