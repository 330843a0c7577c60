//! Published group-testing tables: their reference values and the code that
//! recomputes each of them.
//!
//! Row parameters follow the published tables exactly, including how the
//! test size is rounded from `λ n`. Exact tables use `⌊λ n⌋` for the
//! three-column layouts and `⌈λ n⌉` with `λ = k·step + step` evaluated in
//! floating point for the wider ones, which is what reproduces their
//! borderline rows.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::asymptotics::{binary_weak_c, c_star};
use crate::bounds::{GammaBound, LieSpec, PriorSpec};
use crate::error::{Error, Result};
use crate::renyi::{DesignDist, ModelSpec};
use crate::simulate::{
    evaluate_disjunct_comparison, separation_curve, Decoder, DesignSource, DisjunctConfig, SimConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TableId {
    AddGamma05,
    AddGamma10,
    BinD3Exact,
    BinBinom3,
    BinVsBern,
    BinGamma05,
    BinGamma10,
    BinGamma25,
    DisjunctD3,
    DisjunctD4,
    LiesL1,
    LiesL2,
    AsymptC,
}

impl TableId {
    pub const ALL: [TableId; 13] = [
        TableId::AddGamma05,
        TableId::AddGamma10,
        TableId::BinD3Exact,
        TableId::BinBinom3,
        TableId::BinVsBern,
        TableId::BinGamma05,
        TableId::BinGamma10,
        TableId::BinGamma25,
        TableId::DisjunctD3,
        TableId::DisjunctD4,
        TableId::LiesL1,
        TableId::LiesL2,
        TableId::AsymptC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::AddGamma05 => "add-γ05",
            TableId::AddGamma10 => "add-γ10",
            TableId::BinD3Exact => "bin-d3-exact",
            TableId::BinBinom3 => "bin-binom3",
            TableId::BinVsBern => "bin-vs-bern",
            TableId::BinGamma05 => "bin-γ05",
            TableId::BinGamma10 => "bin-γ10",
            TableId::BinGamma25 => "bin-γ25",
            TableId::DisjunctD3 => "disjunct-d3",
            TableId::DisjunctD4 => "disjunct-d4",
            TableId::LiesL1 => "lies-L1",
            TableId::LiesL2 => "lies-L2",
            TableId::AsymptC => "asympt-c",
        }
    }

    /// ASCII spelling of [`TableId::name`].
    pub fn ascii_name(self) -> String {
        self.name().replace('γ', "g")
    }

    pub fn title(self) -> &'static str {
        match self {
            TableId::AddGamma05 => "Additive model, d=3, target 1-γ*=0.95",
            TableId::AddGamma10 => "Additive model, d=3, target 1-γ*=0.90",
            TableId::BinD3Exact => "Binary model, N_γ for exactly 3 defectives",
            TableId::BinBinom3 => "Binary model, N_γ for a Bin(n, 3/n) number of defectives",
            TableId::BinVsBern => "Binary model, N_γ for constant-weight and Bernoulli tests",
            TableId::BinGamma05 => "Binary model, d=3, target 1-γ*=0.95",
            TableId::BinGamma10 => "Binary model, d=3, target 1-γ*=0.90",
            TableId::BinGamma25 => "Binary model, d=3, target 1-γ*=0.75",
            TableId::DisjunctD3 => "2-disjunct, random and improved designs, 3 defectives",
            TableId::DisjunctD4 => "2-disjunct, random and improved designs, 4 defectives",
            TableId::LiesL1 => "Binary model, N_γ with d=3 and one lie",
            TableId::LiesL2 => "Binary model, N_γ with d=3 and two lies",
            TableId::AsymptC => "Constants c and c* for γ=0.02",
        }
    }

    /// Whether the table involves Monte Carlo estimates.
    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            TableId::AddGamma05
                | TableId::AddGamma10
                | TableId::BinGamma05
                | TableId::BinGamma10
                | TableId::BinGamma25
                | TableId::DisjunctD3
                | TableId::DisjunctD4
        )
    }

    pub fn default_reps(self) -> u64 {
        match self {
            TableId::DisjunctD3 | TableId::DisjunctD4 => 100_000,
            _ => 50_000,
        }
    }

    /// Values of `n` the rows or columns range over.
    pub fn sizes(self) -> &'static [u64] {
        match self {
            TableId::AddGamma05 | TableId::AddGamma10 => &[20, 50, 100, 150],
            TableId::BinGamma05 | TableId::BinGamma10 | TableId::BinGamma25 => &[20, 50, 100, 200],
            TableId::BinD3Exact | TableId::BinBinom3 => &[20, 50, 100],
            TableId::BinVsBern | TableId::LiesL1 | TableId::LiesL2 => &[10, 20, 50, 100],
            TableId::DisjunctD3 | TableId::DisjunctD4 => &[50, 100, 200, 300],
            TableId::AsymptC => &[],
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|id| id.name() == s || id.ascii_name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = TableId::ALL.iter().map(|id| id.name()).collect();
                Error::InvalidArgument(format!("unknown table id '{s}'; valid ids: {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Value {
    Int(u64),
    /// A real printed with the given number of decimals.
    Real(f64, usize),
    Missing,
}

impl Value {
    pub fn as_f64(self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(v as f64),
            Value::Real(v, _) => Some(v),
            Value::Missing => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v, decimals) => write!(f, "{v:.decimals$}"),
            Value::Missing => f.write_str("-"),
        }
    }
}

/// A computed value next to the published one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub value: Value,
    pub published: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub label: String,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub id: TableId,
    pub row_header: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    /// CSV in the published layout; `with_published` appends a `published:` column
    /// after every computed one.
    pub fn to_csv(&self, with_published: bool) -> String {
        let mut out = self.row_header.clone();
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
            if with_published {
                out.push_str(",published:");
                out.push_str(c);
            }
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.label);
            for cell in &row.cells {
                out.push_str(&format!(",{}", cell.value));
                if with_published {
                    out.push_str(&format!(",{}", cell.published));
                }
            }
            out.push('\n');
        }
        out
    }

    /// `(row label, column name, cell)` for every cell.
    pub fn cells(&self) -> impl Iterator<Item = (&str, &str, Cell)> + '_ {
        self.rows.iter().flat_map(move |row| {
            row.cells
                .iter()
                .zip(&self.columns)
                .map(move |(cell, col)| (row.label.as_str(), col.as_str(), *cell))
        })
    }

    /// Integer cells whose value differs from the published one.
    pub fn integer_mismatches(&self) -> Vec<(String, String, u64, u64)> {
        self.cells()
            .filter_map(|(r, c, cell)| match (cell.value, cell.published) {
                (Value::Int(v), Value::Int(p)) if v != p => Some((r.to_string(), c.to_string(), v, p)),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproduceOptions {
    /// Monte Carlo repetitions; `None` uses [`TableId::default_reps`].
    pub reps: Option<u64>,
    pub seed: u64,
    pub workers: usize,
    pub decoder: Decoder,
    /// Restrict to these `n`; `None` keeps every size.
    pub only_n: Option<Vec<u64>>,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            reps: None,
            seed: 1,
            workers: 0,
            decoder: Decoder::neighbor(),
            only_n: None,
        }
    }
}

impl ReproduceOptions {
    fn keeps(&self, n: u64) -> bool {
        self.only_n.as_ref().is_none_or(|ns| ns.contains(&n))
    }
}

/// `λ_k = k·step + step` as the tables evaluate it.
pub fn grid_lambda(k: usize, step: f64) -> f64 {
    k as f64 * step + step
}

/// `⌈λ n⌉` in floating point.
pub fn ceil_size(lambda: f64, n: u64) -> u64 {
    (lambda * n as f64).ceil() as u64
}

/// `⌊pct · n / 100⌋` in exact arithmetic.
pub fn floor_size(percent: u64, n: u64) -> u64 {
    percent * n / 100
}

/// Published values, indexed `[row][column]`.
pub mod published {
    pub const D3_EXACT: [[[u64; 3]; 5]; 2] = [
        [[47, 58, 64], [37, 47, 50], [33, 40, 44], [32, 39, 43], [34, 40, 44]],
        [[38, 48, 54], [30, 39, 42], [27, 33, 37], [26, 33, 36], [28, 34, 38]],
    ];

    pub const BINOM3: [[[u64; 3]; 5]; 2] = [
        [
            [90, 119, 142],
            [84, 117, 184],
            [105, 187, 410],
            [166, 283, 731],
            [316, 547, 1334],
        ],
        [
            [71, 95, 113],
            [63, 91, 154],
            [70, 129, 242],
            [101, 186, 380],
            [170, 330, 604],
        ],
    ];

    pub const CONSTANT_WEIGHT: [[[u64; 4]; 10]; 2] = [
        [
            [35, 82, 86, 112],
            [35, 47, 58, 64],
            [25, 33, 43, 48],
            [25, 33, 40, 44],
            [27, 32, 39, 43],
            [27, 34, 40, 44],
            [37, 43, 45, 48],
            [37, 43, 50, 54],
            [62, 52, 62, 64],
            [62, 66, 73, 79],
        ],
        [
            [28, 66, 72, 94],
            [28, 38, 48, 54],
            [20, 27, 36, 41],
            [20, 27, 33, 37],
            [22, 26, 33, 36],
            [22, 28, 34, 38],
            [29, 35, 38, 41],
            [29, 35, 42, 46],
            [51, 43, 52, 55],
            [51, 55, 63, 69],
        ],
    ];

    pub const BERNOULLI: [[[u64; 4]; 10]; 2] = [
        [
            [49, 96, 92, 115],
            [49, 55, 61, 66],
            [34, 38, 46, 49],
            [34, 38, 42, 45],
            [34, 37, 41, 44],
            [34, 38, 42, 45],
            [41, 46, 46, 49],
            [41, 46, 51, 55],
            [58, 53, 62, 64],
            [58, 65, 73, 79],
        ],
        [
            [39, 78, 76, 97],
            [39, 44, 51, 56],
            [27, 31, 38, 42],
            [27, 31, 35, 38],
            [27, 30, 34, 37],
            [27, 31, 35, 38],
            [33, 37, 39, 41],
            [33, 37, 43, 47],
            [47, 44, 52, 55],
            [47, 54, 62, 69],
        ],
    ];

    pub const LIES_1: [[[u64; 4]; 10]; 2] = [
        [
            [56, 126, 130, 166],
            [56, 73, 87, 95],
            [41, 52, 66, 72],
            [41, 52, 61, 66],
            [44, 51, 59, 64],
            [59, 53, 61, 66],
            [59, 67, 68, 71],
            [59, 67, 75, 81],
            [98, 81, 92, 94],
            [98, 101, 109, 115],
        ],
        [
            [47, 108, 113, 145],
            [47, 63, 76, 83],
            [34, 44, 58, 63],
            [34, 44, 53, 58],
            [37, 44, 52, 56],
            [37, 46, 53, 58],
            [50, 58, 59, 63],
            [50, 58, 66, 71],
            [83, 69, 81, 83],
            [83, 87, 96, 102],
        ],
    ];

    pub const LIES_2: [[[u64; 4]; 10]; 2] = [
        [
            [73, 163, 166, 210],
            [73, 94, 111, 120],
            [53, 67, 84, 91],
            [53, 67, 78, 84],
            [57, 66, 76, 81],
            [57, 69, 79, 84],
            [77, 87, 87, 91],
            [77, 87, 96, 102],
            [127, 104, 118, 120],
            [127, 131, 139, 146],
        ],
        [
            [64, 143, 147, 188],
            [64, 83, 99, 108],
            [46, 59, 75, 82],
            [46, 59, 69, 75],
            [50, 58, 68, 73],
            [50, 61, 70, 75],
            [67, 77, 78, 81],
            [67, 77, 86, 92],
            [111, 92, 105, 107],
            [111, 115, 124, 131],
        ],
    ];

    /// `(N_γ*, N_γ, 1-γ)` per `[λ][n]`.
    pub type McTable = [[(u64, u64, f64); 4]; 5];

    pub const ADD_05: McTable = [
        [(31, 34, 0.96), (38, 40, 0.96), (42, 44, 0.97), (42, 46, 0.96)],
        [(16, 17, 0.96), (19, 21, 0.97), (21, 23, 0.96), (23, 24, 0.96)],
        [(11, 12, 0.97), (14, 15, 0.97), (14, 16, 0.97), (17, 18, 0.97)],
        [(9, 11, 0.98), (11, 13, 0.98), (13, 15, 0.98), (14, 16, 0.98)],
        [(8, 11, 0.98), (11, 13, 0.98), (12, 14, 0.98), (13, 15, 0.98)],
    ];

    pub const ADD_10: McTable = [
        [(28, 30, 0.92), (34, 36, 0.93), (38, 40, 0.93), (41, 43, 0.94)],
        [(15, 16, 0.93), (17, 19, 0.93), (20, 21, 0.93), (21, 22, 0.93)],
        [(9, 11, 0.94), (12, 14, 0.94), (14, 15, 0.95), (15, 17, 0.95)],
        [(8, 10, 0.95), (10, 12, 0.95), (12, 14, 0.95), (13, 15, 0.96)],
        [(8, 10, 0.96), (10, 12, 0.97), (12, 14, 0.96), (12, 14, 0.97)],
    ];

    pub const BIN_05: McTable = [
        [(36, 38, 0.96), (44, 48, 0.96), (49, 54, 0.96), (55, 59, 0.97)],
        [(25, 27, 0.96), (30, 33, 0.96), (33, 37, 0.96), (38, 41, 0.96)],
        [(29, 31, 0.96), (33, 35, 0.96), (35, 38, 0.97), (39, 41, 0.96)],
        [(33, 35, 0.96), (37, 42, 0.97), (42, 46, 0.97), (47, 51, 0.96)],
        [(52, 55, 0.97), (57, 63, 0.97), (62, 69, 0.98), (68, 76, 0.97)],
    ];

    pub const BIN_10: McTable = [
        [(32, 34, 0.92), (40, 44, 0.93), (45, 50, 0.93), (51, 55, 0.94)],
        [(22, 24, 0.92), (28, 31, 0.93), (32, 34, 0.92), (36, 38, 0.93)],
        [(26, 28, 0.93), (30, 32, 0.93), (33, 35, 0.93), (36, 38, 0.93)],
        [(29, 32, 0.93), (35, 39, 0.94), (39, 43, 0.94), (44, 47, 0.94)],
        [(46, 51, 0.95), (52, 59, 0.96), (58, 65, 0.96), (64, 72, 0.95)],
    ];

    pub const BIN_25: McTable = [
        [(24, 29, 0.84), (34, 39, 0.87), (38, 44, 0.87), (43, 49, 0.88)],
        [(18, 21, 0.84), (24, 27, 0.85), (26, 31, 0.86), (29, 34, 0.86)],
        [(21, 24, 0.85), (25, 28, 0.85), (27, 31, 0.85), (30, 35, 0.87)],
        [(24, 28, 0.86), (30, 35, 0.87), (34, 39, 0.88), (37, 43, 0.88)],
        [(37, 45, 0.90), (44, 53, 0.89), (50, 60, 0.92), (53, 67, 0.95)],
    ];

    /// `(N, (a), (b), (c), (d))` per `n`.
    pub const DISJUNCT_3: [(u64, [f64; 4]); 4] = [
        (28, [0.99, 0.82, 0.89, 0.96]),
        (36, [0.95, 0.67, 0.95, 0.97]),
        (45, [0.98, 0.70, 0.98, 0.98]),
        (55, [0.98, 0.77, 0.98, 0.99]),
    ];

    pub const DISJUNCT_4: [(u64, [f64; 4]); 4] = [
        (28, [0.90, 0.51, 0.53, 0.86]),
        (36, [0.76, 0.26, 0.70, 0.92]),
        (45, [0.86, 0.29, 0.84, 0.96]),
        (55, [0.92, 0.38, 0.94, 0.99]),
    ];

    /// Macula parameters `(m, k)` per `n`.
    pub const MACULA: [(u64, u64); 4] = [(8, 3), (9, 4), (10, 4), (11, 4)];

    pub const ASYMPT_D: [u64; 8] = [2, 3, 5, 10, 20, 30, 40, 50];
    pub const ASYMPT_C: [f64; 8] = [13.295, 21.701, 39.858, 89.722, 199.45, 316.73, 438.91, 564.74];
    pub const ASYMPT_C_STAR: [f64; 8] = [13.288, 21.686, 39.829, 89.657, 199.31, 316.53, 438.64, 564.38];
}

const GAMMAS: [f64; 2] = [0.01, 0.05];

/// Recomputes table `id`; exact tables ignore the Monte Carlo options.
pub fn reproduce(id: TableId, opts: &ReproduceOptions) -> Result<Table> {
    match id {
        TableId::BinD3Exact => narrow_exact(id, &PriorChoice::ExactD3, &published::D3_EXACT, opts),
        TableId::BinBinom3 => narrow_exact(id, &PriorChoice::Binomial3, &published::BINOM3, opts),
        TableId::BinVsBern => wide_exact(
            id,
            &[("const", TestChoice::ConstantWeight), ("bern", TestChoice::Bernoulli)],
            &[&published::CONSTANT_WEIGHT, &published::BERNOULLI],
            LieSpec::NONE,
            opts,
        ),
        TableId::LiesL1 => wide_exact(
            id,
            &[("", TestChoice::ConstantWeight)],
            &[&published::LIES_1],
            LieSpec::new(1, false),
            opts,
        ),
        TableId::LiesL2 => wide_exact(
            id,
            &[("", TestChoice::ConstantWeight)],
            &[&published::LIES_2],
            LieSpec::new(2, false),
            opts,
        ),
        TableId::AddGamma05 => monte_carlo(id, ModelSpec::Additive, 0.05, &published::ADD_05, opts),
        TableId::AddGamma10 => monte_carlo(id, ModelSpec::Additive, 0.10, &published::ADD_10, opts),
        TableId::BinGamma05 => monte_carlo(id, ModelSpec::BINARY, 0.05, &published::BIN_05, opts),
        TableId::BinGamma10 => monte_carlo(id, ModelSpec::BINARY, 0.10, &published::BIN_10, opts),
        TableId::BinGamma25 => monte_carlo(id, ModelSpec::BINARY, 0.25, &published::BIN_25, opts),
        TableId::DisjunctD3 => disjunct(id, 3, &published::DISJUNCT_3, opts),
        TableId::DisjunctD4 => disjunct(id, 4, &published::DISJUNCT_4, opts),
        TableId::AsymptC => asympt_c(),
    }
}

enum PriorChoice {
    ExactD3,
    Binomial3,
}

impl PriorChoice {
    fn prior(&self, n: u64) -> PriorSpec {
        match self {
            PriorChoice::ExactD3 => PriorSpec::ExactD { d: 3 },
            PriorChoice::Binomial3 => PriorSpec::Binomial { q: 3.0 / n as f64 },
        }
    }
}

#[derive(Clone, Copy)]
enum TestChoice {
    ConstantWeight,
    Bernoulli,
}

impl TestChoice {
    fn design(self, s: u64, n: u64) -> DesignDist {
        match self {
            TestChoice::ConstantWeight => DesignDist::ConstantWeight { s },
            TestChoice::Bernoulli => DesignDist::Bernoulli {
                kappa: s as f64 / n as f64,
            },
        }
    }
}

fn lambda_label(lambda: f64) -> String {
    format!("{lambda:.2}")
}

/// Tables with `λ ∈ {0.10, 0.15, …, 0.30}` and `s = ⌊λ n⌋`.
fn narrow_exact(
    id: TableId,
    prior: &PriorChoice,
    reference: &[[[u64; 3]; 5]; 2],
    opts: &ReproduceOptions,
) -> Result<Table> {
    let sizes: Vec<(usize, u64)> = id
        .sizes()
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, n)| opts.keeps(n))
        .collect();
    let columns = GAMMAS
        .iter()
        .flat_map(|g| sizes.iter().map(move |(_, n)| format!("gamma={g} n={n}")))
        .collect();
    let mut rows = Vec::new();
    for (k, percent) in (10..=30).step_by(5).enumerate() {
        let mut cells = Vec::new();
        for (gi, &gamma) in GAMMAS.iter().enumerate() {
            for &(ni, n) in &sizes {
                let design = DesignDist::ConstantWeight {
                    s: floor_size(percent, n),
                };
                let value = GammaBound::new(ModelSpec::BINARY, n, &prior.prior(n), &design)?.invert(gamma)?;
                cells.push(Cell {
                    value: Value::Int(value),
                    published: Value::Int(reference[gi][k][ni]),
                });
            }
        }
        rows.push(Row {
            label: format!("0.{percent}"),
            cells,
        });
    }
    Ok(Table {
        id,
        row_header: "lambda".into(),
        columns,
        rows,
    })
}

/// Tables with `λ ∈ {0.05, 0.10, …, 0.50}` and `s = ⌈λ n⌉`.
#[allow(clippy::needless_range_loop)]
fn wide_exact(
    id: TableId,
    variants: &[(&str, TestChoice)],
    reference: &[&[[[u64; 4]; 10]; 2]],
    lies: LieSpec,
    opts: &ReproduceOptions,
) -> Result<Table> {
    let sizes: Vec<(usize, u64)> = id
        .sizes()
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, n)| opts.keeps(n))
        .collect();
    let mut columns = Vec::new();
    for (name, _) in variants {
        for g in GAMMAS {
            for (_, n) in &sizes {
                let prefix = if name.is_empty() {
                    String::new()
                } else {
                    format!("{name} ")
                };
                columns.push(format!("{prefix}gamma={g} n={n}"));
            }
        }
    }
    let prior = PriorSpec::ExactD { d: 3 };
    let mut rows = Vec::new();
    for k in 0..reference[0][0].len() {
        let lambda = grid_lambda(k, 0.05);
        let mut cells = Vec::new();
        for (vi, &(_, choice)) in variants.iter().enumerate() {
            let bounds: Vec<GammaBound> = sizes
                .iter()
                .map(|&(_, n)| {
                    let design = choice.design(ceil_size(lambda, n), n);
                    GammaBound::with_options(ModelSpec::BINARY, n, &prior, &design, lies, Default::default())
                })
                .collect::<Result<_>>()?;
            for (gi, &gamma) in GAMMAS.iter().enumerate() {
                for (bound, &(ni, _)) in bounds.iter().zip(&sizes) {
                    cells.push(Cell {
                        value: Value::Int(bound.invert(gamma)?),
                        published: Value::Int(reference[vi][gi][k][ni]),
                    });
                }
            }
        }
        rows.push(Row {
            label: lambda_label(lambda),
            cells,
        });
    }
    Ok(Table {
        id,
        row_header: "lambda".into(),
        columns,
        rows,
    })
}

/// Smallest `N` with `γ*(N) <= gamma_star` for 3 defectives and
/// `s = ⌈λ n⌉`, `λ ∈ {0.1, …, 0.5}`.
pub fn mc_table_bound(model: ModelSpec, n: u64, k: usize, gamma_star: f64) -> Result<(u64, u64)> {
    let s = ceil_size(grid_lambda(k, 0.1), n);
    let bound = GammaBound::new(model, n, &PriorSpec::ExactD { d: 3 }, &DesignDist::ConstantWeight { s })?;
    Ok((s, bound.invert(gamma_star)?))
}

/// Columns `N_γ*`, `N_γ` and `1-γ` per `n`, where `N_γ` is the bound,
/// `1-γ` the estimated separation probability at `N_γ` and `N_γ*` the
/// smallest length whose estimate reaches `1-γ*`.
fn monte_carlo(
    id: TableId,
    model: ModelSpec,
    gamma_star: f64,
    reference: &published::McTable,
    opts: &ReproduceOptions,
) -> Result<Table> {
    let sizes: Vec<(usize, u64)> = id
        .sizes()
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, n)| opts.keeps(n))
        .collect();
    let mut columns = Vec::new();
    for (_, n) in &sizes {
        columns.extend([
            format!("N_gamma* n={n}"),
            format!("N_gamma n={n}"),
            format!("1-gamma n={n}"),
        ]);
    }
    let mut rows = Vec::new();
    for (k, reference_row) in reference.iter().enumerate() {
        let mut cells = Vec::new();
        for &(ni, n) in &sizes {
            let (s, n_gamma) = mc_table_bound(model, n, k, gamma_star)?;
            let mut cfg = SimConfig::new(
                model,
                n as usize,
                PriorSpec::ExactD { d: 3 },
                DesignSource::Random {
                    dist: DesignDist::ConstantWeight { s },
                    n_tests: n_gamma as usize + 10,
                },
            );
            cfg.decoder = opts.decoder;
            cfg.reps = opts.reps.unwrap_or(id.default_reps());
            cfg.seed = opts.seed;
            cfg.workers = opts.workers;
            let curve = separation_curve(&cfg)?;
            let (p_star, p_n, p_prob) = reference_row[ni];
            cells.push(Cell {
                value: curve
                    .first_reaching(1.0 - gamma_star)
                    .map_or(Value::Missing, |v| Value::Int(v as u64)),
                published: Value::Int(p_star),
            });
            cells.push(Cell {
                value: Value::Int(n_gamma),
                published: Value::Int(p_n),
            });
            cells.push(Cell {
                value: Value::Real(curve.at(n_gamma as usize).p_hat, 4),
                published: Value::Real(p_prob, 2),
            });
        }
        rows.push(Row {
            label: lambda_label(grid_lambda(k, 0.1)),
            cells,
        });
    }
    Ok(Table {
        id,
        row_header: "lambda".into(),
        columns,
        rows,
    })
}

fn disjunct(
    id: TableId,
    defectives: usize,
    reference: &[(u64, [f64; 4]); 4],
    opts: &ReproduceOptions,
) -> Result<Table> {
    let columns = ["N", "(a)", "(b)", "(c)", "(d)"].map(String::from).to_vec();
    let mut rows = Vec::new();
    for (i, &n) in id.sizes().iter().enumerate() {
        if !opts.keeps(n) {
            continue;
        }
        let (m, k) = published::MACULA[i];
        let mut cfg = DisjunctConfig::new(n as usize, m as usize, k as usize, defectives);
        cfg.reps = opts.reps.unwrap_or(id.default_reps());
        cfg.seed = opts.seed;
        cfg.workers = opts.workers;
        let res = evaluate_disjunct_comparison(&cfg)?;
        let (p_n, p) = reference[i];
        let mut cells = vec![Cell {
            value: Value::Int(res.n_tests as u64),
            published: Value::Int(p_n),
        }];
        for (est, published) in [res.disjunct_full, res.disjunct_comp, res.random, res.improved]
            .iter()
            .zip(p)
        {
            cells.push(Cell {
                value: Value::Real(est.p_hat, 4),
                published: Value::Real(published, 2),
            });
        }
        rows.push(Row {
            label: n.to_string(),
            cells,
        });
    }
    Ok(Table {
        id,
        row_header: "n".into(),
        columns,
        rows,
    })
}

fn asympt_c() -> Result<Table> {
    let gamma = 0.02;
    let decimals = |d: u64| if d <= 10 { 3 } else { 2 };
    let mut c_cells = Vec::new();
    let mut star_cells = Vec::new();
    for (i, &d) in published::ASYMPT_D.iter().enumerate() {
        c_cells.push(Cell {
            value: Value::Real(binary_weak_c(d, gamma)?, decimals(d)),
            published: Value::Real(published::ASYMPT_C[i], decimals(d)),
        });
        star_cells.push(Cell {
            value: Value::Real(c_star(d, gamma), decimals(d)),
            published: Value::Real(published::ASYMPT_C_STAR[i], decimals(d)),
        });
    }
    Ok(Table {
        id: TableId::AsymptC,
        row_header: "d".into(),
        columns: published::ASYMPT_D.iter().map(|d| d.to_string()).collect(),
        rows: vec![
            Row {
                label: "c".into(),
                cells: c_cells,
            },
            Row {
                label: "c*".into(),
                cells: star_cells,
            },
        ],
    })
}
