//! Parsers for the `--model`, `--prior` and `--design` flag values.

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use gtlab_core::{DesignDist, ModelSpec, PriorSpec};

use crate::Failure;

pub fn parse_model(s: &str) -> Result<ModelSpec, String> {
    match s {
        "binary" => Ok(ModelSpec::BINARY),
        "additive" => Ok(ModelSpec::Additive),
        _ => {
            let h = s
                .strip_prefix("h=")
                .ok_or_else(|| format!("expected binary, additive or h=<k>, got '{s}'"))?;
            let h: u64 = h.parse().map_err(|_| format!("bad threshold in '{s}'"))?;
            ModelSpec::threshold(h).map_err(|e| e.to_string())
        }
    }
}

/// `--prior` before `n` is known.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorArg {
    ExactD(u64),
    UpToD(u64, Option<PathBuf>),
    Binomial(f64),
}

impl FromStr for PriorArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| format!("expected d=, upto= or binom=, got '{s}'"))?;
        let int = |v: &str| v.parse::<u64>().map_err(|_| format!("bad integer in '{s}'"));
        match key {
            "d" => Ok(PriorArg::ExactD(int(value)?)),
            "upto" => match value.split_once(':') {
                Some((d, file)) => Ok(PriorArg::UpToD(int(d)?, Some(file.into()))),
                None => Ok(PriorArg::UpToD(int(value)?, None)),
            },
            "binom" => Ok(PriorArg::Binomial(
                value.parse().map_err(|_| format!("bad probability in '{s}'"))?,
            )),
            _ => Err(format!("unknown prior '{key}'; expected d=, upto= or binom=")),
        }
    }
}

impl PriorArg {
    pub fn resolve(&self, n: u64) -> Result<PriorSpec, Failure> {
        let prior = match self {
            PriorArg::ExactD(d) => PriorSpec::ExactD { d: *d },
            PriorArg::UpToD(d, None) => PriorSpec::up_to_uniform(n, *d)?,
            PriorArg::UpToD(d, Some(file)) => PriorSpec::UpToD {
                d: *d,
                weights: read_weights(file)?,
            },
            PriorArg::Binomial(q) => PriorSpec::Binomial { q: *q },
        };
        prior.validate(n)?;
        Ok(prior)
    }
}

/// `--design` before `n` is known.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignArg {
    ConstantWeight(u64),
    Bernoulli(f64),
    SizeDist(PathBuf),
}

impl FromStr for DesignArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| format!("expected s=, bern= or dist=, got '{s}'"))?;
        match key {
            "s" => Ok(DesignArg::ConstantWeight(
                value.parse().map_err(|_| format!("bad size in '{s}'"))?,
            )),
            "bern" => Ok(DesignArg::Bernoulli(
                value.parse().map_err(|_| format!("bad probability in '{s}'"))?,
            )),
            "dist" => Ok(DesignArg::SizeDist(value.into())),
            _ => Err(format!("unknown design '{key}'; expected s=, bern= or dist=")),
        }
    }
}

impl DesignArg {
    pub fn resolve(&self, n: u64) -> Result<DesignDist, Failure> {
        let design = match self {
            DesignArg::ConstantWeight(s) => DesignDist::ConstantWeight { s: *s },
            DesignArg::Bernoulli(kappa) => DesignDist::Bernoulli { kappa: *kappa },
            DesignArg::SizeDist(file) => DesignDist::SizeDist {
                pmf: read_weights(file)?,
            },
        };
        design.validate(n)?;
        Ok(design)
    }
}

/// Whitespace-separated numbers; entry `i` is the weight of size `i`.
fn read_weights(path: &PathBuf) -> Result<Vec<f64>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    text.split_whitespace()
        .map(|w| {
            w.parse::<f64>()
                .map_err(|_| Failure::Usage(format!("{}: '{w}' is not a number", path.display())))
        })
        .collect()
}
