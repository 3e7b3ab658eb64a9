//! Experiment configuration files.
//!
//! ```toml
//! rule = "plurality"          # any name accepted by VotingRule::parse
//! tie = "lex"                 # or "order:cab"
//! m = 3
//! p = "uniform"               # or one probability per ranking, lexicographic order
//! delta = 0.1                 # optional, defaults to min(p)
//! mode = "limit"              # or "finite"
//! n = 101                     # finite mode only
//! c_grid = { start = 0.0, stop = 2.0, step = 0.1 }   # or [0.1, 0.5] or c = 0.5
//! samples = 100000
//! seed = 42
//! workers = 4                 # optional
//! eta = 0.1                   # optional
//! epsilon_audit = 0.2         # optional
//! baseline = "truthful"       # or "others-only"
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::oracle::Baseline;
use crate::profile::VoteDistribution;
use crate::rules::VotingRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Limit,
    Finite,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Limit => "limit",
            Mode::Finite => "finite",
        }
    }
}

/// A validated experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub rule: VotingRule,
    pub p: VoteDistribution,
    pub mode: Mode,
    pub n: Option<u64>,
    pub c_grid: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub eta: Option<f64>,
    pub epsilon: Option<f64>,
    pub baseline: Baseline,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawP {
    Named(String),
    Vector(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    start: f64,
    stop: f64,
    step: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawGrid {
    List(Vec<f64>),
    Range(RawRange),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    rule: String,
    tie: Option<String>,
    m: usize,
    p: RawP,
    delta: Option<f64>,
    mode: String,
    n: Option<u64>,
    c: Option<f64>,
    c_grid: Option<RawGrid>,
    samples: u64,
    seed: u64,
    workers: Option<usize>,
    eta: Option<f64>,
    epsilon_audit: Option<f64>,
    baseline: Option<String>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Grid points `start, start + step, …` up to `stop`, computed as `start + i·step`
/// and rounded to 12 decimals so that `stop` is reached despite float drift.
pub fn range_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::validation("c_grid", "need start ≤ stop and step > 0"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::validation("c_grid", "more than 10^6 grid points"));
    }
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            msg: e.message().to_string(),
        })?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let spec = match &raw.tie {
            Some(tie) => format!("{}@tie={}", raw.rule, tie),
            None => raw.rule.clone(),
        };
        let rule = VotingRule::parse(&spec, raw.m)?;
        let v = match raw.p {
            RawP::Named(name) if name == "uniform" => VoteDistribution::uniform(raw.m)?.p().to_vec(),
            RawP::Named(name) => {
                return Err(Error::validation("p", format!("expected \"uniform\" or a vector, got {name:?}")))
            }
            RawP::Vector(v) => v,
        };
        let p = match raw.delta {
            Some(d) => VoteDistribution::new(v, d)?,
            None => VoteDistribution::with_min_delta(v)?,
        };
        if p.num_candidates()? != raw.m {
            return Err(Error::validation("p", format!("length {} does not match m = {}", p.len(), raw.m)));
        }
        let mode = match raw.mode.as_str() {
            "limit" => Mode::Limit,
            "finite" => Mode::Finite,
            other => return Err(Error::validation("mode", format!("expected limit or finite, got {other:?}"))),
        };
        let c_grid = match (raw.c, raw.c_grid) {
            (Some(_), Some(_)) => return Err(Error::validation("c_grid", "give either c or c_grid, not both")),
            (Some(c), None) => vec![c],
            (None, Some(RawGrid::List(v))) => v,
            (None, Some(RawGrid::Range(r))) => range_grid(r.start, r.stop, r.step)?,
            (None, None) => return Err(Error::validation("c_grid", "missing")),
        };
        if c_grid.is_empty() || c_grid.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::validation("c_grid", "values must be finite and nonnegative"));
        }
        if c_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("c_grid", "must be strictly increasing"));
        }
        let n = match (mode, raw.n) {
            (Mode::Finite, None) => return Err(Error::validation("n", "required in finite mode")),
            (_, Some(0)) => return Err(Error::validation("n", "must be at least 1")),
            (_, n) => n,
        };
        if raw.samples == 0 {
            return Err(Error::validation("samples", "must be at least 1"));
        }
        if raw.workers == Some(0) {
            return Err(Error::validation("workers", "must be at least 1"));
        }
        if let Some(eta) = raw.eta {
            if !(eta > 0.0 && eta < 1.0) {
                return Err(Error::validation("eta", "must lie in (0, 1)"));
            }
        }
        if let Some(eps) = raw.epsilon_audit {
            if !(eps > 0.0 && eps <= 1.0 / raw.m as f64) {
                return Err(Error::validation("epsilon_audit", format!("must lie in (0, 1/{}]", raw.m)));
            }
        }
        let baseline = match raw.baseline.as_deref() {
            None | Some("truthful") => Baseline::Truthful,
            Some("others-only") => Baseline::OthersOnly,
            Some(other) => {
                return Err(Error::validation("baseline", format!("expected truthful or others-only, got {other:?}")))
            }
        };
        Ok(ExperimentConfig {
            rule,
            p,
            mode,
            n,
            c_grid,
            samples: raw.samples,
            seed: raw.seed,
            workers: raw.workers,
            eta: raw.eta,
            epsilon: raw.epsilon_audit,
            baseline,
        })
    }
}
