use std::fmt::Write as _;

use super::config::{ExperimentConfig, Mode};
use super::estimators::{finite_curve, limit_curve, FiniteSetup, LimitSetup, ManipulationEstimates};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "c,qbar,qbar_se,qlow,qlow_se,rbar,rbar_se,rlow,rlow_se,samples,seed,mode,n";

/// Estimates along a grid of `c`, one row per grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    pub mode: Mode,
    pub n: Option<u64>,
    pub rows: Vec<ManipulationEstimates>,
}

impl CurveTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        let n = self.n.map(|n| n.to_string()).unwrap_or_default();
        for r in &self.rows {
            let cols = [r.c, r.qbar.value, r.qbar.stderr, r.qlow.value, r.qlow.stderr, r.rbar.value, r.rbar.stderr, r.rlow.value, r.rlow.stderr];
            for v in cols {
                out.push_str(&format_g(v));
                out.push(',');
            }
            let _ = writeln!(out, "{},{},{},{}", r.qbar.samples, r.qbar.seed, self.mode.as_str(), n);
        }
        out
    }

    /// Columns that decrease somewhere along the grid.
    pub fn non_monotone_columns(&self) -> Vec<&'static str> {
        let cols: [(&str, fn(&ManipulationEstimates) -> f64); 4] = [
            ("qbar", |r| r.qbar.value),
            ("qlow", |r| r.qlow.value),
            ("rbar", |r| r.rbar.value),
            ("rlow", |r| r.rlow.value),
        ];
        cols.iter()
            .filter(|(_, get)| self.rows.windows(2).any(|w| get(&w[1]) < get(&w[0])))
            .map(|(name, _)| *name)
            .collect()
    }
}

/// Formats like C's `%.6g`: six significant digits, trailing zeros removed.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Runs the experiment's estimators over its whole grid.
pub fn curve(config: &ExperimentConfig) -> Result<CurveTable> {
    let rows = match config.mode {
        Mode::Limit => {
            let setup = LimitSetup::new(&config.rule, &config.p)?;
            limit_curve(&setup, &config.c_grid, config.samples, config.seed, config.workers)?
        }
        Mode::Finite => {
            let n = config.n.ok_or_else(|| Error::validation("n", "required in finite mode"))?;
            let setup = FiniteSetup {
                rule: config.rule.clone(),
                p: config.p.clone(),
                n,
                samples: config.samples,
                seed: config.seed,
                workers: config.workers,
                baseline: config.baseline,
            };
            finite_curve(&setup, &config.c_grid)?
        }
    };
    Ok(CurveTable {
        mode: config.mode,
        n: if config.mode == Mode::Finite { config.n } else { None },
        rows,
    })
}
