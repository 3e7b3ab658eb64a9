use std::fmt;

use super::bounds::{claim_bound, theorem1_constant};
use super::config::{ExperimentConfig, Mode};
use super::curve::{format_g, CurveTable};
use super::estimators::winner_shares;
use super::gaussian::{min_eigenvalue_check, GaussianLimitModel, SpectralCheck};
use crate::error::{Error, Result};
use crate::geometry::LimitGeometry;
use crate::oracle::{self, binomial};
use crate::ranking::candidate_name;
use crate::rules::HyperplaneRule;

/// Largest number of count vectors the audit enumerates for exact shares.
pub const AUDIT_ENUMERATION: u128 = 100_000;
/// Largest electorate used for the exact winner shares.
pub const AUDIT_MAX_N: u64 = 15;

/// Check that every candidate wins with positive probability.
#[derive(Clone, Debug, PartialEq)]
pub struct WinnerAudit {
    /// Electorate size used for the exact shares.
    pub n: u64,
    /// Exact winner probabilities at `n` voters.
    pub shares: Vec<f64>,
    /// Candidates winning some profile with at most `n` voters.
    pub census: Vec<bool>,
    /// Candidates labelling a cell around the mean, when the cells could be enumerated.
    pub mean_labels: Option<Vec<bool>>,
    pub epsilon: Option<f64>,
}

impl WinnerAudit {
    /// Candidates that never win (in the census or, when available, around the mean).
    pub fn missing(&self) -> Vec<usize> {
        (0..self.census.len())
            .filter(|&c| !self.census[c] || self.mean_labels.as_ref().is_some_and(|l| !l[c]))
            .collect()
    }

    /// Candidates whose exact share at `n` falls below `epsilon`.
    pub fn below_epsilon(&self) -> Vec<usize> {
        match self.epsilon {
            Some(eps) => (0..self.shares.len()).filter(|&c| self.shares[c] < eps).collect(),
            None => Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.missing().is_empty()
    }
}

fn audit_n(len: usize) -> u64 {
    (1..=AUDIT_MAX_N)
        .rev()
        .find(|&n| binomial(n as u128 + len as u128 - 1, len as u128 - 1) <= AUDIT_ENUMERATION)
        .unwrap_or(1)
}

/// Winner census at small `n` and around the mean point of `config.p`.
pub fn winner_audit(config: &ExperimentConfig, geometry: Option<&LimitGeometry>) -> Result<WinnerAudit> {
    let m = config.rule.num_candidates();
    let n = audit_n(config.p.len());
    let shares = winner_shares(&config.rule, &config.p, n)?;
    let mut census = vec![false; m];
    for k in 1..=n {
        let seen = oracle::winner_census(&config.rule, k)?;
        census.iter_mut().zip(seen).for_each(|(a, b)| *a |= b);
    }
    let mean_labels = geometry.map(|g| {
        let mut seen = vec![false; m];
        g.labeled_candidates().into_iter().for_each(|c| seen[c] = true);
        seen
    });
    Ok(WinnerAudit {
        n,
        shares,
        census,
        mean_labels,
        epsilon: config.epsilon,
    })
}

/// Summary printed next to the CSV of a run.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub rule: String,
    pub mode: Mode,
    pub audit: WinnerAudit,
    /// Deduplicated hyperplane count `M`.
    pub hyperplanes: usize,
    /// Hyperplanes through the mean point, in limit mode.
    pub hyperplanes_through_mean: Option<usize>,
    pub spectral: SpectralCheck,
    pub theorem1: Option<f64>,
    /// `(c, bound on μ(α ≤ 2c))` for each grid point.
    pub claim_bounds: Vec<(f64, f64)>,
}

/// Audit and constants for `config`; fails if some candidate can never win.
pub fn prepare_report(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let hrule = HyperplaneRule::new(config.rule.clone())?;
    let geometry = match config.mode {
        Mode::Limit => Some(LimitGeometry::new(&hrule, &config.p)?),
        Mode::Finite => LimitGeometry::new(&hrule, &config.p).ok(),
    };
    let audit = winner_audit(config, geometry.as_ref())?;
    if !audit.passed() {
        let names: Vec<String> = audit.missing().into_iter().map(|c| candidate_name(c).to_string()).collect();
        return Err(Error::validation(
            "rule",
            format!("candidate(s) {} never win, so β and ψ are infinite", names.join(", ")),
        ));
    }
    let model = GaussianLimitModel::new(&config.p)?;
    let spectral = min_eigenvalue_check(&model);
    let m = config.rule.num_candidates();
    let theorem1 = match (config.eta, config.epsilon) {
        (Some(eta), Some(eps)) => Some(theorem1_constant(eta, config.p.delta(), eps, m)?),
        _ => None,
    };
    let hyperplanes = hrule.num_hyperplanes();
    let claim_bounds = config
        .c_grid
        .iter()
        .map(|&c| (c, claim_bound(hyperplanes.max(1), 2.0 * c, config.p.delta())))
        .collect();
    Ok(ExperimentReport {
        rule: config.rule.name().to_string(),
        mode: config.mode,
        audit,
        hyperplanes,
        hyperplanes_through_mean: geometry.map(|g| g.arrangement().num_hyperplanes()),
        spectral,
        theorem1,
        claim_bounds,
    })
}

impl ExperimentReport {
    /// Report text, with the estimated `q̄` next to its claim bound when `table` is given.
    pub fn render(&self, table: Option<&CurveTable>) -> String {
        self.to_string()
            + &match table {
                Some(t) => {
                    let mut s = String::from("c,claim_bound,qbar\n");
                    for ((c, bound), row) in self.claim_bounds.iter().zip(&t.rows) {
                        s += &format!("{},{},{}\n", format_g(*c), format_g(*bound), format_g(row.qbar.value));
                    }
                    let bad = t.non_monotone_columns();
                    if !bad.is_empty() {
                        s += &format!("non-monotone columns: {}\n", bad.join(", "));
                    }
                    s
                }
                None => String::new(),
            }
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rule: {} ({} mode)", self.rule, self.mode.as_str())?;
        let shares: Vec<String> = self
            .audit
            .shares
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{}={}", candidate_name(c), format_g(*s)))
            .collect();
        writeln!(
            f,
            "winner audit: {} (exact shares at n={}: {})",
            if self.audit.passed() { "PASS" } else { "FAIL" },
            self.audit.n,
            shares.join(" ")
        )?;
        if let Some(eps) = self.audit.epsilon {
            let low = self.audit.below_epsilon();
            if low.is_empty() {
                writeln!(f, "  every share ≥ epsilon = {}", format_g(eps))?;
            } else {
                let names: Vec<String> = low.into_iter().map(|c| candidate_name(c).to_string()).collect();
                writeln!(f, "  shares below epsilon = {}: {}", format_g(eps), names.join(", "))?;
            }
        }
        if self.audit.mean_labels.is_none() {
            writeln!(f, "  cells around the mean not enumerated")?;
        }
        write!(f, "hyperplanes M = {}", self.hyperplanes)?;
        match self.hyperplanes_through_mean {
            Some(k) => writeln!(f, " ({k} through the mean)")?,
            None => writeln!(f)?,
        }
        writeln!(
            f,
            "min eigenvalue on H0: {} vs delta {}: {}",
            format_g(self.spectral.lambda),
            format_g(self.spectral.delta),
            if self.spectral.passed() { "PASS" } else { "FAIL" }
        )?;
        match self.theorem1 {
            Some(c) => writeln!(f, "c* = theorem1_constant = {}", format_g(c))?,
            None => writeln!(f, "c* not computed (needs eta and epsilon_audit)")?,
        }
        Ok(())
    }
}
