//! Exhaustive manipulation oracles on anonymized profiles.
//!
//! Changing `k` votes moves a count vector `x` to any `y` with the same total
//! and `Σ max(0, x − y) ≤ k`, so the searches run over count vectors rather
//! than voter sequences.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{SimplexArrangement, DEFAULT_CELL_CAP};
use crate::profile::{count_vectors, CountProfile, SimplexPoint};
use crate::ranking::Candidate;
use crate::rules::{gsr_from_hyperplanes, HyperplaneRule, VotingRule};

/// Largest enumeration a single oracle call may perform.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Which winner a specific coalition's deviation is compared against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Baseline {
    /// Winner of the full truthful profile, coalition included.
    #[default]
    Truthful,
    /// Winner of the other voters' ballots alone.
    OthersOnly,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn guard(size: u128, hint: &'static str) -> Result<()> {
    if size > ENUMERATION_LIMIT {
        return Err(Error::Guard {
            guard: "oracle_enumeration",
            size,
            limit: ENUMERATION_LIMIT,
            hint,
        });
    }
    Ok(())
}

fn check_len(rule: &VotingRule, len: usize) -> Result<()> {
    let expected: usize = (1..=rule.num_candidates()).product();
    if len != expected {
        return Err(Error::Dimension(format!("expected {expected} ranking counts, got {len}")));
    }
    Ok(())
}

/// Calls `visit` on every count vector within `k` vote changes of `x` until it returns true.
fn for_each_within(x: &[u64], k: u64, visit: &mut impl FnMut(&[u64]) -> bool) -> bool {
    fn rec(
        x: &[u64],
        k: u64,
        y: &mut Vec<u64>,
        left: u64,
        removed: u64,
        added: u64,
        visit: &mut impl FnMut(&[u64]) -> bool,
    ) -> bool {
        let i = y.len();
        let xi = x[i];
        if i + 1 == x.len() {
            let (r, a) = (removed + xi.saturating_sub(left), added + left.saturating_sub(xi));
            if r > k || a > k {
                return false;
            }
            y.push(left);
            let stop = visit(y);
            y.pop();
            return stop;
        }
        let lo = xi - xi.min(k - removed);
        let hi = (xi + (k - added)).min(left);
        for yi in lo..=hi {
            y.push(yi);
            let stop = rec(
                x,
                k,
                y,
                left - yi,
                removed + xi.saturating_sub(yi),
                added + yi.saturating_sub(xi),
                visit,
            );
            y.pop();
            if stop {
                return true;
            }
        }
        false
    }
    let n = x.iter().sum();
    rec(x, k, &mut Vec::with_capacity(x.len()), n, 0, 0, visit)
}

/// Calls `visit` on every multiset of `k` rankings (as a count vector) until it returns true.
fn for_each_multiset(len: usize, k: u64, visit: &mut impl FnMut(&[u64]) -> bool) -> bool {
    fn rec(len: usize, z: &mut Vec<u64>, left: u64, visit: &mut impl FnMut(&[u64]) -> bool) -> bool {
        if z.len() + 1 == len {
            z.push(left);
            let stop = visit(z);
            z.pop();
            return stop;
        }
        for v in 0..=left {
            z.push(v);
            let stop = rec(len, z, left - v, visit);
            z.pop();
            if stop {
                return true;
            }
        }
        false
    }
    rec(len, &mut Vec::with_capacity(len), k, visit)
}

fn within_size(len: usize, k: u64) -> u128 {
    binomial(k as u128 + len as u128, len as u128)
}

/// Whether changing at most `k` votes can change the winner.
pub fn manip_some(rule: &VotingRule, profile: &CountProfile, k: u64) -> Result<bool> {
    let x = profile.counts();
    check_len(rule, x.len())?;
    if k == 0 {
        return Ok(false);
    }
    guard(within_size(x.len(), k), "reduce k or n, or use limit-mode estimation")?;
    let w = rule.winner_counts(x);
    Ok(for_each_within(x, k, &mut |y| rule.winner_counts(y) != w))
}

/// Whether changing at most `k` votes can make each candidate win.
pub fn elect_all_some(rule: &VotingRule, profile: &CountProfile, k: u64) -> Result<bool> {
    let x = profile.counts();
    check_len(rule, x.len())?;
    let m = rule.num_candidates();
    if k == 0 {
        return Ok(false);
    }
    guard(within_size(x.len(), k), "reduce k or n, or use limit-mode estimation")?;
    let mut reached = vec![false; m];
    let mut missing = m;
    Ok(for_each_within(x, k, &mut |y| {
        let w = rule.winner_counts(y);
        if !reached[w] {
            reached[w] = true;
            missing -= 1;
        }
        missing == 0
    }))
}

fn specific_search(
    rule: &VotingRule,
    others: &[u64],
    coalition: &[u64],
    baseline: Baseline,
    mut visit: impl FnMut(Candidate, Candidate) -> bool,
) -> Result<bool> {
    check_len(rule, others.len())?;
    check_len(rule, coalition.len())?;
    let k: u64 = coalition.iter().sum();
    guard(
        binomial(k as u128 + others.len() as u128 - 1, others.len() as u128 - 1),
        "reduce the coalition size",
    )?;
    let base = match baseline {
        Baseline::Truthful => {
            let full: Vec<u64> = others.iter().zip(coalition).map(|(a, b)| a + b).collect();
            rule.winner_counts(&full)
        }
        Baseline::OthersOnly => rule.winner_counts(others),
    };
    let mut y = others.to_vec();
    Ok(for_each_multiset(others.len(), k, &mut |z| {
        for ((yi, oi), zi) in y.iter_mut().zip(others).zip(z) {
            *yi = oi + zi;
        }
        visit(rule.winner_counts(&y), base)
    }))
}

/// Whether the coalition, voting in unison, can change the winner.
pub fn manip_specific(rule: &VotingRule, others: &[u64], coalition: &[u64], baseline: Baseline) -> Result<bool> {
    if coalition.iter().sum::<u64>() == 0 {
        return Ok(false);
    }
    specific_search(rule, others, coalition, baseline, |w, base| w != base)
}

/// Whether the coalition can make each candidate win.
pub fn elect_all_specific(rule: &VotingRule, others: &[u64], coalition: &[u64]) -> Result<bool> {
    if coalition.iter().sum::<u64>() == 0 {
        return Ok(false);
    }
    let m = rule.num_candidates();
    let mut reached = vec![false; m];
    let mut missing = m;
    specific_search(rule, others, coalition, Baseline::Truthful, |w, _| {
        if !reached[w] {
            reached[w] = true;
            missing -= 1;
        }
        missing == 0
    })
}

/// Fewest vote changes that alter the winner; `n + 1` if none does.
pub fn margin_of_victory(rule: &VotingRule, profile: &CountProfile) -> Result<u64> {
    let n = profile.num_voters();
    for k in 1..=n {
        if manip_some(rule, profile, k)? {
            return Ok(k);
        }
    }
    Ok(n + 1)
}

/// Fewest vote changes that make `target` win; `n + 1` if it cannot win with `n` voters.
pub fn bribery_min(rule: &VotingRule, profile: &CountProfile, target: Candidate) -> Result<u64> {
    let x = profile.counts();
    check_len(rule, x.len())?;
    if target >= rule.num_candidates() {
        return Err(Error::validation("target", format!("no candidate {target}")));
    }
    let n = profile.num_voters();
    for k in 0..=n {
        guard(within_size(x.len(), k), "reduce n")?;
        if for_each_within(x, k, &mut |y| rule.winner_counts(y) == target) {
            return Ok(k);
        }
    }
    Ok(n + 1)
}

/// Candidates that win at least one profile of exactly `n` voters.
pub fn winner_census(rule: &VotingRule, n: u64) -> Result<Vec<bool>> {
    let len: usize = (1..=rule.num_candidates()).product();
    guard(binomial(n as u128 + len as u128 - 1, len as u128 - 1), "use a smaller n")?;
    let mut seen = vec![false; rule.num_candidates()];
    for_each_multiset(len, n, &mut |y| {
        seen[rule.winner_counts(y)] = true;
        seen.iter().all(|&s| s)
    });
    Ok(seen)
}

/// Outcome of an exhaustive property check.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checked: u64,
    pub violations: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} cases checked, {} violations", self.checked, self.violations.len())?;
        for v in self.violations.iter().take(10) {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// Checks `x ∈ B^{+(2k−m!)/n} ⇒ manipulable by k ⇒ x ∈ B^{+2k/n}` for every
/// profile of at most `n_max` voters and each `k` in `ks`. A negative radius
/// makes the first implication vacuous.
pub fn verify_sandwich(rule: &VotingRule, n_max: u64, ks: &[u64]) -> Result<VerifyReport> {
    let hrule = HyperplaneRule::new(rule.clone())?;
    let arr = SimplexArrangement::new(&hrule, DEFAULT_CELL_CAP)?;
    let len: usize = (1..=rule.num_candidates()).product();
    let mut report = VerifyReport::default();
    for n in 1..=n_max {
        for counts in count_vectors(len, n) {
            let profile = CountProfile::new(rule.num_candidates(), counts)?;
            let x = SimplexPoint::from_counts(profile.counts())?;
            let alpha = arr.alpha(&x);
            for &k in ks {
                report.checked += 1;
                let manip = manip_some(rule, &profile, k)?;
                let upper = 2.0 * k as f64 / n as f64;
                let lower = (2.0 * k as f64 - len as f64) / n as f64;
                let tol = crate::geometry::RADIUS_TOLERANCE;
                if lower >= 0.0 && alpha <= lower + tol && !manip {
                    report.violations.push(format!(
                        "{rule} n={n} k={k} {:?}: within {lower} of the boundary but not manipulable",
                        profile.counts()
                    ));
                }
                if manip && alpha > upper + tol {
                    report.violations.push(format!(
                        "{rule} n={n} k={k} {:?}: manipulable but boundary distance {alpha} > {upper}",
                        profile.counts()
                    ));
                }
            }
        }
    }
    Ok(report)
}

/// Checks that direct, hyperplane and scoring-rule evaluation agree on every
/// profile of at most `n_max` voters.
pub fn verify_triple_agreement(rule: &VotingRule, n_max: u64) -> Result<VerifyReport> {
    let hrule = HyperplaneRule::new(rule.clone())?;
    let gsr = gsr_from_hyperplanes(&hrule);
    let len: usize = (1..=rule.num_candidates()).product();
    guard(binomial(n_max as u128 + len as u128, len as u128), "use a smaller n_max")?;
    let mut report = VerifyReport::default();
    for n in 1..=n_max {
        for counts in count_vectors(len, n) {
            report.checked += 1;
            let direct = rule.winner_counts(&counts);
            let hyper = hrule.evaluate_counts(&counts);
            let scored = gsr.evaluate_counts(&counts);
            if direct != hyper || direct != scored {
                let side = if HyperplaneRule::on_boundary(&hrule.signs_counts(&counts)) {
                    "boundary"
                } else {
                    "interior"
                };
                report.violations.push(format!(
                    "{rule} {counts:?} ({side}): direct {direct}, hyperplane {hyper}, gsr {scored}"
                ));
            }
        }
    }
    Ok(report)
}
