//! Voting rules evaluable three ways: directly on profiles, as hyperplane
//! rules on simplex points, and as generalized scoring rules.

mod direct;
mod gsr;
mod hyperplane_rule;
mod hyperplanes;

use std::fmt;

use num::integer::{gcd, lcm};

use crate::error::{Error, Result};
use crate::profile::{CountProfile, Rational};
use crate::ranking::{candidate_from_name, candidate_name, Candidate, RankingSpace};

pub use direct::Mass;
pub use gsr::{gsr_from_hyperplanes, GeneralizedScoringRule};
pub use hyperplane_rule::{HyperplaneRule, SignVector, SIGN_TOLERANCE};
pub use hyperplanes::{hyperplane_cap, hyperplanes_of, AffineHyperplane};

/// Largest `m` for which Kemény-Young is evaluated directly.
pub const KEMENY_EVAL_MAX_M: usize = 5;
/// Largest `m` for which Kemény-Young hyperplanes are generated.
pub const KEMENY_HYPERPLANE_MAX_M: usize = 4;
/// Largest `m` for which any other rule's hyperplanes are generated.
pub const HYPERPLANE_MAX_M: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TiePolicy {
    LexicographicCandidate,
    /// Candidates listed from most to least favoured.
    FixedOrder(Vec<Candidate>),
}

impl TiePolicy {
    /// `priority[c]` is the rank of candidate `c` in the tie-breaking order (0 = favoured).
    fn priority(&self, m: usize) -> Result<Vec<usize>> {
        match self {
            TiePolicy::LexicographicCandidate => Ok((0..m).collect()),
            TiePolicy::FixedOrder(order) => {
                let mut priority = vec![usize::MAX; m];
                if order.len() != m {
                    return Err(Error::validation(
                        "tie policy",
                        format!("order has {} candidates, expected {m}", order.len()),
                    ));
                }
                for (rank, &c) in order.iter().enumerate() {
                    if c >= m || priority[c] != usize::MAX {
                        return Err(Error::validation(
                            "tie policy",
                            format!("{order:?} is not a permutation of the candidates"),
                        ));
                    }
                    priority[c] = rank;
                }
                Ok(priority)
            }
        }
    }

    fn parse(text: &str) -> Result<Self> {
        if text == "lex" {
            return Ok(TiePolicy::LexicographicCandidate);
        }
        let order = text.strip_prefix("order:").ok_or_else(|| {
            Error::validation("tie policy", format!("expected `lex` or `order:<letters>`, got {text:?}"))
        })?;
        let order = order
            .chars()
            .map(|ch| candidate_from_name(&ch.to_string()))
            .collect::<Result<Vec<_>>>()?;
        Ok(TiePolicy::FixedOrder(order))
    }
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TiePolicy::LexicographicCandidate => f.write_str("lex"),
            TiePolicy::FixedOrder(order) => {
                f.write_str("order:")?;
                order.iter().try_for_each(|&c| write!(f, "{}", candidate_name(c)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// Integer score per position (0 = top), not all equal.
    Positional(Vec<i64>),
    Irv,
    Coombs,
    Contingent,
    KemenyYoung,
    Bucklin,
    Nanson,
    Baldwin,
    Copeland,
}

/// Rule names accepted by [`VotingRule::parse`].
pub const RULE_NAMES: [&str; 12] = [
    "plurality",
    "borda",
    "veto",
    "positional",
    "irv",
    "coombs",
    "contingent",
    "kemeny",
    "bucklin",
    "nanson",
    "baldwin",
    "copeland",
];

#[derive(Clone, Debug)]
pub struct VotingRule {
    m: usize,
    kind: RuleKind,
    tie: TiePolicy,
    name: String,
    priority: Vec<usize>,
    /// Rankings sorted by the tie policy applied position by position (Kemény-Young).
    ranking_order: Vec<usize>,
}

impl PartialEq for VotingRule {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.kind == other.kind && self.tie == other.tie
    }
}

impl VotingRule {
    pub fn new(m: usize, kind: RuleKind, tie: TiePolicy) -> Result<Self> {
        let space = RankingSpace::get(m)?;
        let priority = tie.priority(m)?;
        let name = match &kind {
            RuleKind::Positional(w) => {
                if w.len() != m {
                    return Err(Error::validation(
                        "positional weights",
                        format!("need {m} weights, got {}", w.len()),
                    ));
                }
                if w.iter().all(|&x| x == w[0]) {
                    return Err(Error::validation("positional weights", "all weights are equal"));
                }
                let plurality: Vec<i64> = (0..m).map(|i| (i == 0) as i64).collect();
                let borda: Vec<i64> = (0..m).map(|i| (m - 1 - i) as i64).collect();
                let veto: Vec<i64> = (0..m).map(|i| (i + 1 < m) as i64).collect();
                if *w == plurality {
                    "plurality".to_string()
                } else if *w == borda {
                    "borda".to_string()
                } else if *w == veto {
                    "veto".to_string()
                } else {
                    let ws: Vec<String> = w.iter().map(i64::to_string).collect();
                    format!("positional:{}", ws.join(","))
                }
            }
            RuleKind::Irv => "irv".into(),
            RuleKind::Coombs => "coombs".into(),
            RuleKind::Contingent => "contingent".into(),
            RuleKind::KemenyYoung => {
                if m > KEMENY_EVAL_MAX_M {
                    return Err(Error::Guard {
                        guard: "kemeny_eval_max_m",
                        size: m as u128,
                        limit: KEMENY_EVAL_MAX_M as u128,
                        hint: "Kemény-Young scans m!² ranking pairs; use m <= 5",
                    });
                }
                "kemeny".into()
            }
            RuleKind::Bucklin => "bucklin".into(),
            RuleKind::Nanson => "nanson".into(),
            RuleKind::Baldwin => "baldwin".into(),
            RuleKind::Copeland => "copeland".into(),
        };
        let mut ranking_order: Vec<usize> = (0..space.len()).collect();
        if kind == RuleKind::KemenyYoung {
            ranking_order.sort_by_key(|&r| {
                space
                    .ranking(r)
                    .order()
                    .map(|c| priority[c])
                    .collect::<Vec<_>>()
            });
        }
        Ok(VotingRule {
            m,
            kind,
            tie,
            name,
            priority,
            ranking_order,
        })
    }

    /// Positional rule from rational weights, rescaled to coprime integers.
    pub fn positional(weights: &[Rational], tie: TiePolicy) -> Result<Self> {
        let denom = weights.iter().fold(1i64, |acc, w| lcm(acc, *w.denom()));
        let mut ints: Vec<i64> = weights.iter().map(|w| w.numer() * (denom / w.denom())).collect();
        let g = ints.iter().fold(0i64, |acc, &w| gcd(acc, w));
        if g > 1 {
            ints.iter_mut().for_each(|w| *w /= g);
        }
        VotingRule::new(weights.len(), RuleKind::Positional(ints), tie)
    }

    /// Parses `plurality`, `borda`, `veto`, `positional:w1,w2,…`, `irv`, `coombs`,
    /// `contingent`, `kemeny`, `bucklin`, `nanson`, `baldwin` or `copeland`,
    /// optionally followed by `@tie=lex` or `@tie=order:bac…`.
    pub fn parse(spec: &str, m: usize) -> Result<Self> {
        let (base, tie) = match spec.split_once('@') {
            Some((base, opt)) => {
                let tie = opt.strip_prefix("tie=").ok_or_else(|| {
                    Error::validation("rule", format!("unknown option {opt:?}; expected tie=..."))
                })?;
                (base.trim(), TiePolicy::parse(tie.trim())?)
            }
            None => (spec.trim(), TiePolicy::LexicographicCandidate),
        };
        let kind = match base {
            "plurality" => RuleKind::Positional((0..m).map(|i| (i == 0) as i64).collect()),
            "borda" => RuleKind::Positional((0..m).map(|i| (m - 1 - i) as i64).collect()),
            "veto" => RuleKind::Positional((0..m).map(|i| (i + 1 < m) as i64).collect()),
            "irv" => RuleKind::Irv,
            "coombs" => RuleKind::Coombs,
            "contingent" => RuleKind::Contingent,
            "kemeny" => RuleKind::KemenyYoung,
            "bucklin" => RuleKind::Bucklin,
            "nanson" => RuleKind::Nanson,
            "baldwin" => RuleKind::Baldwin,
            "copeland" => RuleKind::Copeland,
            other => {
                let weights = other.strip_prefix("positional:").ok_or_else(|| {
                    Error::validation("rule", format!("unknown rule {other:?}"))
                })?;
                let weights = weights
                    .split(',')
                    .map(|w| parse_rational(w.trim()))
                    .collect::<Result<Vec<_>>>()?;
                if weights.len() != m {
                    return Err(Error::validation(
                        "positional weights",
                        format!("need {m} weights, got {}", weights.len()),
                    ));
                }
                return VotingRule::positional(&weights, tie);
            }
        };
        VotingRule::new(m, kind, tie)
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn tie_policy(&self) -> &TiePolicy {
        &self.tie
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Winner on an anonymized profile.
    pub fn evaluate_direct(&self, profile: &CountProfile) -> Result<Candidate> {
        if profile.num_candidates() != self.m {
            return Err(Error::Dimension(format!(
                "rule over {} candidates applied to a profile over {}",
                self.m,
                profile.num_candidates()
            )));
        }
        Ok(self.winner_counts(profile.counts()))
    }

    /// Winner for a count vector indexed by canonical ranking order.
    pub fn winner_counts(&self, counts: &[u64]) -> Candidate {
        let weights: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
        self.winner(&weights)
    }

    /// Winner for nonnegative masses over rankings (counts, simplex coordinates,
    /// or any positive multiple of them).
    pub fn winner<T: Mass>(&self, x: &[T]) -> Candidate {
        direct::winner(self, x)
    }
}

impl fmt::Display for VotingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.tie != TiePolicy::LexicographicCandidate {
            write!(f, "@tie={}", self.tie)?;
        }
        Ok(())
    }
}

fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::validation("positional weights", format!("bad weight {text:?}"));
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let negative = int.starts_with('-');
    let int: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
    let scale = 10i64.pow(frac.len() as u32);
    let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let numer = int.abs() * scale + frac;
    Ok(Rational::new(if negative { -numer } else { numer }, scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rule_specs() {
        let r = VotingRule::parse("borda", 3).unwrap();
        assert_eq!(r.kind(), &RuleKind::Positional(vec![2, 1, 0]));
        assert_eq!(r.name(), "borda");
        let r = VotingRule::parse("positional:1,0.5,0", 3).unwrap();
        assert_eq!(r.kind(), &RuleKind::Positional(vec![2, 1, 0]));
        assert_eq!(r.name(), "borda");
        let r = VotingRule::parse("positional:3, 1, 0", 3).unwrap();
        assert_eq!(r.name(), "positional:3,1,0");
        let r = VotingRule::parse("copeland@tie=order:bca", 3).unwrap();
        assert_eq!(r.tie_policy(), &TiePolicy::FixedOrder(vec![1, 2, 0]));
        assert_eq!(r.to_string(), "copeland@tie=order:bca");
        for name in RULE_NAMES.iter().filter(|n| **n != "positional") {
            assert!(VotingRule::parse(name, 3).is_ok(), "{name}");
        }
    }

    #[test]
    fn rejects_invalid_rules() {
        assert!(VotingRule::parse("positional:1,1,1", 3).is_err());
        assert!(VotingRule::parse("positional:1,0", 3).is_err());
        assert!(VotingRule::parse("dodgson", 3).is_err());
        assert!(VotingRule::parse("irv@tie=order:ab", 3).is_err());
        assert!(VotingRule::parse("irv@tie=order:aab", 3).is_err());
        assert!(VotingRule::parse("irv@foo=1", 3).is_err());
        assert!(matches!(
            VotingRule::parse("kemeny", 6),
            Err(Error::Guard { .. })
        ));
    }

    #[test]
    fn parses_decimal_and_fraction_weights() {
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational::new(-3, 2));
        assert_eq!(parse_rational("2/3").unwrap(), Rational::new(2, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
