use std::collections::HashMap;
use std::sync::RwLock;

use super::{HyperplaneRule, SignVector, VotingRule};
use crate::error::{Error, Result};
use crate::profile::{CountProfile, Profile};
use crate::ranking::Candidate;

/// A rule of the form `g(Σᵢ f(σᵢ))` where `g` depends only on the order
/// pattern of its argument.
///
/// Built from a hyperplane rule: coordinate `j < ℓ` of `f(π)` is the `π`-entry
/// of the `j`-th homogenized normal and the last coordinate is always 0, so
/// `g` reads the side of each hyperplane as the sign of `y_j − y_last`.
#[derive(Debug)]
pub struct GeneralizedScoringRule {
    rule: VotingRule,
    k: usize,
    /// Row per ranking, `k` entries each.
    f: Vec<Vec<i64>>,
    table: RwLock<HashMap<SignVector, Candidate>>,
}

pub fn gsr_from_hyperplanes(hrule: &HyperplaneRule) -> GeneralizedScoringRule {
    let len: usize = (1..=hrule.rule().num_candidates()).product();
    let k = hrule.num_hyperplanes() + 1;
    let f = (0..len)
        .map(|pi| {
            hrule
                .hyperplanes()
                .iter()
                .map(|h| h.normal()[pi])
                .chain(std::iter::once(0))
                .collect()
        })
        .collect();
    GeneralizedScoringRule {
        rule: hrule.rule().clone(),
        k,
        f,
        table: RwLock::new(HashMap::new()),
    }
}

impl GeneralizedScoringRule {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn f(&self, ranking: usize) -> &[i64] {
        &self.f[ranking]
    }

    /// `Σ_π counts[π]·f(π)`.
    pub fn score(&self, counts: &[u64]) -> Vec<i128> {
        let mut y = vec![0i128; self.k];
        for (row, &c) in self.f.iter().zip(counts) {
            for (acc, &v) in y.iter_mut().zip(row) {
                *acc += v as i128 * c as i128;
            }
        }
        y
    }

    /// Order pattern of `y` relative to its last coordinate.
    pub fn pattern(y: &[i128]) -> SignVector {
        let last = *y.last().expect("k >= 1");
        y[..y.len() - 1].iter().map(|&v| (v - last).signum() as i8).collect()
    }

    /// `g(y)` if the pattern of `y` has been labeled.
    pub fn g(&self, y: &[i128]) -> Option<Candidate> {
        self.table.read().expect("gsr table poisoned").get(&Self::pattern(y)).copied()
    }

    pub fn evaluate_counts(&self, counts: &[u64]) -> Candidate {
        let y = self.score(counts);
        if let Some(c) = self.g(&y) {
            return c;
        }
        let c = self.rule.winner_counts(counts);
        *self
            .table
            .write()
            .expect("gsr table poisoned")
            .entry(Self::pattern(&y))
            .or_insert(c)
    }

    pub fn evaluate(&self, profile: &Profile) -> Result<Candidate> {
        self.evaluate_count_profile(&profile.counts())
    }

    pub fn evaluate_count_profile(&self, profile: &CountProfile) -> Result<Candidate> {
        if profile.counts().len() != self.f.len() {
            return Err(Error::Dimension(format!(
                "expected {} rankings, got {}",
                self.f.len(),
                profile.counts().len()
            )));
        }
        Ok(self.evaluate_counts(profile.counts()))
    }
}
