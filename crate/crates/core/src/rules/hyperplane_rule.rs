use std::collections::HashMap;
use std::sync::RwLock;

use super::{hyperplanes_of, AffineHyperplane, VotingRule};
use crate::error::{Error, Result};
use crate::profile::{CountProfile, SimplexPoint};
use crate::ranking::Candidate;

/// Values of `|w·x|` at or below this count as zero in float mode.
pub const SIGN_TOLERANCE: f64 = 1e-9;

/// Side of each hyperplane: −1, 0 or +1.
pub type SignVector = Vec<i8>;

/// A voting rule viewed as a labeling of the regions cut out by its hyperplanes.
///
/// Region labels are memoized the first time a sign vector is seen, by running
/// the direct rule on the point that produced it.
#[derive(Debug)]
pub struct HyperplaneRule {
    rule: VotingRule,
    hyperplanes: Vec<AffineHyperplane>,
    labels: RwLock<HashMap<SignVector, Candidate>>,
}

impl Clone for HyperplaneRule {
    fn clone(&self) -> Self {
        HyperplaneRule {
            rule: self.rule.clone(),
            hyperplanes: self.hyperplanes.clone(),
            labels: RwLock::new(self.labels.read().expect("label cache poisoned").clone()),
        }
    }
}

impl HyperplaneRule {
    pub fn new(rule: VotingRule) -> Result<Self> {
        let hyperplanes = hyperplanes_of(&rule)?;
        Ok(HyperplaneRule::with_hyperplanes(rule, hyperplanes))
    }

    /// Uses a caller-supplied arrangement; it must refine the rule's regions.
    pub fn with_hyperplanes(rule: VotingRule, hyperplanes: Vec<AffineHyperplane>) -> Self {
        HyperplaneRule {
            rule,
            hyperplanes,
            labels: RwLock::new(HashMap::new()),
        }
    }

    pub fn rule(&self) -> &VotingRule {
        &self.rule
    }

    pub fn hyperplanes(&self) -> &[AffineHyperplane] {
        &self.hyperplanes
    }

    pub fn num_hyperplanes(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn signs_counts(&self, counts: &[u64]) -> SignVector {
        self.hyperplanes
            .iter()
            .map(|h| h.eval_counts(counts).signum() as i8)
            .collect()
    }

    pub fn signs_point(&self, x: &SimplexPoint) -> SignVector {
        self.hyperplanes
            .iter()
            .map(|h| {
                let v = h.eval_rational(x.coords());
                if v > 0.into() {
                    1
                } else if v < 0.into() {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }

    pub fn signs_f64(&self, x: &[f64]) -> SignVector {
        self.hyperplanes.iter().map(|h| float_sign(h.eval_f64(x))).collect()
    }

    /// Whether the point lies on at least one hyperplane.
    pub fn on_boundary(signs: &[i8]) -> bool {
        signs.contains(&0)
    }

    pub fn cached_label(&self, signs: &[i8]) -> Option<Candidate> {
        self.labels.read().expect("label cache poisoned").get(signs).copied()
    }

    fn label_or_insert(&self, signs: SignVector, compute: impl FnOnce() -> Candidate) -> Candidate {
        if let Some(c) = self.cached_label(&signs) {
            return c;
        }
        let c = compute();
        self.labels
            .write()
            .expect("label cache poisoned")
            .entry(signs)
            .or_insert(c);
        c
    }

    /// Records `label` for `signs` unless one is already cached.
    pub fn insert_label(&self, signs: SignVector, label: Candidate) {
        self.label_or_insert(signs, || label);
    }

    pub fn evaluate_counts(&self, counts: &[u64]) -> Candidate {
        let signs = self.signs_counts(counts);
        self.label_or_insert(signs, || self.rule.winner_counts(counts))
    }

    pub fn evaluate_profile(&self, profile: &CountProfile) -> Result<Candidate> {
        self.check_dim(profile.counts().len())?;
        Ok(self.evaluate_counts(profile.counts()))
    }

    /// Exact evaluation at a rational simplex point.
    pub fn evaluate(&self, x: &SimplexPoint) -> Result<Candidate> {
        self.check_dim(x.dim())?;
        let signs = self.signs_point(x);
        Ok(self.label_or_insert(signs, || self.rule.winner(&x.integer_weights())))
    }

    /// Float evaluation; `|w·x| ≤ SIGN_TOLERANCE` counts as on the hyperplane.
    pub fn evaluate_f64(&self, x: &[f64]) -> Result<Candidate> {
        self.check_dim(x.len())?;
        let signs = self.signs_f64(x);
        Ok(self.label_or_insert(signs, || self.rule.winner(x)))
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        let expected: usize = (1..=self.rule.num_candidates()).product();
        if len != expected {
            return Err(Error::Dimension(format!("expected {expected} coordinates, got {len}")));
        }
        Ok(())
    }
}

pub(crate) fn float_sign(v: f64) -> i8 {
    if v > SIGN_TOLERANCE {
        1
    } else if v < -SIGN_TOLERANCE {
        -1
    } else {
        0
    }
}
