use log::warn;

use super::lp::{LinearProgram, LpOutcome};
use crate::error::{Error, Result};
use crate::profile::VoteDistribution;
use crate::ranking::Candidate;
use crate::rules::{HyperplaneRule, SignVector, VotingRule};

/// Largest arrangement for which cells are enumerated.
pub const DEFAULT_CELL_CAP: usize = 14;

/// Cells whose best margin is at or below this are treated as empty.
pub const MARGIN_TOLERANCE: f64 = 1e-9;

/// Tolerance for deciding that a hyperplane passes through the mean `p`.
pub const MEAN_TOLERANCE: f64 = 1e-9;

/// A rule's hyperplane arrangement restricted to the zero-sum subspace `H₀`
/// around the mean `p`, together with the limiting region labeler.
///
/// Hyperplanes through `p` survive as linear hyperplanes of `H₀`; the rest keep
/// a constant side near `p` and are dropped.
#[derive(Clone, Debug)]
pub struct LimitArrangement {
    rule: VotingRule,
    p: Vec<f64>,
    /// Surviving normals scaled to unit length.
    normals: Vec<Vec<f64>>,
    kept: Vec<usize>,
    /// Step from `p` towards a direction normalized to unit max-norm; small
    /// enough that no dropped hyperplane is crossed.
    eps: f64,
}

impl LimitArrangement {
    pub fn new(hrule: &HyperplaneRule, p: &VoteDistribution) -> Result<Self> {
        let len = p.len();
        let m = hrule.rule().num_candidates();
        if (1..=m).product::<usize>() != len {
            return Err(Error::Dimension(format!(
                "distribution over {len} rankings for a rule on {m} candidates"
            )));
        }
        let mut normals = Vec::new();
        let mut kept = Vec::new();
        let mut eps = p.delta();
        for (i, h) in hrule.hyperplanes().iter().enumerate() {
            let at_mean = h.eval_f64(p.p());
            if at_mean.abs() <= MEAN_TOLERANCE {
                normals.push(h.unit_normal());
                kept.push(i);
            } else {
                let l1: f64 = h.normal().iter().map(|&w| (w as f64).abs()).sum();
                eps = eps.min(at_mean.abs() / l1);
            }
        }
        let dropped = hrule.num_hyperplanes() - kept.len();
        if dropped > 0 {
            warn!(
                "{dropped} of {} hyperplanes of {} miss the mean and vanish in the limit",
                hrule.num_hyperplanes(),
                hrule.rule()
            );
        }
        Ok(LimitArrangement {
            rule: hrule.rule().clone(),
            p: p.p().to_vec(),
            normals,
            kept,
            eps: eps / 4.0,
        })
    }

    pub fn rule(&self) -> &VotingRule {
        &self.rule
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    /// Number of surviving hyperplanes, `M`.
    pub fn num_hyperplanes(&self) -> usize {
        self.normals.len()
    }

    /// Unit normals of the surviving hyperplanes.
    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    /// Indices of the surviving hyperplanes in the rule's list.
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    /// Sign vector of `y`; values within `1e-9·‖y‖∞` of zero count as zero.
    pub fn signs(&self, y: &[f64]) -> SignVector {
        let scale = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let tol = 1e-9 * scale;
        self.normals
            .iter()
            .map(|n| {
                let v: f64 = n.iter().zip(y).map(|(a, b)| a * b).sum();
                if v > tol {
                    1
                } else if v < -tol {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }

    /// Limiting winner in direction `y`: the rule evaluated at `p + ε·y`.
    pub fn label(&self, y: &[f64]) -> Candidate {
        let scale = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if scale == 0.0 {
            return self.rule.winner(&self.p);
        }
        let x: Vec<f64> = self
            .p
            .iter()
            .zip(y)
            .map(|(p, v)| p + self.eps * v / scale)
            .collect();
        self.rule.winner(&x)
    }
}

/// An open region of the limiting arrangement.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub signs: SignVector,
    /// Interior point of the cell in `H₀` with max-norm at most 1.
    pub witness: Vec<f64>,
    /// Smallest distance from the witness to a bounding hyperplane (unit normals).
    pub margin: f64,
    pub label: Candidate,
}

/// Maximizes `t` subject to `s_j·n_j·y ≥ t`, `Σy = 0`, `−1 ≤ y ≤ 1`.
pub(crate) fn max_margin(normals: &[Vec<f64>], signs: &[i8], dim: usize) -> Option<(f64, Vec<f64>)> {
    // Variables u = y + 1 ∈ [0, 2] and t ≥ 0.
    let t = dim;
    let mut obj = vec![0.0; dim + 1];
    obj[t] = -1.0;
    let mut lp = LinearProgram::minimize(obj);
    let mut sum = vec![1.0; dim + 1];
    sum[t] = 0.0;
    lp.equal(sum, dim as f64);
    for i in 0..dim {
        let mut row = vec![0.0; dim + 1];
        row[i] = 1.0;
        lp.le(row, 2.0);
    }
    let mut cap = vec![0.0; dim + 1];
    cap[t] = 1.0;
    lp.le(cap, 1.0);
    for (n, &s) in normals.iter().zip(signs) {
        let s = s as f64;
        let mut row: Vec<f64> = n.iter().map(|v| s * v).collect();
        let rhs = row.iter().sum();
        row.push(-1.0);
        lp.ge(row, rhs);
    }
    match lp.solve() {
        LpOutcome::Optimal { x, .. } if x[t] > MARGIN_TOLERANCE => {
            Some((x[t], x[..dim].iter().map(|u| u - 1.0).collect()))
        }
        _ => None,
    }
}

/// All open regions of the arrangement, found by splitting cells one hyperplane at a time.
pub fn enumerate_cells(arr: &LimitArrangement, cap: usize) -> Result<Vec<Cell>> {
    let l = arr.num_hyperplanes();
    if l > cap {
        return Err(Error::Guard {
            guard: "cell_enumeration_cap",
            size: l as u128,
            limit: cap as u128,
            hint: "too many hyperplanes to enumerate cells; use the bisection estimator",
        });
    }
    let dim = arr.dim();
    let mut partial: Vec<(SignVector, f64, Vec<f64>)> = vec![(Vec::new(), f64::INFINITY, vec![0.0; dim])];
    for j in 0..l {
        let normals = &arr.normals[..=j];
        let mut next = Vec::with_capacity(partial.len() * 2);
        for (signs, _, _) in partial {
            for s in [1i8, -1] {
                let mut ext = signs.clone();
                ext.push(s);
                if let Some((margin, y)) = max_margin(normals, &ext, dim) {
                    next.push((ext, margin, y));
                }
            }
        }
        partial = next;
    }
    Ok(partial
        .into_iter()
        .map(|(signs, margin, witness)| {
            let label = arr.label(&witness);
            Cell {
                signs,
                witness,
                margin,
                label,
            }
        })
        .collect())
}
