use std::collections::HashSet;
use std::fmt;

use num::integer::gcd;

use super::direct::kendall_matrix;
use super::{RuleKind, VotingRule, HYPERPLANE_MAX_M, KEMENY_HYPERPLANE_MAX_M};
use crate::error::{Error, Result};
use crate::profile::Rational;
use crate::ranking::RankingSpace;

/// A hyperplane `u·x = b` of the simplex, stored in homogenized form
/// `w·x = 0` with `w = u − b·1` (valid because coordinates sum to 1).
///
/// `w` is reduced to coprime integers with its first nonzero entry positive,
/// so equal hyperplanes compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineHyperplane {
    normal: Vec<i64>,
}

impl AffineHyperplane {
    /// Builds the hyperplane `w·x = 0`. Returns `None` when `w` is zero or a
    /// multiple of the all-ones vector, i.e. the equation holds everywhere or nowhere.
    pub fn homogeneous(normal: Vec<i64>) -> Option<Self> {
        let first = *normal.first()?;
        if normal.iter().all(|&w| w == first) {
            return None;
        }
        let g = normal.iter().fold(0i64, |acc, &w| gcd(acc, w));
        let lead = normal.iter().copied().find(|&w| w != 0)?;
        let sign = lead.signum();
        Some(AffineHyperplane {
            normal: normal.into_iter().map(|w| sign * w / g).collect(),
        })
    }

    /// Builds `u·x = b` from a rational normal and offset.
    pub fn from_affine(normal: &[Rational], offset: Rational) -> Option<Self> {
        let denom = normal
            .iter()
            .chain(std::iter::once(&offset))
            .fold(1i64, |acc, r| num::integer::lcm(acc, *r.denom()));
        let scale = |r: &Rational| r.numer() * (denom / r.denom());
        let b = scale(&offset);
        AffineHyperplane::homogeneous(normal.iter().map(|u| scale(u) - b).collect())
    }

    pub fn normal(&self) -> &[i64] {
        &self.normal
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Exact `w·counts`; its sign is the side of the point `counts / n`.
    pub fn eval_counts(&self, counts: &[u64]) -> i128 {
        self.normal
            .iter()
            .zip(counts)
            .map(|(&w, &c)| w as i128 * c as i128)
            .sum()
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Rational {
        self.normal
            .iter()
            .zip(x)
            .fold(Rational::from_integer(0), |acc, (&w, &v)| acc + v * w)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(&w, &v)| w as f64 * v).sum()
    }

    /// Normal vector as floats scaled to unit Euclidean length.
    pub fn unit_normal(&self) -> Vec<f64> {
        let norm = self
            .normal
            .iter()
            .map(|&w| (w as f64).powi(2))
            .sum::<f64>()
            .sqrt();
        self.normal.iter().map(|&w| w as f64 / norm).collect()
    }
}

impl fmt::Display for AffineHyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = (2..=7)
            .find(|&m| (1..=m).product::<usize>() == self.normal.len())
            .unwrap_or(0);
        let space = RankingSpace::get(m).ok();
        let mut first = true;
        for (i, &w) in self.normal.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let name = match space {
                Some(s) => s.ranking(i).order().map(crate::ranking::candidate_name).collect(),
                None => i.to_string(),
            };
            let sign = if w < 0 { "-" } else if first { "" } else { "+" };
            let sep = if first { "" } else { " " };
            match w.abs() {
                1 => write!(f, "{sep}{sign}x[{name}]")?,
                a => write!(f, "{sep}{sign}{a}x[{name}]")?,
            }
            first = false;
        }
        f.write_str(" = 0")
    }
}

/// Upper bound on the number of hyperplanes generated for `kind` on `m` candidates.
pub fn hyperplane_cap(kind: &RuleKind, m: usize) -> u128 {
    let m = m as u128;
    let pow2 = 1u128 << m;
    match kind {
        RuleKind::Positional(_) | RuleKind::Copeland => m * (m - 1) / 2,
        RuleKind::Irv | RuleKind::Coombs | RuleKind::Baldwin => m * m * pow2,
        RuleKind::Contingent => m * (m - 1),
        RuleKind::KemenyYoung => {
            let f: u128 = (1..=m).product();
            f * f
        }
        RuleKind::Bucklin => m * m * (m - 1) / 2,
        RuleKind::Nanson => m * pow2,
    }
}

struct Builder {
    seen: HashSet<AffineHyperplane>,
    out: Vec<AffineHyperplane>,
}

impl Builder {
    fn push(&mut self, normal: Vec<i64>) {
        if let Some(h) = AffineHyperplane::homogeneous(normal) {
            if self.seen.insert(h.clone()) {
                self.out.push(h);
            }
        }
    }
}

/// Deduplicated hyperplanes whose arrangement refines the regions on which
/// `rule` is constant.
pub fn hyperplanes_of(rule: &VotingRule) -> Result<Vec<AffineHyperplane>> {
    let m = rule.num_candidates();
    let limit = match rule.kind() {
        RuleKind::KemenyYoung => KEMENY_HYPERPLANE_MAX_M,
        _ => HYPERPLANE_MAX_M,
    };
    if m > limit {
        return Err(Error::Guard {
            guard: "hyperplane_max_m",
            size: m as u128,
            limit: limit as u128,
            hint: "hyperplane generation is limited to small m; use direct evaluation",
        });
    }
    let space = RankingSpace::get(m)?;
    let len = space.len();
    let mut b = Builder {
        seen: HashSet::new(),
        out: Vec::new(),
    };
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    // Subsets of candidates still in the race, as bitmasks with at least two members.
    let subsets: Vec<u32> = (0u32..1 << m).filter(|s| s.count_ones() >= 2).collect();
    let top_in = |r: usize, mask: u32| {
        (0..m)
            .map(|p| space.candidate_at(r, p))
            .find(|&c| mask & (1 << c) != 0)
            .expect("nonempty mask")
    };
    let bottom_in = |r: usize, mask: u32| {
        (0..m)
            .rev()
            .map(|p| space.candidate_at(r, p))
            .find(|&c| mask & (1 << c) != 0)
            .expect("nonempty mask")
    };
    let borda_in = |r: usize, mask: u32, a: usize| {
        (0..m)
            .filter(|&c| mask & (1 << c) != 0 && space.position(r, c) > space.position(r, a))
            .count() as i64
    };
    let indicator = |cond: &dyn Fn(usize) -> bool| -> Vec<i64> { (0..len).map(|r| cond(r) as i64).collect() };

    match rule.kind() {
        RuleKind::Positional(w) => {
            for &(a, c) in &pairs {
                b.push((0..len).map(|r| w[space.position(r, a)] - w[space.position(r, c)]).collect());
            }
        }
        RuleKind::Copeland => {
            for &(a, c) in &pairs {
                b.push((0..len).map(|r| if space.position(r, a) < space.position(r, c) { 1 } else { -1 }).collect());
            }
        }
        RuleKind::Irv => {
            for &mask in &subsets {
                for &(a, c) in &pairs {
                    if mask & (1 << a) != 0 && mask & (1 << c) != 0 {
                        b.push((0..len).map(|r| tie_term(top_in(r, mask), a, c)).collect());
                    }
                }
            }
        }
        RuleKind::Coombs => {
            for &mask in &subsets {
                for &(a, c) in &pairs {
                    if mask & (1 << a) != 0 && mask & (1 << c) != 0 {
                        b.push((0..len).map(|r| tie_term(bottom_in(r, mask), a, c)).collect());
                    }
                }
                // The majority stop is not implied by the last-place eliminations.
                if mask.count_ones() >= 3 {
                    for a in (0..m).filter(|&a| mask & (1 << a) != 0) {
                        b.push(indicator(&|r| top_in(r, mask) == a).into_iter().map(|v| 2 * v - 1).collect());
                    }
                }
            }
        }
        RuleKind::Contingent => {
            let all = (1u32 << m) - 1;
            for &(a, c) in &pairs {
                b.push((0..len).map(|r| tie_term(top_in(r, all), a, c)).collect());
            }
            for &(a, c) in &pairs {
                b.push((0..len).map(|r| if space.position(r, a) < space.position(r, c) { 1 } else { -1 }).collect());
            }
        }
        RuleKind::KemenyYoung => {
            let k = kendall_matrix(m);
            for t1 in 0..len {
                for t2 in t1 + 1..len {
                    if space.ranking(t1).top() == space.ranking(t2).top() {
                        continue;
                    }
                    b.push((0..len).map(|r| k[r * len + t1] as i64 - k[r * len + t2] as i64).collect());
                }
            }
        }
        RuleKind::Bucklin => {
            let within = |r: usize, a: usize, k: usize| space.position(r, a) < k;
            for k in 1..=(m / 2 + 1).min(m - 1) {
                for &(a, c) in &pairs {
                    b.push((0..len).map(|r| within(r, a, k) as i64 - within(r, c, k) as i64).collect());
                }
                if 2 * k < m {
                    for a in 0..m {
                        b.push((0..len).map(|r| 2 * within(r, a, k) as i64 - 1).collect());
                    }
                }
            }
        }
        RuleKind::Nanson => {
            for &mask in &subsets {
                let size = mask.count_ones() as i64;
                for a in (0..m).filter(|&a| mask & (1 << a) != 0) {
                    b.push((0..len).map(|r| size * borda_in(r, mask, a) - size * (size - 1) / 2).collect());
                }
            }
        }
        RuleKind::Baldwin => {
            for &mask in &subsets {
                for &(a, c) in &pairs {
                    if mask & (1 << a) != 0 && mask & (1 << c) != 0 {
                        b.push((0..len).map(|r| borda_in(r, mask, a) - borda_in(r, mask, c)).collect());
                    }
                }
            }
        }
    }
    Ok(b.out)
}

fn tie_term(top: usize, a: usize, c: usize) -> i64 {
    if top == a {
        1
    } else if top == c {
        -1
    } else {
        0
    }
}
