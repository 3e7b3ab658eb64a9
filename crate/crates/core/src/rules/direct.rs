use std::fmt::Debug;
use std::sync::OnceLock;

use num::{Num, NumCast};

use super::{RuleKind, VotingRule};
use crate::ranking::{kendall_tau, Candidate, RankingSpace, MAX_CANDIDATES};

/// Scalar type of the per-ranking masses a rule is evaluated on.
///
/// `i64` for exact evaluation on counts, `f64` for points in float mode.
pub trait Mass: Copy + PartialOrd + Num + NumCast + Debug + Send + Sync {}

impl<T> Mass for T where T: Copy + PartialOrd + Num + NumCast + Debug + Send + Sync {}

type Mask = u32;

#[inline]
fn has(mask: Mask, c: Candidate) -> bool {
    mask & (1 << c) != 0
}

fn cast<T: Mass>(v: i64) -> T {
    T::from(v).expect("small integer fits in every mass type")
}

fn members(mask: Mask, m: usize) -> impl Iterator<Item = Candidate> {
    (0..m).filter(move |&c| has(mask, c))
}

pub(super) fn winner<T: Mass>(rule: &VotingRule, x: &[T]) -> Candidate {
    let space = RankingSpace::get(rule.m).expect("validated at construction");
    assert_eq!(x.len(), space.len(), "mass vector length must be m!");
    let ctx = Ctx { rule, space, x };
    match &rule.kind {
        RuleKind::Positional(w) => ctx.positional(w),
        RuleKind::Irv => ctx.irv(),
        RuleKind::Coombs => ctx.coombs(),
        RuleKind::Contingent => ctx.contingent(),
        RuleKind::KemenyYoung => ctx.kemeny(),
        RuleKind::Bucklin => ctx.bucklin(),
        RuleKind::Nanson => ctx.nanson(),
        RuleKind::Baldwin => ctx.baldwin(),
        RuleKind::Copeland => ctx.copeland(),
    }
}

struct Ctx<'a, T> {
    rule: &'a VotingRule,
    space: &'a RankingSpace,
    x: &'a [T],
}

impl<T: Mass> Ctx<'_, T> {
    fn m(&self) -> usize {
        self.rule.m
    }

    fn all(&self) -> Mask {
        (1 << self.m()) - 1
    }

    fn total(&self) -> T {
        self.x.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    /// Highest score wins; ties go to the policy-first candidate.
    fn best(&self, mask: Mask, score: &[T]) -> Candidate {
        members(mask, self.m())
            .reduce(|best, c| {
                let better = score[c] > score[best]
                    || (score[c] == score[best] && self.rule.priority[c] < self.rule.priority[best]);
                if better {
                    c
                } else {
                    best
                }
            })
            .expect("nonempty candidate set")
    }

    /// Lowest score is eliminated; ties eliminate the policy-last candidate.
    fn worst(&self, mask: Mask, score: &[T]) -> Candidate {
        members(mask, self.m())
            .reduce(|worst, c| {
                let lower = score[c] < score[worst]
                    || (score[c] == score[worst] && self.rule.priority[c] > self.rule.priority[worst]);
                if lower {
                    c
                } else {
                    worst
                }
            })
            .expect("nonempty candidate set")
    }

    fn policy_first(&self, mask: Mask) -> Candidate {
        members(mask, self.m())
            .min_by_key(|&c| self.rule.priority[c])
            .expect("nonempty candidate set")
    }

    fn tops(&self, mask: Mask) -> Vec<T> {
        let m = self.m();
        let mut t = vec![T::zero(); m];
        for (r, &v) in self.x.iter().enumerate() {
            if let Some(c) = (0..m).map(|p| self.space.candidate_at(r, p)).find(|&c| has(mask, c)) {
                t[c] = t[c] + v;
            }
        }
        t
    }

    fn bottoms(&self, mask: Mask) -> Vec<T> {
        let m = self.m();
        let mut t = vec![T::zero(); m];
        for (r, &v) in self.x.iter().enumerate() {
            if let Some(c) = (0..m)
                .rev()
                .map(|p| self.space.candidate_at(r, p))
                .find(|&c| has(mask, c))
            {
                t[c] = t[c] + v;
            }
        }
        t
    }

    /// Borda scores on ballots restricted to the candidates in `mask`.
    fn borda(&self, mask: Mask) -> Vec<T> {
        let m = self.m();
        let k = mask.count_ones() as i64;
        let mut s = vec![T::zero(); m];
        for (r, &v) in self.x.iter().enumerate() {
            let mut below = k;
            for p in 0..m {
                let c = self.space.candidate_at(r, p);
                if has(mask, c) {
                    below -= 1;
                    s[c] = s[c] + v * cast::<T>(below);
                }
            }
        }
        s
    }

    /// `p[a][b]`: mass of rankings placing `a` above `b`.
    fn pairwise(&self) -> Vec<Vec<T>> {
        let m = self.m();
        let mut p = vec![vec![T::zero(); m]; m];
        for (r, &v) in self.x.iter().enumerate() {
            for i in 0..m {
                let a = self.space.candidate_at(r, i);
                for j in i + 1..m {
                    let b = self.space.candidate_at(r, j);
                    p[a][b] = p[a][b] + v;
                }
            }
        }
        p
    }

    fn majority(&self, mask: Mask, tops: &[T], total: T) -> Option<Candidate> {
        let two = cast::<T>(2);
        members(mask, self.m()).find(|&c| two * tops[c] > total)
    }

    fn positional(&self, w: &[i64]) -> Candidate {
        let m = self.m();
        let w: Vec<T> = w.iter().map(|&v| cast(v)).collect();
        let mut s = vec![T::zero(); m];
        for (r, &v) in self.x.iter().enumerate() {
            for (c, score) in s.iter_mut().enumerate() {
                *score = *score + v * w[self.space.position(r, c)];
            }
        }
        self.best(self.all(), &s)
    }

    fn irv(&self) -> Candidate {
        let total = self.total();
        let mut mask = self.all();
        while mask.count_ones() > 1 {
            let tops = self.tops(mask);
            if let Some(c) = self.majority(mask, &tops, total) {
                return c;
            }
            mask &= !(1 << self.worst(mask, &tops));
        }
        self.policy_first(mask)
    }

    fn coombs(&self) -> Candidate {
        let total = self.total();
        let mut mask = self.all();
        while mask.count_ones() > 1 {
            let tops = self.tops(mask);
            if let Some(c) = self.majority(mask, &tops, total) {
                return c;
            }
            // Most last places is eliminated: negate so `worst` picks the maximum.
            let neg: Vec<T> = self.bottoms(mask).into_iter().map(|b| T::zero() - b).collect();
            mask &= !(1 << self.worst(mask, &neg));
        }
        self.policy_first(mask)
    }

    fn contingent(&self) -> Candidate {
        let total = self.total();
        let all = self.all();
        let tops = self.tops(all);
        if let Some(c) = self.majority(all, &tops, total) {
            return c;
        }
        let first = self.best(all, &tops);
        let second = self.best(all & !(1 << first), &tops);
        let p = self.pairwise();
        let two = (1 << first) | (1 << second);
        let score = {
            let mut s = vec![T::zero(); self.m()];
            s[first] = p[first][second];
            s[second] = p[second][first];
            s
        };
        self.best(two, &score)
    }

    fn kemeny(&self) -> Candidate {
        let n = self.space.len();
        let kendall = kendall_matrix(self.m());
        let mut best: Option<(T, usize)> = None;
        for &tau in &self.rule.ranking_order {
            let cost = self
                .x
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (pi, &v)| acc + v * cast::<T>(kendall[pi * n + tau] as i64));
            if best.is_none_or(|(b, _)| cost < b) {
                best = Some((cost, tau));
            }
        }
        let (_, tau) = best.expect("at least one ranking");
        self.space.ranking(tau).top()
    }

    fn bucklin(&self) -> Candidate {
        let m = self.m();
        let total = self.total();
        let two = cast::<T>(2);
        let mut points = vec![T::zero(); m];
        for round in 0..m {
            for (r, &v) in self.x.iter().enumerate() {
                let c = self.space.candidate_at(r, round);
                points[c] = points[c] + v;
            }
            if points.iter().any(|&p| two * p > total) {
                return self.best(self.all(), &points);
            }
        }
        // Only reachable with zero total mass.
        self.policy_first(self.all())
    }

    fn nanson(&self) -> Candidate {
        let m = self.m();
        let mut mask = self.all();
        while mask.count_ones() > 1 {
            let s = self.borda(mask);
            let k = cast::<T>(mask.count_ones() as i64);
            let sum = members(mask, m).fold(T::zero(), |acc, c| acc + s[c]);
            let eliminated = members(mask, m)
                .filter(|&c| s[c] * k <= sum)
                .fold(0 as Mask, |acc, c| acc | (1 << c));
            if eliminated == mask {
                return self.policy_first(mask);
            }
            mask &= !eliminated;
        }
        self.policy_first(mask)
    }

    fn baldwin(&self) -> Candidate {
        let mut mask = self.all();
        while mask.count_ones() > 1 {
            let s = self.borda(mask);
            mask &= !(1 << self.worst(mask, &s));
        }
        self.policy_first(mask)
    }

    fn copeland(&self) -> Candidate {
        let m = self.m();
        let p = self.pairwise();
        // Doubled points: 2 per pairwise win, 1 per pairwise tie.
        let mut points = vec![T::zero(); m];
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                if p[a][b] > p[b][a] {
                    points[a] = points[a] + cast(2);
                } else if p[a][b] == p[b][a] {
                    points[a] = points[a] + T::one();
                }
            }
        }
        self.best(self.all(), &points)
    }
}

/// Row-major `m! × m!` Kendall tau distances between canonical rankings.
pub(crate) fn kendall_matrix(m: usize) -> &'static [u8] {
    static CACHE: [OnceLock<Vec<u8>>; MAX_CANDIDATES + 1] =
        [const { OnceLock::new() }; MAX_CANDIDATES + 1];
    CACHE[m].get_or_init(|| {
        let space = RankingSpace::get(m).expect("valid m");
        let rankings = space.rankings();
        rankings
            .iter()
            .flat_map(|a| rankings.iter().map(move |b| kendall_tau(a, b).expect("same m") as u8))
            .collect()
    })
}
