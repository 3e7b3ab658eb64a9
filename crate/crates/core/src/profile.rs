//! Profiles, points of the probability simplex over rankings, and the
//! Hamming/L1 distance machinery linking vote changes to simplex moves.

use std::fmt;

use num::rational::Rational64;
use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ranking::{Ranking, RankingSpace};

pub type Rational = Rational64;

/// An ordered sequence of votes; each vote is a ranking index in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    m: usize,
    votes: Vec<usize>,
}

impl Profile {
    pub fn new(m: usize, votes: Vec<usize>) -> Result<Self> {
        let space = RankingSpace::get(m)?;
        if votes.is_empty() {
            return Err(Error::validation("profile", "a profile needs at least one vote"));
        }
        if let Some(&bad) = votes.iter().find(|&&v| v >= space.len()) {
            return Err(Error::validation(
                "profile",
                format!("ranking index {bad} out of range for m={m}"),
            ));
        }
        Ok(Profile { m, votes })
    }

    pub fn from_rankings(rankings: &[Ranking]) -> Result<Self> {
        let m = rankings
            .first()
            .map(Ranking::num_candidates)
            .ok_or_else(|| Error::validation("profile", "a profile needs at least one vote"))?;
        if rankings.iter().any(|r| r.num_candidates() != m) {
            return Err(Error::Dimension("rankings over different candidate sets".into()));
        }
        Profile::new(m, rankings.iter().map(Ranking::index).collect())
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn num_voters(&self) -> usize {
        self.votes.len()
    }

    pub fn votes(&self) -> &[usize] {
        &self.votes
    }

    pub fn counts(&self) -> CountProfile {
        let space = RankingSpace::get(self.m).expect("validated at construction");
        let mut counts = vec![0u64; space.len()];
        for &v in &self.votes {
            counts[v] += 1;
        }
        CountProfile { m: self.m, counts }
    }

    /// Splits off the first `k` voters: returns `(first k, remaining)` as count profiles.
    /// Either part may be empty.
    pub fn split_counts(&self, k: usize) -> (Vec<u64>, Vec<u64>) {
        let len = RankingSpace::get(self.m).expect("validated").len();
        let mut head = vec![0u64; len];
        let mut tail = vec![0u64; len];
        for (i, &v) in self.votes.iter().enumerate() {
            if i < k {
                head[v] += 1;
            } else {
                tail[v] += 1;
            }
        }
        (head, tail)
    }
}

/// The anonymized form of a profile: how many voters cast each ranking.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CountProfile {
    m: usize,
    counts: Vec<u64>,
}

impl CountProfile {
    pub fn new(m: usize, counts: Vec<u64>) -> Result<Self> {
        let space = RankingSpace::get(m)?;
        if counts.len() != space.len() {
            return Err(Error::Dimension(format!(
                "expected {} ranking counts for m={m}, got {}",
                space.len(),
                counts.len()
            )));
        }
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::validation("profile", "a profile needs at least one vote"));
        }
        Ok(CountProfile { m, counts })
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn num_voters(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.counts
    }

    /// Expands into a voter sequence with rankings in canonical order.
    pub fn to_profile(&self) -> Profile {
        let votes = self
            .counts
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| std::iter::repeat_n(r, c as usize))
            .collect();
        Profile { m: self.m, votes }
    }

    /// Parses the `<count>: a>b>c` line format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = None;
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            let (count, ranking) = line
                .split_once(':')
                .ok_or_else(|| parse_err(format!("expected `<count>: <ranking>`, got {line:?}")))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad count {count:?}: {e}")))?;
            let ranking = Ranking::parse(ranking).map_err(|e| parse_err(e.to_string()))?;
            match m {
                None => m = Some(ranking.num_candidates()),
                Some(m) if m != ranking.num_candidates() => {
                    return Err(parse_err(format!(
                        "ranking {ranking} has {} candidates, expected {m}",
                        ranking.num_candidates()
                    )))
                }
                _ => {}
            }
            entries.push((ranking.index(), count));
        }
        let m = m.ok_or(Error::Parse {
            line: 0,
            msg: "profile contains no rankings".into(),
        })?;
        let mut counts = vec![0u64; RankingSpace::get(m)?.len()];
        for (idx, c) in entries {
            counts[idx] += c;
        }
        CountProfile::new(m, counts)
    }
}

impl fmt::Display for CountProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let space = RankingSpace::get(self.m).map_err(|_| fmt::Error)?;
        for (r, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                writeln!(f, "{c}: {}", space.ranking(r))?;
            }
        }
        Ok(())
    }
}

/// A point of the probability simplex over the `m!` rankings, held exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexPoint {
    coords: Vec<Rational>,
}

impl SimplexPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.iter().any(|c| c.is_negative()) {
            return Err(Error::validation("simplex point", "negative coordinate"));
        }
        let total: Rational = coords.iter().sum();
        if total != Rational::from_integer(1) {
            return Err(Error::validation(
                "simplex point",
                format!("coordinates sum to {total}, not 1"),
            ));
        }
        Ok(SimplexPoint { coords })
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::validation("simplex point", "empty count vector"));
        }
        Ok(SimplexPoint {
            coords: counts
                .iter()
                .map(|&c| Rational::new(c as i64, n as i64))
                .collect(),
        })
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords
            .iter()
            .map(|c| *c.numer() as f64 / *c.denom() as f64)
            .collect()
    }

    /// Integer counts if every coordinate is a multiple of `1/n` (membership in `D_n`).
    pub fn counts_for(&self, n: u64) -> Option<Vec<u64>> {
        let n = Rational::from_integer(n as i64);
        self.coords
            .iter()
            .map(|c| {
                let scaled = c * n;
                scaled.is_integer().then(|| scaled.to_integer() as u64)
            })
            .collect()
    }

    /// The smallest integer weight vector proportional to this point.
    pub fn integer_weights(&self) -> Vec<i64> {
        let lcm = self
            .coords
            .iter()
            .fold(1i64, |acc, c| num::integer::lcm(acc, *c.denom()));
        self.coords
            .iter()
            .map(|c| c.numer() * (lcm / c.denom()))
            .collect()
    }
}

/// Every count vector of length `len` with total `n`, largest first coordinate first.
pub fn count_vectors(len: usize, n: u64) -> Vec<Vec<u64>> {
    fn rec(prefix: &mut Vec<u64>, len: usize, left: u64, out: &mut Vec<Vec<u64>>) {
        if prefix.len() + 1 == len {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in (0..=left).rev() {
            prefix.push(v);
            rec(prefix, len, left - v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len > 0 {
        rec(&mut Vec::with_capacity(len), len, n, &mut out);
    }
    out
}

/// `x(σ)`: the fraction of voters casting each ranking.
pub fn point_of_profile(profile: &Profile) -> SimplexPoint {
    SimplexPoint::from_counts(profile.counts().counts()).expect("profiles are nonempty")
}

pub fn hamming(a: &Profile, b: &Profile) -> Result<usize> {
    if a.m != b.m || a.votes.len() != b.votes.len() {
        return Err(Error::Dimension(format!(
            "profiles (m={}, n={}) and (m={}, n={})",
            a.m,
            a.votes.len(),
            b.m,
            b.votes.len()
        )));
    }
    Ok(a.votes.iter().zip(&b.votes).filter(|(x, y)| x != y).count())
}

pub fn l1(x: &SimplexPoint, y: &SimplexPoint) -> Result<Rational> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!(
            "simplex points of dimension {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(x.coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| (a - b).abs())
        .fold(Rational::zero(), |acc, d| acc + d))
}

/// Builds a profile `τ` with `x(τ) = y` that changes as few of `sigma`'s votes as
/// possible, so that `d₁(x(σ), y) = (2/n)·d_H(σ, τ)`.
///
/// Over-represented rankings give up their lowest-index voters first; the freed
/// voters are assigned to under-represented rankings in canonical order.
pub fn align_profile(sigma: &Profile, y: &SimplexPoint) -> Result<Profile> {
    let space = RankingSpace::get(sigma.m)?;
    if y.dim() != space.len() {
        return Err(Error::Dimension(format!(
            "point of dimension {} for m={}",
            y.dim(),
            sigma.m
        )));
    }
    let n = sigma.votes.len() as u64;
    let target = y
        .counts_for(n)
        .ok_or_else(|| Error::Precision(format!("target point is not in D_{n}")))?;
    let mut current = sigma.counts().into_counts();

    let mut freed = Vec::new();
    for (i, &v) in sigma.votes.iter().enumerate() {
        if current[v] > target[v] {
            current[v] -= 1;
            freed.push(i);
        }
    }
    let mut votes = sigma.votes.clone();
    let mut slots = freed.into_iter();
    for (r, (&have, &want)) in current.iter().zip(&target).enumerate() {
        for _ in have..want {
            let i = slots.next().expect("freed voters balance the deficits");
            votes[i] = r;
        }
    }
    Ok(Profile { m: sigma.m, votes })
}

/// An i.i.d. vote distribution with a certified lower bound `delta` on every
/// ranking probability.
#[derive(Clone, Debug, PartialEq)]
pub struct VoteDistribution {
    p: Vec<f64>,
    delta: f64,
}

impl VoteDistribution {
    pub fn new(p: Vec<f64>, delta: f64) -> Result<Self> {
        let len = p.len();
        if len < 2 {
            return Err(Error::validation("p", "need at least two rankings"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation("p", format!("sums to {total}, not 1")));
        }
        if !(delta > 0.0 && delta <= 1.0 / len as f64 + 1e-15) {
            return Err(Error::validation(
                "delta",
                format!("must lie in (0, 1/{len}], got {delta}"),
            ));
        }
        if let Some(bad) = p.iter().find(|&&q| q < delta) {
            return Err(Error::validation(
                "p",
                format!("entry {bad} is below delta = {delta}"),
            ));
        }
        Ok(VoteDistribution { p, delta })
    }

    /// Uses the smallest entry of `p` as `delta`.
    pub fn with_min_delta(p: Vec<f64>) -> Result<Self> {
        let delta = p.iter().cloned().fold(f64::INFINITY, f64::min);
        VoteDistribution::new(p, delta)
    }

    pub fn uniform(m: usize) -> Result<Self> {
        let len = RankingSpace::get(m)?.len();
        let q = 1.0 / len as f64;
        VoteDistribution::new(vec![q; len], q)
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Number of candidates `m` with `m! = len()`.
    pub fn num_candidates(&self) -> Result<usize> {
        (2..=crate::ranking::MAX_CANDIDATES)
            .find(|&m| RankingSpace::get(m).map(|s| s.len()) == Ok(self.p.len()))
            .ok_or_else(|| Error::Dimension(format!("{} is not a factorial", self.p.len())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn prof(m: usize, rankings: &[&str]) -> Profile {
        let rankings: Vec<Ranking> = rankings.iter().map(|s| Ranking::parse(s).unwrap()).collect();
        let p = Profile::from_rankings(&rankings).unwrap();
        assert_eq!(p.num_candidates(), m);
        p
    }

    #[test]
    fn point_of_profile_examples() {
        let x = point_of_profile(&prof(2, &["a>b", "b>a"]));
        assert_eq!(x.coords(), &[r(1, 2), r(1, 2)]);
        let x = point_of_profile(&prof(2, &["a>b", "a>b", "a>b"]));
        assert_eq!(x.coords(), &[r(1, 1), r(0, 1)]);
        let space = RankingSpace::get(3).unwrap();
        let all: Vec<String> = space.rankings().iter().map(|r| r.to_string()).collect();
        let all: Vec<&str> = all.iter().map(String::as_str).collect();
        let x = point_of_profile(&prof(3, &all));
        assert!(x.coords().iter().all(|c| *c == r(1, 6)));
    }

    #[test]
    fn hamming_examples() {
        let a = prof(2, &["a>b", "a>b"]);
        assert_eq!(hamming(&a, &a).unwrap(), 0);
        assert_eq!(hamming(&a, &prof(2, &["a>b", "b>a"])).unwrap(), 1);
        let b = prof(2, &["a>b", "a>b", "a>b"]);
        assert_eq!(hamming(&b, &prof(2, &["b>a", "b>a", "b>a"])).unwrap(), 3);
        assert!(matches!(hamming(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn l1_examples() {
        let x = SimplexPoint::new(vec![r(1, 1), r(0, 1)]).unwrap();
        let y = SimplexPoint::new(vec![r(1, 2), r(1, 2)]).unwrap();
        let z = SimplexPoint::new(vec![r(0, 1), r(1, 1)]).unwrap();
        assert_eq!(l1(&x, &x).unwrap(), r(0, 1));
        assert_eq!(l1(&x, &y).unwrap(), r(1, 1));
        assert_eq!(l1(&x, &z).unwrap(), r(2, 1));
        let w = SimplexPoint::new(vec![r(1, 6); 6]).unwrap();
        assert!(l1(&x, &w).is_err());
    }

    #[test]
    fn align_profile_examples() {
        let sigma = prof(2, &["a>b", "a>b"]);
        let same = align_profile(&sigma, &point_of_profile(&sigma)).unwrap();
        assert_eq!(same, sigma);

        let half = SimplexPoint::new(vec![r(1, 2), r(1, 2)]).unwrap();
        let tau = align_profile(&sigma, &half).unwrap();
        assert_eq!(tau.votes(), &[1, 0]);
        assert_eq!(hamming(&sigma, &tau).unwrap(), 1);

        let sigma = prof(2, &["a>b", "a>b", "a>b", "b>a"]);
        let y = SimplexPoint::new(vec![r(1, 4), r(3, 4)]).unwrap();
        let tau = align_profile(&sigma, &y).unwrap();
        assert_eq!(point_of_profile(&tau), y);
        assert_eq!(hamming(&sigma, &tau).unwrap(), 2);
        assert_eq!(tau.votes(), &[1, 1, 0, 1]);
    }

    #[test]
    fn align_profile_rejects_points_outside_d_n() {
        let sigma = prof(2, &["a>b", "a>b"]);
        let y = SimplexPoint::new(vec![r(1, 3), r(2, 3)]).unwrap();
        assert!(matches!(align_profile(&sigma, &y), Err(Error::Precision(_))));
    }

    #[test]
    fn parse_and_display_round_trip() {
        let text = "# toy\n3: a>b>c\n\n2: c>b>a  # trailing\n1: a>b>c\n";
        let counts = CountProfile::parse(text).unwrap();
        assert_eq!(counts.counts(), &[4, 0, 0, 0, 0, 2]);
        assert_eq!(CountProfile::parse(&counts.to_string()).unwrap(), counts);
        assert!(matches!(
            CountProfile::parse("3: a>b\n1: a>b>c"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(CountProfile::parse("x: a>b").is_err());
        assert!(CountProfile::parse("# nothing").is_err());
    }

    #[test]
    fn vote_distribution_validation() {
        assert!(VoteDistribution::new(vec![0.7, 0.3], 0.3).is_ok());
        assert!(VoteDistribution::new(vec![0.7, 0.3], 0.4).is_err());
        assert!(VoteDistribution::new(vec![1.0, 0.0], 0.0).is_err());
        assert!(VoteDistribution::new(vec![0.6, 0.3], 0.3).is_err());
        assert!(VoteDistribution::new(vec![0.5, 0.5], 0.6).is_err());
        let u = VoteDistribution::uniform(3).unwrap();
        assert_eq!(u.len(), 6);
        assert_eq!(u.num_candidates().unwrap(), 3);
    }
}
