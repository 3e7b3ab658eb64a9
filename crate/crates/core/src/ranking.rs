//! Rankings of `m` candidates and the canonical (lexicographic) indexing of
//! the `m!` rankings.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest number of candidates for which a [`RankingSpace`] is built.
pub const MAX_CANDIDATES: usize = 7;

pub type Candidate = usize;

/// A total order of the candidates `0..m`; position 0 is the top choice.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ranking {
    order: Vec<u8>,
}

impl Ranking {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        if !(2..=MAX_CANDIDATES).contains(&m) {
            return Err(Error::validation(
                "ranking",
                format!("need 2..={MAX_CANDIDATES} candidates, got {m}"),
            ));
        }
        let mut seen = vec![false; m];
        for &c in &order {
            if c >= m || seen[c] {
                return Err(Error::validation(
                    "ranking",
                    format!("{order:?} is not a permutation of 0..{m}"),
                ));
            }
            seen[c] = true;
        }
        Ok(Ranking {
            order: order.into_iter().map(|c| c as u8).collect(),
        })
    }

    pub fn identity(m: usize) -> Result<Self> {
        Ranking::new((0..m).collect())
    }

    pub fn num_candidates(&self) -> usize {
        self.order.len()
    }

    pub fn candidate_at(&self, position: usize) -> Candidate {
        self.order[position] as usize
    }

    pub fn top(&self) -> Candidate {
        self.candidate_at(0)
    }

    pub fn order(&self) -> impl Iterator<Item = Candidate> + '_ {
        self.order.iter().map(|&c| c as usize)
    }

    pub fn position_of(&self, candidate: Candidate) -> usize {
        self.order
            .iter()
            .position(|&c| c as usize == candidate)
            .expect("candidate out of range")
    }

    pub fn prefers(&self, a: Candidate, b: Candidate) -> bool {
        self.position_of(a) < self.position_of(b)
    }

    /// Index of this ranking in the canonical lexicographic order.
    pub fn index(&self) -> usize {
        // Lehmer code.
        let m = self.order.len();
        let mut idx = 0;
        for i in 0..m {
            let smaller_after = self.order[i + 1..]
                .iter()
                .filter(|&&c| c < self.order[i])
                .count();
            idx = idx * (m - i) + smaller_after;
        }
        idx
    }

    /// Parses `a>b>c` style rankings; candidates are lowercase letters in index order.
    pub fn parse(text: &str) -> Result<Self> {
        let order = text
            .split('>')
            .map(|tok| candidate_from_name(tok.trim()))
            .collect::<Result<Vec<_>>>()?;
        Ranking::new(order)
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.order().enumerate() {
            if i > 0 {
                f.write_str(">")?;
            }
            write!(f, "{}", candidate_name(c))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ranking({self})")
    }
}

pub fn candidate_name(c: Candidate) -> char {
    (b'a' + c as u8) as char
}

pub fn candidate_from_name(name: &str) -> Result<Candidate> {
    let mut chars = name.chars();
    match (chars.next(), chars.next()) {
        (Some(ch), None) if ch.is_ascii_lowercase() => Ok((ch as u8 - b'a') as usize),
        _ => Err(Error::validation(
            "candidate",
            format!("expected a single lowercase letter, got {name:?}"),
        )),
    }
}

/// All `m!` rankings in canonical order plus position lookup tables.
#[derive(Debug)]
pub struct RankingSpace {
    m: usize,
    rankings: Vec<Ranking>,
    /// `positions[r * m + a]` is the position of candidate `a` in ranking `r`.
    positions: Vec<u8>,
}

impl RankingSpace {
    /// Shared, lazily built space for `m` candidates.
    pub fn get(m: usize) -> Result<&'static RankingSpace> {
        static SPACES: [OnceLock<RankingSpace>; MAX_CANDIDATES + 1] =
            [const { OnceLock::new() }; MAX_CANDIDATES + 1];
        if !(2..=MAX_CANDIDATES).contains(&m) {
            return Err(Error::validation(
                "m",
                format!("number of candidates must be in 2..={MAX_CANDIDATES}, got {m}"),
            ));
        }
        Ok(SPACES[m].get_or_init(|| RankingSpace::build(m)))
    }

    fn build(m: usize) -> Self {
        let mut rankings = Vec::new();
        let mut current: Vec<usize> = (0..m).collect();
        loop {
            rankings.push(Ranking::new(current.clone()).expect("valid permutation"));
            if !next_permutation(&mut current) {
                break;
            }
        }
        let mut positions = vec![0u8; rankings.len() * m];
        for (r, ranking) in rankings.iter().enumerate() {
            for (pos, c) in ranking.order().enumerate() {
                positions[r * m + c] = pos as u8;
            }
        }
        RankingSpace {
            m,
            rankings,
            positions,
        }
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    /// Number of rankings, `m!`.
    pub fn len(&self) -> usize {
        self.rankings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rankings.is_empty()
    }

    pub fn ranking(&self, index: usize) -> &Ranking {
        &self.rankings[index]
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    #[inline]
    pub fn position(&self, ranking: usize, candidate: Candidate) -> usize {
        self.positions[ranking * self.m + candidate] as usize
    }

    #[inline]
    pub fn candidate_at(&self, ranking: usize, position: usize) -> Candidate {
        self.rankings[ranking].candidate_at(position)
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Number of candidate pairs ranked in opposite order by `a` and `b`.
pub fn kendall_tau(a: &Ranking, b: &Ranking) -> Result<usize> {
    let m = a.num_candidates();
    if b.num_candidates() != m {
        return Err(Error::Dimension(format!(
            "rankings over {m} and {} candidates",
            b.num_candidates()
        )));
    }
    let pos_b: Vec<usize> = (0..m).map(|c| b.position_of(c)).collect();
    let mut disagreements = 0;
    for i in 0..m {
        for j in i + 1..m {
            // a ranks order[i] above order[j]
            if pos_b[a.candidate_at(i)] > pos_b[a.candidate_at(j)] {
                disagreements += 1;
            }
        }
    }
    Ok(disagreements)
}
