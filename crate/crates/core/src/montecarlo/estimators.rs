use rayon::prelude::*;

use super::estimate::Estimate;
use super::gaussian::GaussianLimitModel;
use super::rng::ProfileSampler;
use crate::error::{Error, Result};
use crate::geometry::{Functionals, LimitGeometry};
use crate::oracle::{self, Baseline};
use crate::profile::{CountProfile, VoteDistribution};
use crate::rules::{HyperplaneRule, VotingRule};

/// Estimates of the four manipulation probabilities at one coalition constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManipulationEstimates {
    pub c: f64,
    /// Some coalition of size `c√n` can change the winner.
    pub qbar: Estimate,
    /// Some coalition can make each candidate win.
    pub qlow: Estimate,
    /// The first `c√n` voters can change the winner.
    pub rbar: Estimate,
    /// The first `c√n` voters can make each candidate win.
    pub rlow: Estimate,
}

const QBAR: u8 = 1;
const QLOW: u8 = 2;
const RBAR: u8 = 4;
const RLOW: u8 = 8;

fn tally(grid: &[f64], outcomes: &[Vec<u8>], samples: u64, seed: u64) -> Vec<ManipulationEstimates> {
    grid.iter()
        .enumerate()
        .map(|(i, &c)| {
            let count = |bit: u8| outcomes.iter().filter(|o| o[i] & bit != 0).count() as u64;
            ManipulationEstimates {
                c,
                qbar: Estimate::bernoulli(count(QBAR), samples, seed),
                qlow: Estimate::bernoulli(count(QLOW), samples, seed),
                rbar: Estimate::bernoulli(count(RBAR), samples, seed),
                rlow: Estimate::bernoulli(count(RLOW), samples, seed),
            }
        })
        .collect()
}

/// Runs `f` on a pool of `workers` threads, or on rayon's global pool when `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::validation("c_grid", "empty grid"));
    }
    if grid.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::validation("c_grid", "values must be finite and nonnegative"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("c_grid", "values must be strictly increasing"));
    }
    Ok(())
}

/// Coalition size `⌊c√n⌋`.
pub fn coalition_size(c: f64, n: u64) -> u64 {
    (c * (n as f64).sqrt() + 1e-9).floor() as u64
}

/// Settings shared by the finite-`n` estimators.
#[derive(Clone, Debug)]
pub struct FiniteSetup {
    pub rule: VotingRule,
    pub p: VoteDistribution,
    pub n: u64,
    pub samples: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub baseline: Baseline,
}

/// Finite-`n` estimates over a grid of `c`, sharing sampled profiles across the grid.
pub fn finite_curve(setup: &FiniteSetup, grid: &[f64]) -> Result<Vec<ManipulationEstimates>> {
    check_grid(grid)?;
    if setup.n == 0 || setup.samples == 0 {
        return Err(Error::validation("n/samples", "both must be at least 1"));
    }
    let rule = &setup.rule;
    let ks: Vec<u64> = grid.iter().map(|&c| coalition_size(c, setup.n).min(setup.n)).collect();
    let sampler = ProfileSampler::new(&setup.p);
    let monotone = setup.baseline == Baseline::Truthful;
    let outcomes: Vec<Vec<u8>> = with_workers(setup.workers, || {
        (0..setup.samples)
            .into_par_iter()
            .map(|i| -> Result<Vec<u8>> {
                let profile = sampler.sample(setup.n as usize, setup.seed, i);
                let counts = profile.counts();
                let mut out = Vec::with_capacity(ks.len());
                let mut known = 0u8;
                for &k in &ks {
                    let mut bits = if monotone { known } else { 0 };
                    if k > 0 {
                        let (head, tail) = profile.split_counts(k as usize);
                        if bits & QBAR == 0 && oracle::manip_some(rule, &counts, k)? {
                            bits |= QBAR;
                        }
                        if bits & QLOW == 0 && oracle::elect_all_some(rule, &counts, k)? {
                            bits |= QLOW;
                        }
                        if bits & RBAR == 0 && oracle::manip_specific(rule, &tail, &head, setup.baseline)? {
                            bits |= RBAR;
                        }
                        if bits & RLOW == 0 && oracle::elect_all_specific(rule, &tail, &head)? {
                            bits |= RLOW;
                        }
                    }
                    known = bits;
                    out.push(bits);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(tally(grid, &outcomes, setup.samples, setup.seed))
}

/// Everything needed to sample the Gaussian limit and evaluate its functionals.
#[derive(Clone, Debug)]
pub struct LimitSetup {
    pub geometry: LimitGeometry,
    pub model: GaussianLimitModel,
}

impl LimitSetup {
    pub fn new(rule: &VotingRule, p: &VoteDistribution) -> Result<Self> {
        let hrule = HyperplaneRule::new(rule.clone())?;
        Ok(LimitSetup {
            geometry: LimitGeometry::new(&hrule, p)?,
            model: GaussianLimitModel::new(p)?,
        })
    }

    /// Functionals at each of `samples` Gaussian draws.
    pub fn sample_functionals(&self, samples: u64, seed: u64, workers: Option<usize>) -> Result<Vec<Functionals>> {
        with_workers(workers, || {
            (0..samples)
                .into_par_iter()
                .map(|i| self.geometry.functionals(&self.model.sample(seed, i)))
                .collect()
        })
    }
}

/// Limit estimates over a grid of `c`, sharing Gaussian samples across the grid.
pub fn limit_curve(
    setup: &LimitSetup,
    grid: &[f64],
    samples: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<ManipulationEstimates>> {
    check_grid(grid)?;
    if samples == 0 {
        return Err(Error::validation("samples", "must be at least 1"));
    }
    let values = setup.sample_functionals(samples, seed, workers)?;
    let outcomes: Vec<Vec<u8>> = values
        .iter()
        .map(|f| {
            grid.iter()
                .map(|&c| {
                    let mut bits = 0;
                    if f.alpha <= 2.0 * c {
                        bits |= QBAR;
                    }
                    if f.beta <= 2.0 * c {
                        bits |= QLOW;
                    }
                    if f.phi <= c {
                        bits |= RBAR;
                    }
                    if f.psi <= c {
                        bits |= RLOW;
                    }
                    bits
                })
                .collect()
        })
        .collect();
    Ok(tally(grid, &outcomes, samples, seed))
}

fn finite_at(rule: &VotingRule, p: &VoteDistribution, n: u64, c: f64, samples: u64, seed: u64) -> Result<ManipulationEstimates> {
    let setup = FiniteSetup {
        rule: rule.clone(),
        p: p.clone(),
        n,
        samples,
        seed,
        workers: None,
        baseline: Baseline::Truthful,
    };
    Ok(finite_curve(&setup, &[c])?[0])
}

fn limit_at(rule: &VotingRule, p: &VoteDistribution, c: f64, samples: u64, seed: u64) -> Result<ManipulationEstimates> {
    let setup = LimitSetup::new(rule, p)?;
    Ok(limit_curve(&setup, &[c], samples, seed, None)?[0])
}

pub fn estimate_qbar_n(rule: &VotingRule, p: &VoteDistribution, n: u64, c: f64, samples: u64, seed: u64) -> Result<Estimate> {
    Ok(finite_at(rule, p, n, c, samples, seed)?.qbar)
}

pub fn estimate_q_n(rule: &VotingRule, p: &VoteDistribution, n: u64, c: f64, samples: u64, seed: u64) -> Result<Estimate> {
    Ok(finite_at(rule, p, n, c, samples, seed)?.qlow)
}

pub fn estimate_rbar_n(rule: &VotingRule, p: &VoteDistribution, n: u64, c: f64, samples: u64, seed: u64) -> Result<Estimate> {
    Ok(finite_at(rule, p, n, c, samples, seed)?.rbar)
}

pub fn estimate_r_n(rule: &VotingRule, p: &VoteDistribution, n: u64, c: f64, samples: u64, seed: u64) -> Result<Estimate> {
    Ok(finite_at(rule, p, n, c, samples, seed)?.rlow)
}

pub fn estimate_qbar_limit(rule: &VotingRule, p: &VoteDistribution, c: f64, samples: u64, seed: u64) -> Result<Estimate> {
    Ok(limit_at(rule, p, c, samples, seed)?.qbar)
}

pub fn estimate_q_limit(rule: &VotingRule, p: &VoteDistribution, c: f64, samples: u64, seed: u64) -> Result<Estimate> {
    Ok(limit_at(rule, p, c, samples, seed)?.qlow)
}

pub fn estimate_rbar_limit(rule: &VotingRule, p: &VoteDistribution, c: f64, samples: u64, seed: u64) -> Result<Estimate> {
    Ok(limit_at(rule, p, c, samples, seed)?.rbar)
}

pub fn estimate_r_limit(rule: &VotingRule, p: &VoteDistribution, c: f64, samples: u64, seed: u64) -> Result<Estimate> {
    Ok(limit_at(rule, p, c, samples, seed)?.rlow)
}

/// Exact probability that a multinomial profile of `n` voters has each count
/// vector, for every count vector (same order as [`crate::profile::count_vectors`]).
pub fn multinomial_pmf(p: &VoteDistribution, n: u64) -> Vec<(Vec<u64>, f64)> {
    let ln_fact = |k: u64| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    let ln_n = ln_fact(n);
    crate::profile::count_vectors(p.len(), n)
        .into_iter()
        .map(|y| {
            let ln = y
                .iter()
                .zip(p.p())
                .map(|(&k, &q)| k as f64 * q.ln() - ln_fact(k))
                .sum::<f64>()
                + ln_n;
            (y, ln.exp())
        })
        .collect()
}

/// Winner distribution of `rule` at `n` i.i.d. voters, computed exactly.
pub fn winner_shares(rule: &VotingRule, p: &VoteDistribution, n: u64) -> Result<Vec<f64>> {
    let len = p.len();
    let size = oracle::binomial(n as u128 + len as u128 - 1, len as u128 - 1);
    if size > oracle::ENUMERATION_LIMIT {
        return Err(Error::Guard {
            guard: "oracle_enumeration",
            size,
            limit: oracle::ENUMERATION_LIMIT,
            hint: "use a smaller n for the winner census",
        });
    }
    let mut shares = vec![0.0; rule.num_candidates()];
    for (y, prob) in multinomial_pmf(p, n) {
        let profile = CountProfile::new(rule.num_candidates(), y)?;
        shares[rule.evaluate_direct(&profile)?] += prob;
    }
    Ok(shares)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coalition_is_never_manipulating() {
        let rule = VotingRule::parse("plurality", 2).unwrap();
        let p = VoteDistribution::uniform(2).unwrap();
        let e = finite_at(&rule, &p, 51, 0.0, 200, 1).unwrap();
        assert_eq!([e.qbar.value, e.qlow.value, e.rbar.value, e.rlow.value], [0.0; 4]);
        let e = limit_at(&rule, &p, 0.0, 200, 1).unwrap();
        assert_eq!([e.qbar.value, e.qlow.value, e.rbar.value, e.rlow.value], [0.0; 4]);
    }

    #[test]
    fn coalition_sizes() {
        assert_eq!(coalition_size(0.5, 101), 5);
        assert_eq!(coalition_size(2.0, 400), 40);
        assert_eq!(coalition_size(0.0, 400), 0);
    }

    #[test]
    fn multinomial_sums_to_one() {
        let p = VoteDistribution::with_min_delta(vec![0.1, 0.2, 0.05, 0.25, 0.15, 0.25]).unwrap();
        let total: f64 = multinomial_pmf(&p, 4).iter().map(|(_, q)| q).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert!(check_grid(&[0.1, 0.1]).is_err());
        assert!(check_grid(&[]).is_err());
        assert!(check_grid(&[-0.1]).is_err());
        assert!(check_grid(&[0.0, 0.5]).is_ok());
    }
}
