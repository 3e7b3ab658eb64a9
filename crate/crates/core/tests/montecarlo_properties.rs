use coalition::montecarlo::*;
use coalition::oracle::{self, Baseline};
use coalition::profile::VoteDistribution;
use coalition::rules::VotingRule;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Discrete, Normal, Binomial};

fn majority() -> VotingRule {
    VotingRule::parse("plurality", 2).unwrap()
}

fn phi(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// `P(|2X − n| ≤ 2k)` for `X ~ Bin(n, 1/2)`.
fn binomial_qbar(n: u64, k: u64) -> f64 {
    let b = Binomial::new(0.5, n).unwrap();
    (0..=n)
        .filter(|&x| (2 * x).abs_diff(n) <= 2 * k)
        .map(|x| b.pmf(x))
        .sum()
}

#[test]
fn gaussian_covariance_matches_sigma() {
    let p = VoteDistribution::with_min_delta(vec![0.1, 0.2, 0.05, 0.25, 0.15, 0.25]).unwrap();
    let model = GaussianLimitModel::new(&p).unwrap();
    let sigma = covariance(&p);
    let n = 100_000u64;
    let mut sum = vec![vec![0.0; 6]; 6];
    let mut sum_sq = vec![vec![0.0; 6]; 6];
    for i in 0..n {
        let x = model.sample(11, i);
        for a in 0..6 {
            for b in 0..6 {
                let v = x[a] * x[b];
                sum[a][b] += v;
                sum_sq[a][b] += v * v;
            }
        }
    }
    for a in 0..6 {
        for b in 0..6 {
            let mean = sum[a][b] / n as f64;
            let var = sum_sq[a][b] / n as f64 - mean * mean;
            let se = (var / n as f64).sqrt();
            assert!((mean - sigma[(a, b)]).abs() <= 4.0 * se, "entry ({a},{b}): {mean} vs {}", sigma[(a, b)]);
        }
    }
}

#[test]
fn profile_frequencies_chi_square() {
    let p = VoteDistribution::with_min_delta(vec![0.1, 0.2, 0.05, 0.25, 0.15, 0.25]).unwrap();
    let n = 100_000usize;
    let counts = sample_profile(&p, n, 5, 0).counts();
    let chi2: f64 = counts
        .counts()
        .iter()
        .zip(p.p())
        .map(|(&o, &q)| {
            let e = q * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    // 99.99th percentile of chi-square with 5 degrees of freedom.
    assert!(chi2 < 25.74, "chi2 = {chi2}");
}

#[test]
fn closed_form_limit_for_majority() {
    let p = VoteDistribution::uniform(2).unwrap();
    for c in [0.1, 0.5, 1.0] {
        let q = estimate_qbar_limit(&majority(), &p, c, 20_000, 7).unwrap();
        assert!(q.agrees_with(2.0 * phi(2.0 * c) - 1.0, 3.0), "qbar at {c}: {q}");
        let r = estimate_rbar_limit(&majority(), &p, c, 20_000, 7).unwrap();
        assert!(r.agrees_with(2.0 * phi(c) - 1.0, 3.0), "rbar at {c}: {r}");
    }
}

#[test]
fn finite_majority_matches_binomial() {
    let p = VoteDistribution::uniform(2).unwrap();
    let q = estimate_qbar_n(&majority(), &p, 101, 0.5, 20_000, 3).unwrap();
    let exact = binomial_qbar(101, coalition_size(0.5, 101));
    assert!(q.agrees_with(exact, 3.0), "{q} vs {exact}");
}

#[test]
fn finite_estimates_approach_the_limit() {
    let p = VoteDistribution::uniform(2).unwrap();
    let c = 0.5;
    let samples = 20_000;
    let limit = estimate_qbar_limit(&majority(), &p, c, samples, 1).unwrap();
    let gaps: Vec<(f64, f64)> = [100u64, 1_000, 10_000]
        .iter()
        .map(|&n| {
            let q = estimate_qbar_n(&majority(), &p, n, c, samples, 2).unwrap();
            ((q.value - limit.value).abs(), (q.stderr.powi(2) + limit.stderr.powi(2)).sqrt())
        })
        .collect();
    let (last, se) = gaps[2];
    assert!(last <= 3.0 * se, "{gaps:?}");
    assert!(gaps[2].0 <= gaps[0].0 + 3.0 * se, "{gaps:?}");
}

#[test]
fn estimates_do_not_depend_on_workers() {
    let setup = FiniteSetup {
        rule: VotingRule::parse("borda", 3).unwrap(),
        p: VoteDistribution::uniform(3).unwrap(),
        n: 40,
        samples: 300,
        seed: 9,
        workers: Some(1),
        baseline: Baseline::Truthful,
    };
    let grid = [0.0, 0.2, 0.4];
    let one = finite_curve(&setup, &grid).unwrap();
    let three = finite_curve(&FiniteSetup { workers: Some(3), ..setup.clone() }, &grid).unwrap();
    assert_eq!(one, three);

    let limit = LimitSetup::new(&setup.rule, &setup.p).unwrap();
    let a = limit_curve(&limit, &grid, 300, 4, Some(1)).unwrap();
    let b = limit_curve(&limit, &grid, 300, 4, Some(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn orderings_hold_sample_by_sample() {
    let rule = VotingRule::parse("plurality", 3).unwrap();
    let p = VoteDistribution::uniform(3).unwrap();
    for i in 0..200 {
        let profile = sample_profile(&p, 30, 21, i);
        let counts = profile.counts();
        for k in 1..=3u64 {
            let (head, tail) = profile.split_counts(k as usize);
            let qbar = oracle::manip_some(&rule, &counts, k).unwrap();
            let qlow = oracle::elect_all_some(&rule, &counts, k).unwrap();
            let rbar = oracle::manip_specific(&rule, &tail, &head, Baseline::Truthful).unwrap();
            let rlow = oracle::elect_all_specific(&rule, &tail, &head).unwrap();
            assert!(!qlow || qbar, "q ≤ qbar at sample {i}, k={k}");
            assert!(!rlow || rbar, "r ≤ rbar at sample {i}, k={k}");
            assert!(!rlow || qlow, "r ≤ q at sample {i}, k={k}");
            assert!(!rbar || qbar, "rbar ≤ qbar at sample {i}, k={k}");
        }
    }
}

#[test]
fn curve_columns_are_ordered_and_monotone() {
    let rule = VotingRule::parse("plurality", 3).unwrap();
    let p = VoteDistribution::uniform(3).unwrap();
    let setup = LimitSetup::new(&rule, &p).unwrap();
    let grid = range_grid(0.0, 1.5, 0.25).unwrap();
    let rows = limit_curve(&setup, &grid, 2_000, 8, None).unwrap();
    assert_eq!(rows[0].qbar.value, 0.0);
    for w in rows.windows(2) {
        assert!(w[0].qbar.value <= w[1].qbar.value);
        assert!(w[0].qlow.value <= w[1].qlow.value);
        assert!(w[0].rbar.value <= w[1].rbar.value);
        assert!(w[0].rlow.value <= w[1].rlow.value);
    }
    for r in &rows {
        assert!(r.qlow.value <= r.qbar.value && r.rlow.value <= r.rbar.value);
        assert!(r.rlow.value <= r.qlow.value && r.rbar.value <= r.qbar.value);
    }
}

#[test]
fn limit_curves_reach_one_for_large_c() {
    for m in [2usize, 3] {
        let rule = VotingRule::parse("plurality", m).unwrap();
        let p = VoteDistribution::uniform(m).unwrap();
        let len: usize = (1..=m).product();
        let c = 5.0 * (len as f64).sqrt() / 2.0;
        let setup = LimitSetup::new(&rule, &p).unwrap();
        let r = limit_curve(&setup, &[c], 2_000, 5, None).unwrap()[0];
        for e in [r.qbar, r.qlow, r.rbar, r.rlow] {
            assert!(e.value >= 0.99, "m={m}: {e}");
        }
    }
}

#[test]
fn slope_bound_for_plurality() {
    let rule = VotingRule::parse("plurality", 3).unwrap();
    let p = VoteDistribution::uniform(3).unwrap();
    let setup = LimitSetup::new(&rule, &p).unwrap();
    let grid = [0.01, 0.05, 0.1];
    let rows = limit_curve(&setup, &grid, 20_000, 12, None).unwrap();
    let m_count = 3;
    for r in rows {
        let slope = claim_bound(m_count, 2.0, p.delta());
        assert!(r.qbar.value / r.c <= slope + 3.0 * r.qbar.stderr / r.c, "{r:?}");
    }
}

#[test]
fn exact_winner_shares_are_symmetric_for_uniform_p() {
    let p = VoteDistribution::uniform(3).unwrap();
    let shares = winner_shares(&VotingRule::parse("borda", 3).unwrap(), &p, 7).unwrap();
    assert!((shares.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(shares.iter().all(|&s| s > 0.0));
    // Lexicographic tie-breaking favours a.
    assert!(shares[0] >= shares[1] && shares[1] >= shares[2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn spectral_bound_holds(raw in prop::collection::vec(0.0f64..1.0, 6), delta_frac in 0.05f64..1.0, m3 in any::<bool>()) {
        let len = if m3 { 6 } else { 2 };
        let delta = delta_frac / len as f64;
        let rest: f64 = raw[..len].iter().sum::<f64>().max(1e-9);
        let slack = 1.0 - delta * len as f64;
        let p: Vec<f64> = raw[..len].iter().map(|r| delta + slack * r / rest).collect();
        let total: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|q| q / total).collect();
        let delta = delta.min(p.iter().cloned().fold(f64::INFINITY, f64::min));
        let dist = VoteDistribution::new(p, delta).unwrap();
        let check = min_eigenvalue_check(&GaussianLimitModel::new(&dist).unwrap());
        prop_assert!(check.passed(), "{check:?}");
    }

    #[test]
    fn limit_samples_lie_in_h0(seed in any::<u64>(), index in any::<u64>()) {
        let p = VoteDistribution::uniform(3).unwrap();
        let model = GaussianLimitModel::new(&p).unwrap();
        let x = sample_gaussian(&model, seed, index);
        prop_assert!(x.iter().sum::<f64>().abs() <= 1e-9);
    }
}
