use coalition::oracle::{
    bribery_min, elect_all_some, elect_all_specific, manip_some, manip_specific, margin_of_victory,
    verify_sandwich, verify_triple_agreement, winner_census, Baseline,
};
use coalition::profile::{count_vectors, CountProfile, Profile};
use coalition::rules::VotingRule;

const SANDWICH_RULES: [&str; 5] = ["plurality", "borda", "veto", "copeland", "bucklin"];

#[test]
fn sandwich_three_candidates() {
    for name in SANDWICH_RULES {
        let rule = VotingRule::parse(name, 3).unwrap();
        let report = verify_sandwich(&rule, 6, &[1, 2]).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checked, 2 * 923);
    }
}

#[test]
fn sandwich_two_candidates_has_nonvacuous_lower_side() {
    let rule = VotingRule::parse("plurality", 2).unwrap();
    let report = verify_sandwich(&rule, 8, &[1, 2, 3]).unwrap();
    assert!(report.passed(), "{report}");
}

#[test]
fn triple_agreement_report() {
    for name in ["irv", "kemeny", "nanson"] {
        let report = verify_triple_agreement(&VotingRule::parse(name, 3).unwrap(), 5).unwrap();
        assert!(report.passed(), "{report}");
    }
}

/// Brute force over voter sequences: replace any `k` voters by arbitrary rankings.
fn brute_manip_some(rule: &VotingRule, votes: &[usize], k: usize, len: usize) -> (bool, Vec<bool>) {
    let n = votes.len();
    let base = rule.winner_counts(&Profile::new(rule.num_candidates(), votes.to_vec()).unwrap().counts().into_counts());
    let mut reached = vec![false; rule.num_candidates()];
    let mut changed = false;
    let total = len.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let tau: Vec<usize> = (0..n)
            .map(|_| {
                let v = c % len;
                c /= len;
                v
            })
            .collect();
        let diff = tau.iter().zip(votes).filter(|(a, b)| a != b).count();
        if diff > k {
            continue;
        }
        let w = rule.winner_counts(&Profile::new(rule.num_candidates(), tau).unwrap().counts().into_counts());
        reached[w] = true;
        changed |= w != base;
    }
    (changed, reached)
}

#[test]
fn count_vector_search_matches_voter_sequences() {
    for name in ["plurality", "borda", "irv", "copeland"] {
        let rule = VotingRule::parse(name, 3).unwrap();
        for counts in count_vectors(6, 4) {
            let profile = CountProfile::new(3, counts).unwrap();
            let votes = profile.to_profile().votes().to_vec();
            for k in 0..=2u64 {
                let (some, reached) = brute_manip_some(&rule, &votes, k as usize, 6);
                assert_eq!(manip_some(&rule, &profile, k).unwrap(), some);
                let all = k > 0 && reached.iter().all(|&r| r);
                assert_eq!(elect_all_some(&rule, &profile, k).unwrap(), all);
            }
        }
    }
}

#[test]
fn predicates_are_monotone_and_ordered() {
    let rule = VotingRule::parse("borda", 3).unwrap();
    for counts in count_vectors(6, 5) {
        let profile = CountProfile::new(3, counts).unwrap();
        let votes = profile.to_profile().votes().to_vec();
        let mut prev = [false; 4];
        for k in 0..=5u64 {
            let (head, tail) = Profile::new(3, votes.clone()).unwrap().split_counts(k as usize);
            let now = [
                manip_some(&rule, &profile, k).unwrap(),
                elect_all_some(&rule, &profile, k).unwrap(),
                manip_specific(&rule, &tail, &head, Baseline::Truthful).unwrap(),
                elect_all_specific(&rule, &tail, &head).unwrap(),
            ];
            for i in 0..4 {
                assert!(!prev[i] || now[i], "predicate {i} not monotone at k={k}");
            }
            assert!(!now[1] || now[0]);
            assert!(!now[2] || now[0]);
            assert!(!now[3] || now[1]);
            assert!(!now[3] || now[2]);
            prev = now;
        }
        let mov = margin_of_victory(&rule, &profile).unwrap();
        assert!(mov <= 5);
        assert!(manip_some(&rule, &profile, mov).unwrap());
        assert!(!manip_some(&rule, &profile, mov - 1).unwrap());
        let w = rule.evaluate_direct(&profile).unwrap();
        assert_eq!(bribery_min(&rule, &profile, w).unwrap(), 0);
    }
}

#[test]
fn elect_all_with_every_vote_follows_the_census() {
    for name in ["plurality", "veto", "coombs"] {
        let rule = VotingRule::parse(name, 3).unwrap();
        for n in 1..=4u64 {
            let census = winner_census(&rule, n).unwrap();
            let everyone = census.iter().all(|&c| c);
            for counts in count_vectors(6, n) {
                let p = CountProfile::new(3, counts).unwrap();
                assert_eq!(elect_all_some(&rule, &p, n).unwrap(), everyone, "{name} n={n}");
            }
        }
    }
}

#[test]
fn bribery_sentinel_when_target_cannot_win() {
    // One veto ballot leaves two candidates tied at 1 and c is last in the tie order.
    let rule = VotingRule::parse("veto", 3).unwrap();
    let p = CountProfile::parse("1: c>a>b").unwrap();
    assert_eq!(bribery_min(&rule, &p, 2).unwrap(), 2);
    assert_eq!(bribery_min(&rule, &p, 1).unwrap(), 1);
    assert!(!winner_census(&rule, 1).unwrap()[2]);
}
