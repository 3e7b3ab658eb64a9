use coalition::profile::*;
use coalition::ranking::{kendall_tau, RankingSpace};
use num::{ToPrimitive, Zero};
use proptest::prelude::*;

fn profile_strategy(m: usize, max_n: usize) -> impl Strategy<Value = Profile> {
    let len: usize = (1..=m).product();
    prop::collection::vec(0..len, 1..=max_n).prop_map(move |votes| Profile::new(m, votes).unwrap())
}

fn pair_strategy() -> impl Strategy<Value = (Profile, Profile)> {
    (1usize..20).prop_flat_map(|n| {
        (
            prop::collection::vec(0usize..6, n),
            prop::collection::vec(0usize..6, n),
        )
            .prop_map(|(a, b)| (Profile::new(3, a).unwrap(), Profile::new(3, b).unwrap()))
    })
}

proptest! {
    #[test]
    fn l1_is_at_most_two_over_n_times_hamming((a, b) in pair_strategy()) {
        let n = a.num_voters() as i64;
        let d = l1(&point_of_profile(&a), &point_of_profile(&b)).unwrap();
        let h = hamming(&a, &b).unwrap() as i64;
        prop_assert!(d <= Rational::new(2 * h, n));
    }

    #[test]
    fn alignment_is_tight((a, b) in pair_strategy()) {
        let y = point_of_profile(&b);
        let tau = align_profile(&a, &y).unwrap();
        prop_assert_eq!(tau.counts(), b.counts());
        let n = a.num_voters() as i64;
        let d = l1(&point_of_profile(&a), &y).unwrap();
        prop_assert_eq!(d * Rational::new(n, 2), Rational::from_integer(hamming(&a, &tau).unwrap() as i64));
    }

    #[test]
    fn points_lie_in_the_simplex(sigma in profile_strategy(3, 30)) {
        let x = point_of_profile(&sigma);
        let total = x.coords().iter().fold(Rational::zero(), |acc, c| acc + c);
        prop_assert_eq!(total, Rational::from_integer(1));
        prop_assert!(x.coords().iter().all(|c| *c >= Rational::zero()));
        let n = sigma.num_voters() as u64;
        prop_assert_eq!(x.counts_for(n).unwrap(), sigma.counts().into_counts());
        let f: f64 = x.to_f64().iter().sum();
        prop_assert!((f - 1.0).abs() < 1e-12);
        prop_assert!(x.coords().iter().all(|c| c.to_f64().is_some()));
    }

    #[test]
    fn count_profiles_round_trip_through_text(counts in prop::collection::vec(0u64..5, 6)) {
        prop_assume!(counts.iter().sum::<u64>() > 0);
        let cp = CountProfile::new(3, counts).unwrap();
        prop_assert_eq!(CountProfile::parse(&cp.to_string()).unwrap(), cp);
    }

    #[test]
    fn kendall_tau_is_a_metric(a in 0usize..24, b in 0usize..24, c in 0usize..24) {
        let space = RankingSpace::get(4).unwrap();
        let (ra, rb, rc) = (space.ranking(a), space.ranking(b), space.ranking(c));
        let d = |x, y| kendall_tau(x, y).unwrap();
        prop_assert_eq!(d(ra, rb), d(rb, ra));
        prop_assert_eq!(d(ra, rb) == 0, a == b);
        prop_assert!(d(ra, rc) <= d(ra, rb) + d(rb, rc));
    }
}

#[test]
fn count_vectors_enumerate_d_n() {
    let all = count_vectors(6, 4);
    assert_eq!(all.len(), 126);
    assert!(all.iter().all(|v| v.iter().sum::<u64>() == 4));
    let mut sorted = all.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), all.len());
}
