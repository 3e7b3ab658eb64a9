use coalition::geometry::*;
use coalition::montecarlo::GaussianLimitModel;
use coalition::profile::{CountProfile, SimplexPoint, VoteDistribution};
use coalition::rules::{HyperplaneRule, VotingRule};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn plurality_geometry() -> (LimitGeometry, GaussianLimitModel) {
    let p = VoteDistribution::uniform(3).unwrap();
    let h = HyperplaneRule::new(VotingRule::parse("plurality", 3).unwrap()).unwrap();
    (LimitGeometry::new(&h, &p).unwrap(), GaussianLimitModel::new(&p).unwrap())
}

fn tops(x: &[f64]) -> [f64; 3] {
    [x[0] + x[1], x[2] + x[3], x[4] + x[5]]
}

/// Cheapest L1 move making `b` a (weak) plurality winner, by scanning how much
/// mass is moved to `b` from the first other candidate.
fn plurality_l1_scan(t: [f64; 3], b: usize) -> f64 {
    let others: Vec<usize> = (0..3).filter(|&i| i != b).collect();
    let (i1, i2) = (others[0], others[1]);
    let h = 1e-5;
    let hi = (t[i1] - t[b]).max(0.0) + 1e-3;
    let mut best = f64::INFINITY;
    let mut t1 = 0.0;
    while t1 <= hi {
        let t2 = (t[i1] - t[b] - 2.0 * t1).max((t[i2] - t[b] - t1) / 2.0).max(0.0);
        let t2 = if t[b] + t1 + t2 >= t[i1] - t1 - 1e-12 { t2 } else { f64::INFINITY };
        best = best.min(2.0 * (t1 + t2));
        t1 += h;
    }
    best
}

/// Smallest `γ` such that adding `γ` to `b`'s top share and removing `γ·p` makes `b` win.
fn plurality_gamma(t: [f64; 3], b: usize) -> f64 {
    (0..3).filter(|&i| i != b).map(|i| t[i] - t[b]).fold(0.0, f64::max)
}

#[test]
fn plurality_functionals_match_independent_search() {
    let (geom, model) = plurality_geometry();
    for i in 0..100 {
        let x = model.sample(31, i);
        let t = tops(&x);
        let own = (0..3).max_by(|&a, &b| t[a].total_cmp(&t[b])).unwrap();
        assert_eq!(geom.label(&x), own);
        let dists: Vec<f64> = (0..3).map(|b| if b == own { 0.0 } else { plurality_l1_scan(t, b) }).collect();
        let gammas: Vec<f64> = (0..3).map(|b| plurality_gamma(t, b)).collect();
        let f = geom.functionals(&x);
        let others = |v: &[f64]| (0..3).filter(|&c| c != own).map(|c| v[c]).fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        assert!((f.alpha - others(&dists)).abs() < 1e-3, "alpha {} vs {:?}", f.alpha, dists);
        assert!((f.beta - max(&dists)).abs() < 1e-3, "beta {} vs {:?}", f.beta, dists);
        assert!((f.phi - others(&gammas)).abs() < 1e-6, "phi {} vs {:?}", f.phi, gammas);
        assert!((f.psi - max(&gammas)).abs() < 1e-6, "psi {} vs {:?}", f.psi, gammas);
    }
}

#[test]
fn homogeneity_and_caps_on_the_sphere() {
    let (geom, model) = plurality_geometry();
    let bound_ab = 6f64.sqrt();
    let bound_psi = 2.0 * 6.0;
    for i in 0..1000 {
        let x = model.sample(77, i);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: Vec<f64> = x.iter().map(|v| v / norm).collect();
        let f = geom.functionals(&u);
        assert!(f.alpha <= f.beta + 1e-9 && f.phi <= f.psi + 1e-9, "{f:?}");
        assert!(f.alpha <= 2.0 * f.phi + 1e-9 && f.beta <= 2.0 * f.psi + 1e-9, "{f:?}");
        assert!(f.beta <= bound_ab + 1e-9 && f.psi <= bound_psi, "{f:?}");
        if i % 10 == 0 {
            for lambda in [0.5, 2.0, 10.0] {
                let v: Vec<f64> = u.iter().map(|a| a * lambda).collect();
                let g = geom.functionals(&v);
                for name in ["alpha", "beta", "phi", "psi"] {
                    let (a, b) = (g.get(name).unwrap(), lambda * f.get(name).unwrap());
                    assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-12), "{name} at λ={lambda}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn lp_distance_never_exceeds_ray_search() {
    let p = VoteDistribution::uniform(3).unwrap();
    let model = GaussianLimitModel::new(&p).unwrap();
    for rule in ["borda", "veto", "copeland"] {
        let h = HyperplaneRule::new(VotingRule::parse(rule, 3).unwrap()).unwrap();
        let geom = LimitGeometry::new(&h, &p).unwrap();
        let rays = BisectionEstimator { directions: 300, seed: 4 };
        for i in 0..20 {
            let x = model.sample(5, i);
            let f = geom.functionals(&x);
            let (alpha, phi) = rays.estimate(geom.arrangement(), &x);
            assert!(f.alpha <= alpha + 1e-9, "{rule}: {} > {alpha}", f.alpha);
            assert!(f.phi <= phi + 1e-9, "{rule}: {} > {phi}", f.phi);
            assert!(alpha <= f.alpha * 1.5 + 1e-6, "{rule}: ray search far off ({alpha} vs {})", f.alpha);
        }
    }
}

#[test]
fn random_points_in_other_cells_are_no_closer() {
    let (geom, model) = plurality_geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20 {
        let x = model.sample(9, i);
        let alpha = geom.alpha(&x);
        let own = geom.label(&x);
        for _ in 0..2000 {
            let mut y: Vec<f64> = x.iter().map(|v| v + rng.random_range(-1.0..1.0)).collect();
            let mean = y.iter().sum::<f64>() / 6.0;
            y.iter_mut().for_each(|v| *v -= mean);
            if geom.label(&y) != own {
                let d: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
                assert!(alpha <= d + 1e-9);
            }
        }
    }
}

#[test]
fn finite_blowups_grow_with_the_radius() {
    let h = HyperplaneRule::new(VotingRule::parse("borda", 3).unwrap()).unwrap();
    let arr = SimplexArrangement::new(&h, DEFAULT_CELL_CAP).unwrap();
    for counts in coalition::profile::count_vectors(6, 5) {
        let x = SimplexPoint::from_counts(&counts).unwrap();
        let alpha = arr.alpha(&x);
        let mut inside = false;
        for step in 0..=20 {
            let r = step as f64 * 0.1;
            let now = arr.blowup_membership(&x, r);
            assert!(!inside || now, "{counts:?} left the blowup at radius {r}");
            assert_eq!(now, alpha <= r + RADIUS_TOLERANCE);
            inside = now;
        }
        assert!(!arr.blowup_membership(&x, -0.1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blowup_contains_points_whose_winner_moves(counts in prop::collection::vec(0u64..4, 6)) {
        prop_assume!(counts.iter().sum::<u64>() > 0);
        let rule = VotingRule::parse("plurality", 3).unwrap();
        let h = HyperplaneRule::new(rule.clone()).unwrap();
        let arr = SimplexArrangement::new(&h, DEFAULT_CELL_CAP).unwrap();
        let x = SimplexPoint::from_counts(&counts).unwrap();
        let n = counts.iter().sum::<u64>();
        let own = rule.evaluate_direct(&CountProfile::new(3, counts.clone()).unwrap()).unwrap();
        // Moving one voter is an L1 step of 2/n.
        for from in 0..6 {
            for to in 0..6 {
                if from == to || counts[from] == 0 {
                    continue;
                }
                let mut y = counts.clone();
                y[from] -= 1;
                y[to] += 1;
                if rule.winner_counts(&y) != own {
                    prop_assert!(arr.alpha(&x) <= 2.0 / n as f64 + RADIUS_TOLERANCE);
                }
            }
        }
    }
}
