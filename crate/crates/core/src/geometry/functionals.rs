use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::limit::{enumerate_cells, Cell, LimitArrangement, DEFAULT_CELL_CAP};
use super::lp::{LinearProgram, LpOutcome};
use crate::error::Result;
use crate::profile::VoteDistribution;
use crate::ranking::Candidate;
use crate::rules::{HyperplaneRule, SignVector};

/// The four limit functionals at one point of `H₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Functionals {
    /// L1 cost of changing the winner.
    pub alpha: f64,
    /// L1 cost of reaching the hardest-to-reach winner.
    pub beta: f64,
    /// Coalition fraction needed to change the winner.
    pub phi: f64,
    /// Coalition fraction needed to reach every winner.
    pub psi: f64,
}

impl Functionals {
    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "alpha" => Some(self.alpha),
            "beta" => Some(self.beta),
            "phi" => Some(self.phi),
            "psi" => Some(self.psi),
            _ => None,
        }
    }
}

/// Cell decomposition of a limiting arrangement, ready for distance queries.
#[derive(Clone, Debug)]
pub struct LimitGeometry {
    arr: LimitArrangement,
    cells: Vec<Cell>,
    by_signs: HashMap<SignVector, usize>,
    num_candidates: usize,
}

impl LimitGeometry {
    pub fn new(hrule: &HyperplaneRule, p: &VoteDistribution) -> Result<Self> {
        Self::with_cap(hrule, p, DEFAULT_CELL_CAP)
    }

    pub fn with_cap(hrule: &HyperplaneRule, p: &VoteDistribution, cap: usize) -> Result<Self> {
        let arr = LimitArrangement::new(hrule, p)?;
        Self::from_arrangement(arr, cap)
    }

    pub fn from_arrangement(arr: LimitArrangement, cap: usize) -> Result<Self> {
        let cells = enumerate_cells(&arr, cap)?;
        let by_signs = cells.iter().enumerate().map(|(i, c)| (c.signs.clone(), i)).collect();
        let num_candidates = arr.rule().num_candidates();
        Ok(LimitGeometry {
            arr,
            cells,
            by_signs,
            num_candidates,
        })
    }

    pub fn arrangement(&self) -> &LimitArrangement {
        &self.arr
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Candidates that label at least one cell.
    pub fn labeled_candidates(&self) -> Vec<Candidate> {
        let mut seen = vec![false; self.num_candidates];
        self.cells.iter().for_each(|c| seen[c.label] = true);
        (0..self.num_candidates).filter(|&c| seen[c]).collect()
    }

    /// Limiting winner at `x`.
    pub fn label(&self, x: &[f64]) -> Candidate {
        let signs = self.arr.signs(x);
        if !signs.contains(&0) {
            if let Some(&i) = self.by_signs.get(&signs) {
                return self.cells[i].label;
            }
        }
        self.arr.label(x)
    }

    /// L1 distance from `x` to the closure of `cell` within `H₀`; `+∞` if unreachable.
    pub fn l1_dist_to_cell(&self, x: &[f64], cell: &Cell) -> f64 {
        let d = self.arr.dim();
        // Variables d⁺ and d⁻ with y = x + d⁺ − d⁻.
        let mut lp = LinearProgram::minimize(vec![1.0; 2 * d]);
        let total: f64 = x.iter().sum();
        lp.equal((0..2 * d).map(|i| if i < d { 1.0 } else { -1.0 }).collect(), -total);
        for (n, &s) in self.arr.normals().iter().zip(&cell.signs) {
            let s = s as f64;
            let row: Vec<f64> = n.iter().map(|v| s * v).chain(n.iter().map(|v| -s * v)).collect();
            let nx: f64 = n.iter().zip(x).map(|(a, b)| a * b).sum();
            lp.ge(row, -s * nx);
        }
        lp_value(lp.solve())
    }

    /// Smallest `γ ≥ 0` such that some `y` in the closure of `cell` has
    /// `y_π − x_π + γ·p_π ≥ 0` for every ranking; `+∞` if unreachable.
    pub fn gamma_to_cell(&self, x: &[f64], cell: &Cell) -> f64 {
        let d = self.arr.dim();
        let p = self.arr.p();
        // Variables e ≥ 0 and γ ≥ 0 with y = x + e − γ·p.
        let g = d;
        let mut obj = vec![0.0; d + 1];
        obj[g] = 1.0;
        let mut lp = LinearProgram::minimize(obj);
        let total: f64 = x.iter().sum();
        let mut sum = vec![1.0; d + 1];
        sum[g] = -p.iter().sum::<f64>();
        lp.equal(sum, -total);
        for (n, &s) in self.arr.normals().iter().zip(&cell.signs) {
            let s = s as f64;
            let mut row: Vec<f64> = n.iter().map(|v| s * v).collect();
            let np: f64 = n.iter().zip(p).map(|(a, b)| a * b).sum();
            row.push(-s * np);
            let nx: f64 = n.iter().zip(x).map(|(a, b)| a * b).sum();
            lp.ge(row, -s * nx);
        }
        lp_value(lp.solve())
    }

    /// All four functionals, sharing one LP pair per differently labeled cell.
    pub fn functionals(&self, x: &[f64]) -> Functionals {
        let own = self.label(x);
        let k = self.num_candidates;
        let mut dist = vec![f64::INFINITY; k];
        let mut gamma = vec![f64::INFINITY; k];
        dist[own] = 0.0;
        gamma[own] = 0.0;
        for cell in &self.cells {
            if cell.label == own {
                continue;
            }
            let a = cell.label;
            dist[a] = dist[a].min(self.l1_dist_to_cell(x, cell));
            gamma[a] = gamma[a].min(self.gamma_to_cell(x, cell));
        }
        let others = |v: &[f64]| {
            (0..k)
                .filter(|&c| c != own)
                .map(|c| v[c])
                .fold(f64::INFINITY, f64::min)
        };
        Functionals {
            alpha: others(&dist),
            beta: dist.iter().copied().fold(0.0, f64::max),
            phi: others(&gamma),
            psi: gamma.iter().copied().fold(0.0, f64::max),
        }
    }

    pub fn alpha(&self, x: &[f64]) -> f64 {
        self.functionals(x).alpha
    }

    pub fn beta(&self, x: &[f64]) -> f64 {
        self.functionals(x).beta
    }

    pub fn phi(&self, x: &[f64]) -> f64 {
        self.functionals(x).phi
    }

    pub fn psi(&self, x: &[f64]) -> f64 {
        self.functionals(x).psi
    }
}

fn lp_value(outcome: LpOutcome) -> f64 {
    match outcome {
        LpOutcome::Optimal { value, .. } => value.max(0.0),
        LpOutcome::Infeasible | LpOutcome::Unbounded => f64::INFINITY,
    }
}

/// Estimates of `α` and `φ` from the first label change along random rays.
///
/// Each ray only gives an upper bound, so the estimates are biased upwards;
/// meant for arrangements too large to enumerate.
#[derive(Clone, Debug)]
pub struct BisectionEstimator {
    pub directions: usize,
    pub seed: u64,
}

impl Default for BisectionEstimator {
    fn default() -> Self {
        BisectionEstimator {
            directions: 1000,
            seed: 0,
        }
    }
}

impl BisectionEstimator {
    /// Returns `(α, φ)` estimates at `x`; `+∞` when no ray changes the winner.
    pub fn estimate(&self, arr: &LimitArrangement, x: &[f64]) -> (f64, f64) {
        let d = arr.dim();
        let p = arr.p();
        let own = arr.label(x);
        let scale = x.iter().map(|v| v.abs()).sum::<f64>().max(1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut alpha = f64::INFINITY;
        let mut phi = f64::INFINITY;
        let at = |dir: &[f64], t: f64| -> Vec<f64> { x.iter().zip(dir).map(|(a, b)| a + t * b).collect() };
        for _ in 0..self.directions {
            let mut dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let mean = dir.iter().sum::<f64>() / d as f64;
            dir.iter_mut().for_each(|v| *v -= mean);
            let l1: f64 = dir.iter().map(|v| v.abs()).sum();
            dir.iter_mut().for_each(|v| *v /= l1);

            let mut lo = 0.0;
            let mut hi = scale * 1e-3;
            while arr.label(&at(&dir, hi)) == own {
                lo = hi;
                hi *= 2.0;
                if hi > 64.0 * scale {
                    break;
                }
            }
            if arr.label(&at(&dir, hi)) == own {
                continue;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if arr.label(&at(&dir, mid)) == own {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            alpha = alpha.min(hi);
            let gamma = dir
                .iter()
                .zip(p)
                .map(|(v, q)| -hi * v / q)
                .fold(0.0, f64::max);
            phi = phi.min(gamma);
        }
        (alpha, phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::VotingRule;

    fn geometry(rule: &str, m: usize) -> LimitGeometry {
        let h = HyperplaneRule::new(VotingRule::parse(rule, m).unwrap()).unwrap();
        LimitGeometry::new(&h, &VoteDistribution::uniform(m).unwrap()).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn majority_two_candidates() {
        let g = geometry("plurality", 2);
        let x = [0.5, -0.5];
        let b_cell = g.cells().iter().find(|c| c.label == 1).unwrap();
        let a_cell = g.cells().iter().find(|c| c.label == 0).unwrap();
        assert!(close(g.l1_dist_to_cell(&x, b_cell), 1.0));
        assert!(close(g.l1_dist_to_cell(&x, a_cell), 0.0));
        for t in [0.1, 1.0] {
            assert!(close(g.l1_dist_to_cell(&[t, -t], b_cell), 2.0 * t));
        }
        let f = g.functionals(&x);
        assert!(close(f.alpha, 1.0) && close(f.beta, 1.0));
        assert!(close(f.phi, 1.0) && close(f.psi, 1.0));
        assert!(close(g.gamma_to_cell(&x, b_cell), 1.0));
    }

    #[test]
    fn boundary_points_have_zero_alpha() {
        let g = geometry("plurality", 3);
        // a and b tied at the top.
        let x = [0.2, 0.1, 0.2, 0.1, -0.3, -0.3];
        let f = g.functionals(&x);
        assert!(close(f.alpha, 0.0));
        assert!(close(f.phi, 0.0));
        assert!(f.beta > 0.0);
    }

    #[test]
    fn bisection_matches_enumeration_on_small_arrangement() {
        let g = geometry("plurality", 2);
        let (alpha, phi) = BisectionEstimator::default().estimate(g.arrangement(), &[0.5, -0.5]);
        assert!((alpha - 1.0).abs() < 1e-6);
        assert!((phi - 1.0).abs() < 1e-6);
    }
}
