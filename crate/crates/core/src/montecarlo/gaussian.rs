use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::rng::stream_rng;
use crate::error::{Error, Result};
use crate::profile::VoteDistribution;

/// `Σ = diag(p) − p·pᵀ`, the covariance of a single vote's indicator vector.
pub fn covariance(p: &VoteDistribution) -> DMatrix<f64> {
    let v = DVector::from_column_slice(p.p());
    DMatrix::from_diagonal(&v) - &v * v.transpose()
}

/// Orthonormal basis of the zero-sum subspace (Helmert contrasts), `len × (len − 1)`.
pub fn zero_sum_basis(len: usize) -> DMatrix<f64> {
    DMatrix::from_fn(len, len - 1, |i, j| {
        let k = (j + 1) as f64;
        let norm = (k * (k + 1.0)).sqrt();
        if i <= j {
            1.0 / norm
        } else if i == j + 1 {
            -k / norm
        } else {
            0.0
        }
    })
}

/// The centered Gaussian limit of `√n·(x(σ) − p)`, supported on `H₀`.
#[derive(Clone, Debug)]
pub struct GaussianLimitModel {
    p: VoteDistribution,
    sigma: DMatrix<f64>,
    /// `len × (len − 1)` with `factor·factorᵀ = Σ`.
    factor: DMatrix<f64>,
}

impl GaussianLimitModel {
    pub fn new(p: &VoteDistribution) -> Result<Self> {
        let sigma = covariance(p);
        let len = sigma.nrows();
        let eig = SymmetricEigen::new(sigma.clone());
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        // The smallest eigenvalue belongs to the all-ones direction and is dropped.
        let kept = &order[..len - 1];
        if let Some(&bad) = kept.iter().find(|&&i| eig.eigenvalues[i] <= 0.0) {
            return Err(Error::Numerical(format!(
                "covariance is not positive definite on H0 (eigenvalue {})",
                eig.eigenvalues[bad]
            )));
        }
        let factor = DMatrix::from_fn(len, len - 1, |i, j| {
            let e = kept[j];
            eig.eigenvectors[(i, e)] * eig.eigenvalues[e].sqrt()
        });
        Ok(GaussianLimitModel {
            p: p.clone(),
            sigma,
            factor,
        })
    }

    pub fn distribution(&self) -> &VoteDistribution {
        &self.p
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    /// Sample `index` of the stream `seed`, a point of `H₀`.
    pub fn sample(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = stream_rng(seed, index);
        let z = DVector::from_fn(self.dim() - 1, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut x: Vec<f64> = (&self.factor * z).iter().copied().collect();
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        x.iter_mut().for_each(|v| *v -= mean);
        x
    }

    /// Smallest eigenvalue of `Σ` restricted to `H₀`, i.e. its second-smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        let q = zero_sum_basis(self.dim());
        let restricted = q.transpose() * &self.sigma * &q;
        SymmetricEigen::new(restricted).eigenvalues.min()
    }
}

/// Result of comparing the restricted spectrum with the distribution's `δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralCheck {
    pub lambda: f64,
    pub delta: f64,
}

impl SpectralCheck {
    pub fn passed(&self) -> bool {
        self.lambda >= self.delta - 1e-9
    }
}

pub fn min_eigenvalue_check(model: &GaussianLimitModel) -> SpectralCheck {
    SpectralCheck {
        lambda: model.min_eigenvalue(),
        delta: model.distribution().delta(),
    }
}

/// Convenience wrapper drawing one limit sample for `p`.
pub fn sample_gaussian(model: &GaussianLimitModel, seed: u64, index: u64) -> Vec<f64> {
    model.sample(seed, index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_two_candidates() {
        let p = VoteDistribution::uniform(2).unwrap();
        let s = covariance(&p);
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]));
        let model = GaussianLimitModel::new(&p).unwrap();
        let check = min_eigenvalue_check(&model);
        assert!((check.lambda - 0.5).abs() < 1e-12 && check.passed());
    }

    #[test]
    fn uniform_spectrum() {
        let p = VoteDistribution::uniform(3).unwrap();
        let eig = SymmetricEigen::new(covariance(&p)).eigenvalues;
        let mut ev: Vec<f64> = eig.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!(ev[0].abs() < 1e-12);
        assert!(ev[1..].iter().all(|&v| (v - 1.0 / 6.0).abs() < 1e-12));
        let model = GaussianLimitModel::new(&p).unwrap();
        assert!((model.min_eigenvalue() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn skewed_two_candidates() {
        let p = VoteDistribution::new(vec![0.7, 0.3], 0.3).unwrap();
        let model = GaussianLimitModel::new(&p).unwrap();
        assert!((model.min_eigenvalue() - 0.42).abs() < 1e-12);
    }

    #[test]
    fn factor_reproduces_covariance() {
        let p = VoteDistribution::with_min_delta(vec![0.1, 0.2, 0.05, 0.25, 0.15, 0.25]).unwrap();
        let model = GaussianLimitModel::new(&p).unwrap();
        let rebuilt = model.factor() * model.factor().transpose();
        assert!((rebuilt - model.sigma()).abs().max() < 1e-9);
        let row_sums = model.sigma() * DVector::from_element(6, 1.0);
        assert!(row_sums.abs().max() < 1e-15);
        let x = model.sample(3, 17);
        assert!(x.iter().sum::<f64>().abs() < 1e-9);
        assert_eq!(x, model.sample(3, 17));
    }

    #[test]
    fn basis_is_orthonormal_and_zero_sum() {
        let q = zero_sum_basis(6);
        let gram = q.transpose() * &q;
        assert!((gram - DMatrix::identity(5, 5)).abs().max() < 1e-12);
        let sums = q.transpose() * DVector::from_element(6, 1.0);
        assert!(sums.abs().max() < 1e-12);
    }
}
