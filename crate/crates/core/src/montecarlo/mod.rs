//! Monte Carlo estimation of manipulation probabilities, at finite `n` and in
//! the Gaussian limit.

mod bounds;
mod config;
mod curve;
mod estimate;
mod estimators;
mod gaussian;
mod report;
mod rng;

pub use bounds::{claim_bound, theorem1_constant};
pub use config::{range_grid, ExperimentConfig, Mode};
pub use curve::{curve, format_g, CurveTable, CSV_HEADER};
pub use estimate::Estimate;
pub use estimators::{
    coalition_size, estimate_q_limit, estimate_q_n, estimate_qbar_limit, estimate_qbar_n, estimate_r_limit,
    estimate_r_n, estimate_rbar_limit, estimate_rbar_n, finite_curve, limit_curve, multinomial_pmf,
    winner_shares, with_workers, FiniteSetup, LimitSetup, ManipulationEstimates,
};
pub use gaussian::{covariance, min_eigenvalue_check, sample_gaussian, zero_sum_basis, GaussianLimitModel, SpectralCheck};
pub use report::{prepare_report, winner_audit, ExperimentReport, WinnerAudit, AUDIT_ENUMERATION, AUDIT_MAX_N};
pub use rng::{sample_profile, stream_rng, ProfileSampler};
