use std::fmt;

/// A Monte Carlo proportion with its normal-approximation uncertainty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn bernoulli(successes: u64, samples: u64, seed: u64) -> Self {
        assert!(samples > 0, "an estimate needs at least one sample");
        let value = successes as f64 / samples as f64;
        let stderr = (value * (1.0 - value) / samples as f64).sqrt();
        Estimate {
            value,
            stderr,
            ci95: (value - 1.96 * stderr, value + 1.96 * stderr),
            samples,
            seed,
        }
    }

    /// Whether `target` is within `z` standard errors of the estimate.
    pub fn agrees_with(&self, target: f64, z: f64) -> bool {
        (self.value - target).abs() <= z * self.stderr
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.4} ± {:.4} (95% CI [{:.4}, {:.4}], {} samples, seed {})",
            self.value, self.stderr, self.ci95.0, self.ci95.1, self.samples, self.seed
        )
    }
}
