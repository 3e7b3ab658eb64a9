use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gaussian-measure bound `√(2/π)·M·c/√δ` on the `c`-blowup of `M` hyperplanes.
pub fn claim_bound(m_hyperplanes: usize, c: f64, delta: f64) -> f64 {
    (2.0 / PI).sqrt() * m_hyperplanes as f64 * c / delta.sqrt()
}

/// Coalition constant `(4/δ)·ln(2m!/η)·[√ln(2m/η) + √ln(2/ε)]` above which a
/// coalition of `c√n` voters can elect anyone with probability at least `1 − η`.
pub fn theorem1_constant(eta: f64, delta: f64, epsilon: f64, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::validation("m", format!("need at least 2 candidates, got {m}")));
    }
    let mf: f64 = (1..=m).map(|i| i as f64).product();
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::validation("eta", format!("must lie in (0, 1), got {eta}")));
    }
    if !(delta > 0.0 && delta <= 1.0 / mf + 1e-12) {
        return Err(Error::validation("delta", format!("must lie in (0, 1/m!], got {delta}")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0 / m as f64 + 1e-12) {
        return Err(Error::validation("epsilon", format!("must lie in (0, 1/m], got {epsilon}")));
    }
    let m = m as f64;
    Ok(4.0 / delta
        * (2.0 * mf / eta).ln()
        * ((2.0 * m / eta).ln().sqrt() + (2.0 / epsilon).ln().sqrt()))
}
