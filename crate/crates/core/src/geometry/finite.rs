use super::lp::{LinearProgram, LpOutcome};
use super::limit::MARGIN_TOLERANCE;
use crate::error::{Error, Result};
use crate::profile::SimplexPoint;
use crate::rules::{HyperplaneRule, SignVector};
use crate::ranking::Candidate;

/// Slack allowed when comparing a distance with a blowup radius.
pub const RADIUS_TOLERANCE: f64 = 1e-9;

/// An open region of the arrangement inside the simplex itself.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexCell {
    pub signs: SignVector,
    pub witness: Vec<f64>,
    pub label: Candidate,
}

/// The regions a hyperplane rule cuts out of the simplex, for blowup queries
/// at finite `n`.
#[derive(Clone, Debug)]
pub struct SimplexArrangement<'a> {
    hrule: &'a HyperplaneRule,
    normals: Vec<Vec<f64>>,
    cells: Vec<SimplexCell>,
}

impl<'a> SimplexArrangement<'a> {
    pub fn new(hrule: &'a HyperplaneRule, cap: usize) -> Result<Self> {
        let l = hrule.num_hyperplanes();
        if l > cap {
            return Err(Error::Guard {
                guard: "cell_enumeration_cap",
                size: l as u128,
                limit: cap as u128,
                hint: "too many hyperplanes to enumerate simplex regions",
            });
        }
        let dim: usize = (1..=hrule.rule().num_candidates()).product();
        let normals: Vec<Vec<f64>> = hrule.hyperplanes().iter().map(|h| h.unit_normal()).collect();
        let mut partial: Vec<(SignVector, Vec<f64>)> = vec![(Vec::new(), vec![1.0 / dim as f64; dim])];
        for j in 0..l {
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (signs, _) in partial {
                for s in [1i8, -1] {
                    let mut ext = signs.clone();
                    ext.push(s);
                    if let Some(y) = simplex_margin(&normals[..=j], &ext, dim) {
                        next.push((ext, y));
                    }
                }
            }
            partial = next;
        }
        let cells = partial
            .into_iter()
            .map(|(signs, witness)| {
                let label = hrule
                    .cached_label(&signs)
                    .unwrap_or_else(|| hrule.rule().winner(&witness));
                SimplexCell {
                    signs,
                    witness,
                    label,
                }
            })
            .collect();
        Ok(SimplexArrangement {
            hrule,
            normals,
            cells,
        })
    }

    pub fn cells(&self) -> &[SimplexCell] {
        &self.cells
    }

    /// L1 distance from `x` to the closure of `cell`, staying inside the simplex.
    pub fn l1_dist_to_cell(&self, x: &[f64], cell: &SimplexCell) -> f64 {
        let d = x.len();
        let mut lp = LinearProgram::minimize(vec![1.0; 2 * d]);
        lp.equal((0..2 * d).map(|i| if i < d { 1.0 } else { -1.0 }).collect(), 0.0);
        for (i, &xi) in x.iter().enumerate() {
            let mut row = vec![0.0; 2 * d];
            row[i] = 1.0;
            row[d + i] = -1.0;
            lp.ge(row, -xi);
        }
        for (n, &s) in self.normals.iter().zip(&cell.signs) {
            let s = s as f64;
            let row: Vec<f64> = n.iter().map(|v| s * v).chain(n.iter().map(|v| -s * v)).collect();
            let nx: f64 = n.iter().zip(x).map(|(a, b)| a * b).sum();
            lp.ge(row, -s * nx);
        }
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => value.max(0.0),
            _ => f64::INFINITY,
        }
    }

    /// L1 distance from `x` to the nearest region whose label differs from the
    /// winner at `x`; `+∞` for a constant rule.
    pub fn alpha(&self, x: &SimplexPoint) -> f64 {
        let own = self.hrule.rule().winner(&x.integer_weights());
        let xf = x.to_f64();
        self.cells
            .iter()
            .filter(|c| c.label != own)
            .map(|c| self.l1_dist_to_cell(&xf, c))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `x` lies within L1 distance `radius` of the winner's boundary.
    pub fn blowup_membership(&self, x: &SimplexPoint, radius: f64) -> bool {
        radius >= 0.0 && self.alpha(x) <= radius + RADIUS_TOLERANCE
    }
}

/// Maximizes `t` with `s_j·n_j·y ≥ t`, `y ≥ 0`, `Σy = 1`; returns the interior point.
fn simplex_margin(normals: &[Vec<f64>], signs: &[i8], dim: usize) -> Option<Vec<f64>> {
    let t = dim;
    let mut obj = vec![0.0; dim + 1];
    obj[t] = -1.0;
    let mut lp = LinearProgram::minimize(obj);
    let mut sum = vec![1.0; dim + 1];
    sum[t] = 0.0;
    lp.equal(sum, 1.0);
    let mut cap = vec![0.0; dim + 1];
    cap[t] = 1.0;
    lp.le(cap, 1.0);
    for (n, &s) in normals.iter().zip(signs) {
        let s = s as f64;
        let mut row: Vec<f64> = n.iter().map(|v| s * v).collect();
        row.push(-1.0);
        lp.ge(row, 0.0);
    }
    match lp.solve() {
        LpOutcome::Optimal { x, .. } if x[t] > MARGIN_TOLERANCE => Some(x[..dim].to_vec()),
        _ => None,
    }
}

/// One-shot blowup test; build a [`SimplexArrangement`] to answer many queries.
pub fn blowup_membership_finite(hrule: &HyperplaneRule, x: &SimplexPoint, radius: f64) -> Result<bool> {
    let arr = SimplexArrangement::new(hrule, super::DEFAULT_CELL_CAP)?;
    Ok(arr.blowup_membership(x, radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Rational;
    use crate::rules::VotingRule;

    fn point(coords: &[(i64, i64)]) -> SimplexPoint {
        SimplexPoint::new(coords.iter().map(|&(a, b)| Rational::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn majority_blowups() {
        let h = HyperplaneRule::new(VotingRule::parse("plurality", 2).unwrap()).unwrap();
        let x = point(&[(4, 5), (1, 5)]);
        assert!(!blowup_membership_finite(&h, &x, 0.5).unwrap());
        assert!(blowup_membership_finite(&h, &x, 0.6).unwrap());
        assert!(blowup_membership_finite(&h, &point(&[(1, 2), (1, 2)]), 0.0).unwrap());
        let arr = SimplexArrangement::new(&h, 14).unwrap();
        assert!((arr.alpha(&x) - 0.6).abs() < 1e-9);
    }

    #[test]
    fn simplex_cells_of_plurality() {
        let h = HyperplaneRule::new(VotingRule::parse("plurality", 3).unwrap()).unwrap();
        let arr = SimplexArrangement::new(&h, 14).unwrap();
        assert_eq!(arr.cells().len(), 6);
    }
}
