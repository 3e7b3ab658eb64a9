//! Cells of hyperplane arrangements and the linear programs measuring
//! distances to them.

mod finite;
mod functionals;
mod limit;
pub mod lp;

pub use finite::{blowup_membership_finite, SimplexArrangement, SimplexCell, RADIUS_TOLERANCE};
pub use functionals::{BisectionEstimator, Functionals, LimitGeometry};
pub use limit::{enumerate_cells, Cell, LimitArrangement, DEFAULT_CELL_CAP, MARGIN_TOLERANCE, MEAN_TOLERANCE};
pub use lp::{solve_lp, LinearProgram, LpOutcome, Relation};
