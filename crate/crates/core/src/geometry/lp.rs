//! Dense two-phase simplex method with Bland's pivoting rule.

/// Feasibility and optimality tolerance.
pub const LP_TOLERANCE: f64 = 1e-9;

const PIVOT_EPS: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize c·x` subject to linear constraints and `x ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn minimize(objective: Vec<f64>) -> Self {
        LinearProgram {
            num_vars: objective.len(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn le(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Le, rhs)
    }

    pub fn ge(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Ge, rhs)
    }

    pub fn equal(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add(coeffs, Relation::Eq, rhs)
    }

    pub fn solve(&self) -> LpOutcome {
        solve_lp(self)
    }
}

struct Tableau {
    /// `rows × (cols + 1)`, last column is the right-hand side.
    a: Vec<f64>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize, obj: &mut [f64]) {
        let w = self.cols + 1;
        let inv = 1.0 / self.a[pr * w + pc];
        for v in &mut self.a[pr * w..(pr + 1) * w] {
            *v *= inv;
        }
        let (before, rest) = self.a.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let f = row[pc];
            if f != 0.0 {
                for (v, &p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[pc] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        eliminate(obj);
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations on `obj` (reduced costs, last entry = −value),
    /// considering only columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, obj: &mut [f64], allowed: usize) -> bool {
        loop {
            let Some(pc) = (0..allowed).find(|&c| obj[c] < -LP_TOLERANCE) else {
                return true;
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.rows {
                let coef = self.at(r, pc);
                if coef > PIVOT_EPS {
                    let ratio = self.rhs(r) / coef;
                    let better = match best {
                        None => true,
                        Some((br, _, bvar)) => {
                            ratio < br - PIVOT_EPS || (ratio <= br + PIVOT_EPS && self.basis[r] < bvar)
                        }
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            match best {
                Some((_, pr, _)) => self.pivot(pr, pc, obj),
                None => return false,
            }
        }
    }
}

/// Solves `lp`; optimal solutions are feasible and optimal to within [`LP_TOLERANCE`].
pub fn solve_lp(lp: &LinearProgram) -> LpOutcome {
    let n = lp.num_vars;
    let rows = lp.constraints.len();
    let slack_count = lp
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let art_start = n + slack_count;
    // Every row without a usable slack gets an artificial variable.
    let mut needs_art = Vec::with_capacity(rows);
    let mut normalized = Vec::with_capacity(rows);
    for c in &lp.constraints {
        let flip = c.rhs < 0.0;
        let relation = match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        needs_art.push(relation != Relation::Le);
        normalized.push((flip, relation));
    }
    let art_count = needs_art.iter().filter(|&&x| x).count();
    let cols = art_start + art_count;
    let w = cols + 1;
    let mut t = Tableau {
        a: vec![0.0; rows * w],
        rows,
        cols,
        basis: vec![0; rows],
    };
    let mut slack = n;
    let mut art = art_start;
    for (r, c) in lp.constraints.iter().enumerate() {
        let (flip, relation) = normalized[r];
        let s = if flip { -1.0 } else { 1.0 };
        let row = &mut t.a[r * w..(r + 1) * w];
        for (dst, &v) in row.iter_mut().zip(&c.coeffs) {
            *dst = s * v;
        }
        row[cols] = s * c.rhs;
        match relation {
            Relation::Le => {
                row[slack] = 1.0;
                t.basis[r] = slack;
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -1.0;
                slack += 1;
                row[art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
            Relation::Eq => {
                row[art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
        }
    }

    if art_count > 0 {
        let mut obj = vec![0.0; w];
        obj[art_start..cols].iter_mut().for_each(|v| *v = 1.0);
        for r in 0..rows {
            if t.basis[r] >= art_start {
                for c in 0..w {
                    obj[c] -= t.at(r, c);
                }
            }
        }
        t.optimize(&mut obj, cols);
        if -obj[cols] > LP_TOLERANCE * (1.0 + rhs_scale(lp)) {
            return LpOutcome::Infeasible;
        }
        // Drive remaining (zero-level) artificials out of the basis.
        let mut r = 0;
        while r < t.rows {
            if t.basis[r] >= art_start {
                match (0..art_start).find(|&c| t.at(r, c).abs() > 1e-9) {
                    Some(c) => t.pivot(r, c, &mut obj),
                    None => {
                        // Redundant row.
                        t.a.drain(r * w..(r + 1) * w);
                        t.basis.remove(r);
                        t.rows -= 1;
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut obj = vec![0.0; w];
    obj[..n].copy_from_slice(&lp.objective);
    for r in 0..t.rows {
        let b = t.basis[r];
        let f = obj[b];
        if f != 0.0 {
            for c in 0..w {
                obj[c] -= f * t.at(r, c);
            }
        }
    }
    if !t.optimize(&mut obj, art_start) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for r in 0..t.rows {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpOutcome::Optimal { value, x }
}

fn rhs_scale(lp: &LinearProgram) -> f64 {
    lp.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max)
}
