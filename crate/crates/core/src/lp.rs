//! Phase-1 simplex for feasibility of `A x = b, x >= 0`.
//!
//! Dense tableau, Bland's rule (lowest-index entering column, lowest-index
//! basic variable on ratio ties), so the method terminates and its output is
//! a deterministic function of the input. Intended for exact scalars; with
//! floats the zero tests become meaningless near degeneracy.

use crate::scalar::Scalar;

/// Equality-form feasibility problem. Rows of `a` all have `num_vars` entries.
#[derive(Clone, Debug)]
pub struct FeasibilityProblem<T> {
    num_vars: usize,
    rows: Vec<(Vec<T>, T)>,
}

impl<T: Scalar> FeasibilityProblem<T> {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds `sum_k coeffs[k] x_k = rhs`.
    pub fn add_row(&mut self, coeffs: Vec<T>, rhs: T) {
        assert_eq!(coeffs.len(), self.num_vars, "row width must match the variable count");
        self.rows.push((coeffs, rhs));
    }

    /// Adds a row from sparse `(index, coefficient)` entries.
    pub fn add_sparse_row(&mut self, entries: &[(usize, T)], rhs: T) {
        let mut coeffs = vec![T::zero(); self.num_vars];
        for (k, c) in entries {
            coeffs[*k] = coeffs[*k].clone() + c.clone();
        }
        self.add_row(coeffs, rhs);
    }

    /// A vertex of the feasible set, or `None` when it is empty.
    pub fn solve(&self) -> Option<Vec<T>> {
        Tableau::phase_one(self).solve()
    }
}

/// Rows `m`, columns: structural `0..n`, artificial `n..n+m`, then rhs.
struct Tableau<T> {
    n: usize,
    m: usize,
    cells: Vec<Vec<T>>,
    /// Reduced costs of the phase-1 objective `min sum(artificials)`, with
    /// the negated objective value in the last slot.
    cost: Vec<T>,
    basis: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn phase_one(problem: &FeasibilityProblem<T>) -> Self {
        let n = problem.num_vars;
        let m = problem.rows.len();
        let width = n + m + 1;
        let mut cells = Vec::with_capacity(m);
        for (i, (coeffs, rhs)) in problem.rows.iter().enumerate() {
            let flip = rhs.is_negative();
            let mut row = Vec::with_capacity(width);
            for c in coeffs {
                row.push(if flip { -c.clone() } else { c.clone() });
            }
            for k in 0..m {
                row.push(if k == i { T::one() } else { T::zero() });
            }
            row.push(if flip { -rhs.clone() } else { rhs.clone() });
            cells.push(row);
        }
        // Artificials start basic, so their reduced costs are zero and the
        // structural ones are minus the column sums.
        let mut cost = vec![T::zero(); width];
        for row in &cells {
            for k in 0..n {
                cost[k] = cost[k].clone() - row[k].clone();
            }
            cost[width - 1] = cost[width - 1].clone() - row[width - 1].clone();
        }
        Self {
            n,
            m,
            cells,
            cost,
            basis: (n..n + m).collect(),
        }
    }

    fn solve(mut self) -> Option<Vec<T>> {
        let rhs = self.n + self.m;
        while let Some(col) = (0..rhs).find(|&k| self.cost[k].is_negative()) {
            let mut pick: Option<(usize, T)> = None;
            for i in 0..self.m {
                let a = &self.cells[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.cells[i][rhs].clone() / a.clone();
                let better = match &pick {
                    None => true,
                    Some((best, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*best]),
                };
                if better {
                    pick = Some((i, ratio));
                }
            }
            // Phase 1 is bounded below by zero, so some row always qualifies.
            let (row, _) = pick.expect("phase-one objective is bounded");
            self.pivot(row, col);
        }
        if !self.cost[rhs].is_zero() {
            return None;
        }
        let mut x = vec![T::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.cells[i][rhs].clone();
            }
        }
        Some(x)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.cells[row][col].clone();
        if !pivot.is_one() {
            for v in self.cells[row].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / pivot.clone();
                }
            }
        }
        let pivot_row = self.cells[row].clone();
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&k| !pivot_row[k].is_zero()).collect();
        let eliminate = |target: &mut Vec<T>| {
            let factor = target[col].clone();
            if factor.is_zero() {
                return;
            }
            for &k in &nonzero {
                target[k] = target[k].clone() - factor.clone() * pivot_row[k].clone();
            }
        };
        for (i, r) in self.cells.iter_mut().enumerate() {
            if i != row {
                eliminate(r);
            }
        }
        eliminate(&mut self.cost);
        self.basis[row] = col;
    }
}
