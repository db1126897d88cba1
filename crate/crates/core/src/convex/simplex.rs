//! Dense two-phase simplex for small standard-form linear programs.
//!
//! Solves `min cᵀy  s.t.  B y = rhs,  y ≥ 0` with Bland's anti-cycling rule.
//! The row count is expected to be tiny (the ambient dimension of a convexity
//! query); the column count is the number of support points or sampled
//! directions.  Infeasibility and unboundedness come with checkable
//! certificates, which downstream polar-duality code relies on.

use nalgebra::{DMatrix, DVector};

use crate::config::Tolerances;
use crate::{Error, Result};

const MAX_ROWS: usize = 64;
const MAX_COLS: usize = 200_000;

/// `min cᵀy  s.t.  B y = rhs,  y ≥ 0`.
#[derive(Debug, Clone)]
pub struct StandardForm {
    /// Constraint columns, one per variable (`k × m`).
    pub columns: DMatrix<f64>,
    /// Cost per variable (`m`).
    pub costs: DVector<f64>,
    /// Right-hand side (`k`).
    pub rhs: DVector<f64>,
}

/// Solver outcome.  Every variant carries enough data to verify it:
/// optimality via the multiplier vector (dual feasibility + matching
/// objective), infeasibility via a Farkas vector, unboundedness via a
/// feasible ray of negative cost.
#[derive(Debug, Clone)]
pub enum LpSolution {
    Optimal {
        value: f64,
        /// Optimal variable values (`m`).
        primal: DVector<f64>,
        /// Constraint multipliers `π` with `πᵀB ≤ cᵀ` and `πᵀ rhs = value`.
        multipliers: DVector<f64>,
    },
    /// No feasible point: `farkas` satisfies `farkasᵀ B ≤ 0` and
    /// `farkasᵀ rhs > 0`.
    Infeasible { farkas: DVector<f64> },
    /// Feasible but the cost decreases without bound along `ray ≥ 0` with
    /// `B ray = 0` and `cᵀ ray < 0`.
    Unbounded { ray: DVector<f64> },
}

struct Tableau {
    /// `k × (m + k + 1)`: original columns, artificial columns, rhs.
    t: DMatrix<f64>,
    basis: Vec<usize>,
    m: usize,
    k: usize,
    pivots_left: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[(i, self.m + self.k)]
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        if self.pivots_left == 0 {
            return Err(Error::PivotLimit {
                max_pivots: pivot_cap(self.m, self.k),
            });
        }
        self.pivots_left -= 1;
        let piv = self.t[(row, col)];
        let ncols = self.t.ncols();
        for j in 0..ncols {
            self.t[(row, j)] /= piv;
        }
        for i in 0..self.t.nrows() {
            if i == row {
                continue;
            }
            let f = self.t[(i, col)];
            if f == 0.0 {
                continue;
            }
            for j in 0..ncols {
                self.t[(i, j)] -= f * self.t[(row, j)];
            }
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Runs simplex with Bland's rule on the given per-column costs.
    /// Columns listed in `blocked` may not enter.  Returns the entering
    /// column of an unbounded ray, if one is found.
    fn run(
        &mut self,
        costs: &[f64],
        blocked_from: usize,
        tol: &Tolerances,
    ) -> Result<Option<usize>> {
        loop {
            // multiplier-free reduced costs straight from the tableau
            let mut entering = None;
            for j in 0..blocked_from {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = costs[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    r -= costs[b] * self.t[(i, j)];
                }
                if r < -tol.lp_feasibility {
                    entering = Some(j);
                    break; // Bland: smallest eligible index
                }
            }
            let Some(enter) = entering else {
                return Ok(None);
            };
            let mut leave: Option<usize> = None;
            let mut best = f64::INFINITY;
            for i in 0..self.t.nrows() {
                let a = self.t[(i, enter)];
                if a > tol.lp_pivot {
                    let ratio = self.rhs(i) / a;
                    let better = ratio < best - tol.lp_pivot
                        || (ratio < best + tol.lp_pivot
                            && leave.is_some_and(|l| self.basis[i] < self.basis[l]));
                    if better {
                        best = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(row) = leave else {
                return Ok(Some(enter)); // unbounded in this column
            };
            self.pivot(row, enter)?;
        }
    }
}

fn pivot_cap(m: usize, k: usize) -> usize {
    10_000 + 50 * (m + k)
}

/// Solves the standard-form program.  See [`LpSolution`] for the certificate
/// semantics of each outcome.
pub fn solve_standard_form(lp: &StandardForm) -> Result<LpSolution> {
    let tol = Tolerances::shared();
    let k = lp.columns.nrows();
    let m = lp.columns.ncols();
    if k > MAX_ROWS || m > MAX_COLS {
        return Err(Error::LpTooLarge {
            vars: m,
            constraints: k,
            max_vars: MAX_COLS,
            max_constraints: MAX_ROWS,
        });
    }
    if lp.costs.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: lp.costs.len(),
        });
    }
    if lp.rhs.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: lp.rhs.len(),
        });
    }
    for (index, &value) in lp
        .columns
        .iter()
        .chain(lp.costs.iter())
        .chain(lp.rhs.iter())
        .enumerate()
    {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
    }

    // flip rows so the right-hand side is nonnegative
    let flips: Vec<f64> = (0..k)
        .map(|i| if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let mut t = DMatrix::zeros(k, m + k + 1);
    for i in 0..k {
        for j in 0..m {
            t[(i, j)] = flips[i] * lp.columns[(i, j)];
        }
        t[(i, m + i)] = 1.0;
        t[(i, m + k)] = flips[i] * lp.rhs[i];
    }
    let mut tab = Tableau {
        t,
        basis: (m..m + k).collect(),
        m,
        k,
        pivots_left: pivot_cap(m, k),
    };

    // phase 1: minimize the artificial total
    let mut phase1_costs = vec![0.0; m + k];
    for c in phase1_costs.iter_mut().skip(m) {
        *c = 1.0;
    }
    let ray = tab.run(&phase1_costs, m + k, tol)?;
    debug_assert!(ray.is_none(), "phase 1 objective is bounded below by zero");
    let phase1_value: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= m)
        .map(|(i, _)| tab.rhs(i))
        .sum();
    if phase1_value > tol.lp_feasibility {
        // Farkas vector: multipliers of the phase-1 optimum, unflipped
        let mut farkas = DVector::zeros(k);
        for i in 0..k {
            let mut pi = 0.0;
            for (row, &b) in tab.basis.iter().enumerate() {
                pi += phase1_costs[b] * tab.t[(row, m + i)];
            }
            farkas[i] = flips[i] * pi;
        }
        debug_assert!(farkas.dot(&lp.rhs) > 0.0);
        return Ok(LpSolution::Infeasible { farkas });
    }

    // drive leftover artificials out of the basis (they sit at level ~0)
    for row in 0..k {
        if tab.basis[row] < m {
            continue;
        }
        let enter = (0..m).find(|&j| tab.t[(row, j)].abs() > tol.lp_pivot);
        if let Some(j) = enter {
            tab.pivot(row, j)?;
        }
        // a row with no eligible pivot is a redundant constraint; its
        // artificial stays basic at zero and is harmless in phase 2
    }

    // phase 2 on the true costs, artificials blocked from entering
    let mut phase2_costs = vec![0.0; m + k];
    phase2_costs[..m].copy_from_slice(lp.costs.as_slice());
    if let Some(enter) = tab.run(&phase2_costs, m, tol)? {
        let mut ray = DVector::zeros(m);
        ray[enter] = 1.0;
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < m {
                ray[b] = -tab.t[(i, enter)];
            } else {
                // artificials still basic belong to redundant rows, which are
                // zero across all original columns, so they cannot move
                debug_assert!(tab.t[(i, enter)].abs() <= tol.lp_pivot);
            }
        }
        return Ok(LpSolution::Unbounded { ray });
    }

    let mut primal = DVector::zeros(m);
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < m {
            primal[b] = tab.rhs(i);
        }
    }
    let value = lp.costs.dot(&primal);
    let mut multipliers = DVector::zeros(k);
    for i in 0..k {
        let mut pi = 0.0;
        for (row, &b) in tab.basis.iter().enumerate() {
            pi += phase2_costs[b] * tab.t[(row, m + i)];
        }
        multipliers[i] = flips[i] * pi;
    }
    Ok(LpSolution::Optimal {
        value,
        primal,
        multipliers,
    })
}
