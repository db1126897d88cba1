//! Euclidean projection onto a polyhedron `{x : ⟨aᵢ, x⟩ ≤ cᵢ}`.
//!
//! Works on the dual: the projection is `x = q − Aᵀλ` where `λ ≥ 0`
//! minimizes `½|Aᵀλ|² − λᵀ(Aq − c)`, a nonnegativity-constrained quadratic
//! handled by a Lawson–Hanson style active set.  No feasible starting point
//! is needed and termination is finite for independent active normals.
//! The polyhedron must be nonempty; pathological inputs hit the iteration
//! cap and surface as [`Error::PivotLimit`].

use nalgebra::{DMatrix, DVector};

use crate::config::Tolerances;
use crate::geom::Point;
use crate::{Error, Result};

/// A halfspace `⟨normal, x⟩ ≤ offset`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Halfspace {
    pub normal: Point,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Point, offset: f64) -> Result<Halfspace> {
        if !offset.is_finite() {
            return Err(Error::NonFinite {
                index: 0,
                value: offset,
            });
        }
        Ok(Halfspace { normal, offset })
    }

    pub fn violation(&self, x: &Point) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

/// Least-squares solve of `G λ = b` via SVD, tolerant of dependent normals.
fn gram_solve(g: &DMatrix<f64>, b: &DVector<f64>, sv_tol: f64) -> DVector<f64> {
    let svd = g.clone().svd(true, true);
    svd.solve(b, sv_tol).expect("svd solve with both factors")
}

/// Projects `q` onto the intersection of the halfspaces.
pub fn project_onto_polyhedron(q: &Point, halfspaces: &[Halfspace]) -> Result<Point> {
    let tol = Tolerances::shared();
    let dim = q.dim();
    for h in halfspaces {
        if h.normal.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: h.normal.dim(),
            });
        }
    }
    let m = halfspaces.len();
    if m == 0 {
        return Ok(q.clone());
    }
    let a = DMatrix::from_fn(m, dim, |i, j| halfspaces[i].normal.coords()[j]);
    let c = DVector::from_fn(m, |i, _| halfspaces[i].offset);
    let aq_minus_c = &a * q.vector() - &c;

    let mut passive: Vec<usize> = Vec::new();
    let mut lambda: Vec<f64> = Vec::new();
    let mut x = q.vector().clone();
    let cap = 50 * (m + dim) + 200;
    let mut outer = 0;
    loop {
        outer += 1;
        if outer > cap {
            return Err(Error::PivotLimit { max_pivots: cap });
        }
        // most violated constraint not yet active
        let mut worst = None;
        let mut worst_v = tol.lp_feasibility;
        for i in 0..m {
            if passive.contains(&i) {
                continue;
            }
            let v = a.row(i).transpose().dot(&x) - c[i];
            if v > worst_v {
                worst_v = v;
                worst = Some(i);
            }
        }
        let Some(add) = worst else {
            return Ok(Point::from_vector(x));
        };
        passive.push(add);
        lambda.push(0.0);

        // inner loop: restore λ ≥ 0 on the passive set
        let mut inner = 0;
        loop {
            inner += 1;
            if inner > cap {
                return Err(Error::PivotLimit { max_pivots: cap });
            }
            let p = passive.len();
            let gram = DMatrix::from_fn(p, p, |r, s| a.row(passive[r]).dot(&a.row(passive[s])));
            let b = DVector::from_fn(p, |r, _| aq_minus_c[passive[r]]);
            let solved = gram_solve(&gram, &b, tol.nullspace_sv);
            if solved.iter().all(|&l| l >= -tol.lp_feasibility) {
                lambda = solved.iter().map(|&l| l.max(0.0)).collect();
                break;
            }
            // step from the current λ toward the solve until a multiplier
            // hits zero, then drop it (standard active-set backtracking)
            let mut theta = 1.0_f64;
            for (idx, &new_l) in solved.iter().enumerate() {
                if new_l < 0.0 {
                    let old = lambda[idx];
                    let t = old / (old - new_l);
                    theta = theta.min(t);
                }
            }
            for (idx, l) in lambda.iter_mut().enumerate() {
                *l += theta * (solved[idx] - *l);
            }
            let mut keep_passive = Vec::new();
            let mut keep_lambda = Vec::new();
            for (idx, &l) in lambda.iter().enumerate() {
                if l > tol.lp_feasibility {
                    keep_passive.push(passive[idx]);
                    keep_lambda.push(l);
                }
            }
            if keep_passive.len() == passive.len() {
                // numerical stall: drop the smallest multiplier outright
                let (drop_idx, _) = lambda
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .expect("nonempty passive set");
                keep_passive.remove(drop_idx);
                keep_lambda.remove(drop_idx);
            }
            passive = keep_passive;
            lambda = keep_lambda;
            if passive.is_empty() {
                break;
            }
        }
        // x = q − A_Pᵀ λ
        x = q.vector().clone();
        for (idx, &i) in passive.iter().enumerate() {
            x -= a.row(i).transpose() * lambda[idx];
        }
    }
}

/// Distance from `q` to the polyhedron.
pub fn polyhedron_distance(q: &Point, halfspaces: &[Halfspace]) -> Result<f64> {
    Ok(project_onto_polyhedron(q, halfspaces)?.distance(q))
}
