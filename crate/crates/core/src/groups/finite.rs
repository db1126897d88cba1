//! Finite orthogonal matrix groups by generator closure.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::config::Tolerances;
use crate::{Error, Result};

/// What a finite group is, when we know; used for fast paths (sorting-based
/// orbit distance for the full symmetric group) and for descriptors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiniteKind {
    /// Closure of arbitrary orthogonal generators.
    Generic,
    /// Full symmetric group S_n as permutation matrices.
    Symmetric { n: usize },
    /// Symmetries of the regular m-gon in O(2), order 2m.
    Dihedral { m: usize },
    /// Rotations by multiples of 2π/m in SO(2), order m.
    Cyclic { m: usize },
    /// {±I} in O(n).
    Negation,
}

/// A finite subgroup of O(n), stored as its full element list.
///
/// Every stored matrix is orthogonal within the configured tolerance; the
/// identity is always element 0.
#[derive(Debug, Clone)]
pub struct FiniteOrthogonalGroup {
    dim: usize,
    kind: FiniteKind,
    generators: Vec<DMatrix<f64>>,
    elements: Vec<DMatrix<f64>>,
}

/// Hash-grid dedup for orthogonal matrices: entries are rounded onto a grid
/// three orders of magnitude coarser than the identification tolerance, so
/// genuine duplicates (which agree to ~1e-13 after closure products) land in
/// the same cell.  Entries sitting within the tolerance of a cell boundary
/// expand to both roundings, capped; this avoids the O(n²) pairwise scan
/// without missing boundary cases.
struct MatrixDedup {
    grid: f64,
    tol: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl MatrixDedup {
    fn new(tol: f64) -> MatrixDedup {
        MatrixDedup {
            grid: tol * 1000.0,
            tol,
            cells: HashMap::new(),
        }
    }

    fn keys(&self, m: &DMatrix<f64>) -> Vec<Vec<i64>> {
        // entries close to a rounding boundary contribute both cells
        let mut keys: Vec<Vec<i64>> = vec![Vec::with_capacity(m.len())];
        let margin = 2.0 * self.tol / self.grid;
        for &x in m.iter() {
            let q = x / self.grid;
            let r = q.round();
            let ambiguous = (q - r).abs() > 0.5 - margin && keys.len() <= 128;
            let alt = if q - r > 0.0 { r + 1.0 } else { r - 1.0 };
            let mut expanded = Vec::with_capacity(keys.len() * if ambiguous { 2 } else { 1 });
            for k in &keys {
                let mut a = k.clone();
                a.push(r as i64);
                expanded.push(a);
                if ambiguous {
                    let mut b = k.clone();
                    b.push(alt as i64);
                    expanded.push(b);
                }
            }
            keys = expanded;
        }
        keys
    }

    fn find(&self, elements: &[DMatrix<f64>], m: &DMatrix<f64>) -> Option<usize> {
        for key in self.keys(m) {
            if let Some(bucket) = self.cells.get(&key) {
                for &i in bucket {
                    if (&elements[i] - m).amax() <= self.tol {
                        return Some(i);
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, m: &DMatrix<f64>, index: usize) {
        for key in self.keys(m) {
            self.cells.entry(key).or_default().push(index);
        }
    }
}

impl FiniteOrthogonalGroup {
    /// Enumerates the group generated by the given orthogonal matrices via
    /// breadth-first closure, erroring out if more than `max_order` distinct
    /// elements appear.
    pub fn from_generators(
        generators: Vec<DMatrix<f64>>,
        max_order: usize,
    ) -> Result<FiniteOrthogonalGroup> {
        Self::from_generators_kind(generators, max_order, FiniteKind::Generic)
    }

    fn from_generators_kind(
        generators: Vec<DMatrix<f64>>,
        max_order: usize,
        kind: FiniteKind,
    ) -> Result<FiniteOrthogonalGroup> {
        let tol = Tolerances::shared();
        let first = generators
            .first()
            .ok_or_else(|| Error::Precondition("at least one generator required".into()))?;
        let dim = first.nrows();
        let mut step_set: Vec<DMatrix<f64>> = Vec::new();
        for g in &generators {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.nrows().max(g.ncols()),
                });
            }
            check_orthogonal(g, tol)?;
            step_set.push(g.clone());
            // transposes are the inverses; including them speeds closure
            step_set.push(g.transpose());
        }

        let mut elements: Vec<DMatrix<f64>> = vec![DMatrix::identity(dim, dim)];
        let mut dedup = MatrixDedup::new(tol.dedup_matrix);
        dedup.insert(&elements[0], 0);
        let mut frontier: Vec<usize> = vec![0];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &i in &frontier {
                for s in &step_set {
                    let candidate = &elements[i] * s;
                    if dedup.find(&elements, &candidate).is_some() {
                        continue;
                    }
                    check_orthogonal(&candidate, tol)?;
                    if elements.len() >= max_order {
                        return Err(Error::GroupTooLarge { cap: max_order });
                    }
                    let idx = elements.len();
                    dedup.insert(&candidate, idx);
                    elements.push(candidate);
                    next.push(idx);
                }
            }
            frontier = next;
        }
        Ok(FiniteOrthogonalGroup {
            dim,
            kind,
            generators,
            elements,
        })
    }

    /// Full symmetric group S_n acting by permutation matrices (n ≤ 7; the
    /// element count is n!).
    pub fn symmetric(n: usize) -> Result<FiniteOrthogonalGroup> {
        if n < 2 || n > 7 {
            return Err(Error::Precondition(format!(
                "symmetric group degree must be in 2..=7, got {n}"
            )));
        }
        let swap = permutation_matrix(n, &{
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(0, 1);
            p
        });
        let cycle = permutation_matrix(n, &{
            let mut p: Vec<usize> = (0..n).collect();
            p.rotate_left(1);
            p
        });
        let gens = if n == 2 {
            vec![swap]
        } else {
            vec![swap, cycle]
        };
        let cap = (1..=n).product::<usize>() + 1;
        Self::from_generators_kind(gens, cap, FiniteKind::Symmetric { n })
    }

    /// Dihedral group of the regular m-gon (order 2m) in O(2).
    pub fn dihedral(m: usize) -> Result<FiniteOrthogonalGroup> {
        if m == 0 {
            return Err(Error::Precondition(
                "dihedral parameter must be positive".into(),
            ));
        }
        let gens = vec![rotation2(std::f64::consts::TAU / m as f64), reflection2()];
        Self::from_generators_kind(gens, 2 * m + 1, FiniteKind::Dihedral { m })
    }

    /// Cyclic rotation group of order m in SO(2).
    pub fn cyclic(m: usize) -> Result<FiniteOrthogonalGroup> {
        if m == 0 {
            return Err(Error::Precondition("cyclic order must be positive".into()));
        }
        let gens = vec![rotation2(std::f64::consts::TAU / m as f64)];
        Self::from_generators_kind(gens, m + 1, FiniteKind::Cyclic { m })
    }

    /// The two-element group {±I} in O(dim).
    pub fn negation(dim: usize) -> Result<FiniteOrthogonalGroup> {
        let gens = vec![-DMatrix::<f64>::identity(dim, dim)];
        Self::from_generators_kind(gens, 3, FiniteKind::Negation)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn kind(&self) -> &FiniteKind {
        &self.kind
    }

    pub fn elements(&self) -> &[DMatrix<f64>] {
        &self.elements
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }
}

fn check_orthogonal(m: &DMatrix<f64>, tol: &Tolerances) -> Result<()> {
    let n = m.nrows();
    let residual = (m.transpose() * m - DMatrix::identity(n, n)).amax();
    if residual > tol.matrix_orthogonal {
        return Err(Error::NotOrthogonal {
            residual,
            tol: tol.matrix_orthogonal,
        });
    }
    Ok(())
}

/// Matrix sending `e_i` to `e_{perm[i]}`.
pub fn permutation_matrix(n: usize, perm: &[usize]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        m[(j, i)] = 1.0;
    }
    m
}

/// Planar rotation by `theta`.
pub fn rotation2(theta: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
}

/// Reflection across the x-axis.
pub fn reflection2() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}
