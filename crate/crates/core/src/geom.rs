//! Euclidean primitives: immutable points, orthonormal subspaces, point
//! clouds, and the Busemann-style pairing used to recover inner products
//! from distances.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::{Error, Result};

/// An immutable point of `R^n`.  All operations return new points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct Point {
    coords: DVector<f64>,
}

/// Wire format: `{"dim": n, "coords": [...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRepr {
    dim: usize,
    coords: Vec<f64>,
}

impl TryFrom<PointRepr> for Point {
    type Error = Error;
    fn try_from(r: PointRepr) -> Result<Point> {
        if r.coords.len() != r.dim {
            return Err(Error::DimensionMismatch {
                expected: r.dim,
                got: r.coords.len(),
            });
        }
        Point::new(r.coords)
    }
}

impl From<Point> for PointRepr {
    fn from(p: Point) -> PointRepr {
        PointRepr {
            dim: p.dim(),
            coords: p.coords.iter().copied().collect(),
        }
    }
}

impl Point {
    /// Builds a point, rejecting NaN/infinite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Point> {
        for (i, &c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFinite { index: i, value: c });
            }
        }
        Ok(Point {
            coords: DVector::from_vec(coords),
        })
    }

    /// Wraps an nalgebra vector (internal fast path; assumes finite entries).
    pub(crate) fn from_vector(v: DVector<f64>) -> Point {
        debug_assert!(v.iter().all(|c| c.is_finite()));
        Point { coords: v }
    }

    pub fn zeros(dim: usize) -> Point {
        Point {
            coords: DVector::zeros(dim),
        }
    }

    /// Standard basis vector `e_i`.
    pub fn axis(dim: usize, i: usize) -> Point {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        Point { coords: v }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub(crate) fn vector(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.coords.dot(&other.coords)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (&self.coords - &other.coords).norm()
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::from_vector(&self.coords + &other.coords)
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::from_vector(&self.coords - &other.coords)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::from_vector(&self.coords * s)
    }

    /// Midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Point) -> Point {
        Point::from_vector((&self.coords + &other.coords) * 0.5)
    }

    /// Returns `self / |self|`, or an error for (near-)zero vectors.
    pub fn normalized(&self, tol: f64) -> Result<Point> {
        let n = self.norm();
        if n <= tol {
            return Err(Error::ZeroVector { tol });
        }
        Ok(self.scale(1.0 / n))
    }
}

/// A linear subspace of `R^n` carried by an orthonormal basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(try_from = "SubspaceRepr", into = "SubspaceRepr")]
pub struct Subspace {
    ambient_dim: usize,
    /// Columns are the orthonormal basis vectors.
    basis: DMatrix<f64>,
}

/// Wire format: `{"ambient_dim": n, "basis": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspaceRepr {
    ambient_dim: usize,
    basis: Vec<Vec<f64>>,
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = Error;
    fn try_from(r: SubspaceRepr) -> Result<Subspace> {
        let vectors: Vec<Point> = r
            .basis
            .into_iter()
            .map(|v| {
                if v.len() != r.ambient_dim {
                    return Err(Error::DimensionMismatch {
                        expected: r.ambient_dim,
                        got: v.len(),
                    });
                }
                Point::new(v)
            })
            .collect::<Result<_>>()?;
        let s = Subspace::from_orthonormal(r.ambient_dim, &vectors, Tolerances::shared())?;
        Ok(s)
    }
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> SubspaceRepr {
        SubspaceRepr {
            ambient_dim: s.ambient_dim,
            basis: (0..s.dim())
                .map(|j| s.basis.column(j).iter().copied().collect())
                .collect(),
        }
    }
}

impl Subspace {
    /// The zero subspace of `R^n`.
    pub fn trivial(ambient_dim: usize) -> Subspace {
        Subspace {
            ambient_dim,
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    /// Full space `R^n`.
    pub fn full(ambient_dim: usize) -> Subspace {
        Subspace {
            ambient_dim,
            basis: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    /// Span of the given coordinate axes.
    pub fn coordinate_axes(ambient_dim: usize, axes: &[usize]) -> Subspace {
        let mut basis = DMatrix::zeros(ambient_dim, axes.len());
        for (j, &i) in axes.iter().enumerate() {
            basis[(i, j)] = 1.0;
        }
        Subspace { ambient_dim, basis }
    }

    /// Accepts a basis that is already orthonormal within `tol.orthonormal`.
    pub fn from_orthonormal(
        ambient_dim: usize,
        vectors: &[Point],
        tol: &Tolerances,
    ) -> Result<Subspace> {
        let mut basis = DMatrix::zeros(ambient_dim, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            if v.dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: v.dim(),
                });
            }
            basis.set_column(j, v.vector());
        }
        let gram = basis.transpose() * &basis;
        let defect = (&gram - DMatrix::identity(vectors.len(), vectors.len())).amax();
        if vectors.is_empty() {
            return Ok(Subspace { ambient_dim, basis });
        }
        if defect > tol.orthonormal {
            return Err(Error::NotOrthogonal {
                residual: defect,
                tol: tol.orthonormal,
            });
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the subspace (number of basis vectors).
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis_vectors(&self) -> Vec<Point> {
        (0..self.dim())
            .map(|j| Point::from_vector(self.basis.column(j).into_owned()))
            .collect()
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, v: &Point) -> Result<Point> {
        if v.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: v.dim(),
            });
        }
        let coeffs = self.basis.transpose() * v.vector();
        Ok(Point::from_vector(&self.basis * coeffs))
    }

    /// Coordinates of the projection in the subspace's own basis.
    pub fn coordinates(&self, v: &Point) -> Result<Point> {
        if v.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: v.dim(),
            });
        }
        Ok(Point::from_vector(self.basis.transpose() * v.vector()))
    }

    /// Embeds subspace coordinates back into the ambient space.
    pub fn embed(&self, coords: &Point) -> Result<Point> {
        if coords.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coords.dim(),
            });
        }
        Ok(Point::from_vector(&self.basis * coords.vector()))
    }

    /// Distance from `v` to the subspace.
    pub fn distance(&self, v: &Point) -> Result<f64> {
        Ok(self.project(v)?.distance(v))
    }

    /// Whether `v` lies in the subspace within `tol` (absolute).
    pub fn contains(&self, v: &Point, tol: f64) -> Result<bool> {
        Ok(self.distance(v)? <= tol)
    }
}

/// A finite multiset of points of common dimension.
///
/// Clouds are non-empty unless explicitly constructed via [`PointCloud::empty`];
/// emptiness is meaningful (for example an empty section slice) and is always
/// deliberate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(try_from = "CloudRepr", into = "CloudRepr")]
pub struct PointCloud {
    dim: usize,
    points: Vec<Point>,
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CloudRepr {
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    points: Vec<Vec<f64>>,
}

impl TryFrom<CloudRepr> for PointCloud {
    type Error = Error;
    fn try_from(r: CloudRepr) -> Result<PointCloud> {
        let points: Vec<Point> = r
            .points
            .into_iter()
            .map(|v| {
                if v.len() != r.dim {
                    return Err(Error::DimensionMismatch {
                        expected: r.dim,
                        got: v.len(),
                    });
                }
                Point::new(v)
            })
            .collect::<Result<_>>()?;
        Ok(PointCloud {
            dim: r.dim,
            points,
            label: r.label,
        })
    }
}

impl From<PointCloud> for CloudRepr {
    fn from(c: PointCloud) -> CloudRepr {
        CloudRepr {
            dim: c.dim,
            label: c.label,
            points: c.points.iter().map(|p| p.coords().to_vec()).collect(),
        }
    }
}

impl PointCloud {
    /// Non-empty cloud; all points must share a dimension.
    pub fn new(points: Vec<Point>, label: Option<String>) -> Result<PointCloud> {
        let first = points.first().ok_or(Error::EmptyCloud)?;
        let dim = first.dim();
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        Ok(PointCloud { dim, points, label })
    }

    /// Deliberately empty cloud (e.g. a section slice that missed).
    pub fn empty(dim: usize, label: Option<String>) -> PointCloud {
        PointCloud {
            dim,
            points: Vec::new(),
            label,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> PointCloud {
        self.label = Some(label.into());
        self
    }

    /// Distance from `v` to the nearest cloud point, with the argmin index.
    pub fn nearest(&self, v: &Point) -> Option<(usize, f64)> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.distance(v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Collapses points that agree within `tol` (hash-grid prefilter, so the
    /// cost stays near-linear for large clouds).
    pub fn deduplicated(&self, tol: f64) -> PointCloud {
        let mut kept: Vec<Point> = Vec::new();
        let mut grid: std::collections::HashMap<Vec<i64>, Vec<usize>> =
            std::collections::HashMap::new();
        let cell = (tol * 100.0).max(1e-12);
        for p in &self.points {
            let key: Vec<i64> = p
                .coords()
                .iter()
                .map(|c| (c / cell).round() as i64)
                .collect();
            let mut dup = false;
            // probe the cell and, if near a boundary, its neighbors
            let candidates = grid.get(&key).cloned().unwrap_or_default();
            for i in candidates {
                if kept[i].distance(p) <= tol {
                    dup = true;
                    break;
                }
            }
            if !dup {
                // also scan all kept points whose key differs (rare: boundary
                // straddling); a full scan only happens for small clouds
                if kept.len() <= 512 {
                    dup = kept.iter().any(|q| q.distance(p) <= tol);
                }
            }
            if !dup {
                kept.push(p.clone());
                grid.entry(key).or_default().push(kept.len() - 1);
            }
        }
        PointCloud {
            dim: self.dim,
            points: kept,
            label: self.label.clone(),
        }
    }
}

/// Two-pass modified Gram–Schmidt.
///
/// Vectors whose residual norm after projection onto the running span falls
/// below `rank_tol` are dropped.  The second orthogonalization pass repairs
/// the loss of orthogonality that single-pass Gram–Schmidt suffers on
/// ill-conditioned inputs.
pub fn orthonormalize(vectors: &[Point], rank_tol: f64) -> Result<Subspace> {
    let first = vectors.first().ok_or(Error::EmptyCloud)?;
    let ambient = first.dim();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        if v.dim() != ambient {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                got: v.dim(),
            });
        }
        let mut w = v.vector().clone();
        for _pass in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w -= b * c;
            }
        }
        let n = w.norm();
        if n > rank_tol {
            basis.push(w / n);
        }
    }
    let points: Vec<Point> = basis.into_iter().map(Point::from_vector).collect();
    Subspace::from_orthonormal(ambient, &points, Tolerances::shared())
}

/// Busemann-style pairing `sup_{t>0} (t - |v - t u|)` over a finite grid.
///
/// For a unit vector `u` the expression increases monotonically in `t` toward
/// `<v, u>`, with a truncation gap of at most `|v|^2 / (2 (T - |v|))` at the
/// largest grid value `T > |v|`.  `u` must be a unit vector.
pub fn busemann_pairing(v: &Point, u: &Point, t_grid: &[f64]) -> Result<f64> {
    let tol = Tolerances::shared();
    if v.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            got: u.dim(),
        });
    }
    let norm_u = u.norm();
    if (norm_u - 1.0).abs() > tol.unit_direction {
        return Err(Error::NotUnit {
            norm: norm_u,
            tol: tol.unit_direction,
        });
    }
    if t_grid.is_empty() {
        return Err(Error::Precondition("t grid must be non-empty".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for &t in t_grid {
        if t <= 0.0 {
            return Err(Error::Precondition(format!(
                "grid values must be positive, got {t}"
            )));
        }
        let d = v.sub(&u.scale(t)).norm();
        best = best.max(t - d);
    }
    Ok(best)
}

/// Upper bound on the truncation error of [`busemann_pairing`] at grid top `t_max`.
pub fn busemann_gap_bound(v_norm: f64, t_max: f64) -> f64 {
    if t_max <= v_norm {
        return f64::INFINITY;
    }
    v_norm * v_norm / (2.0 * (t_max - v_norm))
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn point_set_hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let one_sided = |x: &PointCloud, y: &PointCloud| -> f64 {
        x.points()
            .iter()
            .map(|p| y.nearest(p).map(|(_, d)| d).unwrap_or(f64::INFINITY))
            .fold(0.0_f64, f64::max)
    };
    Ok(one_sided(a, b).max(one_sided(b, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    /// Exact integer rank by fraction-free (Bareiss) row reduction; the
    /// independent oracle for rank assertions on small integer inputs.
    fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let (nr, nc) = (m.len(), m[0].len());
        let mut rank = 0;
        let mut prev = 1i128;
        for col in 0..nc {
            let Some(piv) = (rank..nr).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            for r in 0..nr {
                if r == rank {
                    continue;
                }
                for c in 0..nc {
                    if c == col {
                        continue;
                    }
                    m[r][c] = (m[r][c] * m[rank][col] - m[r][col] * m[rank][c]) / prev;
                }
                m[r][col] = 0;
            }
            prev = m[rank][col];
            rank += 1;
            if rank == nr {
                break;
            }
        }
        rank
    }

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn orthonormalize_identity_basis() {
        let s = orthonormalize(&[pt(&[1.0, 0.0]), pt(&[0.0, 1.0])], 1e-10).unwrap();
        assert_eq!(s.dim(), 2);
        let b = s.basis_vectors();
        assert_abs_diff_eq!(b[0].coords()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1].coords()[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn orthonormalize_collinear_drops_to_rank_one() {
        let s = orthonormalize(&[pt(&[1.0, 0.0]), pt(&[2.0, 0.0])], 1e-10).unwrap();
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn orthonormalize_dependent_triple_matches_exact_rank() {
        let rows = vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, -1]];
        assert_eq!(bareiss_rank(&rows), 2);
        let s = orthonormalize(
            &[
                pt(&[1.0, 1.0, 0.0]),
                pt(&[1.0, 0.0, 1.0]),
                pt(&[0.0, 1.0, -1.0]),
            ],
            1e-10,
        )
        .unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn orthonormalize_random_inputs_stay_orthonormal() {
        let mut rng = sampling::rng_for(999, 0);
        for trial in 0..1000 {
            let dim = 2 + (trial % 9);
            let count = 1 + (trial % (dim + 2));
            let vectors: Vec<Point> = (0..count)
                .map(|_| Point::new((0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap())
                .collect();
            let s = orthonormalize(&vectors, 1e-10).unwrap();
            let basis = s.basis_vectors();
            let mut defect: f64 = 0.0;
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    defect = defect.max((a.dot(b) - target).abs());
                }
            }
            assert!(defect <= 1e-10, "defect {defect} at trial {trial}");
        }
    }

    /// Projection by explicit normal equations — the independent route.
    fn project_normal_equations(basis: &[Point], v: &Point) -> Point {
        let n = v.dim();
        let k = basis.len();
        let mut b = DMatrix::zeros(n, k);
        for (j, p) in basis.iter().enumerate() {
            b.set_column(j, p.vector());
        }
        let gram = b.transpose() * &b;
        let rhs = b.transpose() * v.vector();
        let c = gram.lu().solve(&rhs).unwrap();
        Point::from_vector(b * c)
    }

    #[test]
    fn project_diagonal_line_matches_normal_equations() {
        let d = 1.0 / 2.0_f64.sqrt();
        let s = orthonormalize(&[pt(&[d, d])], 1e-10).unwrap();
        let v = pt(&[1.0, 0.0]);
        let got = s.project(&v).unwrap();
        let want = project_normal_equations(&s.basis_vectors(), &v);
        assert_abs_diff_eq!(got.coords()[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(got.coords()[1], 0.5, epsilon = 1e-14);
        assert!(got.distance(&want) <= 1e-14);
    }

    #[test]
    fn project_is_idempotent_and_contractive() {
        let mut rng = sampling::rng_for(1234, 0);
        for _ in 0..200 {
            let dim = rng.gen_range(2..8usize);
            let k = rng.gen_range(1..=dim);
            let vectors: Vec<Point> = (0..k)
                .map(|_| Point::new((0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap())
                .collect();
            let s = orthonormalize(&vectors, 1e-10).unwrap();
            let v = Point::new((0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()).unwrap();
            let w = Point::new((0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()).unwrap();
            let pv = s.project(&v).unwrap();
            let ppv = s.project(&pv).unwrap();
            assert!(pv.distance(&ppv) <= 1e-12);
            let pw = s.project(&w).unwrap();
            assert!(pv.distance(&pw) <= v.distance(&w) + 1e-12);
        }
    }

    #[test]
    fn projection_of_point_in_subspace_is_identity() {
        let s = Subspace::coordinate_axes(4, &[0, 2]);
        let v = pt(&[3.0, 0.0, -1.5, 0.0]);
        assert!(s.project(&v).unwrap().distance(&v) <= 1e-15);
        assert!(s.contains(&v, 1e-12).unwrap());
    }

    #[test]
    fn busemann_matches_inner_product_against_direct_oracle() {
        let mut rng = sampling::rng_for(777, 0);
        for _ in 0..50 {
            let v =
                Point::new((0..5).map(|_| rng.gen_range(-1.5..1.5)).collect::<Vec<_>>()).unwrap();
            let u = sampling::unit_sphere_point(5, &mut rng);
            // direct inner product is the oracle
            let want = v.dot(&u);
            let grid: Vec<f64> = (1..=30).map(|i| (i as f64) * (1e6 / 30.0)).collect();
            let got = busemann_pairing(&v, &u, &grid).unwrap();
            assert!((got - want).abs() <= 1e-4, "got {got}, want {want}");
            // pairing never exceeds the inner product
            assert!(got <= want + 1e-12);
            // and respects the analytic truncation bound
            let bound = busemann_gap_bound(v.norm(), 1e6);
            assert!(want - got <= bound + 1e-12);
        }
    }

    #[test]
    fn busemann_monotone_in_t() {
        let v = pt(&[0.3, -1.2, 0.8]);
        let u = pt(&[0.0, 1.0, 0.0]);
        let mut prev = f64::NEG_INFINITY;
        for i in 1..40 {
            let t = i as f64;
            let val = busemann_pairing(&v, &u, &[t]).unwrap();
            assert!(val >= prev - 1e-12);
            prev = val;
        }
    }

    #[test]
    fn busemann_rejects_non_unit_direction() {
        let v = pt(&[1.0, 0.0]);
        let u = pt(&[2.0, 0.0]);
        assert!(matches!(
            busemann_pairing(&v, &u, &[10.0]),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn point_json_schema_roundtrip() {
        let p = pt(&[1.5, -2.0]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":2,"coords":[1.5,-2.0]}"#);
        let back: Point = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
        // mismatched dim is rejected
        assert!(serde_json::from_str::<Point>(r#"{"dim":3,"coords":[1.0]}"#).is_err());
        // NaN cannot appear (JSON has no NaN literal, but infinity via 1e999 parses to inf)
        assert!(serde_json::from_str::<Point>(r#"{"dim":1,"coords":[1e999]}"#).is_err());
    }

    #[test]
    fn subspace_json_roundtrip_requires_orthonormal() {
        let s = Subspace::coordinate_axes(3, &[0, 1]);
        let j = serde_json::to_string(&s).unwrap();
        let back: Subspace = serde_json::from_str(&j).unwrap();
        assert_eq!(back.dim(), 2);
        let bad = r#"{"ambient_dim":2,"basis":[[1.0,0.0],[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<Subspace>(bad).is_err());
    }

    #[test]
    fn cloud_dedup_collapses_multiplicity() {
        let c = PointCloud::new(
            vec![pt(&[1.0, 0.0]), pt(&[1.0 + 1e-12, 0.0]), pt(&[-1.0, 0.0])],
            None,
        )
        .unwrap();
        assert_eq!(c.deduplicated(1e-9).len(), 2);
    }

    #[test]
    fn empty_cloud_is_explicit() {
        assert!(PointCloud::new(vec![], None).is_err());
        let e = PointCloud::empty(3, Some("slice".into()));
        assert!(e.is_empty());
        assert_eq!(e.dim(), 3);
    }

    #[test]
    fn hausdorff_of_identical_sets_is_zero() {
        let c = PointCloud::new(vec![pt(&[1.0, 2.0]), pt(&[0.0, 0.0])], None).unwrap();
        assert_eq!(point_set_hausdorff(&c, &c).unwrap(), 0.0);
    }
}
