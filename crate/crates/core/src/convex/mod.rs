//! Convex-hull machinery over finite point clouds: support values, exact
//! membership with checkable certificates, polar support values by linear
//! programming, support-based Hausdorff gaps and affine dimension.

pub mod polyproj;
pub mod simplex;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::config::Tolerances;
use crate::geom::{Point, PointCloud, Subspace};
use crate::sampling;
use crate::{Error, Result};

pub use polyproj::{polyhedron_distance, project_onto_polyhedron, Halfspace};
pub use simplex::{solve_standard_form, LpSolution, StandardForm};

/// Support value `max ⟨p, u⟩` together with the attaining point index.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SupportValue {
    pub value: f64,
    pub witness: usize,
}

/// Support function of the hull of a finite cloud (the direction need not be
/// normalized).
pub fn support(cloud: &PointCloud, u: &Point) -> Result<SupportValue> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if cloud.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            got: u.dim(),
        });
    }
    let mut best = f64::NEG_INFINITY;
    let mut witness = 0;
    for (i, p) in cloud.points().iter().enumerate() {
        let v = p.dot(u);
        if v > best {
            best = v;
            witness = i;
        }
    }
    Ok(SupportValue {
        value: best,
        witness,
    })
}

/// Certificate attached to a membership answer.
#[derive(Debug, Clone, Serialize)]
pub enum Certificate {
    /// The nearest point written as a convex combination of cloud points
    /// (at most `dim + 1` of them).
    Combination {
        indices: Vec<usize>,
        weights: Vec<f64>,
    },
    /// A strictly separating direction: `⟨normal, p⟩ ≥ ⟨normal, query⟩ +
    /// margin` for every cloud point `p`, with `margin > 0`.
    Separation { normal: Point, margin: f64 },
}

/// Answer to a hull-membership query.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipResult {
    pub inside: bool,
    /// Distance from the query to the hull (0 when inside).
    pub distance: f64,
    /// Nearest point of the hull.
    pub nearest: Point,
    pub certificate: Certificate,
    /// False only if the iteration cap was hit before the optimality test
    /// passed; the distance is then still an upper bound.
    pub converged: bool,
}

/// Exact distance from `query` to `conv(cloud)` by the min-norm-point method:
/// a Frank–Wolfe style outer loop that keeps an affinely independent corral
/// and solves the corral subproblem exactly, so it terminates at the true
/// nearest point instead of crawling at a sublinear rate near the boundary.
pub fn conv_membership(cloud: &PointCloud, query: &Point, tol: f64) -> Result<MembershipResult> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if cloud.dim() != query.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            got: query.dim(),
        });
    }
    // shift the query to the origin
    let shifted: Vec<DVector<f64>> = cloud
        .points()
        .iter()
        .map(|p| p.vector() - query.vector())
        .collect();
    let (x, corral, weights, converged) = min_norm_point(&shifted);
    let distance = x.norm();
    let nearest = Point::from_vector(query.vector() + &x);
    if distance <= tol {
        Ok(MembershipResult {
            inside: true,
            distance,
            nearest,
            certificate: Certificate::Combination {
                indices: corral,
                weights,
            },
            converged,
        })
    } else {
        let normal = Point::from_vector(&x / distance);
        // honest margin, recomputed over the full cloud
        let margin = shifted
            .iter()
            .map(|s| normal.vector().dot(s))
            .fold(f64::INFINITY, f64::min);
        Ok(MembershipResult {
            inside: false,
            distance,
            nearest,
            certificate: Certificate::Separation { normal, margin },
            converged,
        })
    }
}

/// Minimum-norm point of `conv(points)`.  Returns the point, the corral
/// indices, their convex weights, and a convergence flag.
fn min_norm_point(points: &[DVector<f64>]) -> (DVector<f64>, Vec<usize>, Vec<f64>, bool) {
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        // every point is the origin
        return (points[0].clone(), vec![0], vec![1.0], true);
    }
    let start = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i)
        .expect("nonempty point list");
    let mut corral: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let mut x = points[start].clone();
    let stop_abs = 1e-14 * scale * scale;
    let major_cap = 20 * points.len() + 200;
    let mut converged = false;

    for _ in 0..major_cap {
        // most improving vertex
        let (j_min, inner_min) = points
            .iter()
            .enumerate()
            .map(|(j, p)| (j, x.dot(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty point list");
        let xx = x.norm_squared();
        if inner_min >= xx - 1e-12 * xx.max(stop_abs) - stop_abs {
            converged = true;
            break;
        }
        if corral.contains(&j_min) {
            // the best vertex is already used: numerically at the optimum
            converged = true;
            break;
        }
        corral.push(j_min);
        weights.push(0.0);

        // minor cycles: pull x to the affine minimizer of the corral,
        // dropping vertices whose weight would turn negative
        let minor_cap = corral.len() + points[0].len() + 10;
        for _ in 0..minor_cap {
            let alpha = affine_minimizer(points, &corral);
            if alpha.iter().all(|&a| a > -1e-12) {
                weights = alpha.iter().map(|&a| a.max(0.0)).collect();
                break;
            }
            let mut theta = 1.0_f64;
            for (i, &a) in alpha.iter().enumerate() {
                if a < weights[i] {
                    let t = weights[i] / (weights[i] - a);
                    if a < 0.0 {
                        theta = theta.min(t);
                    }
                }
            }
            for (i, w) in weights.iter_mut().enumerate() {
                *w += theta * (alpha[i] - *w);
            }
            let mut kept_c = Vec::new();
            let mut kept_w = Vec::new();
            for (i, &w) in weights.iter().enumerate() {
                if w > 1e-12 {
                    kept_c.push(corral[i]);
                    kept_w.push(w);
                }
            }
            if kept_c.is_empty() {
                // defensive: keep the heaviest vertex
                let (i, &w) = weights
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .expect("nonempty corral");
                kept_c.push(corral[i]);
                kept_w.push(w.max(1.0));
            }
            corral = kept_c;
            weights = kept_w;
            let total: f64 = weights.iter().sum();
            for w in weights.iter_mut() {
                *w /= total;
            }
        }
        x = combine(points, &corral, &weights);
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    x = combine(points, &corral, &weights);
    (x, corral, weights, converged)
}

fn combine(points: &[DVector<f64>], corral: &[usize], weights: &[f64]) -> DVector<f64> {
    let mut x = DVector::zeros(points[0].len());
    for (i, &j) in corral.iter().enumerate() {
        x += &points[j] * weights[i];
    }
    x
}

/// Minimizer of `|Σ αᵢ pᵢ|²` subject to `Σ αᵢ = 1` over the corral, by the
/// bordered Gram system.
fn affine_minimizer(points: &[DVector<f64>], corral: &[usize]) -> Vec<f64> {
    let p = corral.len();
    let mut sys = DMatrix::zeros(p + 1, p + 1);
    for r in 0..p {
        for s in 0..p {
            sys[(r, s)] = points[corral[r]].dot(&points[corral[s]]);
        }
        sys[(r, p)] = 1.0;
        sys[(p, r)] = 1.0;
    }
    let mut rhs = DVector::zeros(p + 1);
    rhs[p] = 1.0;
    let lu = sys.clone().full_piv_lu();
    let solved = if lu.is_invertible() {
        lu.solve(&rhs).expect("invertible system")
    } else {
        // affinely dependent corral: regularize slightly
        for r in 0..p {
            sys[(r, r)] += 1e-12;
        }
        sys.full_piv_lu().solve(&rhs).unwrap_or_else(|| {
            let mut fallback = DVector::zeros(p + 1);
            fallback[0] = 1.0;
            fallback
        })
    };
    solved.rows(0, p).iter().copied().collect()
}

/// Outcome of maximizing `⟨u, x⟩` over the polar set
/// `{x : ⟨a, x⟩ ≤ 1 for all cloud points a}`.
#[derive(Debug, Clone, Serialize)]
pub enum PolarOutcome {
    Bounded {
        value: f64,
        maximizer: Point,
    },
    /// The polar is unbounded in a direction correlated with `u`:
    /// `⟨a, direction⟩ ≤ 0` for every cloud point and
    /// `⟨u, direction⟩ > 0`.  Happens exactly when `u` is not in the
    /// closed conic hull of the cloud.
    Unbounded {
        direction: Point,
    },
}

/// Support value of the polar set in direction `u`, by solving the dual
/// program `min Σy  s.t.  Σ yᵢ aᵢ = u, y ≥ 0` (the constraint matrix has one
/// row per ambient coordinate, so the tableau stays small even for big
/// clouds).  An infeasible dual yields the recession-direction certificate.
pub fn polar_support(cloud: &PointCloud, u: &Point) -> Result<PolarOutcome> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let k = cloud.dim();
    if u.dim() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: u.dim(),
        });
    }
    let m = cloud.len();
    let columns = DMatrix::from_fn(k, m, |i, j| cloud.points()[j].coords()[i]);
    let lp = StandardForm {
        columns,
        costs: DVector::from_element(m, 1.0),
        rhs: u.vector().clone(),
    };
    match solve_standard_form(&lp)? {
        LpSolution::Optimal {
            value, multipliers, ..
        } => Ok(PolarOutcome::Bounded {
            value,
            maximizer: Point::from_vector(multipliers),
        }),
        LpSolution::Infeasible { farkas } => {
            let direction = Point::from_vector(farkas.normalize());
            Ok(PolarOutcome::Unbounded { direction })
        }
        LpSolution::Unbounded { .. } => Err(Error::Precondition(
            "dual with unit costs cannot be unbounded".into(),
        )),
    }
}

/// Result of the polar-of-polar consistency check.
#[derive(Debug, Clone, Serialize)]
pub struct BipolarReport {
    /// Directions whose support value was compared.
    pub checked: usize,
    /// Directions skipped because the support value was ≤ `eta` (the polar
    /// boundary point blows up there).
    pub skipped: usize,
    pub max_error: f64,
    pub eta: f64,
}

/// Samples the boundary of the polar set and verifies that support values of
/// the polar-of-polar agree with the original support values wherever they
/// exceed `eta`.  For a cloud `A` and direction `u` with `h_A(u) > 0` the
/// point `u / h_A(u)` lies on the boundary of the polar set; taking the polar
/// again must reproduce `h_A(u)` exactly in the sampled directions.
pub fn bipolar_check(
    cloud: &PointCloud,
    direction_budget: usize,
    eta: f64,
    seed: u64,
) -> Result<BipolarReport> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if eta <= 0.0 {
        return Err(Error::Precondition("eta must be positive".into()));
    }
    let dim = cloud.dim();
    let dirs = sampling::unit_directions(dim, direction_budget, seed);
    let mut boundary: Vec<Point> = Vec::new();
    let mut values: Vec<(Point, f64)> = Vec::new();
    let mut skipped = 0;
    for w in dirs {
        let h = support(cloud, &w)?.value;
        if h <= eta {
            skipped += 1;
            continue;
        }
        boundary.push(w.scale(1.0 / h));
        values.push((w, h));
    }
    if boundary.is_empty() {
        return Ok(BipolarReport {
            checked: 0,
            skipped,
            max_error: 0.0,
            eta,
        });
    }
    let polar_cloud = PointCloud::new(boundary, Some("polar boundary sample".into()))?;
    let mut max_error: f64 = 0.0;
    for (w, h) in &values {
        match polar_support(&polar_cloud, w)? {
            PolarOutcome::Bounded { value, .. } => {
                max_error = max_error.max((value - h).abs());
            }
            PolarOutcome::Unbounded { .. } => {
                // impossible: w/h is in the sample, so ⟨w, x⟩ ≤ h on the polar
                return Err(Error::Precondition(
                    "bipolar support claimed unbounded along a sampled direction".into(),
                ));
            }
        }
    }
    Ok(BipolarReport {
        checked: values.len(),
        skipped,
        max_error,
        eta,
    })
}

/// Largest support-value gap `max_u |h_A(u) − h_B(u)|` over the given
/// directions; for convex hulls of compact sets this converges to the
/// Hausdorff distance as the direction set fills the sphere.
pub fn hull_hausdorff(a: &PointCloud, b: &PointCloud, directions: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let mut gap: f64 = 0.0;
    for u in directions {
        let ha = support(a, u)?.value;
        let hb = support(b, u)?.value;
        gap = gap.max((ha - hb).abs());
    }
    Ok(gap)
}

/// Dimension of the affine hull of the cloud: the rank of the centered point
/// matrix with singular values below `rel_tol · σ_max` discarded.
pub fn affine_dimension(cloud: &PointCloud, rel_tol: f64) -> Result<usize> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let tol = Tolerances::shared();
    let n = cloud.len();
    let dim = cloud.dim();
    let mut mean = DVector::zeros(dim);
    for p in cloud.points() {
        mean += p.vector();
    }
    mean /= n as f64;
    let centered = DMatrix::from_fn(dim, n, |i, j| cloud.points()[j].coords()[i] - mean[i]);
    let svd = centered.svd(false, false);
    let smax = svd.singular_values.max();
    let scale = cloud.points().iter().map(Point::norm).fold(1.0, f64::max);
    if smax <= tol.singleton_cloud * scale {
        return Ok(0);
    }
    Ok(svd
        .singular_values
        .iter()
        .filter(|&&s| s > rel_tol * smax)
        .count())
}

/// Orthogonal projection of every cloud point onto the subspace, expressed in
/// ambient coordinates.
pub fn project_cloud(cloud: &PointCloud, sub: &Subspace) -> Result<PointCloud> {
    let points: Vec<Point> = cloud
        .points()
        .iter()
        .map(|p| sub.project(p))
        .collect::<Result<_>>()?;
    if points.is_empty() {
        return Ok(PointCloud::empty(
            cloud.dim(),
            cloud.label().map(String::from),
        ));
    }
    PointCloud::new(points, cloud.label().map(String::from))
}

/// Like [`project_cloud`] but expressed in the subspace's own coordinates
/// (dimension `sub.dim()`).
pub fn coordinates_cloud(cloud: &PointCloud, sub: &Subspace) -> Result<PointCloud> {
    let points: Vec<Point> = cloud
        .points()
        .iter()
        .map(|p| sub.coordinates(p))
        .collect::<Result<_>>()?;
    if points.is_empty() {
        return Ok(PointCloud::empty(
            sub.dim(),
            cloud.label().map(String::from),
        ));
    }
    PointCloud::new(points, cloud.label().map(String::from))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use itertools::Itertools;
    use rand::Rng;

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn cloud(points: &[&[f64]]) -> PointCloud {
        PointCloud::new(points.iter().map(|p| pt(p)).collect(), None).unwrap()
    }

    fn square() -> PointCloud {
        cloud(&[&[1.0, 1.0], &[1.0, -1.0], &[-1.0, 1.0], &[-1.0, -1.0]])
    }

    fn permutohedron_321() -> PointCloud {
        let perms: Vec<Point> = [3.0, 2.0, 1.0]
            .iter()
            .copied()
            .permutations(3)
            .map(|p| Point::new(p).unwrap())
            .collect();
        PointCloud::new(perms, None).unwrap()
    }

    #[test]
    fn support_of_permutations_along_the_diagonal() {
        let a = permutohedron_321();
        let u = pt(&[1.0, 1.0, 1.0]).scale(1.0 / 3.0_f64.sqrt());
        let sv = support(&a, &u).unwrap();
        assert_abs_diff_eq!(sv.value, 6.0 / 3.0_f64.sqrt(), epsilon = 1e-12);
        // sorting inequality: the best permutation pairs large with large
        let u2 = pt(&[1.0, 0.0, -1.0]);
        let sv2 = support(&a, &u2).unwrap();
        assert_abs_diff_eq!(sv2.value, 3.0 - 1.0, epsilon = 1e-12);
    }

    /// Exhaustive face enumeration: the nearest point lies in the relative
    /// interior of a face, where it is the affine projection onto that face's
    /// span.  Exponential but exact; only for small test instances.
    fn face_enumeration_distance(cloud: &PointCloud, q: &Point) -> f64 {
        let pts = cloud.points();
        let m = pts.len();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << m) {
            let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            let shifted: Vec<DVector<f64>> = subset
                .iter()
                .map(|&i| pts[i].vector() - q.vector())
                .collect();
            let p = subset.len();
            let mut sys = DMatrix::zeros(p + 1, p + 1);
            for r in 0..p {
                for s in 0..p {
                    sys[(r, s)] = shifted[r].dot(&shifted[s]);
                }
                sys[(r, p)] = 1.0;
                sys[(p, r)] = 1.0;
            }
            let mut rhs = DVector::zeros(p + 1);
            rhs[p] = 1.0;
            let lu = sys.full_piv_lu();
            if !lu.is_invertible() {
                continue;
            }
            let alpha = lu.solve(&rhs).unwrap();
            if alpha.rows(0, p).iter().any(|&a| a < -1e-10) {
                continue;
            }
            let mut x = DVector::zeros(q.dim());
            for (r, s) in shifted.iter().enumerate() {
                x += s * alpha[r];
            }
            best = best.min(x.norm());
        }
        best
    }

    #[test]
    fn membership_distance_matches_face_enumeration() {
        let mut rng = crate::sampling::rng_for(411, 0);
        for trial in 0..150 {
            let dim = rng.gen_range(2..=4);
            let m = rng.gen_range(1..=8);
            let pts: Vec<Point> = (0..m)
                .map(|_| {
                    Point::new(
                        (0..dim)
                            .map(|_| rng.gen_range(-2.0..2.0))
                            .collect::<Vec<_>>(),
                    )
                    .unwrap()
                })
                .collect();
            let c = PointCloud::new(pts, None).unwrap();
            let q = Point::new(
                (0..dim)
                    .map(|_| rng.gen_range(-3.0..3.0))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let got = conv_membership(&c, &q, 1e-9).unwrap();
            assert!(got.converged, "trial {trial} did not converge");
            let want = face_enumeration_distance(&c, &q);
            assert!(
                (got.distance - want).abs() < 1e-8,
                "trial {trial}: got {}, oracle {want}",
                got.distance
            );
        }
    }

    #[test]
    fn membership_certificates_are_checkable() {
        let mut rng = crate::sampling::rng_for(997, 0);
        for _ in 0..100 {
            let dim = rng.gen_range(2..=4);
            let m = rng.gen_range(2..=9);
            let pts: Vec<Point> = (0..m)
                .map(|_| {
                    Point::new(
                        (0..dim)
                            .map(|_| rng.gen_range(-2.0..2.0))
                            .collect::<Vec<_>>(),
                    )
                    .unwrap()
                })
                .collect();
            let c = PointCloud::new(pts, None).unwrap();
            // half the queries are planted inside as convex combinations
            let q = if rng.gen_bool(0.5) {
                let mut weights: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
                let total: f64 = weights.iter().sum();
                weights.iter_mut().for_each(|w| *w /= total);
                let mut x = DVector::zeros(dim);
                for (i, p) in c.points().iter().enumerate() {
                    x += p.vector() * weights[i];
                }
                Point::from_vector(x)
            } else {
                Point::new(
                    (0..dim)
                        .map(|_| rng.gen_range(-4.0..4.0))
                        .collect::<Vec<_>>(),
                )
                .unwrap()
            };
            let r = conv_membership(&c, &q, 1e-8).unwrap();
            match &r.certificate {
                Certificate::Combination { indices, weights } => {
                    assert!(r.inside);
                    assert!(indices.len() <= dim + 1, "Carathéodory bound violated");
                    assert!(weights.iter().all(|&w| w >= 0.0));
                    assert_abs_diff_eq!(weights.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
                    let mut x = DVector::zeros(dim);
                    for (k, &i) in indices.iter().enumerate() {
                        x += c.points()[i].vector() * weights[k];
                    }
                    assert!((x - q.vector()).norm() <= 1e-7);
                }
                Certificate::Separation { normal, margin } => {
                    assert!(!r.inside);
                    assert!(*margin > 0.0, "separation must be strict");
                    assert_abs_diff_eq!(normal.norm(), 1.0, epsilon = 1e-10);
                    for p in c.points() {
                        assert!(normal.dot(p) >= normal.dot(&q) + margin - 1e-9);
                    }
                    // at the optimum the margin equals the distance
                    assert!((margin - r.distance).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn membership_in_a_singleton_cloud() {
        let c = cloud(&[&[1.0, 2.0]]);
        let inside = conv_membership(&c, &pt(&[1.0, 2.0]), 1e-9).unwrap();
        assert!(inside.inside);
        let outside = conv_membership(&c, &pt(&[4.0, 6.0]), 1e-9).unwrap();
        assert!(!outside.inside);
        assert_abs_diff_eq!(outside.distance, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn membership_exactly_on_a_vertex_and_edge() {
        let c = square();
        let vertex = conv_membership(&c, &pt(&[1.0, 1.0]), 1e-9).unwrap();
        assert!(vertex.inside);
        assert!(vertex.distance <= 1e-9);
        let edge = conv_membership(&c, &pt(&[1.0, 0.3]), 1e-9).unwrap();
        assert!(edge.inside);
        let out = conv_membership(&c, &pt(&[2.0, 0.0]), 1e-9).unwrap();
        assert_abs_diff_eq!(out.distance, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn polar_of_the_square_is_the_cross_polytope() {
        let c = square();
        // max x₁ over {|x₁| + |x₂| ≤ 1} is 1
        let PolarOutcome::Bounded { value, maximizer } =
            polar_support(&c, &pt(&[1.0, 0.0])).unwrap()
        else {
            panic!("expected bounded");
        };
        assert_abs_diff_eq!(value, 1.0, epsilon = 1e-10);
        for p in c.points() {
            assert!(p.dot(&maximizer) <= 1.0 + 1e-9);
        }
        let PolarOutcome::Bounded { value, .. } = polar_support(&c, &pt(&[1.0, 1.0])).unwrap()
        else {
            panic!("expected bounded");
        };
        assert_abs_diff_eq!(value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn polar_of_the_permutohedron_is_unbounded_along_an_axis() {
        let a = permutohedron_321();
        let u = pt(&[1.0, 0.0, 0.0]);
        let PolarOutcome::Unbounded { direction } = polar_support(&a, &u).unwrap() else {
            panic!("expected unbounded — the recession direction (1,-1,-1) scaled");
        };
        // verify the certificate, not just the verdict
        assert!(u.dot(&direction) > 1e-9);
        for p in a.points() {
            assert!(p.dot(&direction) <= 1e-9);
        }
    }

    #[test]
    fn polar_of_the_permutohedron_along_the_diagonal() {
        let a = permutohedron_321();
        let u = pt(&[1.0, 1.0, 1.0]);
        let PolarOutcome::Bounded { value, maximizer } = polar_support(&a, &u).unwrap() else {
            panic!("expected bounded");
        };
        // x = (1,1,1)/6 is feasible and tight on every permutation
        assert_abs_diff_eq!(value, 0.5, epsilon = 1e-10);
        for p in a.points() {
            assert!(p.dot(&maximizer) <= 1.0 + 1e-9);
        }
        assert_abs_diff_eq!(u.dot(&maximizer), value, epsilon = 1e-9);
    }

    #[test]
    fn random_polar_values_self_certify_by_duality() {
        let mut rng = crate::sampling::rng_for(556, 0);
        for trial in 0..60 {
            let dim = rng.gen_range(2..=4);
            let mut pts: Vec<Point> = (0..rng.gen_range(3..=10))
                .map(|_| {
                    Point::new(
                        (0..dim)
                            .map(|_| rng.gen_range(-2.0..2.0))
                            .collect::<Vec<_>>(),
                    )
                    .unwrap()
                })
                .collect();
            // puncture axes in both directions to force a bounded polar
            for i in 0..dim {
                pts.push(Point::axis(dim, i).scale(0.5));
                pts.push(Point::axis(dim, i).scale(-0.5));
            }
            let c = PointCloud::new(pts, None).unwrap();
            let u = Point::new(
                (0..dim)
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let PolarOutcome::Bounded { value, maximizer } = polar_support(&c, &u).unwrap() else {
                panic!("trial {trial}: axes in the cloud force boundedness");
            };
            // primal feasibility of the maximizer…
            for p in c.points() {
                assert!(p.dot(&maximizer) <= 1.0 + 1e-8);
            }
            // …and the objective matches
            assert_abs_diff_eq!(u.dot(&maximizer), value, epsilon = 1e-8);
        }
    }

    #[test]
    fn bipolar_check_on_a_square_reproduces_all_support_values() {
        let r = bipolar_check(&square(), 64, 1e-6, 7).unwrap();
        assert_eq!(r.skipped, 0, "the square has 0 in its interior");
        assert!(r.checked > 0);
        assert!(r.max_error < 1e-8, "max error {}", r.max_error);
    }

    #[test]
    fn bipolar_check_skips_directions_with_tiny_support() {
        // a segment away from the origin: many directions have h ≤ η
        let c = cloud(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let r = bipolar_check(&c, 64, 1e-3, 7).unwrap();
        assert!(r.skipped > 0);
        assert!(r.checked > 0);
        assert!(r.max_error < 1e-8, "max error {}", r.max_error);
    }

    #[test]
    fn hausdorff_gap_between_square_and_diamond() {
        // circumradius-1 square vs the diamond with the same vertices’ radius:
        // the support gap is 1 − 1/√2, attained along coordinate axes
        let s = 1.0 / 2.0_f64.sqrt();
        let square_r1 = cloud(&[&[s, s], &[s, -s], &[-s, s], &[-s, -s]]);
        let diamond = cloud(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        let dirs = sampling::unit_directions(2, 64, 3);
        let got = hull_hausdorff(&square_r1, &diamond, &dirs).unwrap();
        let want = 1.0 - s;
        assert_abs_diff_eq!(got, want, epsilon = 1e-10);
        // dense-grid oracle: the sampled gap can only be below the sup
        let mut dense: f64 = 0.0;
        for i in 0..20000 {
            let a = std::f64::consts::TAU * (i as f64) / 20000.0;
            let u = pt(&[a.cos(), a.sin()]);
            let ha = support(&square_r1, &u).unwrap().value;
            let hb = support(&diamond, &u).unwrap().value;
            dense = dense.max((ha - hb).abs());
        }
        assert!(got <= dense + 1e-12);
        assert_abs_diff_eq!(dense, want, epsilon = 1e-7);
    }

    #[test]
    fn affine_dimension_of_standard_shapes() {
        let segment = cloud(&[&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]]);
        assert_eq!(affine_dimension(&segment, 1e-8).unwrap(), 1);
        let triangle = cloud(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(affine_dimension(&triangle, 1e-8).unwrap(), 2);
        let single = cloud(&[&[2.0, 2.0, 2.0]]);
        assert_eq!(affine_dimension(&single, 1e-8).unwrap(), 0);
        // translation does not change affine dimension
        let shifted = cloud(&[&[5.0, 5.0, 5.0], &[6.0, 6.0, 6.0]]);
        assert_eq!(affine_dimension(&shifted, 1e-8).unwrap(), 1);
    }

    #[test]
    fn affine_dimension_is_noise_tolerant_at_the_right_scale() {
        let mut rng = crate::sampling::rng_for(4242, 0);
        let pts: Vec<Point> = (0..40)
            .map(|_| {
                let x = rng.gen_range(-1.0..1.0);
                let y = rng.gen_range(-1.0..1.0);
                let noise = rng.gen_range(-1e-12..1e-12);
                pt(&[x, y, noise])
            })
            .collect();
        let c = PointCloud::new(pts, None).unwrap();
        assert_eq!(affine_dimension(&c, 1e-6).unwrap(), 2);
        // with a tolerance below the noise floor the rank fills up
        assert_eq!(affine_dimension(&c, 1e-14).unwrap(), 3);
    }

    #[test]
    fn cloud_projection_frames() {
        let c = square();
        let axis = Subspace::coordinate_axes(2, &[0]);
        let ambient = project_cloud(&c, &axis).unwrap();
        assert_eq!(ambient.dim(), 2);
        assert!(ambient.points().iter().all(|p| p.coords()[1] == 0.0));
        let coords = coordinates_cloud(&c, &axis).unwrap();
        assert_eq!(coords.dim(), 1);
        let mut xs: Vec<f64> = coords.points().iter().map(|p| p.coords()[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![-1.0, -1.0, 1.0, 1.0]);
    }
}
