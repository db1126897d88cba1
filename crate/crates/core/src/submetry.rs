//! Saturated sets, distance slopes, and the convexity detector.
//!
//! The quotient map of an orthogonal action is a submetry, and a subset of
//! the quotient corresponds to a *saturated* (orbit-union) subset `S` of the
//! ambient space.  The detector decides convexity of `S` two ways that back
//! each other up:
//!
//! * midpoints of pairs of points of `S` must stay in `S`;
//! * the distance function `f = d(·, S)`, viewed in the quotient, must have
//!   ascending slope 1 at every point outside `S` (measured with the quotient
//!   metric in the denominator — the ambient one is wrong whenever the fiber
//!   through the probe curves).

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Budgets, Tolerances, DEFAULT_SEED, SLOPE_RADII_FACTORS};
use crate::convex::{project_onto_polyhedron, Halfspace};
use crate::geom::Point;
use crate::groups::{orbit, orbit_distance, orbit_nearest, GroupAction};
use crate::sampling;
use crate::{Error, Result};

const STREAM_SURFACE: u64 = 0x7375_7266;
const STREAM_SLOPE: u64 = 0x736c_6f70;
const STREAM_DETECT: u64 = 0x6465_7463;
const STREAM_BASIC: u64 = 0x6261_7369;

/// Shape of a saturated set.
#[derive(Debug, Clone)]
pub enum SetKind {
    /// `{v : lo ≤ |v| ≤ hi}` — saturated under every orthogonal action.
    Radial { lo: f64, hi: f64 },
    /// A finite union of fibers, one through each representative.
    Fibers { reps: Vec<Point> },
    /// Sublevel set `{v : ⟨a, v⟩ ≤ level for all saturated normals a}` of a
    /// basic (orbit-wise maximal) linear form.
    BasicSublevel {
        halfspaces: Vec<Halfspace>,
        level: f64,
    },
}

/// A saturated subset of the ambient space of a group action.
#[derive(Debug, Clone)]
pub struct SaturatedSet {
    action: Arc<GroupAction>,
    kind: SetKind,
}

impl SaturatedSet {
    /// Annulus `lo ≤ |v| ≤ hi` (a point of the quotient's radial interval
    /// when `lo = hi`).
    pub fn radial(action: Arc<GroupAction>, lo: f64, hi: f64) -> Result<SaturatedSet> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi < lo {
            return Err(Error::Precondition(format!(
                "radial band needs 0 <= lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(SaturatedSet {
            action,
            kind: SetKind::Radial { lo, hi },
        })
    }

    /// Union of the fibers through the given representatives.
    pub fn fibers(action: Arc<GroupAction>, reps: Vec<Point>) -> Result<SaturatedSet> {
        if reps.is_empty() {
            return Err(Error::EmptyCloud);
        }
        for r in &reps {
            if r.dim() != action.ambient_dim() {
                return Err(Error::DimensionMismatch {
                    expected: action.ambient_dim(),
                    got: r.dim(),
                });
            }
        }
        Ok(SaturatedSet {
            action,
            kind: SetKind::Fibers { reps },
        })
    }

    /// Sublevel set of the basic function `v ↦ max_g ⟨g a, v⟩` built from the
    /// given directions: each direction is saturated over its orbit (exactly
    /// for finite groups, by a sampled orbit otherwise) and every translate
    /// contributes the halfspace `⟨g a, v⟩ ≤ level`.
    pub fn basic_sublevel(
        action: Arc<GroupAction>,
        directions: &[Point],
        level: f64,
        orbit_budget: usize,
        seed: u64,
    ) -> Result<SaturatedSet> {
        if !level.is_finite() {
            return Err(Error::NonFinite {
                index: 0,
                value: level,
            });
        }
        let tol = Tolerances::shared();
        let mut halfspaces = Vec::new();
        for a in directions {
            let o = orbit(&action, a, orbit_budget, seed)?;
            for p in o.cloud().deduplicated(tol.dedup_point).points() {
                halfspaces.push(Halfspace::new(p.clone(), level)?);
            }
        }
        Ok(SaturatedSet {
            action,
            kind: SetKind::BasicSublevel { halfspaces, level },
        })
    }

    pub fn action(&self) -> &Arc<GroupAction> {
        &self.action
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        self.action.ambient_dim()
    }

    /// Characteristic length used to size probe regions.
    pub fn scale(&self) -> f64 {
        match &self.kind {
            SetKind::Radial { hi, .. } => hi.max(1.0),
            SetKind::Fibers { reps } => reps.iter().map(Point::norm).fold(1.0, f64::max),
            SetKind::BasicSublevel { halfspaces, level } => {
                let boundary = halfspaces
                    .iter()
                    .map(|h| level.abs() / h.normal.norm().max(1e-12))
                    .fold(0.0, f64::max);
                boundary.max(1.0)
            }
        }
    }

    /// Nearest point of the set.
    pub fn nearest(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: x.dim(),
            });
        }
        let refine = Budgets::default().refine_restarts;
        match &self.kind {
            SetKind::Radial { lo, hi } => {
                let r = x.norm();
                if r < *lo {
                    if r == 0.0 {
                        // every direction is equally near; pick an axis
                        return Ok(Point::axis(x.dim(), 0).scale(*lo));
                    }
                    Ok(x.scale(lo / r))
                } else if r > *hi {
                    Ok(x.scale(hi / r))
                } else {
                    Ok(x.clone())
                }
            }
            SetKind::Fibers { reps } => {
                let mut best = f64::INFINITY;
                let mut best_point = reps[0].clone();
                for rep in reps {
                    let (d, p) = orbit_nearest(&self.action, rep, x, refine)?;
                    if d < best {
                        best = d;
                        best_point = p;
                    }
                }
                Ok(best_point)
            }
            SetKind::BasicSublevel { halfspaces, .. } => project_onto_polyhedron(x, halfspaces),
        }
    }

    /// Distance to the set.
    pub fn distance(&self, x: &Point) -> Result<f64> {
        match &self.kind {
            // closed forms avoid the round-trip through `nearest`
            SetKind::Radial { lo, hi } => {
                let r = x.norm();
                if x.dim() != self.ambient_dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.ambient_dim(),
                        got: x.dim(),
                    });
                }
                Ok(if r < *lo {
                    lo - r
                } else if r > *hi {
                    r - hi
                } else {
                    0.0
                })
            }
            _ => Ok(self.nearest(x)?.distance(x)),
        }
    }

    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }

    /// Deterministic sample of points belonging to the set.
    pub fn surface_sample(&self, count: usize, seed: u64) -> Result<Vec<Point>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let dim = self.ambient_dim();
        let mut rng = sampling::rng_for(seed ^ STREAM_SURFACE, 0);
        match &self.kind {
            SetKind::Radial { lo, hi } => {
                let mut out = Vec::with_capacity(count);
                for i in 0..count {
                    let u = sampling::unit_sphere_point(dim, &mut rng);
                    // hit both boundary spheres deterministically
                    let r = match i % 4 {
                        0 => *lo,
                        1 => *hi,
                        _ => lo + (hi - lo) * rng.gen_range(0.0..=1.0),
                    };
                    out.push(u.scale(r));
                }
                Ok(out)
            }
            SetKind::Fibers { reps } => {
                let mut out = Vec::with_capacity(count);
                let per_rep = count.div_ceil(reps.len());
                for (i, rep) in reps.iter().enumerate() {
                    let o = orbit(&self.action, rep, per_rep.max(2), seed ^ (i as u64))?;
                    out.extend(o.points().iter().cloned());
                }
                // round-robin trim to the requested count
                if out.len() > count {
                    let step = out.len() as f64 / count as f64;
                    out = (0..count)
                        .map(|i| out[(i as f64 * step) as usize].clone())
                        .collect();
                }
                Ok(out)
            }
            SetKind::BasicSublevel { halfspaces, .. } => {
                let radius = 2.0 * self.scale();
                let mut out = Vec::with_capacity(count);
                for _ in 0..count {
                    let q = sampling::ball_point(dim, radius, &mut rng);
                    out.push(project_onto_polyhedron(&q, halfspaces)?);
                }
                Ok(out)
            }
        }
    }

    /// Largest observed violation of saturation: `|d(x, S) − d(gx, S)|` over
    /// sampled points and group elements.  Exactly-represented sets report
    /// rounding noise only.
    pub fn saturation_defect(&self, samples: usize, seed: u64) -> Result<f64> {
        let dim = self.ambient_dim();
        let mut rng = sampling::rng_for(seed ^ STREAM_SURFACE, 1);
        let radius = 2.0 * self.scale();
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let x = sampling::ball_point(dim, radius, &mut rng);
            let g = self.action.sample_element(&mut rng);
            let dx = self.distance(&x)?;
            let dgx = self.distance(&self.action.apply(&g, &x))?;
            worst = worst.max((dx - dgx).abs());
        }
        Ok(worst)
    }

    /// JSON descriptor for report provenance.
    pub fn descriptor(&self) -> serde_json::Value {
        match &self.kind {
            SetKind::Radial { lo, hi } => serde_json::json!({
                "kind": "radial", "lo": lo, "hi": hi,
            }),
            SetKind::Fibers { reps } => serde_json::json!({
                "kind": "fibers", "reps": reps.len(),
            }),
            SetKind::BasicSublevel { halfspaces, level } => serde_json::json!({
                "kind": "basic-sublevel",
                "halfspaces": halfspaces.len(),
                "level": level,
            }),
        }
    }
}

/// Slope of the distance function at a probe point, one entry per radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub base_point: Point,
    pub radii: Vec<f64>,
    /// Best ratio `(f(y) − f(x)) / d_quotient(x, y)` found at each radius,
    /// capped at 1 (the distance function is 1-Lipschitz in the quotient).
    pub per_radius_sup: Vec<f64>,
    /// Limit estimate: the larger of the two smallest-radius suprema.  Can be
    /// negative where the distance function decreases in every direction.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`, the valid range of an ascending slope.
    pub clamped: f64,
}

/// Estimates the ascending slope of `f = d(·, S)` at `x`, in the quotient:
/// the numerator compares set distances, the denominator is the orbit-space
/// distance between the probe and the perturbed point.  Directions include
/// the exact steepest-ascent candidate `(x − nearest)/f(x)` and its negation
/// on top of the seeded uniform sample.
pub fn ascending_slope(set: &SaturatedSet, x: &Point, seed: u64) -> Result<SlopeEstimate> {
    let tol = Tolerances::shared();
    let budgets = Budgets::default();
    let f_x = set.distance(x)?;
    let radii: Vec<f64> = SLOPE_RADII_FACTORS.iter().map(|c| c * f_x).collect();
    let smallest = radii.iter().copied().fold(f64::INFINITY, f64::min);
    if !(f_x > 0.0) || smallest <= tol.slope_denominator_floor {
        return Err(Error::InsideMargin {
            distance: f_x,
            radius: smallest,
        });
    }
    let nearest = set.nearest(x)?;
    let ascent = x.sub(&nearest).scale(1.0 / f_x);
    let stream = sampling::mix_floats(STREAM_SLOPE, x.coords());
    let mut rng = sampling::rng_for(seed ^ STREAM_SLOPE, stream);
    let mut directions: Vec<Point> = vec![ascent.clone(), ascent.scale(-1.0)];
    for _ in 0..budgets.slope_samples {
        directions.push(sampling::unit_sphere_point(x.dim(), &mut rng));
    }
    let refine = budgets.refine_restarts;
    let mut per_radius_sup = Vec::with_capacity(radii.len());
    for &r in &radii {
        let mut sup = f64::NEG_INFINITY;
        for u in &directions {
            let y = x.add(&u.scale(r));
            let den = orbit_distance(&set.action, x, &y, refine)?;
            if den <= tol.slope_denominator_floor {
                continue; // y is on the fiber of x: no quotient displacement
            }
            let num = set.distance(&y)? - f_x;
            sup = sup.max((num / den).min(1.0));
        }
        if sup == f64::NEG_INFINITY {
            return Err(Error::SamplerStarved {
                context: "slope direction sampling",
                attempts: directions.len(),
            });
        }
        per_radius_sup.push(sup);
    }
    // limsup as r → 0: trust the two smallest radii
    let raw = per_radius_sup
        .iter()
        .rev()
        .take(2)
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let clamped = raw.clamp(0.0, 1.0);
    Ok(SlopeEstimate {
        base_point: x.clone(),
        radii,
        per_radius_sup,
        raw,
        clamped,
    })
}

/// Detector configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectParams {
    /// Slope probes to evaluate.
    pub probes: usize,
    /// Midpoint pairs to test.
    pub midpoint_pairs: usize,
    /// A slope below `1 − slope_margin` counts as a nonconvexity witness.
    pub slope_margin: f64,
    /// A midpoint farther than this from the set counts as a witness.
    pub membership_tol: f64,
    pub seed: u64,
}

impl Default for DetectParams {
    fn default() -> DetectParams {
        let budgets = Budgets::default();
        DetectParams {
            probes: budgets.detect_probes,
            midpoint_pairs: budgets.midpoint_pairs,
            slope_margin: 0.1,
            membership_tol: 1e-5,
            seed: DEFAULT_SEED,
        }
    }
}

/// Detector verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentWithConvex,
    NonconvexWitness,
    NoProbePoints,
}

/// Kind of evidence behind a nonconvexity verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `points = [p, q, midpoint]`, violation = distance of the midpoint to
    /// the set.
    MidpointGap,
    /// `points = [probe]`, violation = `1 − slope`.
    SlopeDeficit,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub points: Vec<Point>,
    pub violation: f64,
}

/// Full detector outcome.
#[derive(Debug, Clone, Serialize)]
pub struct DetectOutcome {
    pub verdict: Verdict,
    pub probes_used: usize,
    pub pairs_used: usize,
    /// Smallest clamped slope seen (1.0 when no probe was evaluated).
    pub min_slope: f64,
    /// Largest midpoint violation seen.
    pub max_midpoint_violation: f64,
    pub witness: Option<Witness>,
    pub slopes: Vec<SlopeEstimate>,
}

/// Decides convexity of a saturated set by midpoint checks and the slope
/// criterion.  Probe points mix deterministic candidates (the origin, exact
/// and jittered midpoints of surface pairs — where slope deficits of
/// nonconvex sets concentrate) with rejection-sampled ball points.
pub fn convexity_detect(set: &SaturatedSet, params: &DetectParams) -> Result<DetectOutcome> {
    let budgets = Budgets::default();
    let dim = set.ambient_dim();
    let scale = set.scale();
    let probe_floor = 1e-4 * scale;

    // stage 1: midpoints of surface pairs
    let surface = set.surface_sample(2 * params.midpoint_pairs, params.seed)?;
    let mut witness: Option<Witness> = None;
    let mut max_violation: f64 = 0.0;
    let mut pairs_used = 0;
    let mut candidate_probes: Vec<Point> = Vec::new();
    candidate_probes.push(Point::zeros(dim));
    let mut jitter_rng = sampling::rng_for(params.seed ^ STREAM_DETECT, 0);
    for pair in surface.chunks_exact(2) {
        let mid = pair[0].midpoint(&pair[1]);
        let violation = set.distance(&mid)?;
        pairs_used += 1;
        if violation > max_violation {
            max_violation = violation;
            if violation > params.membership_tol {
                let better = match &witness {
                    None => true,
                    Some(w) => w.kind == WitnessKind::MidpointGap && violation > w.violation,
                };
                if better {
                    witness = Some(Witness {
                        kind: WitnessKind::MidpointGap,
                        points: vec![pair[0].clone(), pair[1].clone(), mid.clone()],
                        violation,
                    });
                }
            }
        }
        // midpoints and their jitters make the best slope probes
        candidate_probes.push(mid.clone());
        let jitter =
            Point::from_vector(sampling::gaussian_vector(dim, &mut jitter_rng) * (0.05 * scale));
        candidate_probes.push(mid.add(&jitter));
    }

    // stage 2: slope probes
    let mut slopes: Vec<SlopeEstimate> = Vec::new();
    let mut min_slope: f64 = 1.0;
    let mut rejections = 0usize;
    let mut candidate_iter = candidate_probes.into_iter();
    let mut probe_rng = sampling::rng_for(params.seed ^ STREAM_DETECT, 1);
    while slopes.len() < params.probes {
        let x = match candidate_iter.next() {
            Some(x) => x,
            None => {
                rejections += 1;
                if rejections > budgets.rejection_attempts {
                    break;
                }
                sampling::ball_point(dim, budgets.probe_ball_factor * scale, &mut probe_rng)
            }
        };
        if set.distance(&x)? <= probe_floor {
            continue;
        }
        let est = match ascending_slope(set, &x, params.seed) {
            Ok(e) => e,
            Err(Error::InsideMargin { .. }) => continue,
            Err(e) => return Err(e),
        };
        min_slope = min_slope.min(est.clamped);
        if est.clamped < 1.0 - params.slope_margin {
            let deficit = 1.0 - est.clamped;
            let replace = match &witness {
                None => true,
                Some(w) => w.kind == WitnessKind::SlopeDeficit && deficit > w.violation,
            };
            if replace {
                witness = Some(Witness {
                    kind: WitnessKind::SlopeDeficit,
                    points: vec![x.clone()],
                    violation: deficit,
                });
            }
        }
        slopes.push(est);
    }

    let verdict = if witness.is_some() {
        Verdict::NonconvexWitness
    } else if slopes.is_empty() && pairs_used == 0 {
        Verdict::NoProbePoints
    } else if slopes.is_empty() {
        // only midpoints were checkable (the set may fill its ball); still
        // informative, but flag the missing slope stage
        Verdict::NoProbePoints
    } else {
        Verdict::ConsistentWithConvex
    };
    Ok(DetectOutcome {
        verdict,
        probes_used: slopes.len(),
        pairs_used,
        min_slope,
        max_midpoint_violation: max_violation,
        witness,
        slopes,
    })
}

/// Independent midpoint oracle: samples pairs from the set and reports the
/// worst midpoint escape.  Used to cross-check detector verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct MidpointCheck {
    pub pairs: usize,
    pub max_violation: f64,
    pub worst: Option<(Point, Point, Point)>,
}

pub fn midpoint_violation(set: &SaturatedSet, pairs: usize, seed: u64) -> Result<MidpointCheck> {
    let surface = set.surface_sample(2 * pairs, seed)?;
    let mut max_violation: f64 = 0.0;
    let mut worst = None;
    let mut used = 0;
    for pair in surface.chunks_exact(2) {
        let mid = pair[0].midpoint(&pair[1]);
        let v = set.distance(&mid)?;
        used += 1;
        if v > max_violation {
            max_violation = v;
            worst = Some((pair[0].clone(), pair[1].clone(), mid));
        }
    }
    Ok(MidpointCheck {
        pairs: used,
        max_violation,
        worst,
    })
}

/// Two-route evaluation of a basic function `b(v) = max_g ⟨g u, v⟩`.
#[derive(Debug, Clone, Serialize)]
pub struct BasicFunctionCheck {
    /// Direct route: support of the (enumerated or sampled) fiber of `u`.
    pub support_value: f64,
    /// Pairing route: `sup_t (t − d(v, t·fiber(u)))` on a geometric grid.
    pub pairing_value: f64,
    pub agreement: f64,
    /// Truncation error bound `|v|² / (2 (t_max − |v|))` for stopping the
    /// pairing at `t_max`.
    pub gap_bound: f64,
    pub t_max: f64,
    /// Largest observed `|b(g v) − b(v)|` over sampled group elements.
    pub invariance_defect: f64,
}

/// Checks that the support route and the pairing route to the basic function
/// agree within the truncation bound, and that the function is invariant.
pub fn basic_function_check(
    action: &Arc<GroupAction>,
    v: &Point,
    u: &Point,
    orbit_budget: usize,
    seed: u64,
) -> Result<BasicFunctionCheck> {
    let tol = Tolerances::shared();
    let norm = u.norm();
    if (norm - 1.0).abs() > tol.unit_direction {
        return Err(Error::NotUnit {
            norm,
            tol: tol.unit_direction,
        });
    }
    let fiber = orbit(action, u, orbit_budget, seed)?;
    let b = |w: &Point| -> f64 {
        fiber
            .points()
            .iter()
            .map(|p| p.dot(w))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let support_value = b(v);

    // pairing route, with the distance evaluated at unit scale:
    // d(v, t·fiber(u)) = t · d(v/t, fiber(u))
    let scale = v.norm().max(1.0);
    let t_max = if action.is_exact() {
        // exact distances: push the truncation error to ~1e-6
        scale + v.norm().powi(2).max(1.0) / (2.0 * 1e-6)
    } else {
        64.0 * scale
    };
    let refine = Budgets::default().refine_restarts;
    let mut pairing_value = f64::NEG_INFINITY;
    let grid_len = 10;
    let t0 = 2.0 * scale;
    for i in 0..grid_len {
        let t = t0 * (t_max / t0).powf(i as f64 / (grid_len - 1) as f64);
        let d = t * orbit_distance(action, u, &v.scale(1.0 / t), refine)?;
        pairing_value = pairing_value.max(t - d);
    }
    let gap_bound = crate::geom::busemann_gap_bound(v.norm(), t_max);

    let mut rng = sampling::rng_for(seed ^ STREAM_BASIC, 0);
    let mut invariance_defect: f64 = 0.0;
    for _ in 0..8 {
        let g = action.sample_element(&mut rng);
        invariance_defect = invariance_defect.max((b(&action.apply(&g, v)) - support_value).abs());
    }
    Ok(BasicFunctionCheck {
        support_value,
        pairing_value,
        agreement: (support_value - pairing_value).abs(),
        gap_bound,
        t_max,
        invariance_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::ActionConfig;
    use approx::assert_abs_diff_eq;

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn o2() -> Arc<GroupAction> {
        GroupAction::from_config(&ActionConfig::new("O", 2).with_seed(5)).unwrap()
    }

    fn s3() -> Arc<GroupAction> {
        GroupAction::from_config(&ActionConfig::new("S", 3)).unwrap()
    }

    fn neg2() -> Arc<GroupAction> {
        GroupAction::from_config(&ActionConfig::new("negation", 2)).unwrap()
    }

    #[test]
    fn radial_set_distances_are_analytic() {
        let s = SaturatedSet::radial(o2(), 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(s.distance(&pt(&[0.0, 0.0])).unwrap(), 1.0);
        assert_abs_diff_eq!(s.distance(&pt(&[0.5, 0.0])).unwrap(), 0.5);
        assert_abs_diff_eq!(s.distance(&pt(&[1.5, 0.0])).unwrap(), 0.0);
        assert_abs_diff_eq!(s.distance(&pt(&[0.0, 5.0])).unwrap(), 3.0);
        let n = s.nearest(&pt(&[0.0, 5.0])).unwrap();
        assert!(n.distance(&pt(&[0.0, 2.0])) < 1e-12);
        // center of the hole projects to the inner sphere
        assert_abs_diff_eq!(s.nearest(&pt(&[0.0, 0.0])).unwrap().norm(), 1.0);
    }

    #[test]
    fn radial_validation() {
        assert!(SaturatedSet::radial(o2(), -1.0, 2.0).is_err());
        assert!(SaturatedSet::radial(o2(), 2.0, 1.0).is_err());
    }

    #[test]
    fn fiber_set_distance_matches_brute_enumeration() {
        let action = s3();
        let rep = pt(&[3.0, 1.0, 2.0]);
        let s = SaturatedSet::fibers(action.clone(), vec![rep.clone()]).unwrap();
        let mut rng = sampling::rng_for(31, 0);
        for _ in 0..40 {
            let x =
                Point::new((0..3).map(|_| rng.gen_range(-3.0..3.0)).collect::<Vec<_>>()).unwrap();
            let got = s.distance(&x).unwrap();
            // brute force over the six permutations of the representative
            let crate::groups::Group::Finite(f) = action.group() else {
                unreachable!()
            };
            let want = f
                .elements()
                .iter()
                .map(|g| action.apply(g, &rep).distance(&x))
                .fold(f64::INFINITY, f64::min);
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn basic_sublevel_of_negation_is_a_slab() {
        let s = SaturatedSet::basic_sublevel(neg2(), &[pt(&[1.0, 0.0])], 1.0, 0, 1).unwrap();
        // {±I}·e₁ gives |x₁| ≤ 1
        assert_abs_diff_eq!(s.distance(&pt(&[3.0, 5.0])).unwrap(), 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.distance(&pt(&[-4.0, 0.0])).unwrap(), 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.distance(&pt(&[0.2, -9.0])).unwrap(), 0.0, epsilon = 1e-12);
        assert!(s.saturation_defect(50, 3).unwrap() < 1e-10);
    }

    #[test]
    fn saturation_defects_reflect_exactness() {
        let radial = SaturatedSet::radial(o2(), 0.5, 1.5).unwrap();
        assert!(radial.saturation_defect(50, 3).unwrap() < 1e-12);
        let fibers = SaturatedSet::fibers(s3(), vec![pt(&[1.0, 2.0, 3.0])]).unwrap();
        assert!(fibers.saturation_defect(50, 3).unwrap() < 1e-12);
    }

    #[test]
    fn surface_samples_lie_in_the_set() {
        let sets = vec![
            SaturatedSet::radial(o2(), 1.0, 2.0).unwrap(),
            SaturatedSet::fibers(s3(), vec![pt(&[1.0, 2.0, 3.0])]).unwrap(),
            SaturatedSet::basic_sublevel(neg2(), &[pt(&[1.0, 0.0])], 1.0, 0, 1).unwrap(),
        ];
        for s in sets {
            for p in s.surface_sample(40, 9).unwrap() {
                assert!(s.distance(&p).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn slope_is_one_between_the_spheres_and_zero_at_the_center() {
        // S = unit circle under O(2): the quotient is a half-line with S at 1
        let s = SaturatedSet::radial(o2(), 1.0, 1.0).unwrap();
        let est = ascending_slope(&s, &pt(&[0.5, 0.0]), 7).unwrap();
        assert!(est.clamped > 0.999, "slope {est:?}");
        // at the origin the distance peaks: every direction descends
        let center = ascending_slope(&s, &pt(&[0.0, 0.0]), 7).unwrap();
        assert!(center.clamped < 1e-9, "slope {center:?}");
        assert!(center.raw < -0.9, "raw should be ≈ −1, got {center:?}");
        // outside the circle the ascent direction is radial
        let outside = ascending_slope(&s, &pt(&[0.0, 1.7]), 7).unwrap();
        assert!(outside.clamped > 0.999, "slope {outside:?}");
    }

    #[test]
    fn slope_probe_inside_the_set_is_rejected() {
        let s = SaturatedSet::radial(o2(), 1.0, 2.0).unwrap();
        assert!(matches!(
            ascending_slope(&s, &pt(&[1.5, 0.0]), 7),
            Err(Error::InsideMargin { .. })
        ));
    }

    #[test]
    fn slope_ratios_never_exceed_one() {
        let s = SaturatedSet::fibers(s3(), vec![pt(&[2.0, 0.0, -1.0])]).unwrap();
        for probe in [
            pt(&[0.3, 0.3, 0.3]),
            pt(&[1.0, -1.0, 0.5]),
            pt(&[-2.0, 1.0, 2.0]),
        ] {
            let est = ascending_slope(&s, &probe, 11).unwrap();
            for v in &est.per_radius_sup {
                assert!(*v <= 1.0 + 1e-12);
            }
            assert!(est.clamped <= 1.0);
        }
    }

    #[test]
    fn detector_accepts_the_ball() {
        // radial [0, 1] has a convex (disk) preimage
        let s = SaturatedSet::radial(o2(), 0.0, 1.0).unwrap();
        let params = DetectParams {
            probes: 40,
            midpoint_pairs: 60,
            ..DetectParams::default()
        };
        let out = convexity_detect(&s, &params).unwrap();
        assert_eq!(out.verdict, Verdict::ConsistentWithConvex);
        assert!(out.min_slope > 0.999);
        assert!(out.max_midpoint_violation < 1e-10);
    }

    #[test]
    fn detector_rejects_the_circle_with_a_witness() {
        // radial [1, 1]: the circle is saturated but not convex
        let s = SaturatedSet::radial(o2(), 1.0, 1.0).unwrap();
        let params = DetectParams {
            probes: 40,
            midpoint_pairs: 60,
            ..DetectParams::default()
        };
        let out = convexity_detect(&s, &params).unwrap();
        assert_eq!(out.verdict, Verdict::NonconvexWitness);
        let w = out.witness.expect("witness should be populated");
        assert!(w.violation > 0.05, "violation {w:?}");
        // cross-check the witness against the set itself
        match w.kind {
            WitnessKind::MidpointGap => {
                let mid = w.points[0].midpoint(&w.points[1]);
                assert!(s.distance(&w.points[0]).unwrap() < 1e-8);
                assert!(s.distance(&w.points[1]).unwrap() < 1e-8);
                assert_abs_diff_eq!(s.distance(&mid).unwrap(), w.violation, epsilon = 1e-9);
            }
            WitnessKind::SlopeDeficit => {
                let est = ascending_slope(&s, &w.points[0], params.seed).unwrap();
                assert!(est.clamped < 0.9);
            }
        }
    }

    #[test]
    fn detector_rejects_antipodal_fibers() {
        // {±I} fiber through (1, 0): two points, their midpoint is the origin
        let s = SaturatedSet::fibers(neg2(), vec![pt(&[1.0, 0.0])]).unwrap();
        let out = convexity_detect(
            &s,
            &DetectParams {
                probes: 30,
                midpoint_pairs: 40,
                ..DetectParams::default()
            },
        )
        .unwrap();
        assert_eq!(out.verdict, Verdict::NonconvexWitness);
        // independent oracle agrees: the worst midpoint is the origin
        let oracle = midpoint_violation(&s, 40, 3).unwrap();
        assert!(oracle.max_violation > 0.999);
    }

    #[test]
    fn detector_rejects_the_pentagon_orbit() {
        let c5 = GroupAction::from_config(&ActionConfig::new("cyclic", 5)).unwrap();
        let s = SaturatedSet::fibers(c5, vec![pt(&[1.0, 0.0])]).unwrap();
        let out = convexity_detect(
            &s,
            &DetectParams {
                probes: 30,
                midpoint_pairs: 40,
                ..DetectParams::default()
            },
        )
        .unwrap();
        assert_eq!(out.verdict, Verdict::NonconvexWitness);
        let oracle = midpoint_violation(&s, 40, 3).unwrap();
        // the midpoint of two pentagon vertices sits half an edge (or more)
        // away from the vertex set: at least sin(π/5) ≈ 0.59
        assert!(oracle.max_violation > 0.15);
    }

    #[test]
    fn basic_function_routes_agree_for_permutations() {
        let action = s3();
        let v = pt(&[3.0, 1.0, 2.0]);
        let u = pt(&[1.0, 0.0, 0.0]);
        let c = basic_function_check(&action, &v, &u, 0, 5).unwrap();
        // max over permutations of ⟨v, π e₁⟩ picks the largest coordinate
        assert_abs_diff_eq!(c.support_value, 3.0, epsilon = 1e-12);
        assert!(c.invariance_defect < 1e-12);
        assert!(
            c.agreement <= c.gap_bound + 1e-7,
            "agreement {} vs bound {}",
            c.agreement,
            c.gap_bound
        );
    }

    #[test]
    fn basic_function_routes_agree_on_the_circle() {
        let action = o2();
        let v = pt(&[1.2, -0.9]);
        let u = pt(&[0.0, 1.0]);
        let c = basic_function_check(&action, &v, &u, 2000, 5).unwrap();
        // the basic function of a transitive sphere action is the norm; the
        // sampled fiber undershoots by about (max angular gap)²/8 · |v|
        assert!((c.support_value - v.norm()).abs() < 5e-4);
        assert!(c.support_value <= v.norm() + 1e-12);
        assert!(
            c.agreement <= c.gap_bound + 1e-3,
            "agreement {} vs bound {}",
            c.agreement,
            c.gap_bound
        );
        assert!(c.invariance_defect < 1e-3);
    }

    #[test]
    fn basic_function_requires_a_unit_direction() {
        let action = o2();
        let v = pt(&[1.0, 0.0]);
        assert!(matches!(
            basic_function_check(&action, &v, &pt(&[2.0, 0.0]), 10, 1),
            Err(Error::NotUnit { .. })
        ));
    }
}
