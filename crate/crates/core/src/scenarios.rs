//! End-to-end verification scenarios.
//!
//! Each scenario wires orbits, hulls and submetry checks into one
//! [`VerificationReport`].  The common pattern: compute a quantity along two
//! independent routes (a sampled construction and an exact oracle — facet
//! descriptions, closed-form support functions, alignment identities) and
//! record the disagreement as a bounded metric.  Reports are a pure function
//! of `(params, seed)`.

use std::path::Path;
use std::sync::Arc;

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Budgets, Tolerances, DEFAULT_SEED};
use crate::convex::{
    affine_dimension, conv_membership, coordinates_cloud, hull_hausdorff, support,
};
use crate::geom::{point_set_hausdorff, Point, PointCloud, Subspace};
use crate::groups::{
    cayley, diagonal_matrix_subspace, fixed_point_subspace, orbit, orbit_distance, random_skew,
    sym_embed, ActionConfig, Group, GroupAction,
};
use crate::report::{
    artifact_path, write_metrics_csv, write_points_csv, Bound, Status, VerificationReport,
};
use crate::sampling::{self, mix_bytes, rng_for};
use crate::submetry::{
    convexity_detect, midpoint_violation, DetectParams, SaturatedSet, Verdict, WitnessKind,
};
use crate::{Error, Result};

pub const SCENARIO_IDS: [&str; 5] = [
    "schur-horn",
    "fat-section",
    "orbitope-gap",
    "finite-counterexample",
    "fixed-points",
];

/// Tunable scenario inputs.  Fields a scenario does not use are ignored;
/// [`default_params`] fills in the recommended values per scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioParams {
    /// Matrix size of the acting group.
    pub n: usize,
    /// Copies / section width, where the scenario has one.
    pub k: usize,
    /// Spectrum for the symmetric-matrix scenario.
    pub eigenvalues: Vec<f64>,
    /// Compact group spec (`neg2`, `C5`, `S3`, …) for the finite scenario.
    pub group: String,
    /// Explicit seed vector.  Empty means "sample a generic one" for the
    /// section scenarios; the finite scenario requires it.
    pub point: Vec<f64>,
    pub orbit_budget: usize,
    pub direction_budget: usize,
    /// Quotient-distance pairs (fat-section) / midpoint pairs (finite).
    pub pair_budget: usize,
    /// Detector probe budget.
    pub probe_budget: usize,
    /// How many samples get the expensive hull-membership cross-check.
    pub membership_subset: usize,
    /// Budget-indexed tolerance for sampled-hull agreement.
    pub hull_tol: f64,
    /// Tolerance for exactly-certified pointwise checks.
    pub exact_tol: f64,
    /// Agreement tolerance between full and reduced quotient distances.
    pub isometry_tol: f64,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> ScenarioParams {
        ScenarioParams {
            n: 3,
            k: 3,
            eigenvalues: vec![3.0, 2.0, 1.0],
            group: "neg2".into(),
            point: vec![1.0, 0.0],
            orbit_budget: 20_000,
            direction_budget: 500,
            pair_budget: 100,
            probe_budget: 40,
            membership_subset: 400,
            hull_tol: 0.05,
            exact_tol: 1e-8,
            isometry_tol: 1e-3,
            seed: DEFAULT_SEED,
        }
    }
}

/// Recommended parameters for a scenario id.
pub fn default_params(id: &str) -> Result<ScenarioParams> {
    let mut p = ScenarioParams::default();
    match id {
        "schur-horn" => {}
        "fat-section" => {
            p.n = 4;
            p.k = 3;
            p.point = Vec::new();
            p.direction_budget = 256;
            p.membership_subset = 200;
            p.exact_tol = 1e-6;
        }
        "orbitope-gap" => {
            p.n = 4;
            p.k = 3;
            p.point = Vec::new();
            p.orbit_budget = 2_000;
            p.direction_budget = 0;
        }
        "finite-counterexample" => {
            p.orbit_budget = 64;
            p.pair_budget = 60;
        }
        "fixed-points" => {
            p.orbit_budget = 2_000;
            p.pair_budget = 6;
        }
        other => {
            return Err(Error::Config(format!(
                "unknown scenario '{other}'; expected one of: {}",
                SCENARIO_IDS.join(", ")
            )))
        }
    }
    Ok(p)
}

/// Dispatches a scenario by id, writing CSV artifacts when `out_dir` is set.
pub fn run_scenario(
    id: &str,
    params: &ScenarioParams,
    out_dir: Option<&Path>,
) -> Result<VerificationReport> {
    match id {
        "schur-horn" => scenario_schur_horn(params, out_dir),
        "fat-section" => scenario_fat_section(params, out_dir),
        "orbitope-gap" => scenario_orbitope_gap(params, out_dir),
        "finite-counterexample" => scenario_finite_counterexample(params, out_dir),
        "fixed-points" => scenario_fixed_points(params, out_dir),
        other => Err(Error::Config(format!(
            "unknown scenario '{other}'; expected one of: {}",
            SCENARIO_IDS.join(", ")
        ))),
    }
}

fn attach_config(report: &mut VerificationReport, params: &ScenarioParams) -> Result<()> {
    report.config = Some(serde_json::to_value(params)?);
    Ok(())
}

/// Writes the point-cloud artifacts plus the metrics CSV; call after
/// `finalize` so the CSV records final pass/fail flags.
fn emit_artifacts(
    report: &mut VerificationReport,
    out_dir: Option<&Path>,
    clouds: &[(&str, &PointCloud)],
) -> Result<()> {
    let Some(dir) = out_dir else {
        return Ok(());
    };
    std::fs::create_dir_all(dir)?;
    for (suffix, cloud) in clouds {
        let path = artifact_path(dir, &report.scenario_id, report.seed, suffix);
        write_points_csv(cloud, &path)?;
        report.artifacts.push(path.display().to_string());
    }
    let mpath = artifact_path(dir, &report.scenario_id, report.seed, "metrics");
    write_metrics_csv(report, &mpath)?;
    report.artifacts.push(mpath.display().to_string());
    Ok(())
}

/// Downgrades a failure to `unconverged` when only the listed budget-indexed
/// sampled metrics failed: the run is inconclusive at this budget rather than
/// in contradiction with an exactly-checked claim.
fn soften_sampling_failures(report: &mut VerificationReport, sampled: &[&str]) {
    if report.status != Status::Fail {
        return;
    }
    let only_sampled = {
        let failing = report.failing_metrics();
        !failing.is_empty() && failing.iter().all(|m| sampled.contains(&m.name.as_str()))
    };
    if only_sampled {
        report.status = Status::Unconverged;
        report.note("only budget-indexed sampled metrics failed; rerun with a larger budget");
    }
}

// ---------------------------------------------------------------------------
// schur-horn

/// Projects the conjugation orbit of a symmetric matrix onto its diagonal and
/// compares it with the permutohedron of the spectrum.
///
/// Membership uses the exact facet description (sorted partial sums of the
/// diagonal dominated by those of the spectrum, traces equal), cross-checked
/// on a subset by Euclidean nearest-point distance to the vertex hull; hull
/// agreement uses support functions over a seeded direction sweep.
pub fn scenario_schur_horn(
    p: &ScenarioParams,
    out_dir: Option<&Path>,
) -> Result<VerificationReport> {
    let n = p.n;
    if !(2..=5).contains(&n) {
        return Err(Error::Config(format!(
            "spectrum projection needs 2 <= n <= 5, got n={n}"
        )));
    }
    if p.eigenvalues.len() != n {
        return Err(Error::Config(format!(
            "expected {n} eigenvalues, got {}",
            p.eigenvalues.len()
        )));
    }
    if p.eigenvalues.iter().any(|c| !c.is_finite()) {
        return Err(Error::Config("eigenvalues must be finite".into()));
    }
    let tol = Tolerances::shared();
    let mut report = VerificationReport::new("schur-horn", p.seed);
    report
        .budget("orbit_samples", p.orbit_budget as u64)
        .budget("directions", p.direction_budget as u64)
        .budget("membership_subset", p.membership_subset as u64);

    let action = GroupAction::from_config(
        &ActionConfig::new("SO", n)
            .with_rep("conjugation-symmetric")
            .with_seed(p.seed),
    )?;
    report.note(format!("action: {}", action.name()));
    let lambda_mat = DMatrix::from_fn(n, n, |i, j| if i == j { p.eigenvalues[i] } else { 0.0 });
    let v = sym_embed(&lambda_mat);
    let orb = orbit(&action, &v, p.orbit_budget, p.seed)?;
    report.metric(
        "sphere_defect",
        orb.sphere_defect(),
        Bound::AtMost(tol.orbit_sphere),
    );

    // diagonal entries of every conjugated matrix
    let sigma = diagonal_matrix_subspace(n);
    let diagonals = coordinates_cloud(orb.cloud(), &sigma)?;

    // exact vertex set: all permutations of the spectrum
    let verts: Vec<Point> = p
        .eigenvalues
        .iter()
        .copied()
        .permutations(n)
        .map(Point::new)
        .collect::<Result<_>>()?;
    let weyl =
        PointCloud::new(verts, Some("spectrum-permutations".into()))?.deduplicated(tol.dedup_point);
    report.metric("weyl_vertex_count", weyl.len() as f64, Bound::None);

    // facet route: for x in the permutohedron the sorted partial sums of x
    // never exceed those of the spectrum and the full sums agree
    let mut lam = p.eigenvalues.clone();
    lam.sort_by(|a, b| b.total_cmp(a));
    let prefix: Vec<f64> = lam
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let mut worst_slack: f64 = 0.0;
    let mut violations = 0u64;
    let mut trace_drift: f64 = 0.0;
    for d in diagonals.points() {
        let mut ds: Vec<f64> = d.coords().to_vec();
        ds.sort_by(|a, b| b.total_cmp(a));
        let mut acc = 0.0;
        let mut slack: f64 = 0.0;
        for (j, x) in ds.iter().enumerate() {
            acc += x;
            if j + 1 == n {
                trace_drift = trace_drift.max((acc - prefix[j]).abs());
                slack = slack.max((acc - prefix[j]).abs());
            } else {
                slack = slack.max(acc - prefix[j]);
            }
        }
        worst_slack = worst_slack.max(slack);
        if slack > p.exact_tol {
            violations += 1;
        }
    }
    report.metric(
        "majorization_slack_max",
        worst_slack,
        Bound::AtMost(p.exact_tol),
    );
    report.metric(
        "majorization_violations",
        violations as f64,
        Bound::ExactInt(0),
    );
    report.metric("trace_drift_max", trace_drift, Bound::AtMost(1e-10));

    // independent route: Euclidean distance to the vertex hull on a subset
    // (the nearest-point solver certifies to ~1e-7 near facets, hence the
    // looser bound than the facet route)
    let stride = (diagonals.len() / p.membership_subset.max(1)).max(1);
    let mut mnp_max: f64 = 0.0;
    let mut mnp_unconverged = false;
    for d in diagonals.points().iter().step_by(stride) {
        let m = conv_membership(&weyl, d, tol.membership)?;
        mnp_max = mnp_max.max(m.distance);
        mnp_unconverged |= !m.converged;
    }
    report.metric("hull_distance_subset_max", mnp_max, Bound::AtMost(1e-6));

    // support sweep: does the projected cloud fill the permutohedron?
    let dirs = sampling::unit_directions(
        n,
        p.direction_budget.max(2 * n + 2),
        mix_bytes(p.seed, b"schur-horn-directions"),
    );
    let gap = hull_hausdorff(&diagonals, &weyl, &dirs)?;
    report.metric("hull_gap", gap, Bound::AtMost(p.hull_tol));

    attach_config(&mut report, p)?;
    report.finalize(mnp_unconverged);
    soften_sampling_failures(&mut report, &["hull_gap"]);
    emit_artifacts(
        &mut report,
        out_dir,
        &[("diagonals", &diagonals), ("weyl", &weyl)],
    )?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// fat-section helpers

/// Ambient indices of the section `Σ = (R^k ⊕ 0)^k ⊂ (R^n)^k`, copy-major so
/// Σ-coordinates use the same layout as the reduced `O(k)` action's ambient.
fn section_axes(n: usize, k: usize) -> Vec<usize> {
    let mut axes = Vec::with_capacity(k * k);
    for c in 0..k {
        for j in 0..k {
            axes.push(c * n + j);
        }
    }
    axes
}

/// Reads a stacked-copies point of `(R^k)^k` as the k×k matrix whose c-th
/// column is copy c.
fn copies_matrix(p: &Point, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(k, k, |i, c| p.coords()[c * k + i])
}

/// Embeds a k×k matrix into `(R^n)^k`, padding each copy with zeros.
fn embed_copies(m: &DMatrix<f64>, n: usize) -> Point {
    let k = m.ncols();
    let mut coords = vec![0.0; n * k];
    for c in 0..k {
        for i in 0..m.nrows() {
            coords[c * n + i] = m[(i, c)];
        }
    }
    Point::new(coords).expect("matrix entries are finite")
}

/// Pads a matrix with zero rows up to `n` rows.
fn embed_rows(m: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n, m.ncols());
    out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    out
}

fn nuclear_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().sum()
}

/// Closed-form orbit distance for stacked copies under a full orthogonal
/// group: `min_Q ‖QX − Y‖_F = √(‖X‖² + ‖Y‖² − 2‖YXᵀ‖₁)` (orthogonal
/// alignment; the maximizing Q is the polar factor of `YXᵀ`).
fn procrustes_distance(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let cross = y * x.transpose();
    (x.norm_squared() + y.norm_squared() - 2.0 * nuclear_norm(&cross))
        .max(0.0)
        .sqrt()
}

/// Random k×k matrix, Frobenius-normalized to `norm`, resampled until the
/// least singular value clears `floor` (keeps the seed's inverse
/// well-conditioned and every coordinate block in general position).
fn generic_seed_matrix(
    k: usize,
    norm: f64,
    floor: f64,
    rng: &mut impl Rng,
) -> Result<(DMatrix<f64>, f64)> {
    for _ in 0..64 {
        let g = DMatrix::from_fn(k, k, |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        let nrm = g.norm();
        if nrm < 1e-9 {
            continue;
        }
        let g = g * (norm / nrm);
        let smin = g.singular_values().min();
        if smin >= floor {
            return Ok((g, smin));
        }
    }
    Err(Error::SamplerStarved {
        context: "generic section seed",
        attempts: 64,
    })
}

/// Structure group O(k) on k stacked copies of R^k.  `k = 1` uses the exact
/// two-element group {±1} (the compact sampler needs n ≥ 2).
fn reduced_copies_action(k: usize, seed: u64) -> Result<Arc<GroupAction>> {
    let family = if k >= 2 { "O" } else { "negation" };
    GroupAction::from_config(
        &ActionConfig::new(family, k)
            .with_rep("diagonal-copies")
            .with_copies(k)
            .with_seed(seed),
    )
}

/// Seed matrix for the section scenarios: explicit (validated to lie in the
/// section) or generic by rejection sampling.
fn section_seed(
    p: &ScenarioParams,
    n: usize,
    k: usize,
    sigma: &Subspace,
    label: &'static [u8],
) -> Result<(DMatrix<f64>, f64, bool)> {
    if p.point.is_empty() {
        let mut rng = rng_for(p.seed, mix_bytes(0, label));
        let (m, smin) = generic_seed_matrix(k, 1.5, 0.15, &mut rng)?;
        return Ok((m, smin, false));
    }
    if p.point.len() != n * k {
        return Err(Error::Config(format!(
            "seed point must have ambient dimension {}, got {}",
            n * k,
            p.point.len()
        )));
    }
    let v = Point::new(p.point.clone())?;
    if sigma.distance(&v)? > 1e-9 {
        return Err(Error::Config("seed point is not in the section".into()));
    }
    let m = copies_matrix(&sigma.coordinates(&v)?, k);
    let smin = m.singular_values().min();
    Ok((m, smin, true))
}

// ---------------------------------------------------------------------------
// fat-section

/// O(n) acting on k < n stacked copies of R^n, with the section
/// `Σ = (R^k ⊕ 0)^k`.  Verifies, for the fiber F through a section seed V:
///
/// * projecting F onto Σ lands inside the hull of `F ∩ Σ` — exactly, because
///   that hull is `{MV : ‖M‖_op ≤ 1}` (the hull of the orthogonal group is
///   the operator-norm unit ball), so membership is a singular-value test;
/// * conversely every reduced-orbit point is a projection of a fiber point,
///   constructed by block-diagonal dilation;
/// * sampled supports approach the closed-form support `U ↦ ‖UVᵀ‖₁`;
/// * quotient distances through Σ agree between the full O(n) action and the
///   reduced O(k) action, against the closed-form alignment value.
pub fn scenario_fat_section(
    p: &ScenarioParams,
    out_dir: Option<&Path>,
) -> Result<VerificationReport> {
    let (n, k) = (p.n, p.k);
    if !(1 <= k && k < n) {
        return Err(Error::Config(format!(
            "section scenario needs 1 <= k < n, got n={n}, k={k}"
        )));
    }
    let tol = Tolerances::shared();
    let budgets = Budgets::default();
    let mut report = VerificationReport::new("fat-section", p.seed);
    report
        .budget("orbit_samples", p.orbit_budget as u64)
        .budget("directions", p.direction_budget as u64)
        .budget("distance_pairs", p.pair_budget as u64)
        .budget("membership_subset", p.membership_subset as u64);

    let full = GroupAction::from_config(
        &ActionConfig::new("O", n)
            .with_rep("diagonal-copies")
            .with_copies(k)
            .with_seed(p.seed),
    )?;
    let reduced = reduced_copies_action(k, p.seed ^ 0x5eed)?;
    report.note(format!(
        "full action: {}; reduced action: {}",
        full.name(),
        reduced.name()
    ));

    let sigma = Subspace::coordinate_axes(n * k, &section_axes(n, k));
    let (vmat, smin, explicit) = section_seed(p, n, k, &sigma, b"fat-section-seed")?;

    // zero seed: every set in play collapses to the origin
    if vmat.norm() < 1e-9 {
        report.metric("seed_norm", vmat.norm(), Bound::None);
        let orb = orbit(&full, &Point::zeros(n * k), p.orbit_budget.max(1), p.seed)?;
        let maxnorm = orb
            .cloud()
            .points()
            .iter()
            .map(Point::norm)
            .fold(0.0, f64::max);
        report.metric("projected_norm_max", maxnorm, Bound::AtMost(1e-12));
        report.note("zero seed: fiber, section trace and projection all reduce to the origin");
        attach_config(&mut report, p)?;
        report.finalize(false);
        emit_artifacts(&mut report, out_dir, &[])?;
        return Ok(report);
    }
    if smin < 1e-6 {
        return Err(Error::Config(
            "section seed matrix is singular; pass a generic seed (or none, to sample one)".into(),
        ));
    }
    report.metric(
        "seed_sigma_min",
        smin,
        Bound::AtLeast(if explicit { 1e-6 } else { 0.15 }),
    );

    let v_full = embed_copies(&vmat, n);
    let v_red = Point::new(vmat.as_slice().to_vec())?; // column-major = copy-major
    let f_full = orbit(&full, &v_full, p.orbit_budget, p.seed)?;
    let f_red = orbit(&reduced, &v_red, p.orbit_budget, p.seed ^ 0x0f)?;
    report.metric(
        "sphere_defect_full",
        f_full.sphere_defect(),
        Bound::AtMost(tol.orbit_sphere),
    );
    report.metric(
        "sphere_defect_reduced",
        f_red.sphere_defect(),
        Bound::AtMost(tol.orbit_sphere),
    );

    let projected = coordinates_cloud(f_full.cloud(), &sigma)?;

    // exact pointwise inclusion: W ∈ conv(F ∩ Σ) iff W V⁻¹ is an
    // operator-norm contraction
    let v_inv = vmat
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Config("seed matrix not invertible".into()))?;
    let mut sig_excess_max = f64::NEG_INFINITY;
    let mut inclusion_violations = 0u64;
    for w in projected.points() {
        let wm = copies_matrix(w, k);
        let excess = (&wm * &v_inv).singular_values().max() - 1.0;
        sig_excess_max = sig_excess_max.max(excess);
        if excess > p.exact_tol {
            inclusion_violations += 1;
        }
    }
    report.metric(
        "projected_sigma_excess_max",
        sig_excess_max,
        Bound::AtMost(p.exact_tol),
    );
    report.metric(
        "projected_inclusion_violations",
        inclusion_violations as f64,
        Bound::ExactInt(0),
    );

    // reverse inclusion, constructively: R·V = π_Σ(diag(R, I)·v) exactly
    let mut dil_rng = rng_for(p.seed, mix_bytes(0, b"fat-section-dilation"));
    let mut dilation_defect: f64 = 0.0;
    for _ in 0..p.membership_subset.clamp(8, 200) {
        let r = reduced.sample_element(&mut dil_rng);
        let y = reduced.apply(&r, &v_red);
        let mut q = DMatrix::identity(n, n);
        q.view_mut((0, 0), (k, k)).copy_from(&r);
        let x = sigma.coordinates(&full.apply(&q, &v_full))?;
        dilation_defect = dilation_defect.max(x.distance(&y));
    }
    report.metric("dilation_defect_max", dilation_defect, Bound::AtMost(1e-12));

    // the two pointwise certificates combine into a Hausdorff bound between
    // the projected hull and the section hull
    let sig_max_v = vmat.singular_values().max();
    let eq_gap = (sig_excess_max.max(0.0) * sig_max_v).max(dilation_defect);
    report.metric("equality_gap_certified", eq_gap, Bound::AtMost(1e-6));

    // sampled-hull cross-route: projected points land *on* the hull boundary,
    // so these distances measure the reduced cloud's surface resolution and
    // stay budget-indexed (informational)
    let stride = (projected.len() / p.membership_subset.max(1)).max(1);
    let mut mnp_max: f64 = 0.0;
    let mut unconverged = false;
    for w in projected.points().iter().step_by(stride) {
        let m = conv_membership(f_red.cloud(), w, tol.membership)?;
        mnp_max = mnp_max.max(m.distance);
        unconverged |= !m.converged;
    }
    report.metric("projected_hull_distance_subset", mnp_max, Bound::None);

    // support sweep against the closed form h(U) = ‖UVᵀ‖₁
    let dirs = sampling::unit_directions(
        k * k,
        p.direction_budget.max(2 * k * k + 2),
        mix_bytes(p.seed, b"fat-section-directions"),
    );
    let mut red_gap: f64 = 0.0;
    let mut proj_gap: f64 = 0.0;
    let mut overshoot: f64 = 0.0;
    let mut sampled_gap: f64 = 0.0;
    for u in &dirs {
        let umat = copies_matrix(u, k);
        let exact = nuclear_norm(&(&umat * vmat.transpose()));
        let h_red = support(f_red.cloud(), u)?.value;
        let h_proj = support(&projected, u)?.value;
        red_gap = red_gap.max(exact - h_red);
        proj_gap = proj_gap.max(exact - h_proj);
        overshoot = overshoot.max((h_red - exact).max(h_proj - exact));
        sampled_gap = sampled_gap.max((h_red - h_proj).abs());
    }
    report.metric(
        "support_gap_reduced_vs_exact",
        red_gap,
        Bound::AtMost(p.hull_tol),
    );
    report.metric("support_overshoot_max", overshoot, Bound::AtMost(1e-9));
    report.metric("support_gap_projected_vs_exact", proj_gap, Bound::None);
    report.metric("support_gap_sampled_clouds", sampled_gap, Bound::None);

    // quotient distances through the section: descent on both actions plus
    // the closed-form alignment value on both sides
    let mut pair_rng = rng_for(p.seed, mix_bytes(0, b"fat-section-pairs"));
    let mut sampled_defect: f64 = 0.0;
    let mut exact_defect: f64 = 0.0;
    let mut descent_defect: f64 = 0.0;
    for _ in 0..p.pair_budget {
        let scale = 1.5 / (k as f64);
        let x = DMatrix::from_fn(k, k, |_, _| {
            pair_rng.sample::<f64, _>(rand_distr::StandardNormal)
        }) * scale;
        let y = DMatrix::from_fn(k, k, |_, _| {
            pair_rng.sample::<f64, _>(rand_distr::StandardNormal)
        }) * scale;
        let x_red = Point::new(x.as_slice().to_vec())?;
        let y_red = Point::new(y.as_slice().to_vec())?;
        let x_full = embed_copies(&x, n);
        let y_full = embed_copies(&y, n);
        let d_full = orbit_distance(&full, &x_full, &y_full, budgets.refine_restarts.max(3))?;
        let d_red = orbit_distance(&reduced, &x_red, &y_red, budgets.refine_restarts.max(3))?;
        sampled_defect = sampled_defect.max((d_full - d_red).abs());
        // zero-row padding leaves the alignment value unchanged
        let e_full = procrustes_distance(&embed_rows(&x, n), &embed_rows(&y, n));
        let e_red = procrustes_distance(&x, &y);
        exact_defect = exact_defect.max((e_full - e_red).abs());
        descent_defect = descent_defect.max((d_full - e_full).abs().max((d_red - e_red).abs()));
    }
    report.metric(
        "isometry_defect_sampled",
        sampled_defect,
        Bound::AtMost(p.isometry_tol),
    );
    report.metric("isometry_defect_exact", exact_defect, Bound::AtMost(1e-9));
    report.metric(
        "descent_vs_exact_max",
        descent_defect,
        Bound::AtMost(p.isometry_tol),
    );

    attach_config(&mut report, p)?;
    report.finalize(unconverged);
    soften_sampling_failures(&mut report, &["support_gap_reduced_vs_exact"]);
    emit_artifacts(
        &mut report,
        out_dir,
        &[("projected", &projected), ("reduced", f_red.cloud())],
    )?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// orbitope-gap

/// Affine dimension of a small projected patch around a generic orbit point
/// `g₀·v`: images of `cayley(ε S_j) g₀ · v` for random skew directions.
/// `ε = 1e-4` sits far above the rank cutoff (`rel_tol · σ_max ≈ 1e-6`)
/// while the quadratic remainder `O(ε²)` stays well below it.  The base
/// point is a Haar sample because the projected rank pinches at points
/// lying over the section itself.
fn projected_patch_dim(
    action: &Arc<GroupAction>,
    sigma: &Subspace,
    v: &Point,
    count: usize,
    seed: u64,
    salt: u64,
) -> Result<usize> {
    let n = action.group_dim();
    let mut rng = rng_for(seed, mix_bytes(salt, b"orbitope-patch"));
    let g0 = action.sample_element(&mut rng);
    let eps = 1e-4;
    let mut pts = Vec::with_capacity(count + 1);
    pts.push(sigma.coordinates(&action.apply(&g0, v))?);
    for _ in 0..count {
        let s = random_skew(n, &mut rng) * eps;
        let g = cayley(&s) * &g0;
        pts.push(sigma.coordinates(&action.apply(&g, v))?);
    }
    affine_dimension(&PointCloud::new(pts, None)?, 1e-2)
}

/// Dimension gap between the projected fiber and the reduced orbit.
///
/// With k stacked copies and k > (2n−1)/3, the generic O(n)-fiber has
/// dimension `a ≤ kn − k(k+1)/2` strictly below the reduced orbit's affine
/// span `b = k²`, so the projection cannot be a submetry onto the reduced
/// orbit space.  Both integers are recomputed at a doubled budget.
pub fn scenario_orbitope_gap(
    p: &ScenarioParams,
    out_dir: Option<&Path>,
) -> Result<VerificationReport> {
    let (n, k) = (p.n, p.k);
    if !(1 <= k && k < n) {
        return Err(Error::Config(format!(
            "section scenario needs 1 <= k < n, got n={n}, k={k}"
        )));
    }
    if 3 * k <= 2 * n - 1 {
        return Err(Error::Config(format!(
            "dimension-gap hypothesis needs k > (2n-1)/3 = {:.3}, got k={k}",
            (2.0 * n as f64 - 1.0) / 3.0
        )));
    }
    let mut report = VerificationReport::new("orbitope-gap", p.seed);
    let bound = k * n - k * (k + 1) / 2;
    let patch = 4 * bound + 16;
    report
        .budget("orbit_samples", p.orbit_budget as u64)
        .budget("patch_samples", patch as u64);

    let full = GroupAction::from_config(
        &ActionConfig::new("O", n)
            .with_rep("diagonal-copies")
            .with_copies(k)
            .with_seed(p.seed),
    )?;
    let reduced = reduced_copies_action(k, p.seed ^ 0x5eed)?;
    report.note(format!(
        "full action: {}; reduced action: {}",
        full.name(),
        reduced.name()
    ));

    let sigma = Subspace::coordinate_axes(n * k, &section_axes(n, k));
    let (vmat, smin, explicit) = section_seed(p, n, k, &sigma, b"orbitope-seed")?;
    if smin < 1e-6 {
        return Err(Error::Config(
            "degenerate seed: the dimension claims need a generic (invertible) section seed".into(),
        ));
    }
    report.metric(
        "seed_sigma_min",
        smin,
        Bound::AtLeast(if explicit { 1e-6 } else { 0.15 }),
    );
    let v_full = embed_copies(&vmat, n);
    let v_red = Point::new(vmat.as_slice().to_vec())?;

    let a = projected_patch_dim(&full, &sigma, &v_full, patch, p.seed, 0)?;
    let a2 = projected_patch_dim(&full, &sigma, &v_full, 2 * patch, p.seed, 1)?;

    let f_red = orbit(&reduced, &v_red, p.orbit_budget, p.seed ^ 0x0f)?;
    let b = affine_dimension(f_red.cloud(), 1e-6)?;
    let f_red2 = orbit(&reduced, &v_red, 2 * p.orbit_budget, p.seed ^ 0x10)?;
    let b2 = affine_dimension(f_red2.cloud(), 1e-6)?;

    report.metric("projected_local_dim", a as f64, Bound::AtMost(bound as f64));
    report.metric(
        "reduced_affine_dim",
        b as f64,
        Bound::ExactInt((k * k) as i64),
    );
    report.metric("dimension_gap", b as f64 - a as f64, Bound::AtLeast(1.0));
    report.metric(
        "projected_local_dim_doubled",
        a2 as f64,
        Bound::ExactInt(a as i64),
    );
    report.metric(
        "reduced_affine_dim_doubled",
        b2 as f64,
        Bound::ExactInt(b as i64),
    );

    attach_config(&mut report, p)?;
    report.finalize(false);
    emit_artifacts(&mut report, out_dir, &[("reduced", f_red.cloud())])?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// finite-counterexample

/// Finite groups admit non-convex fibers even though every compact-group
/// fiber through a convex-set boundary behaves well in the quotient: the
/// fiber of a non-fixed point is a finite set of ≥ 2 points, never convex.
/// Runs the detector against the exact midpoint oracle and rechecks the
/// produced certificate exactly.
pub fn scenario_finite_counterexample(
    p: &ScenarioParams,
    out_dir: Option<&Path>,
) -> Result<VerificationReport> {
    let cfg = ActionConfig::parse_compact(&p.group)?.with_seed(p.seed);
    let action = GroupAction::from_config(&cfg)?;
    if !action.is_exact() {
        return Err(Error::Config(format!(
            "finite-counterexample needs a finite group, got '{}'",
            p.group
        )));
    }
    if let Group::Finite(f) = action.group() {
        if f.is_trivial() {
            return Err(Error::TrivialGroup);
        }
    }
    let v = Point::new(p.point.clone())?;
    if v.dim() != action.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: action.ambient_dim(),
            got: v.dim(),
        });
    }

    let tol = Tolerances::shared();
    let mut report = VerificationReport::new("finite-counterexample", p.seed);
    report
        .budget("oracle_pairs", p.pair_budget as u64)
        .budget("detector_probes", p.probe_budget as u64);
    report.note(format!("action: {}", action.name()));

    let orb = orbit(&action, &v, p.orbit_budget.max(1), p.seed)?;
    let orbit_size = orb.cloud().len();
    report.metric("orbit_size", orbit_size as f64, Bound::AtLeast(2.0));
    if orbit_size < 2 {
        report.verdict = Some("degenerate-seed".into());
        report.note("seed point is fixed by the whole group; its fiber is a single point and trivially convex");
        attach_config(&mut report, p)?;
        report.finalize(false);
        emit_artifacts(&mut report, out_dir, &[("orbit", orb.cloud())])?;
        return Ok(report);
    }

    let set = SaturatedSet::fibers(Arc::clone(&action), vec![v.clone()])?;

    // independent oracle: midpoints of surface pairs, distances enumerated
    let oracle = midpoint_violation(&set, p.pair_budget, mix_bytes(p.seed, b"finite-oracle"))?;

    let dparams = DetectParams {
        probes: p.probe_budget,
        midpoint_pairs: p.pair_budget,
        seed: p.seed,
        ..DetectParams::default()
    };
    let outcome = convexity_detect(&set, &dparams)?;
    report.metric(
        "detector_witness",
        if outcome.verdict == Verdict::NonconvexWitness {
            1.0
        } else {
            0.0
        },
        Bound::ExactInt(1),
    );
    report.metric(
        "oracle_max_violation",
        oracle.max_violation,
        Bound::AtLeast(10.0 * dparams.membership_tol),
    );

    // certificate: prefer the detector's midpoint witness, else the oracle's
    let cert = match &outcome.witness {
        Some(w) if w.kind == WitnessKind::MidpointGap => Some((
            w.points[0].clone(),
            w.points[1].clone(),
            w.points[2].clone(),
        )),
        _ => oracle.worst.clone(),
    };
    let mut unconverged = false;
    match cert {
        Some((a, b, mid)) => {
            let on_set = set.distance(&a)?.max(set.distance(&b)?);
            let margin = set.distance(&mid)?; // exact: finite enumeration
            let drift = mid.distance(&a.midpoint(&b));
            report.metric("witness_endpoints_on_set", on_set, Bound::AtMost(1e-9));
            report.metric("witness_midpoint_drift", drift, Bound::AtMost(1e-12));
            report.metric(
                "certificate_margin",
                margin,
                Bound::AtLeast(10.0 * dparams.membership_tol),
            );
            // contrast: the same midpoint sits inside the hull of the fiber
            let hull = conv_membership(orb.cloud(), &mid, tol.membership)?;
            unconverged |= !hull.converged;
            report.metric(
                "witness_midpoint_in_hull",
                hull.distance,
                Bound::AtMost(1e-9),
            );
        }
        None => {
            report.metric(
                "certificate_margin",
                0.0,
                Bound::AtLeast(10.0 * dparams.membership_tol),
            );
            report.note("no midpoint certificate was produced");
        }
    }

    // trivial inclusion: each fiber point lies in the fiber's hull
    let mut own_max: f64 = 0.0;
    for q in orb.cloud().points() {
        let m = conv_membership(orb.cloud(), q, tol.membership)?;
        own_max = own_max.max(m.distance);
        unconverged |= !m.converged;
    }
    report.metric("orbit_in_own_hull_max", own_max, Bound::AtMost(1e-9));

    report.verdict = Some(
        match outcome.verdict {
            Verdict::NonconvexWitness => "nonconvex-witness",
            Verdict::ConsistentWithConvex => "consistent-with-convex",
            Verdict::NoProbePoints => "no-probe-points",
        }
        .into(),
    );

    attach_config(&mut report, p)?;
    report.finalize(unconverged);
    let witness_cloud = report
        .verdict
        .as_deref()
        .eq(&Some("nonconvex-witness"))
        .then(|| {
            outcome
                .witness
                .as_ref()
                .map(|w| PointCloud::new(w.points.clone(), Some("witness".into())))
        })
        .flatten()
        .transpose()?;
    let mut clouds: Vec<(&str, &PointCloud)> = vec![("orbit", orb.cloud())];
    if let Some(w) = &witness_cloud {
        clouds.push(("witness", w));
    }
    emit_artifacts(&mut report, out_dir, &clouds)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// fixed-points

/// Fixed-point facts across the built-in action families: the dimension of
/// the fixed subspace, translation invariance of orbits along it, the
/// quotient metric restricted to it, and the nearest point of an invariant
/// convex hull to a fixed query being fixed itself.
pub fn scenario_fixed_points(
    p: &ScenarioParams,
    out_dir: Option<&Path>,
) -> Result<VerificationReport> {
    let tol = Tolerances::shared();
    let budgets = Budgets::default();
    let mut report = VerificationReport::new("fixed-points", p.seed);
    report
        .budget("orbit_samples", p.orbit_budget as u64)
        .budget("fixed_point_samples", budgets.fixed_point_samples as u64);

    // coordinate permutations of R³: the fixed space is the diagonal line
    let s3 = GroupAction::from_config(&ActionConfig::new("S", 3))?;
    let v0 = fixed_point_subspace(&s3, budgets.fixed_point_samples)?;
    report.metric("s3_fixed_dim", v0.dim() as f64, Bound::ExactInt(1));
    let diag_dir = Point::new(vec![1.0, 1.0, 1.0])?.normalized(1e-12)?;
    let align = if v0.dim() == 1 {
        v0.basis_vectors()[0].dot(&diag_dir).abs()
    } else {
        0.0
    };
    report.metric("s3_fixed_axis_alignment", align, Bound::AtLeast(1.0 - 1e-8));

    // translating along the fixed line translates orbits pointwise
    let mut t_rng = rng_for(p.seed, mix_bytes(0, b"fixed-translate"));
    let mut trans_defect: f64 = 0.0;
    for _ in 0..p.pair_budget.clamp(3, 16) {
        let v = Point::from_vector(sampling::gaussian_vector(3, &mut t_rng));
        let t: f64 = t_rng.gen_range(-1.5..1.5);
        let shift = diag_dir.scale(t);
        let a = orbit(&s3, &v.add(&shift), 1, p.seed)?;
        let b = orbit(&s3, &v, 1, p.seed)?;
        let shifted: Vec<Point> = b.cloud().points().iter().map(|q| q.add(&shift)).collect();
        let bs = PointCloud::new(shifted, None)?;
        trans_defect = trans_defect.max(point_set_hausdorff(a.cloud(), &bs)?);
    }
    report.metric("s3_translation_defect", trans_defect, Bound::AtMost(1e-8));

    // on the fixed line the quotient distance is the ambient distance
    let mut iso_defect: f64 = 0.0;
    for i in 0..4 {
        let s = -1.0 + 0.7 * i as f64;
        let x = diag_dir.scale(s);
        let y = diag_dir.scale(s + 0.9);
        let d = orbit_distance(&s3, &x, &y, budgets.refine_restarts)?;
        iso_defect = iso_defect.max((d - x.distance(&y)).abs());
    }
    report.metric("s3_fixed_isometry_defect", iso_defect, Bound::AtMost(1e-12));

    // nearest point of an invariant hull to a fixed query is fixed: the
    // permutohedron of (3,1,2) seen from (7,7,7) projects to the barycenter
    let hull = orbit(&s3, &Point::new(vec![3.0, 1.0, 2.0])?, 1, p.seed)?;
    let query = Point::new(vec![7.0, 7.0, 7.0])?;
    let m = conv_membership(hull.cloud(), &query, tol.membership)?;
    let bary = Point::new(vec![2.0, 2.0, 2.0])?;
    report.metric(
        "s3_nearest_matches_barycenter",
        m.nearest.distance(&bary),
        Bound::AtMost(1e-7),
    );
    report.metric(
        "s3_nearest_in_fixed_space",
        v0.distance(&m.nearest)?,
        Bound::AtMost(1e-8),
    );

    // O(2): only the origin is fixed, and invariant hulls contain it
    let o2 = GroupAction::from_config(&ActionConfig::new("O", 2).with_seed(p.seed))?;
    let f_o2 = fixed_point_subspace(&o2, budgets.fixed_point_samples)?;
    report.metric("o2_fixed_dim", f_o2.dim() as f64, Bound::ExactInt(0));
    let circle = orbit(
        &o2,
        &Point::new(vec![2.0, 0.0])?,
        p.orbit_budget.clamp(64, 512),
        p.seed,
    )?;
    let m0 = conv_membership(circle.cloud(), &Point::zeros(2), tol.membership)?;
    report.metric("o2_hull_contains_origin", m0.distance, Bound::AtMost(1e-9));

    // conjugation on symmetric matrices fixes exactly the multiples of I
    let so3c = GroupAction::from_config(
        &ActionConfig::new("SO", 3)
            .with_rep("conjugation-symmetric")
            .with_seed(p.seed),
    )?;
    let fc = fixed_point_subspace(&so3c, budgets.fixed_point_samples)?;
    report.metric("conjugation_fixed_dim", fc.dim() as f64, Bound::ExactInt(1));
    let id_dir = sym_embed(&DMatrix::identity(3, 3)).normalized(1e-12)?;
    let calign = if fc.dim() == 1 {
        fc.basis_vectors()[0].dot(&id_dir).abs()
    } else {
        0.0
    };
    report.metric(
        "conjugation_fixed_axis_alignment",
        calign,
        Bound::AtLeast(1.0 - 1e-8),
    );

    // the stacked-copies pair from the section scenarios: both fixed spaces
    // are trivial, so their dimensions agree (the reduction preserves them)
    let full_diag = GroupAction::from_config(
        &ActionConfig::new("O", 4)
            .with_rep("diagonal-copies")
            .with_copies(3)
            .with_seed(p.seed),
    )?;
    let red_diag = reduced_copies_action(3, p.seed ^ 1)?;
    let fd = fixed_point_subspace(&full_diag, budgets.fixed_point_samples)?.dim();
    let rd = fixed_point_subspace(&red_diag, budgets.fixed_point_samples)?.dim();
    report.metric("full_diag_fixed_dim", fd as f64, Bound::ExactInt(0));
    report.metric("reduced_diag_fixed_dim", rd as f64, Bound::ExactInt(0));
    report.metric(
        "diag_fixed_dim_gap",
        fd as f64 - rd as f64,
        Bound::ExactInt(0),
    );

    attach_config(&mut report, p)?;
    report.finalize(false);
    emit_artifacts(&mut report, out_dir, &[])?;
    Ok(report)
}
