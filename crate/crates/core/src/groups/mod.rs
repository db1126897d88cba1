//! Group actions on Euclidean spaces: finite orthogonal groups, Haar-sampled
//! compact groups, representations, orbits, and quotient (orbit-space)
//! distances.

pub mod finite;
pub mod haar;

use std::sync::Arc;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use finite::{FiniteKind, FiniteOrthogonalGroup};
pub use haar::{CompactFamily, CompactGroupSampler};

use crate::config::{Budgets, Tolerances, DEFAULT_SEED};
use crate::geom::{Point, PointCloud, Subspace};
use crate::report::{Bound, VerificationReport};
use crate::sampling;
use crate::{Error, Result};

const STREAM_ORBIT: u64 = 0x6f72_6269;
const STREAM_DISTANCE: u64 = 0x6469_7374;
const STREAM_FIXED: u64 = 0x6669_7865;
const STREAM_SLICE: u64 = 0x736c_6963;

/// The group of an action: either a fully enumerated finite group or a
/// Haar sampler for O(n)/SO(n).
#[derive(Debug, Clone)]
pub enum Group {
    Finite(FiniteOrthogonalGroup),
    Compact(CompactGroupSampler),
}

impl Group {
    /// Size of the matrices (the `n` of O(n)).
    pub fn dim(&self) -> usize {
        match self {
            Group::Finite(f) => f.dim(),
            Group::Compact(s) => s.n,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Group::Finite(_))
    }
}

/// How group elements act on the ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rep {
    /// `v ↦ g v` on `R^n`.
    Standard,
    /// `(v_1, …, v_k) ↦ (g v_1, …, g v_k)` on `(R^n)^k`.
    DiagonalCopies { copies: usize },
    /// `A ↦ g A gᵀ` on symmetric matrices, embedded isometrically in
    /// `R^{n(n+1)/2}` (off-diagonals scaled by √2 so the Euclidean inner
    /// product matches the Frobenius one).
    ConjugationSymmetric,
}

/// Dimension of the symmetric-matrix embedding space.
pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Isometric embedding of a symmetric matrix: diagonal entries first, then
/// off-diagonals `(i<j)` in lexicographic order scaled by √2.
pub fn sym_embed(a: &DMatrix<f64>) -> Point {
    let n = a.nrows();
    let mut v = DVector::zeros(sym_dim(n));
    for i in 0..n {
        v[i] = a[(i, i)];
    }
    let mut k = n;
    let s = std::f64::consts::SQRT_2 * 0.5;
    for i in 0..n {
        for j in (i + 1)..n {
            v[k] = s * (a[(i, j)] + a[(j, i)]);
            k += 1;
        }
    }
    Point::from_vector(v)
}

/// Inverse of [`sym_embed`].
pub fn sym_unembed(p: &Point, n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    let v = p.coords();
    for i in 0..n {
        a[(i, i)] = v[i];
    }
    let mut k = n;
    let s = 1.0 / std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            a[(i, j)] = s * v[k];
            a[(j, i)] = s * v[k];
            k += 1;
        }
    }
    a
}

/// The subspace of diagonal matrices inside the symmetric embedding.
pub fn diagonal_matrix_subspace(n: usize) -> Subspace {
    let axes: Vec<usize> = (0..n).collect();
    Subspace::coordinate_axes(sym_dim(n), &axes)
}

/// JSON configuration of a group action, e.g.
/// `{"family":"SO","n":3,"rep":"conjugation-symmetric"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionConfig {
    /// "O", "SO", "S" (symmetric), "dihedral", "cyclic", or "negation".
    pub family: String,
    /// O(n)/SO(n)/negation dimension, symmetric-group degree, or the m of
    /// dihedral/cyclic groups.
    pub n: usize,
    /// "standard", "diagonal-copies", "conjugation-symmetric",
    /// or "permutation-coordinates".
    #[serde(default = "default_rep")]
    pub rep: String,
    /// Copy count for the diagonal representation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copies: Option<usize>,
    /// Sampler seed for compact families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_rep() -> String {
    "standard".to_string()
}

impl ActionConfig {
    pub fn new(family: &str, n: usize) -> ActionConfig {
        ActionConfig {
            family: family.to_string(),
            n,
            rep: default_rep(),
            copies: None,
            seed: None,
        }
    }

    pub fn with_rep(mut self, rep: &str) -> ActionConfig {
        self.rep = rep.to_string();
        self
    }

    pub fn with_copies(mut self, copies: usize) -> ActionConfig {
        self.copies = Some(copies);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> ActionConfig {
        self.seed = Some(seed);
        self
    }

    /// Parses compact forms like `O2`, `SO3`, `S4`, `D10`, `C5`, `neg3`.
    pub fn parse_compact(text: &str) -> Result<ActionConfig> {
        let split = text
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| Error::Config(format!("group '{text}' has no numeric suffix")))?;
        let (prefix, digits) = text.split_at(split);
        let n: usize = digits
            .parse()
            .map_err(|_| Error::Config(format!("bad group size in '{text}'")))?;
        let family = match prefix {
            "O" => "O",
            "SO" => "SO",
            "S" => "S",
            "D" => "dihedral",
            "C" => "cyclic",
            "neg" => "negation",
            other => return Err(Error::Config(format!("unknown group family '{other}'"))),
        };
        Ok(ActionConfig::new(family, n))
    }
}

/// A group together with its representation on an ambient Euclidean space.
#[derive(Debug, Clone)]
pub struct GroupAction {
    group: Group,
    rep: Rep,
    ambient_dim: usize,
}

impl GroupAction {
    pub fn new(group: Group, rep: Rep) -> Result<GroupAction> {
        let n = group.dim();
        let ambient_dim = match &rep {
            Rep::Standard => n,
            Rep::DiagonalCopies { copies } => {
                if *copies == 0 {
                    return Err(Error::Precondition("diagonal rep needs copies >= 1".into()));
                }
                n * copies
            }
            Rep::ConjugationSymmetric => sym_dim(n),
        };
        Ok(GroupAction {
            group,
            rep,
            ambient_dim,
        })
    }

    pub fn from_config(cfg: &ActionConfig) -> Result<Arc<GroupAction>> {
        let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
        let group = match cfg.family.as_str() {
            "O" => Group::Compact(CompactGroupSampler::new(
                CompactFamily::Orthogonal,
                cfg.n,
                seed,
            )?),
            "SO" => Group::Compact(CompactGroupSampler::new(
                CompactFamily::SpecialOrthogonal,
                cfg.n,
                seed,
            )?),
            "S" => Group::Finite(FiniteOrthogonalGroup::symmetric(cfg.n)?),
            "dihedral" => Group::Finite(FiniteOrthogonalGroup::dihedral(cfg.n)?),
            "cyclic" => Group::Finite(FiniteOrthogonalGroup::cyclic(cfg.n)?),
            "negation" => Group::Finite(FiniteOrthogonalGroup::negation(cfg.n)?),
            other => return Err(Error::Config(format!("unknown family '{other}'"))),
        };
        let rep = match cfg.rep.as_str() {
            "standard" => Rep::Standard,
            "permutation-coordinates" => {
                if cfg.family != "S" {
                    return Err(Error::Config(
                        "permutation-coordinates requires the symmetric family".into(),
                    ));
                }
                Rep::Standard
            }
            "diagonal-copies" => Rep::DiagonalCopies {
                copies: cfg.copies.ok_or_else(|| {
                    Error::Config("diagonal-copies needs a 'copies' field".into())
                })?,
            },
            "conjugation-symmetric" => Rep::ConjugationSymmetric,
            other => return Err(Error::Config(format!("unknown rep '{other}'"))),
        };
        Ok(Arc::new(GroupAction::new(group, rep)?))
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn rep(&self) -> &Rep {
        &self.rep
    }

    /// Matrix size of group elements.
    pub fn group_dim(&self) -> usize {
        self.group.dim()
    }

    /// Dimension of the space the action lives on.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Whether orbits and distances are computed exactly (finite enumeration).
    pub fn is_exact(&self) -> bool {
        self.group.is_finite()
    }

    /// Seed of the Haar sampler (finite groups sample uniformly and use the
    /// default stream).
    pub fn seed(&self) -> u64 {
        match &self.group {
            Group::Finite(_) => DEFAULT_SEED,
            Group::Compact(s) => s.seed,
        }
    }

    /// Short human-readable name, e.g. `SO(3) conjugation-symmetric`.
    pub fn name(&self) -> String {
        let g = match &self.group {
            Group::Finite(f) => match f.kind() {
                FiniteKind::Symmetric { n } => format!("S_{n}"),
                FiniteKind::Dihedral { m } => format!("D_{m}"),
                FiniteKind::Cyclic { m } => format!("C_{m}"),
                FiniteKind::Negation => format!("{{±I}}({})", f.dim()),
                FiniteKind::Generic => format!("finite({}, order {})", f.dim(), f.order()),
            },
            Group::Compact(s) => match s.family {
                CompactFamily::Orthogonal => format!("O({})", s.n),
                CompactFamily::SpecialOrthogonal => format!("SO({})", s.n),
            },
        };
        let r = match &self.rep {
            Rep::Standard => "standard".to_string(),
            Rep::DiagonalCopies { copies } => format!("diagonal-copies×{copies}"),
            Rep::ConjugationSymmetric => "conjugation-symmetric".to_string(),
        };
        format!("{g} {r}")
    }

    /// Descriptor for provenance blocks in serialized artifacts.
    pub fn descriptor(&self) -> serde_json::Value {
        let (family, n) = match &self.group {
            Group::Finite(f) => match f.kind() {
                FiniteKind::Symmetric { n } => ("S", *n),
                FiniteKind::Dihedral { m } => ("dihedral", *m),
                FiniteKind::Cyclic { m } => ("cyclic", *m),
                FiniteKind::Negation => ("negation", f.dim()),
                FiniteKind::Generic => ("custom", f.dim()),
            },
            Group::Compact(s) => match s.family {
                CompactFamily::Orthogonal => ("O", s.n),
                CompactFamily::SpecialOrthogonal => ("SO", s.n),
            },
        };
        let mut v = serde_json::json!({
            "family": family,
            "n": n,
            "rep": match &self.rep {
                Rep::Standard => "standard",
                Rep::DiagonalCopies { .. } => "diagonal-copies",
                Rep::ConjugationSymmetric => "conjugation-symmetric",
            },
        });
        if let Rep::DiagonalCopies { copies } = &self.rep {
            v["copies"] = serde_json::json!(copies);
        }
        if let Group::Compact(s) = &self.group {
            v["seed"] = serde_json::json!(s.seed);
        }
        if let Group::Finite(f) = &self.group {
            v["order"] = serde_json::json!(f.order());
        }
        v
    }

    /// Applies a group element to an ambient point.
    pub fn apply(&self, g: &DMatrix<f64>, v: &Point) -> Point {
        match &self.rep {
            Rep::Standard => Point::from_vector(g * v.vector()),
            Rep::DiagonalCopies { copies } => {
                let n = self.group_dim();
                let mut out = DVector::zeros(self.ambient_dim);
                for c in 0..*copies {
                    let block = v.vector().rows(c * n, n);
                    out.rows_mut(c * n, n).copy_from(&(g * block));
                }
                Point::from_vector(out)
            }
            Rep::ConjugationSymmetric => {
                let a = sym_unembed(v, self.group_dim());
                sym_embed(&(g * a * g.transpose()))
            }
        }
    }

    /// The induced linear map on the ambient space, column by column.
    pub fn ambient_matrix(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.ambient_dim;
        let mut out = DMatrix::zeros(m, m);
        for j in 0..m {
            let col = self.apply(g, &Point::axis(m, j));
            out.set_column(j, col.vector());
        }
        out
    }

    /// Uniform (finite) or Haar (compact) random element.
    pub fn sample_element(&self, rng: &mut impl Rng) -> DMatrix<f64> {
        match &self.group {
            Group::Finite(f) => f.elements().choose(rng).expect("non-empty group").clone(),
            Group::Compact(s) => s.sample(rng),
        }
    }
}

/// An orbit: exact enumeration for finite groups, a deterministic Haar sample
/// for compact ones.  All points lie on the sphere of radius `|seed_point|`.
#[derive(Debug, Clone)]
pub struct OrbitCloud {
    action: Arc<GroupAction>,
    cloud: PointCloud,
    seed_point: Point,
    exact: bool,
    seed: u64,
    budget: usize,
}

#[derive(Serialize)]
struct OrbitCloudRepr<'a> {
    seed_point: &'a Point,
    exact: bool,
    provenance: serde_json::Value,
    cloud: &'a PointCloud,
}

impl Serialize for OrbitCloud {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        OrbitCloudRepr {
            seed_point: &self.seed_point,
            exact: self.exact,
            provenance: serde_json::json!({
                "seed": self.seed,
                "budget": self.budget,
                "action": self.action.descriptor(),
            }),
            cloud: &self.cloud,
        }
        .serialize(ser)
    }
}

impl OrbitCloud {
    pub fn action(&self) -> &Arc<GroupAction> {
        &self.action
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn points(&self) -> &[Point] {
        self.cloud.points()
    }

    pub fn seed_point(&self) -> &Point {
        &self.seed_point
    }

    pub fn exact(&self) -> bool {
        self.exact
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Largest deviation of point norms from the seed's norm; an orbit of an
    /// orthogonal action must keep this at rounding level.
    pub fn sphere_defect(&self) -> f64 {
        let r = self.seed_point.norm();
        self.points()
            .iter()
            .map(|p| (p.norm() - r).abs())
            .fold(0.0, f64::max)
    }
}

/// Computes the orbit of `v`.  Finite groups are enumerated exactly (with
/// point dedup); compact groups draw `budget` Haar samples on per-index
/// streams, so the cloud is independent of evaluation order.
pub fn orbit(action: &Arc<GroupAction>, v: &Point, budget: usize, seed: u64) -> Result<OrbitCloud> {
    if v.dim() != action.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: action.ambient_dim(),
            got: v.dim(),
        });
    }
    let tol = Tolerances::shared();
    let (points, exact) = match action.group() {
        Group::Finite(f) => {
            let pts: Vec<Point> = f.elements().iter().map(|g| action.apply(g, v)).collect();
            let cloud = PointCloud::new(pts, None)?.deduplicated(tol.dedup_point);
            (cloud.points().to_vec(), true)
        }
        Group::Compact(s) => {
            if budget == 0 {
                return Err(Error::Precondition("orbit budget must be positive".into()));
            }
            let pts: Vec<Point> = (0..budget as u64)
                .into_par_iter()
                .map(|i| {
                    let g = s.sample_indexed(STREAM_ORBIT ^ seed, i);
                    action.apply(&g, v)
                })
                .collect();
            (pts, false)
        }
    };
    let cloud = PointCloud::new(points, Some(action.name()))?;
    let out = OrbitCloud {
        action: Arc::clone(action),
        cloud,
        seed_point: v.clone(),
        exact,
        seed,
        budget,
    };
    debug_assert!(out.sphere_defect() <= tol.orbit_sphere);
    Ok(out)
}

/// Skew-symmetric tangent direction with unit Frobenius norm.  For `n < 2`
/// the only skew matrix is zero (and `cayley(0) = I`).
pub(crate) fn random_skew(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    if n < 2 {
        return DMatrix::zeros(n, n);
    }
    let g = DMatrix::from_fn(n, n, |_, _| {
        rng.sample::<f64, _>(rand_distr::StandardNormal)
    });
    let s = (&g - g.transpose()) * 0.5;
    let norm = s.norm();
    if norm < 1e-12 {
        return random_skew(n, rng);
    }
    s / norm
}

/// Cayley transform of a skew matrix: `(I - S/2)^{-1} (I + S/2)`, an
/// orthogonal matrix near `I + S` for small `S`, always of determinant +1.
pub(crate) fn cayley(s: &DMatrix<f64>) -> DMatrix<f64> {
    let n = s.nrows();
    let i = DMatrix::identity(n, n);
    let left = &i - s * 0.5;
    let right = &i + s * 0.5;
    left.lu()
        .solve(&right)
        .expect("I - S/2 is invertible for skew S")
}

/// Distance between the fibers (orbits) of `v` and `w` in the orbit space,
/// together with the witnessing point `g·v` closest to `w`.
///
/// Finite groups enumerate; the full symmetric group in its coordinate
/// permutation representation uses the exact sorting rule; compact groups
/// take the best of a Haar sample and refine it by geodesic descent
/// (random Cayley steps with a shrinking step schedule, restarted from the
/// `refine_budget` best samples).
pub fn orbit_nearest(
    action: &GroupAction,
    v: &Point,
    w: &Point,
    refine_budget: usize,
) -> Result<(f64, Point)> {
    let ambient = action.ambient_dim();
    for p in [v, w] {
        if p.dim() != ambient {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                got: p.dim(),
            });
        }
    }
    // {0} is a fiber of every orthogonal action
    if w.norm() == 0.0 {
        return Ok((v.norm(), v.clone()));
    }
    if v.norm() == 0.0 {
        return Ok((w.norm(), Point::zeros(ambient)));
    }
    match action.group() {
        Group::Finite(f) => {
            if matches!(f.kind(), FiniteKind::Symmetric { .. })
                && matches!(action.rep(), Rep::Standard)
            {
                return Ok(permutation_nearest(v, w));
            }
            let mut best = f64::INFINITY;
            let mut best_point = v.clone();
            for g in f.elements() {
                let gv = action.apply(g, v);
                let d = gv.distance(w);
                if d < best {
                    best = d;
                    best_point = gv;
                }
            }
            Ok((best, best_point))
        }
        Group::Compact(s) => {
            if matches!(action.rep(), Rep::Standard) {
                // O(n)/SO(n) with n ≥ 2 are transitive on spheres, so orbits
                // are concentric spheres and the quotient is the half-line
                let r = v.norm();
                let nearest = w.scale(r / w.norm());
                return Ok(((r - w.norm()).abs(), nearest));
            }
            Ok(compact_nearest(action, s, v, w, refine_budget))
        }
    }
}

/// Convenience wrapper returning just the distance.
pub fn orbit_distance(
    action: &GroupAction,
    v: &Point,
    w: &Point,
    refine_budget: usize,
) -> Result<f64> {
    Ok(orbit_nearest(action, v, w, refine_budget)?.0)
}

/// Exact orbit distance for coordinate permutations: the minimum of
/// `|πv - w|` over all permutations aligns the sorted coordinate vectors.
fn permutation_nearest(v: &Point, w: &Point) -> (f64, Point) {
    let n = v.dim();
    let mut sorted_v: Vec<f64> = v.coords().to_vec();
    sorted_v.sort_by(f64::total_cmp);
    let mut order_w: Vec<usize> = (0..n).collect();
    order_w.sort_by(|&a, &b| w.coords()[a].total_cmp(&w.coords()[b]));
    let mut aligned = vec![0.0; n];
    for (rank, &pos) in order_w.iter().enumerate() {
        aligned[pos] = sorted_v[rank];
    }
    let nearest = Point::new(aligned).expect("finite coordinates");
    (nearest.distance(w), nearest)
}

fn compact_nearest(
    action: &GroupAction,
    sampler: &CompactGroupSampler,
    v: &Point,
    w: &Point,
    refine_budget: usize,
) -> (f64, Point) {
    let budgets = Budgets::default();
    let n = action.group_dim();
    // decorrelate sampling across query pairs while staying deterministic
    let mut stream_bytes: Vec<f64> = v.coords().to_vec();
    stream_bytes.extend_from_slice(w.coords());
    let stream = sampling::mix_floats(STREAM_DISTANCE, &stream_bytes);
    let mut rng = sampling::rng_for(sampler.seed ^ STREAM_DISTANCE, stream);

    let eval = |g: &DMatrix<f64>| action.apply(g, v).distance(w);

    let mut candidates: Vec<DMatrix<f64>> = Vec::with_capacity(budgets.distance_samples + 2);
    candidates.push(DMatrix::identity(n, n));
    if sampler.family == CompactFamily::Orthogonal {
        // cover the det = -1 component from the start
        let mut flip = DMatrix::identity(n, n);
        flip[(n - 1, n - 1)] = -1.0;
        candidates.push(flip);
    }
    for _ in 0..budgets.distance_samples {
        candidates.push(sampler.sample(&mut rng));
    }
    let mut scored: Vec<(f64, DMatrix<f64>)> =
        candidates.into_iter().map(|g| (eval(&g), g)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    // the two determinant components of O(n) are disconnected, so geodesic
    // descent cannot cross between them: keep the best start from each
    // component, then fill the remaining restarts by score
    let restarts = refine_budget.max(1);
    let mut starts: Vec<DMatrix<f64>> = Vec::with_capacity(restarts + 1);
    for sign in [1.0, -1.0] {
        if let Some((_, g)) = scored.iter().find(|(_, g)| g.determinant() * sign > 0.0) {
            starts.push(g.clone());
        }
    }
    for (_, g) in &scored {
        if starts.len() >= restarts {
            break;
        }
        if !starts.iter().any(|s| (s - g).norm() < 1e-12) {
            starts.push(g.clone());
        }
    }

    let mut best = f64::INFINITY;
    let mut best_g = starts[0].clone();
    for start in starts {
        let (val, g) = descend(&eval, start, n, &budgets, &mut rng);
        if val < best {
            best = val;
            best_g = g;
        }
    }
    (best, action.apply(&best_g, v))
}

/// Greedy geodesic descent with an adaptive step scale: each sweep tries a
/// batch of random Cayley directions sized to the manifold dimension; the
/// scale shrinks only after a sweep without improvement (and recovers
/// slightly on success), so the search is not starved before reaching the
/// basin of a minimum.
fn descend(
    eval: &impl Fn(&DMatrix<f64>) -> f64,
    start: DMatrix<f64>,
    n: usize,
    budgets: &Budgets,
    rng: &mut impl Rng,
) -> (f64, DMatrix<f64>) {
    let mut g = start;
    let mut best = eval(&g);
    let manifold_dim = n * (n - 1) / 2;
    let tries = budgets.descent_tries.max(2 * manifold_dim);
    let mut delta = 0.8;
    let mut shrinks = 0;
    let mut sweeps = 0;
    while shrinks < budgets.descent_levels && sweeps < 6 * budgets.descent_levels {
        sweeps += 1;
        let mut improved = false;
        for _ in 0..tries {
            let s = random_skew(n, rng) * delta;
            let cand = cayley(&s) * &g;
            let val = eval(&cand);
            if val < best {
                best = val;
                g = cand;
                improved = true;
            }
        }
        if improved {
            delta = (delta * 1.4).min(0.8);
        } else {
            delta *= 0.5;
            shrinks += 1;
        }
    }
    (best, g)
}

/// The subspace of vectors fixed by the whole action.
///
/// Finite groups use their generators (a vector fixed by the generators is
/// fixed by the group); compact groups stack `sample_budget` Haar samples.
/// The null space of the stacked `(L_g - I)` blocks is extracted by SVD with
/// the configured singular-value threshold.
pub fn fixed_point_subspace(action: &GroupAction, sample_budget: usize) -> Result<Subspace> {
    let m = action.ambient_dim();
    let mats: Vec<DMatrix<f64>> = match action.group() {
        Group::Finite(f) => f.generators().to_vec(),
        Group::Compact(s) => {
            if sample_budget == 0 {
                return Err(Error::Precondition(
                    "fixed-point sampling needs budget >= 1".into(),
                ));
            }
            (0..sample_budget as u64)
                .map(|i| s.sample_indexed(STREAM_FIXED, i))
                .collect()
        }
    };
    let mut stacked = DMatrix::zeros(mats.len() * m, m);
    for (k, g) in mats.iter().enumerate() {
        let block = action.ambient_matrix(g) - DMatrix::identity(m, m);
        stacked.rows_mut(k * m, m).copy_from(&block);
    }
    let tol = Tolerances::shared();
    let svd = stacked.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let mut basis: Vec<Point> = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol.nullspace_sv {
            basis.push(Point::from_vector(vt.row(i).transpose()));
        }
    }
    if basis.is_empty() {
        return Ok(Subspace::trivial(m));
    }
    Subspace::from_orthonormal(m, &basis, tol)
}

/// Verifies that identified fibers stay identified under scaling: if
/// `σ(v) = σ(w)` then `σ(λv) = σ(λw)` for every λ ≥ 0.
pub fn homothety_check(
    action: &GroupAction,
    v: &Point,
    w: &Point,
    lambdas: &[f64],
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("homothety-check", seed);
    report.budget("lambdas", lambdas.len() as u64);
    let refine = Budgets::default().refine_restarts;
    let base = orbit_distance(action, v, w, refine)?;
    report.metric("fiber_distance", base, Bound::AtMost(tol));
    if base > tol {
        report.verdict = Some("not-same-fiber".to_string());
        report.finalize(false);
        return Ok(report);
    }
    for (i, &lambda) in lambdas.iter().enumerate() {
        if lambda < 0.0 {
            return Err(Error::Precondition(format!(
                "homothety factors must be nonnegative, got {lambda}"
            )));
        }
        let d = orbit_distance(action, &v.scale(lambda), &w.scale(lambda), refine)?;
        // scale-proportional slack: sampling error grows with the points
        report.metric(
            &format!("distance_lambda_{i}"),
            d,
            Bound::AtMost(tol * (1.0 + lambda)),
        );
    }
    report.verdict = Some("same-fiber".to_string());
    report.finalize(false);
    Ok(report)
}

/// Result of slicing an orbit by a subspace.
#[derive(Debug, Clone, Serialize)]
pub struct SectionSlice {
    /// Points of the orbit lying in the subspace (projected exactly onto it).
    pub points: PointCloud,
    /// Smallest observed distance from an orbit point to the subspace;
    /// diagnostic when the slice came out empty.
    pub min_distance: f64,
    /// Whether the slice is exact (combinatorial or enumerated) rather than
    /// filtered from samples.
    pub exact: bool,
}

/// Intersects an orbit with a subspace.
///
/// Exact paths: conjugation orbits sliced by the diagonal-matrix subspace
/// (the slice is the set of coordinate permutations of the eigenvalues), and
/// standard compact orbits (spheres) sliced by a line.  Finite orbits filter
/// their enumerated points.  Everything else filters the sampled cloud and
/// may legitimately come back empty.
pub fn section_slice(orbit: &OrbitCloud, sigma: &Subspace, slice_tol: f64) -> Result<SectionSlice> {
    let action = orbit.action();
    let ambient = action.ambient_dim();
    if sigma.ambient_dim() != ambient {
        return Err(Error::DimensionMismatch {
            expected: ambient,
            got: sigma.ambient_dim(),
        });
    }
    let tol = Tolerances::shared();

    // conjugation orbit ∩ diagonal matrices = permutations of the spectrum
    if matches!(action.rep(), Rep::ConjugationSymmetric)
        && is_diagonal_subspace(sigma, action.group_dim())
        && is_full_special_or_orthogonal(action)
    {
        let n = action.group_dim();
        let a = sym_unembed(orbit.seed_point(), n);
        let eigen = a.symmetric_eigen();
        let lambda: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
        let mut pts: Vec<Point> = Vec::new();
        for perm in (0..n).permutations(n) {
            let mut d = DMatrix::zeros(n, n);
            for (i, &j) in perm.iter().enumerate() {
                d[(i, i)] = lambda[j];
            }
            pts.push(sym_embed(&d));
        }
        let cloud =
            PointCloud::new(pts, Some("diagonal slice".into()))?.deduplicated(tol.dedup_point);
        return Ok(SectionSlice {
            points: cloud,
            min_distance: 0.0,
            exact: true,
        });
    }

    // standard compact orbit is the whole sphere; a line meets it in ±r·b
    if matches!(action.rep(), Rep::Standard) && !action.is_exact() {
        let r = orbit.seed_point().norm();
        if sigma.dim() == 0 {
            return Ok(if r <= slice_tol {
                SectionSlice {
                    points: PointCloud::new(vec![Point::zeros(ambient)], None)?,
                    min_distance: 0.0,
                    exact: true,
                }
            } else {
                SectionSlice {
                    points: PointCloud::empty(ambient, Some("section slice".into())),
                    min_distance: r,
                    exact: true,
                }
            });
        }
        if sigma.dim() == 1 {
            let b = &sigma.basis_vectors()[0];
            let pts = vec![b.scale(r), b.scale(-r)];
            let cloud =
                PointCloud::new(pts, Some("sphere∩line".into()))?.deduplicated(tol.dedup_point);
            return Ok(SectionSlice {
                points: cloud,
                min_distance: 0.0,
                exact: true,
            });
        }
        // sphere ∩ subspace is a subsphere: return a deterministic sample of it
        let k = sigma.dim();
        let count = orbit.points().len().max(64);
        let mut rng = sampling::rng_for(orbit.seed() ^ STREAM_SLICE, 0);
        let pts: Vec<Point> = (0..count)
            .map(|_| {
                let u = sampling::unit_sphere_point(k, &mut rng);
                sigma.embed(&u.scale(r)).expect("dimensions agree")
            })
            .collect();
        return Ok(SectionSlice {
            points: PointCloud::new(pts, Some("sphere∩subspace sample".into()))?,
            min_distance: 0.0,
            exact: false,
        });
    }

    // generic path: filter the available points
    let mut kept: Vec<Point> = Vec::new();
    let mut min_distance = f64::INFINITY;
    for p in orbit.points() {
        let d = sigma.distance(p)?;
        min_distance = min_distance.min(d);
        if d <= slice_tol {
            kept.push(sigma.project(p)?);
        }
    }
    if kept.is_empty() {
        return Ok(SectionSlice {
            points: PointCloud::empty(ambient, Some("section slice".into())),
            min_distance,
            exact: orbit.exact(),
        });
    }
    let cloud = PointCloud::new(kept, Some("section slice".into()))?.deduplicated(tol.dedup_point);
    Ok(SectionSlice {
        points: cloud,
        min_distance,
        exact: orbit.exact(),
    })
}

fn is_diagonal_subspace(sigma: &Subspace, n: usize) -> bool {
    if sigma.ambient_dim() != sym_dim(n) || sigma.dim() != n {
        return false;
    }
    sigma
        .basis_vectors()
        .iter()
        .all(|b| b.coords()[n..].iter().all(|c| c.abs() <= 1e-12))
}

/// The diagonal-slice shortcut needs every permutation of the spectrum to be
/// realized, which holds for the full O(n)/SO(n) conjugation action.
fn is_full_special_or_orthogonal(action: &GroupAction) -> bool {
    matches!(action.group(), Group::Compact(_))
}
