//! Centralized numerical tolerances and default budgets.
//!
//! Every tolerance used by the crate lives in [`Tolerances`] so that the
//! relationships between them stay visible in one place (for example, the
//! matrix dedup tolerance must sit well above accumulated product error and
//! well below the separation of distinct group elements).

use serde::{Deserialize, Serialize};

/// Default RNG seed used by the CLI and by scenario defaults.
///
/// An arbitrary fixed constant: runs are reproducible and comparable across
/// machines unless the caller overrides the seed.
pub const DEFAULT_SEED: u64 = 271828;

/// Numerical tolerances, centralized.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Basis vectors count as orthonormal when pairwise dot products and
    /// norm defects stay below this.
    pub orthonormal: f64,
    /// Residual norm below which a vector is dropped as linearly dependent
    /// during Gram–Schmidt.
    pub rank_drop: f64,
    /// `|MᵀM - I|_∞` bound for matrices accepted as orthogonal.
    pub matrix_orthogonal: f64,
    /// Frobenius distance under which two group elements are identified
    /// during closure enumeration.
    pub dedup_matrix: f64,
    /// Euclidean distance under which two orbit points are identified.
    pub dedup_point: f64,
    /// Allowed spread of point norms within one orbit cloud.
    pub orbit_sphere: f64,
    /// Singular values below this are treated as zero when extracting
    /// null spaces of stacked `(g - I)` blocks.
    pub nullspace_sv: f64,
    /// Feasibility slack for linear-program solutions.
    pub lp_feasibility: f64,
    /// Pivot threshold for the simplex solver.
    pub lp_pivot: f64,
    /// Default membership tolerance: a point is inside a hull when its
    /// computed distance does not exceed this.
    pub membership: f64,
    /// A cloud whose points all agree within this is treated as a singleton.
    pub singleton_cloud: f64,
    /// Quotient distances below this are skipped in slope quotients
    /// (the probe landed on the base fiber).
    pub slope_denominator_floor: f64,
    /// Default unit-norm check tolerance for directions.
    pub unit_direction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            orthonormal: 1e-10,
            rank_drop: 1e-10,
            matrix_orthogonal: 1e-9,
            dedup_matrix: 1e-8,
            dedup_point: 1e-9,
            orbit_sphere: 2e-9,
            nullspace_sv: 1e-8,
            lp_feasibility: 1e-9,
            lp_pivot: 1e-9,
            membership: 1e-8,
            singleton_cloud: 1e-12,
            slope_denominator_floor: 1e-12,
            unit_direction: 1e-10,
        }
    }
}

impl Tolerances {
    /// Shared default instance; operations that do not expose a tolerance
    /// parameter read from here.
    pub fn shared() -> &'static Tolerances {
        static SHARED: std::sync::OnceLock<Tolerances> = std::sync::OnceLock::new();
        SHARED.get_or_init(Tolerances::default)
    }
}

/// Default budgets for sampling-based operations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    /// Orbit sample count for compact groups.
    pub orbit_samples: usize,
    /// Unit directions for support-function comparisons.
    pub directions: usize,
    /// Haar samples tried before descent refinement in orbit distance.
    pub distance_samples: usize,
    /// Descent restarts from the best Haar samples.
    pub refine_restarts: usize,
    /// Step-shrink levels in the descent schedule.
    pub descent_levels: usize,
    /// Random tangent directions tried per descent level.
    pub descent_tries: usize,
    /// Probe points for the convexity detector.
    pub detect_probes: usize,
    /// Sphere samples per radius in a slope estimate.
    pub slope_samples: usize,
    /// Pairs for the midpoint convexity oracle.
    pub midpoint_pairs: usize,
    /// Group samples when estimating fixed-point subspaces of compact groups.
    pub fixed_point_samples: usize,
    /// Attempt cap for rejection samplers.
    pub rejection_attempts: usize,
    /// Radius of the ball in which detector probes and sublevel-set samples
    /// are drawn, as a multiple of the set's own scale.
    pub probe_ball_factor: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            orbit_samples: 2000,
            directions: 256,
            distance_samples: 64,
            refine_restarts: 2,
            descent_levels: 48,
            descent_tries: 6,
            detect_probes: 200,
            slope_samples: 32,
            midpoint_pairs: 200,
            fixed_point_samples: 10,
            rejection_attempts: 20000,
            probe_ball_factor: 2.5,
        }
    }
}

/// Relative radii schedule for slope estimates: multiples of the base
/// distance `f(x)`, largest first.
pub const SLOPE_RADII_FACTORS: [f64; 3] = [1e-1, 1e-2, 1e-3];
