//! Numerical toolkit for studying convexity questions in orbit spaces of
//! orthogonal group actions.
//!
//! A compact group `G ≤ O(n)` acting on a Euclidean space `V` induces the
//! quotient map `σ : V → V/G`, which is a submetry: closed balls map onto
//! closed balls of the same radius.  Sets in the quotient correspond to
//! *saturated* subsets of `V` (unions of orbits), and functions on the
//! quotient correspond to *basic* functions (constant on orbits).  This crate
//! provides the machinery to experiment with that correspondence:
//!
//! * [`geom`] — points, subspaces, orthonormalization, projections and the
//!   Busemann-style pairing `sup_t (t - |v - tu|)`.
//! * [`groups`] — finite orthogonal groups by generator closure, Haar samplers
//!   for `O(n)`/`SO(n)`, representations (standard, diagonal copies,
//!   conjugation on symmetric matrices), orbits and orbit distances.
//! * [`convex`] — support oracles, hull membership with certificates, polar
//!   support values by linear programming, Hausdorff gaps, affine dimension.
//! * [`submetry`] — saturated sets, distance-to-set and the ascending-slope
//!   criterion: the preimage of `S` is convex iff the distance function to
//!   `S` has ascending slope 1 at every point of the complement.
//! * [`scenarios`] — end-to-end verification scenarios (Schur–Horn
//!   projections, fat sections and reduced actions, orbitope dimension gaps,
//!   finite-group counterexamples, fixed-point subspaces).
//! * [`report`] — machine-readable verification reports and CSV artifacts.
//!
//! All randomness is drawn from seeded ChaCha streams; every operation is
//! deterministic given its configuration and seed.

pub mod config;
pub mod convex;
pub mod geom;
pub mod groups;
pub mod report;
pub mod sampling;
pub mod scenarios;
pub mod submetry;

use thiserror::Error;

/// Crate-wide error type for misuse and resource exhaustion.
///
/// Numerical signals that are expected outcomes (an unbounded polar LP, an
/// unconverged membership query, an empty section slice) are *not* errors;
/// they are carried in the corresponding result types.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinates must be finite (entry {index} is {value})")]
    NonFinite { index: usize, value: f64 },

    #[error("vector must be nonzero within tolerance {tol}")]
    ZeroVector { tol: f64 },

    #[error("direction must be a unit vector: |u| = {norm} (tolerance {tol})")]
    NotUnit { norm: f64, tol: f64 },

    #[error("point cloud is empty but the operation needs points")]
    EmptyCloud,

    #[error("matrix is not orthogonal within {tol}: residual {residual}")]
    NotOrthogonal { residual: f64, tol: f64 },

    #[error("group closure exceeded the element cap {cap}")]
    GroupTooLarge { cap: usize },

    #[error("group must be nontrivial for this operation")]
    TrivialGroup,

    #[error("{context}: sampler exhausted {attempts} attempts without an accepted point")]
    SamplerStarved {
        context: &'static str,
        attempts: usize,
    },

    #[error(
        "probe point is too close to the set: distance {distance} <= smallest radius {radius}"
    )]
    InsideMargin { distance: f64, radius: f64 },

    #[error("simplex solver exceeded {max_pivots} pivots")]
    PivotLimit { max_pivots: usize },

    #[error("linear program too large: {vars} variables, {constraints} constraints (caps {max_vars}/{max_constraints})")]
    LpTooLarge {
        vars: usize,
        constraints: usize,
        max_vars: usize,
        max_constraints: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
