//! Haar-distributed samples from O(n) and SO(n).

use nalgebra::DMatrix;
use rand::Rng;

use crate::sampling;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompactFamily {
    Orthogonal,
    SpecialOrthogonal,
}

/// Haar sampler for a compact matrix group family.
#[derive(Debug, Clone)]
pub struct CompactGroupSampler {
    pub family: CompactFamily,
    pub n: usize,
    pub seed: u64,
}

impl CompactGroupSampler {
    pub fn new(family: CompactFamily, n: usize, seed: u64) -> Result<CompactGroupSampler> {
        if n < 2 {
            return Err(Error::Precondition(format!(
                "compact sampler needs n >= 2, got {n}"
            )));
        }
        Ok(CompactGroupSampler { family, n, seed })
    }

    /// One Haar sample using the provided generator.
    pub fn sample(&self, rng: &mut impl Rng) -> DMatrix<f64> {
        let q = haar_orthogonal(self.n, rng);
        match self.family {
            CompactFamily::Orthogonal => q,
            CompactFamily::SpecialOrthogonal => into_special(q),
        }
    }

    /// Deterministic sample for `(seed, index)`; batches assembled from these
    /// are independent of evaluation order.
    pub fn sample_indexed(&self, stream: u64, index: u64) -> DMatrix<f64> {
        let mut rng = sampling::rng_for(self.seed ^ stream, index);
        self.sample(&mut rng)
    }
}

/// Haar sample from O(n): QR of a Gaussian matrix with the R-diagonal sign
/// correction (without it the QR convention biases the distribution).
pub fn haar_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        rng.sample::<f64, _>(rand_distr::StandardNormal)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Folds a Haar O(n) sample into SO(n) by flipping the last column of
/// det = -1 samples; right multiplication by a fixed reflection maps the
/// nontrivial coset onto SO(n) preserving left invariance.
fn into_special(mut q: DMatrix<f64>) -> DMatrix<f64> {
    if q.determinant() < 0.0 {
        let n = q.nrows();
        for i in 0..n {
            q[(i, n - 1)] = -q[(i, n - 1)];
        }
    }
    q
}
