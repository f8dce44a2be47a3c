use ndarray::{Array2, ArrayView1};
use rand_chacha::ChaCha8Rng;

use super::{seeded_rng, Accuracy, SampleDecision, StreamingSampler};
use crate::error::Result;
use crate::linalg::{check_row, ensure_symmetric, spd_inverse};
use crate::scalar::Scalar;

/// Independent sampling by exact λ-ridge leverage scores.
///
/// Needs the full Gram `AᵀA` before the first row, so in a streaming setting
/// it is a two-pass baseline.
#[derive(Debug, Clone)]
pub struct OfflineSampler<T> {
    oversampling: T,
    inv: Array2<T>,
    rng: ChaCha8Rng,
    seen: usize,
    kept: usize,
}

impl<T: Scalar> OfflineSampler<T> {
    pub fn new(full_gram: Array2<T>, accuracy: Accuracy<T>, seed: u64) -> Result<Self> {
        ensure_symmetric(full_gram.view())?;
        let dim = full_gram.nrows();
        let mut reg = full_gram;
        for i in 0..dim {
            reg[[i, i]] = reg[[i, i]] + accuracy.lambda();
        }
        Ok(Self {
            oversampling: accuracy.oversampling(dim),
            inv: spd_inverse(reg.view())?,
            rng: seeded_rng(seed, 0),
            seen: 0,
            kept: 0,
        })
    }
}

impl<T: Scalar> StreamingSampler<T> for OfflineSampler<T> {
    fn dim(&self) -> usize {
        self.inv.nrows()
    }

    fn step(&mut self, row: &[T]) -> Result<SampleDecision<T>> {
        check_row(row, self.dim(), self.seen)?;
        let v = ArrayView1::from(row);
        let score = v.dot(&self.inv.dot(&v)).max(T::zero()).min(T::one());
        let p = (self.oversampling * score).min(T::one());
        let decision = SampleDecision::draw(p, score, &mut self.rng);
        self.seen += 1;
        if decision.kept {
            self.kept += 1;
        }
        Ok(decision)
    }

    fn rows_seen(&self) -> usize {
        self.seen
    }

    fn kept_count(&self) -> usize {
        self.kept
    }

    /// The dense inverse of the regularized Gram.
    fn working_rows(&self) -> usize {
        self.dim()
    }
}
