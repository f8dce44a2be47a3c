use ndarray::ArrayView2;
use rand_chacha::ChaCha8Rng;

use super::{seeded_rng, Accuracy, SampleDecision, StreamingSampler};
use crate::error::Result;
use crate::linalg::{check_row, PsdState};
use crate::scalar::Scalar;

/// Online leverage-score sampler that scores rows against its own sample.
///
/// Each row gets `l̃ = min((1+ε)·aᵀ(ÃᵀÃ + λI)⁻¹a, 1)` with `λ = δ/ε`, is kept
/// with probability `p = min(c·l̃, 1)` where `c = 8 ln d / ε²`, and if kept
/// enters the sample as `a/√p`. Only the Gram of the sample and its
/// regularized inverse are stored.
#[derive(Debug, Clone)]
pub struct OnlineSample<T> {
    accuracy: Accuracy<T>,
    oversampling: T,
    sample: PsdState<T>,
    rng: ChaCha8Rng,
    pub(super) sketch_rng: ChaCha8Rng,
    seen: usize,
    kept: usize,
}

impl<T: Scalar> OnlineSample<T> {
    pub fn new(dim: usize, accuracy: Accuracy<T>, seed: u64) -> Result<Self> {
        Self::with_rng(dim, accuracy, seeded_rng(seed, 0), seeded_rng(seed, 2))
    }

    pub(super) fn with_rng(
        dim: usize,
        accuracy: Accuracy<T>,
        rng: ChaCha8Rng,
        sketch_rng: ChaCha8Rng,
    ) -> Result<Self> {
        Ok(Self {
            oversampling: accuracy.oversampling(dim),
            sample: PsdState::new(dim, accuracy.lambda())?,
            accuracy,
            rng,
            sketch_rng,
            seen: 0,
            kept: 0,
        })
    }

    pub fn accuracy(&self) -> Accuracy<T> {
        self.accuracy
    }

    pub fn lambda(&self) -> T {
        self.sample.lambda()
    }

    /// `c = 8 ln d / ε²`.
    pub fn oversampling(&self) -> T {
        self.oversampling
    }

    /// `ÃᵀÃ = Σ aaᵀ/p` over kept rows.
    pub fn sample_gram(&self) -> ArrayView2<'_, T> {
        self.sample.gram()
    }

    pub(super) fn sample_state(&self) -> &PsdState<T> {
        &self.sample
    }

    /// `min((1+ε)·q, 1)` for a raw ridge quadratic `q`.
    pub(super) fn clamp_score(&self, quadratic: T) -> T {
        ((T::one() + self.accuracy.eps) * quadratic).min(T::one())
    }

    pub(super) fn probability(&self, score: T) -> T {
        (self.oversampling * score).min(T::one())
    }

    /// Draws the coin for an already computed probability and absorbs the
    /// row if it is kept.
    pub(super) fn commit(
        &mut self,
        row: &[T],
        probability: T,
        score: T,
    ) -> Result<SampleDecision<T>> {
        let decision = SampleDecision::draw(probability, score, &mut self.rng);
        if decision.kept {
            self.sample.absorb_row(row, T::one() / probability)?;
            self.kept += 1;
        }
        self.seen += 1;
        Ok(decision)
    }
}

impl<T: Scalar> StreamingSampler<T> for OnlineSample<T> {
    fn dim(&self) -> usize {
        self.sample.dim()
    }

    fn step(&mut self, row: &[T]) -> Result<SampleDecision<T>> {
        check_row(row, self.dim(), self.seen)?;
        let score = self.clamp_score(self.sample.ridge_quadratic(row)?);
        let p = self.probability(score);
        self.commit(row, p, score)
    }

    fn rows_seen(&self) -> usize {
        self.seen
    }

    fn kept_count(&self) -> usize {
        self.kept
    }

    /// Rows of `Ã` that scoring depends on.
    fn working_rows(&self) -> usize {
        self.kept
    }
}
