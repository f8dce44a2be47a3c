use rand_chacha::ChaCha8Rng;

use super::{seeded_rng, Accuracy, OnlineSample, SampleDecision, StreamingSampler};
use crate::error::Result;
use crate::scalar::Scalar;

/// Low-memory sampler whose scores come from an independent constant-accuracy
/// [`OnlineSample`] run at `(ε = 1/2, δ/(2ε))`.
///
/// The inner instance shares the outer `λ = δ/ε` but keeps `O(1/ε²)` fewer
/// rows. The outer sample is never consulted for scoring, so its rows can go
/// straight to an output sink.
#[derive(Debug, Clone)]
pub struct SlimSample<T> {
    accuracy: Accuracy<T>,
    oversampling: T,
    inner: OnlineSample<T>,
    rng: ChaCha8Rng,
    kept: usize,
    peak_inner: usize,
}

impl<T: Scalar> SlimSample<T> {
    pub fn new(dim: usize, accuracy: Accuracy<T>, seed: u64) -> Result<Self> {
        let half = T::lit(0.5);
        let inner_accuracy = Accuracy::new(half, accuracy.delta / (T::lit(2.0) * accuracy.eps))?;
        Ok(Self {
            oversampling: accuracy.oversampling(dim),
            inner: OnlineSample::with_rng(
                dim,
                inner_accuracy,
                seeded_rng(seed, 1),
                seeded_rng(seed, 3),
            )?,
            accuracy,
            rng: seeded_rng(seed, 0),
            kept: 0,
            peak_inner: 0,
        })
    }

    pub fn accuracy(&self) -> Accuracy<T> {
        self.accuracy
    }

    pub fn inner(&self) -> &OnlineSample<T> {
        &self.inner
    }

    /// Largest number of rows the inner instance has held.
    pub fn peak_inner_rows(&self) -> usize {
        self.peak_inner
    }
}

impl<T: Scalar> StreamingSampler<T> for SlimSample<T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn step(&mut self, row: &[T]) -> Result<SampleDecision<T>> {
        let score = self.inner.step(row)?.score_used;
        self.peak_inner = self.peak_inner.max(self.inner.kept_count());
        let p = (self.oversampling * score).min(T::one());
        let decision = SampleDecision::draw(p, score, &mut self.rng);
        if decision.kept {
            self.kept += 1;
        }
        Ok(decision)
    }

    fn rows_seen(&self) -> usize {
        self.inner.rows_seen()
    }

    fn kept_count(&self) -> usize {
        self.kept
    }

    /// Only the inner instance's rows are retained.
    fn working_rows(&self) -> usize {
        self.inner.kept_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_lambda_matches_outer() {
        for (eps, delta) in [(0.1, 0.3), (0.5, 2.0), (0.9, 1e-3)] {
            let acc = Accuracy::new(eps, delta).unwrap();
            let s = SlimSample::<f64>::new(4, acc, 0).unwrap();
            assert!((s.inner().lambda() - acc.lambda()).abs() <= 1e-15 * acc.lambda());
            assert_eq!(s.inner().accuracy().eps, 0.5);
        }
    }

    #[test]
    fn repeated_row_probabilities_never_increase() {
        let acc = Accuracy::new(0.3, 1.0).unwrap();
        for seed in 0..25 {
            let mut s = SlimSample::<f64>::new(3, acc, seed).unwrap();
            let mut last = f64::INFINITY;
            for _ in 0..400 {
                let d = s.step(&[1.0, 0.0, 0.0]).unwrap();
                assert!(d.probability <= last);
                last = d.probability;
            }
            assert!(last < 1.0);
        }
    }

    #[test]
    fn inner_keeps_more_than_coarse_online_sample() {
        // d = 2, ε = 0.9: the inner instance runs at ε = 1/2 and therefore
        // oversamples more than an OnlineSample at ε = 0.9 would.
        let acc = Accuracy::new(0.9, 0.1).unwrap();
        let rows = crate::streams::gen_gaussian::<f64>(3000, 2, 77)
            .collect_rows()
            .unwrap();
        let (mut inner_total, mut online_total) = (0usize, 0usize);
        for seed in 0..20 {
            let mut slim = SlimSample::<f64>::new(2, acc, seed).unwrap();
            let mut online = OnlineSample::<f64>::new(2, acc, seed + 1000).unwrap();
            for r in &rows {
                slim.step(r).unwrap();
                online.step(r).unwrap();
            }
            inner_total += slim.inner().kept_count();
            online_total += online.kept_count();
        }
        assert!(
            inner_total > online_total,
            "{inner_total} vs {online_total}"
        );
    }
}
