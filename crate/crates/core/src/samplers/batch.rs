use ndarray::{Array2, ArrayView1};
use rand::Rng;

use super::{OnlineSample, SampleDecision, StreamingSampler};
use crate::error::{invalid, Result};
use crate::linalg::{check_row, cholesky};
use crate::scalar::Scalar;

/// Sketched score of one row in a block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchEstimate<T> {
    /// Estimate of `aᵀ(ÃᵀÃ + λI)⁻¹a`.
    pub estimate: T,
    /// `min((1+ε)·estimate, 1)`, used in place of `l̃`.
    pub score: T,
    pub probability: T,
}

impl<T: Scalar> OnlineSample<T> {
    /// Estimates ridge quadratics for a whole block against the sample Gram
    /// frozen at the block boundary.
    ///
    /// With `F` the Cholesky factor of the maintained inverse, the quadratic is
    /// `‖Fᵀa‖²`. A `k × d` random-sign matrix `S` (entries `±1/√k`) is applied
    /// once per block, so each row costs `O(kd)`: `‖S Fᵀ a‖²`. For
    /// `sketch_dim ≥ d` the sketch is an exact isometry and the estimates are
    /// the exact quadratics.
    pub fn batch_scores<R: AsRef<[T]>>(
        &mut self,
        rows: &[R],
        sketch_dim: usize,
    ) -> Result<Vec<BatchEstimate<T>>> {
        if sketch_dim < 1 {
            return Err(invalid("sketch dimension must be at least 1"));
        }
        if rows.is_empty() {
            return Err(invalid("batch must contain at least one row"));
        }
        let d = self.dim();
        for (k, r) in rows.iter().enumerate() {
            check_row(r.as_ref(), d, self.rows_seen() + k)?;
        }

        let factor = cholesky(self.sample_state().inverse())?;
        let projected = if sketch_dim >= d {
            factor.t().to_owned()
        } else {
            let entry = T::one() / T::lit(sketch_dim as f64).sqrt();
            let signs = Array2::from_shape_fn((sketch_dim, d), |_| {
                if self.sketch_rng.random::<bool>() {
                    entry
                } else {
                    -entry
                }
            });
            signs.dot(&factor.t())
        };

        Ok(rows
            .iter()
            .map(|r| {
                let z = projected.dot(&ArrayView1::from(r.as_ref()));
                let estimate = z.dot(&z);
                let score = self.clamp_score(estimate);
                BatchEstimate {
                    estimate,
                    score,
                    probability: self.probability(score),
                }
            })
            .collect())
    }

    /// Samples a block: probabilities come from [`Self::batch_scores`], then
    /// rows are decided and absorbed in order.
    pub fn step_block<R: AsRef<[T]>>(
        &mut self,
        rows: &[R],
        sketch_dim: usize,
    ) -> Result<Vec<SampleDecision<T>>> {
        let estimates = self.batch_scores(rows, sketch_dim)?;
        rows.iter()
            .zip(estimates)
            .map(|(r, e)| self.commit(r.as_ref(), e.probability, e.score))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::Accuracy;

    #[test]
    fn errors() {
        let acc = Accuracy::new(0.5, 0.1).unwrap();
        let mut s = OnlineSample::<f64>::new(2, acc, 0).unwrap();
        assert!(s.batch_scores(&[[1.0, 0.0]], 0).is_err());
        let empty: [[f64; 2]; 0] = [];
        assert!(s.batch_scores(&empty, 4).is_err());
        assert!(s.batch_scores(&[vec![1.0]], 4).is_err());
    }

    #[test]
    fn block_of_one_matches_step() {
        let rows = crate::streams::gen_gaussian::<f64>(150, 4, 21)
            .collect_rows()
            .unwrap();
        let acc = Accuracy::new(0.7, 0.5).unwrap();
        let mut a = OnlineSample::<f64>::new(4, acc, 5).unwrap();
        let mut b = OnlineSample::<f64>::new(4, acc, 5).unwrap();
        for r in &rows {
            let da = a.step(r).unwrap();
            let db = b.step_block(std::slice::from_ref(r), 4).unwrap()[0];
            assert!((da.probability - db.probability).abs() < 1e-12);
            assert_eq!(da.kept, db.kept);
        }
    }

    #[test]
    fn exact_sketch_matches_state_quadratic() {
        let rows = crate::streams::gen_gaussian::<f64>(40, 5, 2)
            .collect_rows()
            .unwrap();
        let acc = Accuracy::new(0.5, 0.1).unwrap();
        let mut s = OnlineSample::<f64>::new(5, acc, 1).unwrap();
        for r in &rows[..20] {
            s.step(r).unwrap();
        }
        let est = s.batch_scores(&rows[20..], 9).unwrap();
        for (r, e) in rows[20..].iter().zip(est) {
            let exact = s.sample_state().ridge_quadratic(r).unwrap();
            assert!((e.estimate - exact).abs() <= 1e-12 * exact.max(1.0));
        }
    }
}
