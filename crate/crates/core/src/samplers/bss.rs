use ndarray::ArrayView1;
use rand_chacha::ChaCha8Rng;

use super::{seeded_rng, Accuracy, SampleDecision, StreamingSampler};
use crate::error::{Error, Result};
use crate::linalg::{check_row, PdInverse};
use crate::scalar::Scalar;

/// Online barrier sampler.
///
/// Maintains an upper barrier `Bᵁ` and a lower barrier `Bᴸ`, starting at
/// `±δI`, and works with the gaps `Xᵁ = Bᵁ − ÃᵀÃ` and `Xᴸ = ÃᵀÃ − Bᴸ`. Row `a`
/// is kept with probability
/// `p = min(cᵤ·aᵀ(Xᵁ)⁻¹a + c_L·aᵀ(Xᴸ)⁻¹a, 1)`, with `cᵤ = 2/ε + 1` and
/// `c_L = 2/ε − 1`; afterwards the barriers advance by `(1±ε)aaᵀ` whether or
/// not the row was kept. Both gaps stay positive definite on every run, so
/// the output always satisfies `(1−ε)AᵀA − δI ≺ ÃᵀÃ ≺ (1+ε)AᵀA + δI`.
#[derive(Debug, Clone)]
pub struct OnlineBss<T> {
    accuracy: Accuracy<T>,
    c_upper: T,
    c_lower: T,
    upper: PdInverse<T>,
    lower: PdInverse<T>,
    rng: ChaCha8Rng,
    seen: usize,
    kept: usize,
}

impl<T: Scalar> OnlineBss<T> {
    pub fn new(dim: usize, accuracy: Accuracy<T>, seed: u64) -> Result<Self> {
        let two_over_eps = T::lit(2.0) / accuracy.eps;
        Ok(Self {
            c_upper: two_over_eps + T::one(),
            c_lower: two_over_eps - T::one(),
            upper: PdInverse::scaled_identity(dim, accuracy.delta)?,
            lower: PdInverse::scaled_identity(dim, accuracy.delta)?,
            accuracy,
            rng: seeded_rng(seed, 0),
            seen: 0,
            kept: 0,
        })
    }

    pub fn accuracy(&self) -> Accuracy<T> {
        self.accuracy
    }

    /// `(cᵤ, c_L)`.
    pub fn barrier_constants(&self) -> (T, T) {
        (self.c_upper, self.c_lower)
    }

    /// `Xᵁ = Bᵁ − ÃᵀÃ` with its maintained inverse.
    pub fn upper_gap(&self) -> &PdInverse<T> {
        &self.upper
    }

    /// `Xᴸ = ÃᵀÃ − Bᴸ` with its maintained inverse.
    pub fn lower_gap(&self) -> &PdInverse<T> {
        &self.lower
    }

    /// Smallest eigenvalues of `(Xᵁ, Xᴸ)`; both must stay positive.
    pub fn gap_min_eigenvalues(&self) -> Result<(T, T)> {
        Ok((self.upper.min_eigenvalue()?, self.lower.min_eigenvalue()?))
    }

    fn advance_gap(gap: &mut PdInverse<T>, row: ArrayView1<T>, coef: T, which: &str) -> Result<()> {
        gap.update(row, coef).map_err(|e| match e {
            Error::IndefiniteUpdate(_) | Error::NotPositiveDefinite => Error::InvariantViolation(
                format!("{which} barrier gap lost positive definiteness: {e}"),
            ),
            other => other,
        })
    }
}

impl<T: Scalar> StreamingSampler<T> for OnlineBss<T> {
    fn dim(&self) -> usize {
        self.upper.dim()
    }

    fn step(&mut self, row: &[T]) -> Result<SampleDecision<T>> {
        check_row(row, self.dim(), self.seen)?;
        let qu = self.upper.quadratic(row)?;
        let ql = self.lower.quadratic(row)?;
        let score = self.c_upper * qu + self.c_lower * ql;
        let p = score.min(T::one());
        let decision = SampleDecision::draw(p, score, &mut self.rng);

        // The sample gains aaᵀ/p if kept and the barriers gain (1±ε)aaᵀ, all
        // multiples of aaᵀ, so each gap moves by one net rank-one term.
        let sample_gain = if decision.kept {
            T::one() / p
        } else {
            T::zero()
        };
        let eps = self.accuracy.eps;
        let view = ArrayView1::from(row);
        Self::advance_gap(&mut self.upper, view, T::one() + eps - sample_gain, "upper")?;
        Self::advance_gap(
            &mut self.lower,
            view,
            sample_gain - (T::one() - eps),
            "lower",
        )?;

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

    /// The two dense gap matrices.
    fn working_rows(&self) -> usize {
        2 * self.dim()
    }
}
