//! Ridge leverage scores: exact offline scores, online (prefix) scores, and
//! the deterministic bound on the sum of online scores.
//!
//! The online λ-ridge leverage score of row `i` is
//! `lᵢ = min(aᵢᵀ (Aᵢ₋₁ᵀAᵢ₋₁ + λI)⁻¹ aᵢ, 1)`, scored against the exact Gram
//! of every earlier row. Because `Aᵢ₋₁ᵀAᵢ₋₁ ⪯ AᵀA`, it never underestimates
//! the offline score `aᵢᵀ (AᵀA + λI)⁻¹ aᵢ`, and a determinant-potential
//! argument bounds the total by `2d·ln(1 + ‖A‖₂²/λ)` for any row order.

use ndarray::ArrayView1;

use crate::error::{invalid, Result};
use crate::linalg::{check_row, gram, spd_inverse, spectral_norm_sq, PsdState};
use crate::scalar::Scalar;

/// A sequence of per-row scores with the quantities needed to audit them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTrace<T> {
    pub dim: usize,
    pub scores: Vec<T>,
    pub lambda: T,
    /// `‖A‖₂²` of the whole stream, computed after the fact.
    pub spectral_norm_sq: T,
}

impl<T: Scalar> ScoreTrace<T> {
    pub fn sum(&self) -> T {
        self.scores.iter().copied().sum()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `2d·ln(1 + ‖A‖₂²/λ)` for this trace.
    pub fn sum_bound(&self) -> T {
        score_sum_bound(self.dim, self.spectral_norm_sq, self.lambda)
            .expect("trace lambda is positive")
    }
}

/// `2d·ln(1 + ‖A‖₂²/λ)`, the deterministic cap on the sum of online scores.
pub fn score_sum_bound<T: Scalar>(d: usize, spectral_norm_sq: T, lambda: T) -> Result<T> {
    if !(lambda > T::zero()) {
        return Err(invalid(format!(
            "ridge lambda must be positive, got {lambda}"
        )));
    }
    if !(spectral_norm_sq >= T::zero()) {
        return Err(invalid("spectral norm must be non-negative"));
    }
    Ok(T::lit(2.0 * d as f64) * (spectral_norm_sq / lambda).ln_1p())
}

/// Incremental scorer that folds rows one at a time.
#[derive(Debug, Clone)]
pub struct OnlineScorer<T> {
    state: PsdState<T>,
    inclusive: bool,
    scores: Vec<T>,
}

impl<T: Scalar> OnlineScorer<T> {
    /// Scores each row against the Gram of the rows strictly before it.
    pub fn new(dim: usize, lambda: T) -> Result<Self> {
        Ok(Self {
            state: PsdState::new(dim, lambda)?,
            inclusive: false,
            scores: Vec::new(),
        })
    }

    /// Scores each row against a Gram that already includes it,
    /// `l′ᵢ = aᵢᵀ (AᵢᵀAᵢ + λI)⁻¹ aᵢ`.
    pub fn inclusive(dim: usize, lambda: T) -> Result<Self> {
        Ok(Self {
            inclusive: true,
            ..Self::new(dim, lambda)?
        })
    }

    pub fn push(&mut self, row: &[T]) -> Result<T> {
        check_row(row, self.state.dim(), self.scores.len())?;
        let score = if self.inclusive {
            self.state.absorb_row(row, T::one())?;
            self.state.ridge_quadratic(row)?.min(T::one())
        } else {
            let q = self.state.ridge_quadratic(row)?;
            self.state.absorb_row(row, T::one())?;
            q.min(T::one())
        };
        self.scores.push(score);
        Ok(score)
    }

    pub fn finish(self) -> Result<ScoreTrace<T>> {
        Ok(ScoreTrace {
            dim: self.state.dim(),
            spectral_norm_sq: spectral_norm_sq(self.state.gram())?,
            lambda: self.state.lambda(),
            scores: self.scores,
        })
    }
}

/// Online λ-ridge leverage scores `lᵢ` of a row sequence.
pub fn online_ridge_scores<T, R>(
    dim: usize,
    rows: impl IntoIterator<Item = R>,
    lambda: T,
) -> Result<ScoreTrace<T>>
where
    T: Scalar,
    R: AsRef<[T]>,
{
    let mut scorer = OnlineScorer::new(dim, lambda)?;
    for row in rows {
        scorer.push(row.as_ref())?;
    }
    scorer.finish()
}

/// Inclusive online scores `l′ᵢ ≤ lᵢ`.
pub fn online_ridge_scores_inclusive<T, R>(
    dim: usize,
    rows: impl IntoIterator<Item = R>,
    lambda: T,
) -> Result<ScoreTrace<T>>
where
    T: Scalar,
    R: AsRef<[T]>,
{
    let mut scorer = OnlineScorer::inclusive(dim, lambda)?;
    for row in rows {
        scorer.push(row.as_ref())?;
    }
    scorer.finish()
}

/// Exact λ-ridge leverage scores against the full Gram `AᵀA`.
pub fn offline_ridge_scores<T, R>(dim: usize, rows: &[R], lambda: T) -> Result<ScoreTrace<T>>
where
    T: Scalar,
    R: AsRef<[T]>,
{
    if !(lambda > T::zero()) {
        return Err(invalid(format!(
            "ridge lambda must be positive, got {lambda}"
        )));
    }
    for (i, r) in rows.iter().enumerate() {
        check_row(r.as_ref(), dim, i)?;
    }
    let g = gram(dim, rows)?;
    let mut reg = g.clone();
    for i in 0..dim {
        reg[[i, i]] = reg[[i, i]] + lambda;
    }
    let inv = spd_inverse(reg.view())?;
    let scores = rows
        .iter()
        .map(|r| {
            let v = ArrayView1::from(r.as_ref());
            v.dot(&inv.dot(&v)).max(T::zero()).min(T::one())
        })
        .collect();
    Ok(ScoreTrace {
        dim,
        scores,
        lambda,
        spectral_norm_sq: spectral_norm_sq(g.view())?,
    })
}
