//! Certificates and audits for sampler output.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::leverage::{online_ridge_scores, ScoreTrace};
use crate::linalg::{check_row, gram, psd_sandwich_margins, spectral_norm_sq};
use crate::samplers::{Accuracy, OnlineBss, StreamingSampler};
use crate::scalar::{log_dim, Scalar};
use crate::streams::WeightedRow;

/// Outcome of checking `(1−ε)AᵀA − δI ⪯ ÃᵀÃ ⪯ (1+ε)AᵀA + δI`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate<T> {
    pub min_eig: T,
    pub max_eig: T,
    pub eps: T,
    pub delta: T,
    pub passed: bool,
    pub kept_rows: usize,
    /// Row-count comparator `d·ln d·ln(ε‖A‖₂²/δ)/ε²`.
    pub bound_rows: T,
}

/// Expected output size of online leverage sampling, `d·ln d·ln(ε‖A‖₂²/δ)/ε²`.
/// The last log factor is dropped when its argument is at most `e`.
pub fn row_count_comparator<T: Scalar>(dim: usize, spectral_norm_sq: T, eps: T, delta: T) -> T {
    let base = T::lit(dim as f64) * log_dim::<T>(dim) / (eps * eps);
    let arg = eps * spectral_norm_sq / delta;
    if arg > T::lit(std::f64::consts::E) {
        base * arg.ln()
    } else {
        base
    }
}

/// Certifies kept rows (already rescaled by `1/√p`) against the full input.
pub fn certify<T, R>(
    dim: usize,
    rows: &[R],
    kept: &[WeightedRow<T>],
    eps: T,
    delta: T,
) -> Result<Certificate<T>>
where
    T: Scalar,
    R: AsRef<[T]>,
{
    if rows.is_empty() {
        return Err(Error::Empty("certify needs at least one input row"));
    }
    for (i, r) in rows.iter().enumerate() {
        check_row(r.as_ref(), dim, i)?;
    }
    let full = gram(dim, rows)?;
    let approx = gram(dim, kept.iter().map(|w| &w.row))?;
    let margins = psd_sandwich_margins(full.view(), approx.view(), eps, delta)?;
    Ok(Certificate {
        min_eig: margins.min_eig,
        max_eig: margins.max_eig,
        eps,
        delta,
        passed: margins.passed,
        kept_rows: kept.len(),
        bound_rows: row_count_comparator(dim, spectral_norm_sq(full.view())?, eps, delta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundAudit<T> {
    pub sum: T,
    pub bound: T,
    /// `sum / bound`; at most 1 when the bound holds.
    pub slack_ratio: T,
    pub holds: bool,
}

/// Compares the sum of a score trace with `2d·ln(1 + ‖A‖₂²/λ)`.
pub fn audit_score_bound<T: Scalar>(trace: &ScoreTrace<T>) -> BoundAudit<T> {
    let sum = trace.sum();
    let bound = trace.sum_bound();
    let slack_ratio = if bound > T::zero() {
        sum / bound
    } else if sum > T::zero() {
        T::infinity()
    } else {
        T::zero()
    };
    BoundAudit {
        sum,
        bound,
        slack_ratio,
        holds: sum <= bound,
    }
}

/// `(8/ε²)·Σ lᵢ` with `lᵢ` the online `(2δ/ε)`-ridge scores, the cap on the
/// expected number of rows the barrier sampler keeps.
pub fn bss_count_comparator<T, R>(dim: usize, rows: &[R], accuracy: Accuracy<T>) -> Result<T>
where
    T: Scalar,
    R: AsRef<[T]>,
{
    let lambda = T::lit(2.0) * accuracy.delta / accuracy.eps;
    let trace = online_ridge_scores(dim, rows, lambda)?;
    Ok(T::lit(8.0) / (accuracy.eps * accuracy.eps) * trace.sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountEstimate {
    pub trials: usize,
    pub mean: f64,
    /// Normal-approximation 95% interval, descriptive only.
    pub ci_low: f64,
    pub ci_high: f64,
    pub comparator: f64,
    pub counts: Vec<usize>,
}

/// Monte-Carlo estimate of the barrier sampler's expected kept count over
/// seeds `base_seed .. base_seed + trials`.
pub fn expected_count_bss<T, R>(
    dim: usize,
    rows: &[R],
    accuracy: Accuracy<T>,
    trials: usize,
    base_seed: u64,
) -> Result<CountEstimate>
where
    T: Scalar,
    R: AsRef<[T]> + Sync,
{
    if trials < 2 {
        return Err(invalid(format!("need at least 2 trials, got {trials}")));
    }
    let counts = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut bss = OnlineBss::new(dim, accuracy, base_seed + t)?;
            for r in rows {
                bss.step(r.as_ref())?;
            }
            Ok(bss.kept_count())
        })
        .collect::<Result<Vec<_>>>()?;
    let n = trials as f64;
    let mean = counts.iter().sum::<usize>() as f64 / n;
    let var = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let half = 1.96 * (var / n).sqrt();
    Ok(CountEstimate {
        trials,
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
        comparator: bss_count_comparator(dim, rows, accuracy)?.as_f64(),
        counts,
    })
}
