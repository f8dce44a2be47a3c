use ndarray::{Array2, ArrayView2};

use super::{ensure_symmetric, inv_sqrt_spd, sym_eigenvalues, symmetrize};
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Extremal eigenvalues of the whitened ratio
/// `(G + λI)^{-1/2} (G̃ + λI) (G + λI)^{-1/2}` with `λ = δ/ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichMargins<T> {
    pub min_eig: T,
    pub max_eig: T,
    pub lambda: T,
    pub passed: bool,
}

impl<T: Scalar> SandwichMargins<T> {
    /// Slack applied to both boundary comparisons.
    pub fn tolerance(eps: T) -> T {
        T::roundoff_tol() * (T::lit(2.0) + eps)
    }
}

/// Checks `(1−ε)G − δI ⪯ G̃ ⪯ (1+ε)G + δI`, where `reference` is `G = AᵀA`
/// and `approx` is `G̃ = ÃᵀÃ`.
///
/// Adding `λI = (δ/ε)I` to both sides turns the additive-multiplicative
/// sandwich into a purely multiplicative one, so the test reduces to all
/// eigenvalues of the whitened ratio lying in `[1−ε, 1+ε]`.
pub fn psd_sandwich_margins<T: Scalar>(
    reference: ArrayView2<T>,
    approx: ArrayView2<T>,
    eps: T,
    delta: T,
) -> Result<SandwichMargins<T>> {
    ensure_symmetric(reference)?;
    ensure_symmetric(approx)?;
    if reference.dim() != approx.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.nrows(),
            got: approx.nrows(),
        });
    }
    if !(eps > T::zero()) || !(delta > T::zero()) || !eps.is_finite() || !delta.is_finite() {
        return Err(invalid(format!(
            "ridge lambda = delta/eps must be positive (eps = {eps}, delta = {delta})"
        )));
    }
    let lambda = delta / eps;
    let d = reference.nrows();
    let shift = Array2::<T>::eye(d) * lambda;
    let whiten = inv_sqrt_spd((&reference + &shift).view())?;
    let mut ratio = whiten.dot(&(&approx + &shift)).dot(&whiten);
    symmetrize(&mut ratio);
    let vals = sym_eigenvalues(ratio.view())?;
    let min_eig = vals[0];
    let max_eig = vals[d - 1];
    let tol = SandwichMargins::tolerance(eps);
    let passed = min_eig >= T::one() - eps - tol && max_eig <= T::one() + eps + tol;
    Ok(SandwichMargins {
        min_eig,
        max_eig,
        lambda,
        passed,
    })
}
