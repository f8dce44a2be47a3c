use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use super::{add_outer, check_vector, spd_inverse, sym_eigenvalues, symmetrize};
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// A signed rank-one modification `X ← X + scale · u uᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneUpdate<T> {
    pub u: Array1<T>,
    pub scale: T,
}

impl<T: Scalar> RankOneUpdate<T> {
    pub fn new(u: impl Into<Array1<T>>, scale: T) -> Self {
        Self { u: u.into(), scale }
    }

    /// Sherman–Morrison denominator `1 + scale · uᵀ X⁻¹ u`. The update keeps
    /// `X` positive definite iff this is positive.
    pub fn denominator(&self, target: &PdInverse<T>) -> T {
        T::one() + self.scale * target.quadratic_raw(self.u.view())
    }

    pub fn apply_to(&self, target: &mut PdInverse<T>) -> Result<()> {
        target.update(self.u.view(), self.scale)
    }
}

/// A positive definite matrix together with its maintained inverse.
///
/// Signed rank-one updates go through Sherman–Morrison in `O(d²)`; every `4d`
/// updates the inverse is recomputed from the explicit matrix to cap drift.
#[derive(Debug, Clone)]
pub struct PdInverse<T> {
    matrix: Array2<T>,
    inv: Array2<T>,
    since_refresh: usize,
    refresh_every: usize,
}

impl<T: Scalar> PdInverse<T> {
    pub fn new(matrix: Array2<T>) -> Result<Self> {
        super::ensure_symmetric(matrix.view())?;
        let inv = spd_inverse(matrix.view())?;
        let refresh_every = 4 * matrix.nrows().max(1);
        Ok(Self {
            matrix,
            inv,
            since_refresh: 0,
            refresh_every,
        })
    }

    /// `s · I` for `s > 0`.
    pub fn scaled_identity(dim: usize, s: T) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if !(s > T::zero()) || !s.is_finite() {
            return Err(invalid("identity scale must be positive and finite"));
        }
        Ok(Self {
            matrix: Array2::eye(dim) * s,
            inv: Array2::eye(dim) / s,
            since_refresh: 0,
            refresh_every: 4 * dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> ArrayView2<'_, T> {
        self.matrix.view()
    }

    pub fn inverse(&self) -> ArrayView2<'_, T> {
        self.inv.view()
    }

    pub(crate) fn quadratic_raw(&self, v: ArrayView1<T>) -> T {
        v.dot(&self.inv.dot(&v))
    }

    /// `vᵀ X⁻¹ v`, with roundoff negatives clamped to zero.
    pub fn quadratic(&self, v: &[T]) -> Result<T> {
        check_vector(v, self.dim())?;
        Ok(self.quadratic_raw(ArrayView1::from(v)).max(T::zero()))
    }

    /// `X ← X + scale · u uᵀ`. Fails without modifying anything if the result
    /// would not be positive definite.
    pub fn update(&mut self, u: ArrayView1<T>, scale: T) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        if !scale.is_finite() || u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if scale == T::zero() {
            return Ok(());
        }
        let xu = self.inv.dot(&u);
        let q = u.dot(&xu);
        let denom = T::one() + scale * q;
        if !(denom > T::zero()) {
            return Err(Error::IndefiniteUpdate(denom.as_f64()));
        }
        add_outer(&mut self.inv, xu.view(), -scale / denom);
        symmetrize(&mut self.inv);
        add_outer(&mut self.matrix, u, scale);

        self.since_refresh += 1;
        if self.since_refresh >= self.refresh_every {
            self.refresh()?;
        }
        Ok(())
    }

    /// Recomputes the inverse from the explicit matrix.
    pub fn refresh(&mut self) -> Result<()> {
        self.inv = spd_inverse(self.matrix.view())?;
        self.since_refresh = 0;
        Ok(())
    }

    /// `‖X⁻¹·X − I‖_F / √d` for the maintained inverse.
    pub fn inverse_residual(&self) -> T {
        let d = self.dim();
        let mut prod = self.inv.dot(&self.matrix);
        for i in 0..d {
            prod[[i, i]] = prod[[i, i]] - T::one();
        }
        let fro = prod.iter().map(|&x| x * x).sum::<T>().sqrt();
        fro / T::lit(d as f64).sqrt()
    }

    /// Smallest eigenvalue of the explicit matrix.
    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(sym_eigenvalues(self.matrix.view())?[0])
    }
}

/// Running Gram matrix `Σ s·a aᵀ` of absorbed rows together with the
/// maintained inverse of `gram + λI`.
#[derive(Debug, Clone)]
pub struct PsdState<T> {
    lambda: T,
    gram: Array2<T>,
    regularized: PdInverse<T>,
    count: usize,
}

impl<T: Scalar> PsdState<T> {
    pub fn new(dim: usize, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(invalid(format!(
                "ridge lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            lambda,
            gram: Array2::zeros((dim, dim)),
            regularized: PdInverse::scaled_identity(dim, lambda)?,
            count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Number of absorbed rows, including zero-weight ones.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn gram(&self) -> ArrayView2<'_, T> {
        self.gram.view()
    }

    /// The maintained `(gram + λI)⁻¹`.
    pub fn inverse(&self) -> ArrayView2<'_, T> {
        self.regularized.inverse()
    }

    /// `vᵀ (gram + λI)⁻¹ v` from the maintained inverse.
    pub fn ridge_quadratic(&self, v: &[T]) -> Result<T> {
        self.regularized.quadratic(v)
    }

    /// `gram += scale · v vᵀ`, updating the inverse by Sherman–Morrison.
    pub fn absorb_row(&mut self, v: &[T], scale: T) -> Result<()> {
        check_vector(v, self.dim())?;
        if !(scale >= T::zero()) || !scale.is_finite() {
            return Err(invalid(format!(
                "absorb scale must be finite and >= 0, got {scale}"
            )));
        }
        self.count += 1;
        if scale == T::zero() {
            return Ok(());
        }
        let view = ArrayView1::from(v);
        self.regularized.update(view, scale)?;
        add_outer(&mut self.gram, view, scale);
        Ok(())
    }

    /// Factor `det(gram + λI + s·vvᵀ) / det(gram + λI) = 1 + s·vᵀ(gram + λI)⁻¹v`.
    pub fn det_ratio_after(&self, v: &[T], scale: T) -> Result<T> {
        if !scale.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(T::one() + scale * self.ridge_quadratic(v)?)
    }

    /// See [`PdInverse::inverse_residual`].
    pub fn inverse_residual(&self) -> T {
        self.regularized.inverse_residual()
    }

    /// Relative Frobenius distance between the maintained inverse and a fresh
    /// inversion of `gram + λI`.
    pub fn inverse_drift(&self) -> Result<T> {
        let fresh = spd_inverse(self.regularized.matrix())?;
        let diff = (&fresh - &self.regularized.inverse())
            .iter()
            .map(|&x| x * x)
            .sum::<T>()
            .sqrt();
        let norm = fresh.iter().map(|&x| x * x).sum::<T>().sqrt();
        Ok(diff / norm)
    }
}
