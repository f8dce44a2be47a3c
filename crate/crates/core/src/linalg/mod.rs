//! Dense symmetric matrix bookkeeping.
//!
//! Everything here works on small dense `d × d` matrices (`d` in the tens), so
//! the factorizations are plain textbook routines written generically over
//! [`Scalar`]: Cholesky, SPD inversion through Cholesky, and a cyclic Jacobi
//! eigensolver for symmetric matrices.

mod psd;
mod sandwich;

pub use psd::{PdInverse, PsdState, RankOneUpdate};
pub use sandwich::{psd_sandwich_margins, SandwichMargins};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Checks length and finiteness of a vector against an expected dimension.
pub(crate) fn check_vector<T: Scalar>(v: &[T], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Like [`check_vector`], but reports the offending row's stream index.
pub(crate) fn check_row<T: Scalar>(row: &[T], dim: usize, index: usize) -> Result<()> {
    if row.len() != dim {
        return Err(Error::RowDimension {
            index,
            expected: dim,
            got: row.len(),
        });
    }
    if row.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteRow { index });
    }
    Ok(())
}

/// `m += scale · v vᵀ`, touching both triangles with the same products so the
/// result stays exactly symmetric.
pub fn add_outer<T: Scalar>(m: &mut Array2<T>, v: ArrayView1<T>, scale: T) {
    let d = v.len();
    for i in 0..d {
        let si = scale * v[i];
        for j in i..d {
            let x = si * v[j];
            m[[i, j]] = m[[i, j]] + x;
            if i != j {
                m[[j, i]] = m[[j, i]] + x;
            }
        }
    }
}

/// Gram matrix `Σ rᵢ rᵢᵀ` of a set of rows.
pub fn gram<T, R>(dim: usize, rows: impl IntoIterator<Item = R>) -> Result<Array2<T>>
where
    T: Scalar,
    R: AsRef<[T]>,
{
    let mut g = Array2::zeros((dim, dim));
    for row in rows {
        let row = row.as_ref();
        check_vector(row, dim)?;
        add_outer(&mut g, ArrayView1::from(row), T::one());
    }
    Ok(g)
}

/// Largest absolute entry.
pub fn max_abs<T: Scalar>(m: ArrayView2<T>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

/// Largest `|m_ij − m_ji|`.
pub fn max_asymmetry<T: Scalar>(m: ArrayView2<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[[i, j]] - m[[j, i]]).abs());
        }
    }
    worst
}

/// Replaces `m` by `(m + mᵀ)/2`.
pub fn symmetrize<T: Scalar>(m: &mut Array2<T>) {
    let n = m.nrows();
    let half = T::lit(0.5);
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (m[[i, j]] + m[[j, i]]) * half;
            m[[i, j]] = avg;
            m[[j, i]] = avg;
        }
    }
}

pub(crate) fn ensure_symmetric<T: Scalar>(m: ArrayView2<T>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let asym = max_asymmetry(m);
    if asym > T::roundoff_tol() * (T::one() + max_abs(m)) {
        return Err(Error::NotSymmetric(asym.as_f64()));
    }
    Ok(())
}

/// Lower-triangular Cholesky factor `L` with `m = L Lᵀ`.
pub fn cholesky<T: Scalar>(m: ArrayView2<T>) -> Result<Array2<T>> {
    let n = m.nrows();
    let mut l = Array2::<T>::zeros((n, n));
    for j in 0..n {
        let mut diag = m[[j, j]];
        for k in 0..j {
            diag = diag - l[[j, k]] * l[[j, k]];
        }
        if !(diag > T::zero()) {
            return Err(Error::NotPositiveDefinite);
        }
        let ljj = diag.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..n {
            let mut s = m[[i, j]];
            for k in 0..j {
                s = s - l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }
    Ok(l)
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse<T: Scalar>(m: ArrayView2<T>) -> Result<Array2<T>> {
    let n = m.nrows();
    let l = cholesky(m)?;
    // L⁻¹ by forward substitution, then m⁻¹ = L⁻ᵀ L⁻¹.
    let mut linv = Array2::<T>::zeros((n, n));
    for c in 0..n {
        linv[[c, c]] = T::one() / l[[c, c]];
        for i in (c + 1)..n {
            let mut s = T::zero();
            for k in c..i {
                s = s + l[[i, k]] * linv[[k, c]];
            }
            linv[[i, c]] = -s / l[[i, i]];
        }
    }
    let mut inv = linv.t().dot(&linv);
    symmetrize(&mut inv);
    Ok(inv)
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    /// Ascending eigenvalues.
    pub values: Array1<T>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: Array2<T>,
}

const MAX_JACOBI_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for symmetric matrices.
pub fn sym_eigen<T: Scalar>(m: ArrayView2<T>) -> Result<SymEigen<T>> {
    ensure_symmetric(m)?;
    let n = m.nrows();
    let mut a = m.to_owned();
    symmetrize(&mut a);
    let mut v = Array2::<T>::eye(n);
    let scale = max_abs(a.view());
    let two = T::lit(2.0);

    if scale > T::zero() {
        let target = T::epsilon() * T::epsilon() * scale * scale;
        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut off = T::zero();
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off + a[[i, j]] * a[[i, j]];
                }
            }
            if off <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[[p, q]];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[[q, q]] - a[[p, p]]) / (two * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[[k, p]];
                        let akq = a[[k, q]];
                        a[[k, p]] = c * akp - s * akq;
                        a[[k, q]] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[[p, k]];
                        let aqk = a[[q, k]];
                        a[[p, k]] = c * apk - s * aqk;
                        a[[q, k]] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[[k, p]];
                        let vkq = v[[k, q]];
                        v[[k, p]] = c * vkp - s * vkq;
                        v[[k, q]] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        a[[x, x]]
            .partial_cmp(&a[[y, y]])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = Array1::from_iter(order.iter().map(|&k| a[[k, k]]));
    let vectors = v.select(Axis(1), &order);
    Ok(SymEigen { values, vectors })
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues<T: Scalar>(m: ArrayView2<T>) -> Result<Array1<T>> {
    Ok(sym_eigen(m)?.values)
}

/// `‖A‖₂²`, the top eigenvalue of a Gram matrix (0 for an empty Gram).
pub fn spectral_norm_sq<T: Scalar>(gram: ArrayView2<T>) -> Result<T> {
    let vals = sym_eigenvalues(gram)?;
    Ok(vals.iter().fold(T::zero(), |acc, &x| acc.max(x)))
}

/// `m^{-1/2}` for a symmetric positive definite `m`.
pub fn inv_sqrt_spd<T: Scalar>(m: ArrayView2<T>) -> Result<Array2<T>> {
    let eig = sym_eigen(m)?;
    if eig.values.iter().any(|&x| !(x > T::zero())) {
        return Err(Error::NotPositiveDefinite);
    }
    let n = m.nrows();
    let mut scaled = eig.vectors.clone();
    for k in 0..n {
        let f = T::one() / eig.values[k].sqrt();
        scaled.column_mut(k).mapv_inplace(|x| x * f);
    }
    let mut out = scaled.dot(&eig.vectors.t());
    symmetrize(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    #[test]
    fn cholesky_of_known_matrix() {
        let m = array![[4.0, 2.0], [2.0, 3.0]];
        let l = cholesky(m.view()).unwrap();
        assert_relative_eq!(l[[0, 0]], 2.0);
        assert_relative_eq!(l[[1, 0]], 1.0);
        assert_relative_eq!(l[[1, 1]], 2.0f64.sqrt());
        assert_eq!(l[[0, 1]], 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(matches!(
            cholesky(m.view()),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn spd_inverse_2x2() {
        let m = array![[2.5f64, 1.0], [1.0, 1.5]];
        let inv = spd_inverse(m.view()).unwrap();
        let id = m.dot(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[[i, j]] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn eigen_of_diagonal_is_sorted() {
        let m = array![[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]];
        let vals = sym_eigenvalues(m.view()).unwrap();
        assert_eq!(vals.to_vec(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn eigen_reconstructs() {
        let m = array![[2.0f64, -1.0, 0.5], [-1.0, 2.0, -1.0], [0.5, -1.0, 2.0]];
        let e = sym_eigen(m.view()).unwrap();
        let d = Array2::from_diag(&e.values);
        let back = e.vectors.dot(&d).dot(&e.vectors.t());
        for (x, y) in back.iter().zip(m.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_rejects_asymmetric() {
        let m = array![[1.0, 2.0], [0.0, 1.0]];
        assert!(matches!(sym_eigen(m.view()), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn inv_sqrt_squares_to_inverse() {
        let m = array![[4.0f32, 1.0], [1.0, 3.0]];
        let w = inv_sqrt_spd(m.view()).unwrap();
        let prod = w.dot(&m).dot(&w);
        assert!((prod[[0, 0]] - 1.0).abs() < 1e-5);
        assert!(prod[[0, 1]].abs() < 1e-5);
        assert!((prod[[1, 1]] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn gram_checks_row_dims() {
        let rows = vec![vec![1.0, 0.0], vec![1.0]];
        assert!(gram::<f64, _>(2, &rows).is_err());
    }
}
